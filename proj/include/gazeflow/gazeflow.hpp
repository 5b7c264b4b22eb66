#pragma once

#include "gazeflow/core.hpp"
#include "gazeflow/deictic.hpp"
#include "gazeflow/dwell.hpp"
#include "gazeflow/fixation.hpp"
#include "gazeflow/lens.hpp"
#include "gazeflow/map.hpp"
#include "gazeflow/pipeline.hpp"
#include "gazeflow/saccade.hpp"
#include "gazeflow/synth.hpp"
#include "gazeflow/trace.hpp"
#include "gazeflow/wire.hpp"
