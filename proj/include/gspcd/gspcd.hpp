#pragma once

// Umbrella header: ground scene prediction and change detection for stacks
// of co-registered SAR amplitude images.

#include "gspcd/cda.hpp"
#include "gspcd/core.hpp"
#include "gspcd/eval.hpp"
#include "gspcd/gsp.hpp"
#include "gspcd/io.hpp"
#include "gspcd/parallel.hpp"
#include "gspcd/stats.hpp"
#include "gspcd/synth.hpp"
