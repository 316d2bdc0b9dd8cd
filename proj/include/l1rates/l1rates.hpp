#pragma once

#include "l1rates/analytic.hpp"
#include "l1rates/error.hpp"
#include "l1rates/harness.hpp"
#include "l1rates/noise.hpp"
#include "l1rates/operators.hpp"
#include "l1rates/random.hpp"
#include "l1rates/solver.hpp"
#include "l1rates/spectral.hpp"
