#pragma once

// Umbrella header: one-bit sparse recovery with analytically solvable
// penalties, dual certification, reference oracles, and the benchmark
// harness.

#include "onebit/config.hpp"
#include "onebit/metrics.hpp"
#include "onebit/oracles.hpp"
#include "onebit/penalty.hpp"
#include "onebit/rng.hpp"
#include "onebit/select.hpp"
#include "onebit/signal.hpp"
#include "onebit/solver.hpp"
#include "onebit/sweep.hpp"
