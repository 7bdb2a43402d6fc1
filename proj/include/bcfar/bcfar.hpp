#pragma once

// Umbrella header: sliding-window detectors for exponential clutter with
// Bayesian interference compensation, plus the quadrature and Monte-Carlo
// machinery used to cross-check them.

#include "bcfar/detector.hpp"
#include "bcfar/log_sum.hpp"
#include "bcfar/oracle.hpp"
#include "bcfar/quadrature.hpp"
#include "bcfar/rng.hpp"
#include "bcfar/scenario.hpp"
#include "bcfar/sweep.hpp"
