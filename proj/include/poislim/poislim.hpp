#pragma once

// Umbrella header: exact laws of by-row sums of non-stationary triangular
// arrays (Bernoulli / corrected geometric), the CLT-frame functionals that
// govern their Poisson limits, and the numeric machinery to watch the
// convergence happen.

#include "poislim/charfn.hpp"
#include "poislim/conditions.hpp"
#include "poislim/distributions.hpp"
#include "poislim/exact_sum.hpp"
#include "poislim/pmf.hpp"
#include "poislim/rng.hpp"
#include "poislim/schedule.hpp"
#include "poislim/validate.hpp"
