#pragma once

// Umbrella header for the Hessian chain bracketing toolkit.

#include "hcb/chain.hpp"    // IWYU pragma: export
#include "hcb/instance.hpp" // IWYU pragma: export
#include "hcb/io.hpp"       // IWYU pragma: export
#include "hcb/plan.hpp"     // IWYU pragma: export
#include "hcb/rng.hpp"      // IWYU pragma: export
#include "hcb/solver.hpp"   // IWYU pragma: export
#include "hcb/tensor.hpp"   // IWYU pragma: export
