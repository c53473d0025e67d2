#pragma once

// umbrella header

#include "smp/characteristic.hpp"
#include "smp/counterexample.hpp"
#include "smp/eigen.hpp"
#include "smp/errors.hpp"
#include "smp/monotonicity.hpp"
#include "smp/quadrature.hpp"
#include "smp/radial.hpp"
#include "smp/rng.hpp"
#include "smp/scalar_fn.hpp"
#include "smp/subequation.hpp"
#include "smp/sym_matrix.hpp"
