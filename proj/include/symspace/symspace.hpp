#pragma once

// Everything: step functions, symmetric norms, the Hardy-type operator, kernel
// and box-field machinery, torus operators and the verification suites.

#include "symspace/box_field.hpp"
#include "symspace/error.hpp"
#include "symspace/euclid_kernel.hpp"
#include "symspace/fft.hpp"
#include "symspace/fnspec.hpp"
#include "symspace/hardy.hpp"
#include "symspace/parallel.hpp"
#include "symspace/profiles.hpp"
#include "symspace/quadrature.hpp"
#include "symspace/random.hpp"
#include "symspace/spaces.hpp"
#include "symspace/stepfn.hpp"
#include "symspace/suites.hpp"
#include "symspace/torus.hpp"
#include "symspace/weights.hpp"
