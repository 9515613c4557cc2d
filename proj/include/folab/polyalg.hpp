#pragma once

// Exact Gaussian-rational algebra: scalars, sparse bivariate and dense univariate
// polynomials, gcd and resultants, residues, root finding and the expression parser.

#include "folab/polyalg/exact_complex.hpp"
#include "folab/polyalg/gcd.hpp"
#include "folab/polyalg/linalg.hpp"
#include "folab/polyalg/parse.hpp"
#include "folab/polyalg/poly1.hpp"
#include "folab/polyalg/poly2.hpp"
#include "folab/polyalg/rational_function.hpp"
#include "folab/polyalg/roots.hpp"
