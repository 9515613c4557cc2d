#pragma once

#include <random>

#include "folab/polyalg.hpp"

namespace folab::testgen {

// Small Gaussian-rational coefficients keep exact arithmetic fast in property loops.
inline ExactComplex random_scalar(std::mt19937_64& rng, bool allow_complex = true) {
  std::uniform_int_distribution<long> num(-5, 5), den(1, 4);
  ExactComplex re = ExactComplex::fraction(num(rng), den(rng));
  if (!allow_complex) return re;
  std::bernoulli_distribution use_im(0.3);
  if (!use_im(rng)) return re;
  return re + ExactComplex::fraction(num(rng), den(rng)) * ExactComplex::i();
}

inline ExactComplex random_nonzero_scalar(std::mt19937_64& rng, bool allow_complex = true) {
  ExactComplex c;
  while (c.is_zero()) c = random_scalar(rng, allow_complex);
  return c;
}

inline Poly2 random_poly(std::mt19937_64& rng, int max_degree, int max_terms,
                         bool allow_complex = true) {
  std::uniform_int_distribution<int> deg(0, max_degree), terms(1, max_terms);
  Poly2 p;
  int n = terms(rng);
  for (int k = 0; k < n; ++k) {
    int d = deg(rng);
    std::uniform_int_distribution<int> split(0, d);
    int i = split(rng);
    p.add_term({i, d - i}, random_scalar(rng, allow_complex));
  }
  return p;
}

inline Poly2 random_nonzero_poly(std::mt19937_64& rng, int max_degree, int max_terms,
                                 bool allow_complex = true) {
  Poly2 p;
  while (p.is_zero()) p = random_poly(rng, max_degree, max_terms, allow_complex);
  return p;
}

/// Dense polynomial of exactly the given total degree.
inline Poly2 random_dense_poly(std::mt19937_64& rng, int degree, bool allow_complex = false) {
  Poly2 p;
  for (int d = 0; d <= degree; ++d)
    for (int i = 0; i <= d; ++i) p.add_term({i, d - i}, random_nonzero_scalar(rng, allow_complex));
  return p;
}

}  // namespace folab::testgen
