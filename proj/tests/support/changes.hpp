#pragma once

// Random invertible coordinate changes with exact polynomial inverses, built
// from triangular shears and constant rescalings.

#include "superproj/geometry.hpp"
#include "support/random.hpp"

namespace superproj::testing {

inline std::vector<SuperFunction> identity_components(Dimension d) {
  std::vector<SuperFunction> id;
  for (unsigned a = 0; a < d.size(); ++a) id.push_back(SuperFunction::coordinate(d, a));
  return id;
}

/// coordinate a -> a + h with h independent of a.
inline CoordinateChange shear(Generator& gen, Dimension d, unsigned a, unsigned max_degree = 2) {
  std::vector<SuperFunction> drop = identity_components(d);
  drop[a] = SuperFunction(d);
  SuperFunction h = gen.function(d, d.parity(a), max_degree).compose(drop);
  auto fwd = identity_components(d), inv = identity_components(d);
  fwd[a] += h;
  inv[a] -= h;
  return CoordinateChange(d, fwd, inv);
}

/// coordinate a -> c * a.
inline CoordinateChange rescale(Dimension d, unsigned a, const mpq_class& c) {
  auto fwd = identity_components(d), inv = identity_components(d);
  fwd[a] *= c;
  inv[a] *= mpq_class(1) / c;
  return CoordinateChange(d, fwd, inv);
}

inline CoordinateChange random_change(Generator& gen, Dimension d, unsigned steps = 3, unsigned max_degree = 2) {
  CoordinateChange c = rescale(d, static_cast<unsigned>(gen.integer(0, static_cast<int>(d.size()) - 1)),
                               mpq_class(gen.integer(1, 3)));
  for (unsigned s = 0; s < steps; ++s) {
    unsigned a = static_cast<unsigned>(gen.integer(0, static_cast<int>(d.size()) - 1));
    c = c.then(shear(gen, d, a, max_degree));
  }
  return c;
}

inline Sym2CovVec random_sym2(Generator& gen, Dimension d, unsigned max_degree = 1) {
  Sym2CovVec a(d);
  for (unsigned k = 0; k < d.size(); ++k)
    for (unsigned i = 0; i < d.size(); ++i)
      for (unsigned j = i; j < d.size(); ++j) {
        if (i == j && d.is_odd(i)) continue;
        a.set(k, i, j, gen.function(d, d.parity(k) + d.parity(i) + d.parity(j), max_degree, 0.4));
      }
  return a;
}

}  // namespace superproj::testing
