#include "superproj/geometry.hpp"

#include <map>

namespace superproj {

IndexParities coordinate_parities(const Dimension& dim) {
  IndexParities p;
  for (unsigned i = 0; i < dim.size(); ++i) p.push_back(dim.parity(i));
  return p;
}

int super_dimension(const IndexParities& parities) {
  int n0 = 0;
  for (Parity p : parities) n0 += p == Parity::even ? 1 : -1;
  return n0;
}

SuperMatrix::SuperMatrix(IndexParities parities, Dimension function_dim)
    : parities_(std::move(parities)), fdim_(function_dim),
      entries_(parities_.size() * parities_.size(), SuperFunction(function_dim)) {}

SuperMatrix SuperMatrix::identity(IndexParities parities, Dimension function_dim) {
  SuperMatrix m(std::move(parities), function_dim);
  for (unsigned i = 0; i < m.size(); ++i) m(i, i) = SuperFunction(function_dim, 1);
  return m;
}

bool SuperMatrix::is_even() const {
  for (unsigned r = 0; r < size(); ++r)
    for (unsigned c = 0; c < size(); ++c)
      if (!(*this)(r, c).has_parity(parities_[r] + parities_[c])) return false;
  return true;
}

SuperMatrix operator*(const SuperMatrix& a, const SuperMatrix& b) {
  if (a.parities_ != b.parities_) throw Error(ErrorKind::DimensionMismatch, "supermatrix shapes differ");
  SuperMatrix r(a.parities_, a.fdim_);
  for (unsigned i = 0; i < a.size(); ++i)
    for (unsigned k = 0; k < a.size(); ++k) {
      if (a(i, k).is_zero()) continue;
      for (unsigned j = 0; j < a.size(); ++j) r(i, j) += a(i, k) * b(k, j);
    }
  return r;
}

SuperMatrix operator-(const SuperMatrix& a, const SuperMatrix& b) {
  if (a.parities_ != b.parities_) throw Error(ErrorKind::DimensionMismatch, "supermatrix shapes differ");
  SuperMatrix r = a;
  for (std::size_t t = 0; t < r.entries_.size(); ++t) r.entries_[t] -= b.entries_[t];
  return r;
}

SuperMatrix SuperMatrix::inverse() const {
  const unsigned n = size();
  SuperMatrix work = *this;
  SuperMatrix inv = identity(parities_, fdim_);
  auto swap_rows = [n](SuperMatrix& m, unsigned r1, unsigned r2) {
    for (unsigned c = 0; c < n; ++c) std::swap(m(r1, c), m(r2, c));
  };
  for (unsigned c = 0; c < n; ++c) {
    // Only rows of the column's parity hold even entries in this column.
    unsigned pivot = n;
    for (unsigned r = c; r < n; ++r) {
      if (parities_[r] == parities_[c] && !work(r, c).body().is_zero()) {
        pivot = r;
        break;
      }
    }
    if (pivot == n) throw Error(ErrorKind::NotInvertible, "supermatrix has a singular body");
    swap_rows(work, c, pivot);
    swap_rows(inv, c, pivot);
    const SuperFunction scale = work(c, c).inverse();
    for (unsigned k = 0; k < n; ++k) {
      work(c, k) = scale * work(c, k);
      inv(c, k) = scale * inv(c, k);
    }
    for (unsigned r = 0; r < n; ++r) {
      if (r == c || work(r, c).is_zero()) continue;
      const SuperFunction factor = work(r, c);
      for (unsigned k = 0; k < n; ++k) {
        work(r, k) -= factor * work(c, k);
        inv(r, k) -= factor * inv(c, k);
      }
    }
  }
  return inv;
}

namespace {

using Grid = std::vector<std::vector<SuperFunction>>;

// Laplace expansion over column subsets; entries commute because they are even.
SuperFunction determinant(const Grid& g, const Dimension& fdim) {
  const unsigned n = static_cast<unsigned>(g.size());
  if (n == 0) return SuperFunction(fdim, 1);
  // minors[mask] = det of rows (n - popcount(mask))..n-1 restricted to columns in mask
  std::map<unsigned, SuperFunction> minors;
  minors.emplace(0u, SuperFunction(fdim, 1));
  for (unsigned size = 1; size <= n; ++size) {
    const unsigned row = n - size;
    std::map<unsigned, SuperFunction> next;
    for (const auto& [mask, minor] : minors) {
      if (minor.is_zero()) continue;
      for (unsigned c = 0; c < n; ++c) {
        if (mask >> c & 1u) continue;
        if (g[row][c].is_zero()) continue;
        // sign from the position of c among the chosen columns
        unsigned before = static_cast<unsigned>(__builtin_popcount(mask & ((1u << c) - 1u)));
        SuperFunction term = g[row][c] * minor;
        if (before % 2) term = -term;
        auto [it, inserted] = next.emplace(mask | (1u << c), term);
        if (!inserted) it->second += term;
      }
    }
    minors = std::move(next);
  }
  auto it = minors.find((1u << n) - 1u);
  return it == minors.end() ? SuperFunction(fdim) : it->second;
}

}  // namespace

SuperFunction even_determinant(const SuperMatrix& m) {
  Grid g(m.size(), std::vector<SuperFunction>(m.size()));
  for (unsigned r = 0; r < m.size(); ++r)
    for (unsigned c = 0; c < m.size(); ++c) {
      if (!m(r, c).has_parity(Parity::even)) throw Error(ErrorKind::WrongParity, "determinant needs even entries");
      g[r][c] = m(r, c);
    }
  return determinant(g, m.function_dimension());
}

SuperFunction berezinian(const SuperMatrix& m) {
  if (!m.is_even()) throw Error(ErrorKind::WrongParity, "Berezinian of a non-even supermatrix");
  std::vector<unsigned> ev, od;
  for (unsigned i = 0; i < m.size(); ++i) (m.parities()[i] == Parity::even ? ev : od).push_back(i);
  const Dimension& fd = m.function_dimension();

  SuperMatrix d(IndexParities(od.size(), Parity::odd), fd);
  for (unsigned r = 0; r < od.size(); ++r)
    for (unsigned c = 0; c < od.size(); ++c) d(r, c) = m(od[r], od[c]);
  const SuperMatrix d_inv = d.inverse();

  SuperMatrix x(IndexParities(ev.size(), Parity::even), fd);
  for (unsigned r = 0; r < ev.size(); ++r)
    for (unsigned c = 0; c < ev.size(); ++c) {
      SuperFunction v = m(ev[r], ev[c]);
      for (unsigned p = 0; p < od.size(); ++p) {
        if (m(ev[r], od[p]).is_zero()) continue;
        for (unsigned q = 0; q < od.size(); ++q) v -= m(ev[r], od[p]) * d_inv(p, q) * m(od[q], ev[c]);
      }
      x(r, c) = v;
    }
  return even_determinant(x) * even_determinant(d).inverse();
}

}  // namespace superproj
