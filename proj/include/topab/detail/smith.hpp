#pragma once

// Smith normal form over small integer matrices, and the structure computation
// that turns an abstract finite abelian group (an element set with an addition
// table) into its invariant-factor decomposition with explicit coordinates.

#include <cstdint>
#include <cstdlib>
#include <deque>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace topab::detail {

using Int = std::int64_t;
using Index = std::uint32_t;
inline constexpr Index npos = std::numeric_limits<Index>::max();

inline Int checked_mul(Int a, Int b) {
  Int out;
  if (__builtin_mul_overflow(a, b, &out)) throw std::overflow_error("integer overflow in structure computation");
  return out;
}

inline Int checked_add(Int a, Int b) {
  Int out;
  if (__builtin_add_overflow(a, b, &out)) throw std::overflow_error("integer overflow in structure computation");
  return out;
}

inline Int floor_div(Int a, Int b) {
  Int q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

inline Int mod(Int a, Int m) {
  Int r = a % m;
  return r < 0 ? r + m : r;
}

// x*a + y*b = g = gcd(a, b) >= 0
struct Bezout {
  Int g, x, y;
};

inline Bezout ext_gcd(Int a, Int b) {
  Int old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
  while (r != 0) {
    Int q = old_r / r;
    Int tmp = old_r - q * r; old_r = r; r = tmp;
    tmp = old_s - q * s; old_s = s; s = tmp;
    tmp = old_t - q * t; old_t = t; t = tmp;
  }
  if (old_r < 0) return {-old_r, -old_s, -old_t};
  return {old_r, old_s, old_t};
}

using Row = std::vector<Int>;
using Matrix = std::vector<Row>;

// Row-echelon lattice basis with one slot per pivot column. Rows are kept
// reduced to the right of their pivot against later pivots.
class LatticeBasis {
 public:
  explicit LatticeBasis(std::size_t rank) : rows_(rank) {}

  void insert(Row v) {
    const std::size_t r = rows_.size();
    for (std::size_t j = 0; j < r; ++j) {
      if (v[j] == 0) continue;
      if (rows_[j].empty()) {
        if (v[j] < 0) negate(v);
        rows_[j] = std::move(v);
        reduce_all();
        return;
      }
      Row& b = rows_[j];
      const Bezout bz = ext_gcd(b[j], v[j]);
      const Int p = b[j] / bz.g;
      const Int q = v[j] / bz.g;
      Row nb(r), nv(r);
      for (std::size_t k = 0; k < r; ++k) {
        nb[k] = checked_add(checked_mul(bz.x, b[k]), checked_mul(bz.y, v[k]));
        nv[k] = checked_add(checked_mul(-q, b[k]), checked_mul(p, v[k]));
      }
      if (nb[j] < 0) negate(nb);
      b = std::move(nb);
      v = std::move(nv);
      reduce_all();
      reduce_vector(v, j + 1);
    }
  }

  bool full_rank() const {
    for (const auto& row : rows_)
      if (row.empty()) return false;
    return true;
  }

  Matrix matrix() const { return Matrix(rows_.begin(), rows_.end()); }

 private:
  static void negate(Row& v) {
    for (auto& x : v) x = -x;
  }

  void reduce_vector(Row& v, std::size_t from) const {
    for (std::size_t k = from; k < rows_.size(); ++k) {
      if (rows_[k].empty() || v[k] == 0) continue;
      const Int f = floor_div(v[k], rows_[k][k]);
      if (f == 0) continue;
      for (std::size_t c = k; c < v.size(); ++c) v[c] = checked_add(v[c], checked_mul(-f, rows_[k][c]));
    }
  }

  void reduce_all() {
    for (std::size_t j = rows_.size(); j-- > 0;) {
      if (rows_[j].empty()) continue;
      reduce_vector(rows_[j], j + 1);
    }
  }

  std::vector<Row> rows_;
};

struct SmithForm {
  Row diagonal;  // non-negative, each divides the next
  Matrix v;      // column transform: relations * v spans diag(diagonal)
  Matrix v_inv;
};

// Square matrix only; rows may be recombined freely (untracked), column
// operations are tracked in v and v_inv.
inline SmithForm smith_normal_form(Matrix m) {
  const std::size_t n = m.size();
  SmithForm out;
  out.v.assign(n, Row(n, 0));
  out.v_inv.assign(n, Row(n, 0));
  for (std::size_t i = 0; i < n; ++i) out.v[i][i] = out.v_inv[i][i] = 1;

  auto swap_cols = [&](std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t i = 0; i < n; ++i) {
      std::swap(m[i][a], m[i][b]);
      std::swap(out.v[i][a], out.v[i][b]);
    }
    std::swap(out.v_inv[a], out.v_inv[b]);
  };
  // col_j -= q * col_t
  auto col_axpy = [&](std::size_t j, std::size_t t, Int q) {
    if (q == 0) return;
    for (std::size_t i = 0; i < n; ++i) {
      m[i][j] = checked_add(m[i][j], checked_mul(-q, m[i][t]));
      out.v[i][j] = checked_add(out.v[i][j], checked_mul(-q, out.v[i][t]));
    }
    for (std::size_t k = 0; k < n; ++k)
      out.v_inv[t][k] = checked_add(out.v_inv[t][k], checked_mul(q, out.v_inv[j][k]));
  };
  auto row_axpy = [&](std::size_t i, std::size_t t, Int q) {
    if (q == 0) return;
    for (std::size_t k = 0; k < n; ++k) m[i][k] = checked_add(m[i][k], checked_mul(-q, m[t][k]));
  };

  for (std::size_t t = 0; t < n; ++t) {
    for (;;) {
      std::size_t pi = n, pj = n;
      Int best = 0;
      for (std::size_t i = t; i < n; ++i)
        for (std::size_t j = t; j < n; ++j)
          if (m[i][j] != 0 && (best == 0 || std::llabs(m[i][j]) < best)) {
            best = std::llabs(m[i][j]);
            pi = i;
            pj = j;
          }
      if (best == 0) break;
      std::swap(m[t], m[pi]);
      swap_cols(t, pj);

      bool clean = true;
      for (std::size_t i = t + 1; i < n; ++i) {
        row_axpy(i, t, m[i][t] / m[t][t]);
        if (m[i][t] != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < n; ++j) {
        col_axpy(j, t, m[t][j] / m[t][t]);
        if (m[t][j] != 0) clean = false;
      }
      if (!clean) continue;

      bool divides = true;
      for (std::size_t i = t + 1; i < n && divides; ++i)
        for (std::size_t j = t + 1; j < n; ++j)
          if (m[i][j] % m[t][t] != 0) {
            for (std::size_t k = 0; k < n; ++k) m[t][k] = checked_add(m[t][k], m[i][k]);
            divides = false;
            break;
          }
      if (divides) break;
    }
    if (m[t][t] < 0)
      for (std::size_t k = 0; k < n; ++k) m[t][k] = -m[t][k];
  }
  out.diagonal.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.diagonal[i] = m[i][i];
  return out;
}

struct Structure {
  std::vector<Int> invariants;       // canonical moduli, each > 1, ascending by divisibility
  std::vector<Index> canon;          // ambient index -> canonical index (npos if unreached)
  std::vector<Index> lifts;          // ambient representative of each canonical generator
};

inline Index canonical_index(const std::vector<Int>& invariants, const Row& coords) {
  Index idx = 0;
  for (std::size_t i = 0; i < invariants.size(); ++i)
    idx = static_cast<Index>(idx * invariants[i] + mod(coords[i], invariants[i]));
  return idx;
}

// Computes the invariant-factor decomposition of the subgroup generated by
// `gens` inside an ambient group of `n` elements (index 0 is zero), taken
// modulo the equivalence `rep` (rep(x) is the canonical coset
// representative; identity for no quotient).
template <class Add, class Rep>
Structure compute_structure(Index n, Add&& add, Rep&& rep, std::span<const Index> gens) {
  const std::size_t r = gens.size();
  std::vector<Index> node(n, npos);
  std::vector<Row> coords;
  std::deque<Index> queue;

  const Index start = rep(Index{0});
  node[start] = 0;
  coords.push_back(Row(r, 0));
  queue.push_back(start);

  LatticeBasis basis(r);
  // Order relations first keep the lattice full rank, bounding entries.
  for (std::size_t i = 0; i < r; ++i) {
    Index x = rep(gens[i]);
    Int k = 1;
    while (x != start) {
      x = rep(add(x, gens[i]));
      ++k;
    }
    Row rel(r, 0);
    rel[i] = k;
    basis.insert(std::move(rel));
  }

  std::vector<Index> order_of_nodes{start};
  while (!queue.empty()) {
    const Index x = queue.front();
    queue.pop_front();
    const Row cx = coords[node[x]];
    for (std::size_t i = 0; i < r; ++i) {
      const Index y = rep(add(x, gens[i]));
      Row cy = cx;
      cy[i] += 1;
      if (node[y] == npos) {
        node[y] = static_cast<Index>(coords.size());
        coords.push_back(std::move(cy));
        queue.push_back(y);
        order_of_nodes.push_back(y);
      } else {
        const Row& known = coords[node[y]];
        bool zero = true;
        for (std::size_t k = 0; k < r; ++k) {
          cy[k] -= known[k];
          if (cy[k] != 0) zero = false;
        }
        if (!zero) basis.insert(std::move(cy));
      }
    }
  }

  Structure out;
  if (r == 0) {
    out.canon.assign(n, npos);
    for (Index x = 0; x < n; ++x)
      if (node[rep(x)] != npos) out.canon[x] = 0;
    return out;
  }
  if (!basis.full_rank()) throw std::logic_error("relation lattice is not full rank");

  const SmithForm snf = smith_normal_form(basis.matrix());
  Int product = 1;
  for (Int d : snf.diagonal) product = checked_mul(product, d);
  if (product != static_cast<Int>(coords.size()))
    throw std::logic_error("structure computation: order mismatch");

  std::vector<std::size_t> kept;
  for (std::size_t t = 0; t < r; ++t)
    if (snf.diagonal[t] > 1) {
      kept.push_back(t);
      out.invariants.push_back(snf.diagonal[t]);
    }

  std::vector<Index> node_canon(coords.size());
  for (std::size_t id = 0; id < coords.size(); ++id) {
    Row y(kept.size(), 0);
    for (std::size_t c = 0; c < kept.size(); ++c) {
      Int acc = 0;
      for (std::size_t j = 0; j < r; ++j)
        acc = mod(checked_add(acc, checked_mul(coords[id][j], mod(snf.v[j][kept[c]], out.invariants[c]))),
                  out.invariants[c]);
      y[c] = acc;
    }
    node_canon[id] = canonical_index(out.invariants, y);
  }
  out.canon.assign(n, npos);
  for (Index x = 0; x < n; ++x) {
    const Index id = node[rep(x)];
    if (id != npos) out.canon[x] = node_canon[id];
  }

  // Order of each generator bounds the coefficients in the lift.
  std::vector<Int> gen_order(r);
  for (std::size_t i = 0; i < r; ++i) {
    Index x = rep(gens[i]);
    Int k = 1;
    while (x != start) {
      x = rep(add(x, gens[i]));
      ++k;
    }
    gen_order[i] = k;
  }
  for (std::size_t c = 0; c < kept.size(); ++c) {
    Index acc = 0;
    for (std::size_t j = 0; j < r; ++j) {
      const Int k = mod(snf.v_inv[kept[c]][j], gen_order[j]);
      for (Int s = 0; s < k; ++s) acc = add(acc, gens[j]);
    }
    out.lifts.push_back(rep(acc));
  }
  return out;
}

}  // namespace topab::detail
