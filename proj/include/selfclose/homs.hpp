// Homomorphisms between groups in canonical form, automorphism testing,
// exact inversion, nilpotency, block matrices of maps and their flattening.
#pragma once
#include <optional>

#include "abgroup.hpp"

namespace selfclose {

// Row i of `m` is the image of the i-th generator of `src` (free generators
// first, then torsion).  Entries in torsion columns are kept reduced.
struct Homomorphism {
  FgAbGroup src, dst;
  Mat m;

  bool operator==(const Homomorphism&) const = default;
  bool is_zero() const { return m.is_zero(); }
};

inline i64 gen_order(const FgAbGroup& g, int i) {
  return i < g.free_rank ? 0 : g.torsion[size_t(i) - g.free_rank];
}

inline Homomorphism make_hom(const FgAbGroup& src, const FgAbGroup& dst, Mat mat) {
  if (mat.rows != src.gens() || mat.cols != dst.gens())
    fail("make_hom: matrix shape does not match generator counts");
  for (int j = 0; j < mat.cols; ++j) {
    i64 e = gen_order(dst, j);
    if (!e) continue;
    for (int i = 0; i < mat.rows; ++i) mat.at(i, j) = mod_floor(mat.at(i, j), e);
  }
  for (int i = 0; i < mat.rows; ++i) {
    i64 d = gen_order(src, i);
    if (!d) continue;
    for (int j = 0; j < mat.cols; ++j) {
      i64 e = gen_order(dst, j);
      if (e == 0) {
        if (mat.at(i, j) != 0)
          fail("make_hom: torsion generator cannot map into the free part");
      } else if (mat.at(i, j) % (e / std::gcd(d, e)) != 0) {
        fail("make_hom: entry not compatible with generator orders");
      }
    }
  }
  return {src, dst, std::move(mat)};
}

inline Homomorphism zero_hom(const FgAbGroup& src, const FgAbGroup& dst) {
  return {src, dst, Mat(src.gens(), dst.gens())};
}

inline Homomorphism identity_hom(const FgAbGroup& g) {
  return {g, g, Mat::identity(g.gens())};
}

// g after f.
inline Homomorphism compose(const Homomorphism& g, const Homomorphism& f) {
  if (f.dst != g.src) fail("compose: middle groups do not match");
  return make_hom(f.src, g.dst, mat_mul(f.m, g.m));
}

inline Homomorphism hom_add(const Homomorphism& f, const Homomorphism& g) {
  if (f.src != g.src || f.dst != g.dst) fail("hom_add: shape mismatch");
  return make_hom(f.src, f.dst, mat_add(f.m, g.m));
}

inline Homomorphism hom_sub(const Homomorphism& f, const Homomorphism& g) {
  if (f.src != g.src || f.dst != g.dst) fail("hom_sub: shape mismatch");
  return make_hom(f.src, f.dst, mat_add(f.m, mat_neg(g.m)));
}

inline Homomorphism hom_neg(const Homomorphism& f) {
  return make_hom(f.src, f.dst, mat_neg(f.m));
}

// -- elements -------------------------------------------------------------

// Elements are coordinate rows; torsion coordinates live in [0, d_i).
inline std::vector<i64> reduce_element(const FgAbGroup& g, std::vector<i64> x) {
  if (int(x.size()) != g.gens()) fail("element: wrong coordinate count");
  for (int i = 0; i < g.gens(); ++i)
    if (i64 d = gen_order(g, i)) x[i] = mod_floor(x[i], d);
  return x;
}

inline std::vector<i64> apply_hom(const Homomorphism& f, const std::vector<i64>& x) {
  if (int(x.size()) != f.src.gens()) fail("apply_hom: wrong coordinate count");
  std::vector<i64> y(f.dst.gens(), 0);
  for (int j = 0; j < f.dst.gens(); ++j) {
    i64 acc = 0;
    for (int i = 0; i < f.src.gens(); ++i)
      acc = add_ck(acc, mul_ck(x[i], f.m.at(i, j)));
    y[j] = acc;
  }
  return reduce_element(f.dst, std::move(y));
}

inline i64 element_order(const FgAbGroup& g, const std::vector<i64>& x) {
  if (!g.is_finite()) fail("element_order: group must be finite");
  i64 ord = 1;
  for (int i = 0; i < g.gens(); ++i) {
    i64 d = gen_order(g, i);
    i64 v = mod_floor(x[i], d);
    if (v) ord = lcm_ck(ord, d / std::gcd(d, v));
  }
  return ord;
}

// All elements of a finite group, or nothing if there are more than `cap`.
inline std::optional<std::vector<std::vector<i64>>> all_elements(const FgAbGroup& g,
                                                                 i64 cap = 1 << 20) {
  if (!g.is_finite()) return std::nullopt;
  i64 n = 1;
  for (i64 d : g.torsion) {
    n = mul_ck(n, d);
    if (n > cap) return std::nullopt;
  }
  std::vector<std::vector<i64>> out;
  out.reserve(size_t(n));
  std::vector<i64> cur(g.torsion.size(), 0);
  for (;;) {
    out.push_back(cur);
    int i = 0;
    while (i < int(cur.size())) {
      if (++cur[i] < g.torsion[i]) break;
      cur[i] = 0;
      ++i;
    }
    if (i == int(cur.size())) break;
    if (cur.empty()) break;
  }
  return out;
}

// -- hom enumeration ------------------------------------------------------

// |Hom(src, dst)| clamped to cap+1; nothing when the group is infinite.
inline std::optional<i64> hom_count_capped(const FgAbGroup& src, const FgAbGroup& dst,
                                           i64 cap) {
  if (src.free_rank > 0 && dst.free_rank > 0) return std::nullopt;
  i64 n = 1;
  auto mul_clamped = [&](i64 f) {
    if (f > cap || n > cap / f) n = cap + 1;
    else n *= f;
  };
  for (int i = 0; i < src.free_rank; ++i)
    for (i64 e : dst.torsion) mul_clamped(e);
  for (i64 d : src.torsion)
    for (i64 e : dst.torsion) mul_clamped(std::gcd(d, e));
  return n;
}

// Every homomorphism src -> dst, or nothing if infinite or more than cap.
inline std::optional<std::vector<Homomorphism>> enumerate_homs(const FgAbGroup& src,
                                                               const FgAbGroup& dst,
                                                               i64 cap) {
  auto count = hom_count_capped(src, dst, cap);
  if (!count || *count > cap) return std::nullopt;
  int nr = src.gens(), nc = dst.gens();
  // Per-cell choice lists; cells not listed are forced to zero.
  struct Cell { int i, j; std::vector<i64> vals; };
  std::vector<Cell> cells;
  for (int i = 0; i < nr; ++i) {
    i64 d = gen_order(src, i);
    for (int j = 0; j < nc; ++j) {
      i64 e = gen_order(dst, j);
      if (!e) continue;  // free column: zero unless source is free, handled above
      std::vector<i64> vals;
      if (d == 0) {
        for (i64 v = 0; v < e; ++v) vals.push_back(v);
      } else {
        i64 g = std::gcd(d, e), step = e / g;
        for (i64 k = 0; k < g; ++k) vals.push_back(k * step);
      }
      if (vals.size() > 1) cells.push_back({i, j, std::move(vals)});
    }
  }
  std::vector<Homomorphism> out;
  out.reserve(size_t(*count));
  std::vector<size_t> idx(cells.size(), 0);
  for (;;) {
    Mat m(nr, nc);
    for (size_t c = 0; c < cells.size(); ++c)
      m.at(cells[c].i, cells[c].j) = cells[c].vals[idx[c]];
    out.push_back(make_hom(src, dst, std::move(m)));
    size_t c = 0;
    while (c < cells.size()) {
      if (++idx[c] < cells[c].vals.size()) break;
      idx[c] = 0;
      ++c;
    }
    if (c == cells.size()) break;
  }
  return out;
}

// -- automorphisms and inversion -------------------------------------------

inline Mat free_block(const Homomorphism& f) {
  int r = f.src.free_rank;
  Mat b(r, f.dst.free_rank);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < f.dst.free_rank; ++j) b.at(i, j) = f.m.at(i, j);
  return b;
}

inline Homomorphism restrict_to_torsion(const Homomorphism& f) {
  FgAbGroup ts{0, f.src.torsion}, td{0, f.dst.torsion};
  int rs = f.src.free_rank, rd = f.dst.free_rank;
  Mat b(ts.gens(), td.gens());
  for (int i = 0; i < ts.gens(); ++i)
    for (int j = 0; j < td.gens(); ++j) b.at(i, j) = f.m.at(rs + i, rd + j);
  return make_hom(ts, td, std::move(b));
}

inline bool is_automorphism(const Homomorphism& f) {
  if (f.src != f.dst) return false;
  Mat fb = free_block(f);
  i64 det = det_bareiss(fb);
  if (det != 1 && det != -1) return false;
  // Torsion part is bijective iff its image plus the relations spans Z^t:
  // stack the torsion block on diag(orders) and ask for an all-ones SNF.
  int t = int(f.src.torsion.size()), r = f.src.free_rank;
  if (t == 0) return true;
  Mat stacked(2 * t, t);
  for (int i = 0; i < t; ++i)
    for (int j = 0; j < t; ++j) stacked.at(i, j) = f.m.at(r + i, r + j);
  for (int i = 0; i < t; ++i) stacked.at(t + i, i) = f.src.torsion[i];
  SmithForm s = smith_normal_form(stacked);
  if (s.rank < t) return false;
  for (int i = 0; i < t; ++i)
    if (s.d.at(i, i) != 1) return false;
  return true;
}

// Exact inverse of an automorphism.  Solves X * [M ; relations] = I over Z
// through the Smith form, reads off the inverse, and checks both composites.
inline Homomorphism invert(const Homomorphism& f) {
  if (f.src != f.dst) fail("invert: not an endomorphism");
  int n = f.src.gens(), r = f.src.free_rank, t = int(f.src.torsion.size());
  Mat aug(n + t, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) aug.at(i, j) = f.m.at(i, j);
  for (int c = 0; c < t; ++c) aug.at(n + c, r + c) = f.src.torsion[c];
  SmithForm s = smith_normal_form(aug);
  if (s.rank < n) fail("invert: homomorphism is not an automorphism");
  for (int i = 0; i < n; ++i)
    if (s.d.at(i, i) != 1) fail("invert: homomorphism is not an automorphism");
  // X = V * (first n rows of U); its left square is the inverse matrix.
  Mat u_top(n, n + t);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n + t; ++j) u_top.at(i, j) = s.u.at(i, j);
  Mat x = mat_mul(s.v, u_top);
  Mat inv(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) inv.at(i, j) = x.at(i, j);
  Homomorphism g = make_hom(f.src, f.src, std::move(inv));
  Homomorphism id = identity_hom(f.src);
  if (compose(f, g) != id || compose(g, f) != id)
    fail("invert: internal check failed");
  return g;
}

// Nilpotency.  Finite source: the composition length bounds the index.
// Infinite source: only maps that kill the free quotient are handled.
inline bool is_nilpotent(const Homomorphism& f) {
  if (f.src != f.dst) fail("is_nilpotent: not an endomorphism");
  if (!f.src.is_finite()) {
    if (!free_block(f).is_zero())
      fail("is_nilpotent: unsupported for endomorphisms acting on a free part");
    return is_nilpotent(restrict_to_torsion(f));
  }
  int bound = f.src.torsion_length();
  Homomorphism g = f;
  for (int k = 1; k < bound && !g.is_zero(); ++k) g = compose(g, f);
  return g.is_zero();
}

// Does f commute with every endomorphism of its group?
inline Tri is_central(const Homomorphism& f, i64 end_cap = 4096) {
  if (f.src != f.dst) fail("is_central: not an endomorphism");
  if (f.src.free_rank == 0 && f.src.torsion.size() <= 1) return Tri::yes;
  if (f.src == FgAbGroup{1, {}}) return Tri::yes;
  auto end = enumerate_homs(f.src, f.src, end_cap);
  if (!end) return Tri::unknown;
  for (const Homomorphism& g : *end)
    if (compose(f, g) != compose(g, f)) return Tri::no;
  return Tri::yes;
}

// -- block matrices of homomorphisms ---------------------------------------

// Endomorphism of G_0 (+) ... (+) G_{m-1} stored blockwise; blocks[i][j]
// carries the G_j -> G_i component.
struct BlockMap {
  std::vector<FgAbGroup> parts;
  std::vector<std::vector<Homomorphism>> blocks;

  explicit BlockMap(std::vector<FgAbGroup> ps) : parts(std::move(ps)) {
    size_t m = parts.size();
    blocks.resize(m);
    for (size_t i = 0; i < m; ++i)
      for (size_t j = 0; j < m; ++j)
        blocks[i].push_back(zero_hom(parts[j], parts[i]));
  }

  size_t size() const { return parts.size(); }

  void set(size_t i, size_t j, Homomorphism h) {
    if (h.src != parts[j] || h.dst != parts[i]) fail("BlockMap::set: shape mismatch");
    blocks[i][j] = std::move(h);
  }

  bool operator==(const BlockMap&) const = default;
};

inline BlockMap block_identity(std::vector<FgAbGroup> parts) {
  BlockMap b(std::move(parts));
  for (size_t i = 0; i < b.size(); ++i) b.blocks[i][i] = identity_hom(b.parts[i]);
  return b;
}

// f after g, blockwise.
inline BlockMap block_compose(const BlockMap& f, const BlockMap& g) {
  if (f.parts != g.parts) fail("block_compose: parts mismatch");
  BlockMap r(f.parts);
  size_t m = f.size();
  for (size_t i = 0; i < m; ++i)
    for (size_t j = 0; j < m; ++j) {
      Homomorphism acc = zero_hom(f.parts[j], f.parts[i]);
      for (size_t k = 0; k < m; ++k)
        acc = hom_add(acc, compose(f.blocks[i][k], g.blocks[k][j]));
      r.blocks[i][j] = std::move(acc);
    }
  return r;
}

inline BlockMap block_add(const BlockMap& f, const BlockMap& g) {
  if (f.parts != g.parts) fail("block_add: parts mismatch");
  BlockMap r(f.parts);
  for (size_t i = 0; i < f.size(); ++i)
    for (size_t j = 0; j < f.size(); ++j)
      r.blocks[i][j] = hom_add(f.blocks[i][j], g.blocks[i][j]);
  return r;
}

// Change of basis taking the concatenated presentation of (+) parts to the
// canonical invariant-factor form of their direct sum.
struct FlattenBasis {
  FgAbGroup sum;   // canonical direct sum
  Mat to_canon;    // concat coords -> canonical coords (right multiply)
  Mat from_canon;  // canonical coords -> concat coords
};

inline FlattenBasis flatten_basis(const std::vector<FgAbGroup>& parts) {
  int n = 0;
  std::vector<i64> rel_orders;
  std::vector<int> rel_index;
  for (const FgAbGroup& g : parts) {
    for (int i = 0; i < g.gens(); ++i)
      if (i64 d = gen_order(g, i)) {
        rel_orders.push_back(d);
        rel_index.push_back(n + i);
      }
    n += g.gens();
  }
  int m = int(rel_orders.size());
  Mat rel(m, n);
  for (int t = 0; t < m; ++t) rel.at(t, rel_index[t]) = rel_orders[t];
  SmithForm s = smith_normal_form(rel);

  // In y = x * V coordinates the relations become y_j = 0 mod d_j (j < m):
  // indices >= m are free, indices with d_j >= 2 are torsion, d_j = 1 drops.
  int t0 = 0;
  while (t0 < m && s.d.at(t0, t0) == 1) ++t0;
  FgAbGroup sum;
  sum.free_rank = n - m;
  for (int j = t0; j < m; ++j) sum.torsion.push_back(s.d.at(j, j));
  sum.validate();

  FgAbGroup expect;
  for (const FgAbGroup& g : parts) expect = direct_sum(expect, g);
  if (sum != expect) fail("flatten_basis: internal canonical form mismatch");

  int nc = sum.gens();
  std::vector<int> sel;  // canonical index -> y index
  for (int j = m; j < n; ++j) sel.push_back(j);
  for (int j = t0; j < m; ++j) sel.push_back(j);

  Mat to_c(n, nc), from_c(nc, n);
  for (int c = 0; c < nc; ++c) {
    for (int i = 0; i < n; ++i) to_c.at(i, c) = s.v.at(i, sel[c]);
    for (int j = 0; j < n; ++j) from_c.at(c, j) = s.v_inv.at(sel[c], j);
  }
  return {std::move(sum), std::move(to_c), std::move(from_c)};
}

// The block map as a single endomorphism of the canonical direct sum.
inline Homomorphism flatten(const BlockMap& b) {
  int n = 0;
  std::vector<int> offset;
  for (const FgAbGroup& g : b.parts) {
    offset.push_back(n);
    n += g.gens();
  }
  Mat cat(n, n);
  for (size_t i = 0; i < b.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) {
      const Mat& blk = b.blocks[i][j].m;  // rows: gens of parts[j], cols: parts[i]
      for (int a = 0; a < blk.rows; ++a)
        for (int c = 0; c < blk.cols; ++c)
          cat.at(offset[j] + a, offset[i] + c) = blk.at(a, c);
    }
  FlattenBasis fb = flatten_basis(b.parts);
  Mat flat = mat_mul(fb.from_canon, mat_mul(cat, fb.to_canon));
  return make_hom(fb.sum, fb.sum, std::move(flat));
}

inline bool is_block_invertible(const BlockMap& b) { return is_automorphism(flatten(b)); }

// D - C A^{-1} B for a two-part block map whose (0,0) block is invertible.
inline Homomorphism schur_complement(const BlockMap& b) {
  if (b.size() != 2) fail("schur_complement: needs exactly two parts");
  const Homomorphism& a = b.blocks[0][0];
  if (!is_automorphism(a)) fail("schur_complement: (0,0) block is not invertible");
  Homomorphism a_inv = invert(a);
  return hom_sub(b.blocks[1][1],
                 compose(b.blocks[1][0], compose(a_inv, b.blocks[0][1])));
}

// Block LU elimination.  Succeeds when every pivot, updated by the Schur
// complements of the earlier ones, is an automorphism; then
// block_compose(lower, upper) = M with lower block-triangular (automorphism
// diagonal) and upper unitriangular.
struct BlockLu {
  bool ok = false;
  int failed_pivot = -1;  // first pivot index that is not an automorphism
  BlockMap lower, upper;

  explicit BlockLu(const std::vector<FgAbGroup>& parts)
      : lower(parts), upper(parts) {}
};

inline BlockLu lu_factorize(const BlockMap& input) {
  BlockLu out(input.parts);
  BlockMap w = input;
  size_t m = input.size();
  for (size_t i = 0; i < m; ++i) {
    const Homomorphism& pivot = w.blocks[i][i];
    if (!is_automorphism(pivot)) {
      out.failed_pivot = int(i);
      return out;
    }
    Homomorphism p_inv = invert(pivot);
    for (size_t j = i; j < m; ++j) out.lower.blocks[j][i] = w.blocks[j][i];
    for (size_t k = i; k < m; ++k)
      out.upper.blocks[i][k] = compose(p_inv, w.blocks[i][k]);
    for (size_t j = i + 1; j < m; ++j)
      for (size_t k = i + 1; k < m; ++k)
        w.blocks[j][k] = hom_sub(
            w.blocks[j][k],
            compose(w.blocks[j][i], compose(p_inv, w.blocks[i][k])));
  }
  out.ok = true;
  return out;
}

}  // namespace selfclose
