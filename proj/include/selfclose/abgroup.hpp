// Finitely generated abelian groups in invariant-factor form, Smith normal
// form over Z, and the Hom-group computation used everywhere downstream.
#pragma once
#include <algorithm>
#include <map>
#include <optional>
#include <sstream>

#include "common.hpp"

namespace selfclose {

// Z^free_rank  (+)  Z/d_1 (+) ... (+) Z/d_t  with  2 <= d_1 | d_2 | ... | d_t.
// The trivial group is free_rank 0 with no torsion.
struct FgAbGroup {
  int free_rank = 0;
  std::vector<i64> torsion;

  bool operator==(const FgAbGroup&) const = default;

  bool is_trivial() const { return free_rank == 0 && torsion.empty(); }
  bool is_finite() const { return free_rank == 0; }
  int gens() const { return free_rank + int(torsion.size()); }

  std::optional<i64> order() const {
    if (free_rank > 0) return std::nullopt;
    i64 n = 1;
    for (i64 d : torsion) n = mul_ck(n, d);
    return n;
  }

  // lcm of element orders; 0 stands for unbounded.
  i64 exponent() const {
    if (free_rank > 0) return 0;
    return torsion.empty() ? 1 : torsion.back();
  }

  // Length of a composition series of the torsion part.
  int torsion_length() const {
    int len = 0;
    for (i64 d : torsion) len += omega_total(d);
    return len;
  }

  void validate() const {
    if (free_rank < 0) fail("group: negative free rank");
    for (size_t i = 0; i < torsion.size(); ++i) {
      if (torsion[i] < 2) fail("group: invariant factor below 2");
      if (i > 0 && torsion[i] % torsion[i - 1] != 0)
        fail("group: invariant factors must form a divisibility chain");
    }
  }
};

// Ascending exponent lists of the p-primary parts: p -> (e_1 <= e_2 <= ...).
inline std::map<i64, std::vector<int>> primary_decomposition(const FgAbGroup& g) {
  std::map<i64, std::vector<int>> comp;
  for (i64 d : g.torsion)
    for (auto& [p, e] : factorize(d)) comp[p].push_back(e);
  for (auto& [p, es] : comp) std::sort(es.begin(), es.end());
  return comp;
}

// Rebuild the invariant-factor chain from an arbitrary list of cyclic orders.
// Orders equal to 1 contribute nothing.
inline FgAbGroup canon_from_orders(int free_rank, std::vector<i64> orders) {
  std::map<i64, std::vector<int>> comp;
  for (i64 d : orders) {
    if (d < 1) fail("group: cyclic order must be positive");
    for (auto& [p, e] : factorize(d)) comp[p].push_back(e);
  }
  size_t m = 0;
  for (auto& [p, es] : comp) {
    std::sort(es.begin(), es.end());
    m = std::max(m, es.size());
  }
  // Align each prime's exponents at the top; factor j collects one exponent
  // per prime, giving the divisibility chain directly.
  FgAbGroup g;
  g.free_rank = free_rank;
  for (size_t j = 0; j < m; ++j) {
    i64 d = 1;
    for (auto& [p, es] : comp) {
      size_t pad = m - es.size();
      if (j >= pad) {
        int e = es[j - pad];
        for (int t = 0; t < e; ++t) d = mul_ck(d, p);
      }
    }
    if (d > 1) g.torsion.push_back(d);
  }
  g.validate();
  return g;
}

// Strict constructor: every listed order must be a genuine cyclic factor.
inline FgAbGroup from_cyclic_orders(int free_rank, const std::vector<i64>& orders) {
  for (i64 d : orders)
    if (d < 2) fail("from_cyclic_orders: orders must be at least 2");
  return canon_from_orders(free_rank, orders);
}

inline FgAbGroup direct_sum(const FgAbGroup& a, const FgAbGroup& b) {
  std::vector<i64> orders = a.torsion;
  orders.insert(orders.end(), b.torsion.begin(), b.torsion.end());
  return canon_from_orders(a.free_rank + b.free_rank, orders);
}

// Hom(A, B) as an abstract group:
//   Hom(Z^r, Z^s) = Z^{rs},  Hom(Z^r, T) = T^r,  Hom(T, Z^s) = 0,
//   Hom(Z/d, Z/e) = Z/gcd(d, e).
inline FgAbGroup hom_group(const FgAbGroup& a, const FgAbGroup& b) {
  std::vector<i64> orders;
  for (int i = 0; i < a.free_rank; ++i)
    for (i64 e : b.torsion) orders.push_back(e);
  for (i64 d : a.torsion)
    for (i64 e : b.torsion) orders.push_back(std::gcd(d, e));
  return canon_from_orders(a.free_rank * b.free_rank, orders);
}

// Number of cyclic summands of order exactly p^(s+1); equals the dimension of
// (p^s G)[p] / (p^(s+1) G)[p] over F_p, which is how the oracle recomputes it.
inline int ulm_kaplansky(const FgAbGroup& g, i64 p, int s) {
  if (!is_prime(p)) fail("ulm_kaplansky: p must be prime");
  if (s < 0) fail("ulm_kaplansky: s must be nonnegative");
  int count = 0;
  for (i64 d : g.torsion) {
    int e = 0;
    while (d % p == 0) { d /= p; ++e; }
    if (e == s + 1) ++count;
  }
  return count;
}

// Do A and B share an indecomposable direct summand (Z or some Z/p^e)?
inline bool has_common_direct_factor(const FgAbGroup& a, const FgAbGroup& b) {
  if (a.free_rank > 0 && b.free_rank > 0) return true;
  auto pa = primary_decomposition(a), pb = primary_decomposition(b);
  for (auto& [p, ea] : pa) {
    auto it = pb.find(p);
    if (it == pb.end()) continue;
    for (int x : ea)
      if (std::find(it->second.begin(), it->second.end(), x) != it->second.end())
        return true;
  }
  return false;
}

// -- Smith normal form ---------------------------------------------------

// U * A * V = D diagonal, d_1 | d_2 | ..., entries nonnegative.  U, V are
// unimodular; their inverses are tracked alongside so callers never have to
// invert anything.
struct SmithForm {
  Mat d, u, v, u_inv, v_inv;
  int rank = 0;  // nonzero diagonal entries
};

inline SmithForm smith_normal_form(const Mat& input) {
  SmithForm s;
  s.d = input;
  int nr = input.rows, nc = input.cols;
  s.u = Mat::identity(nr);
  s.u_inv = Mat::identity(nr);
  s.v = Mat::identity(nc);
  s.v_inv = Mat::identity(nc);
  Mat& d = s.d;

  auto row_swap = [&](int i, int j) {
    if (i == j) return;
    for (int c = 0; c < nc; ++c) std::swap(d.at(i, c), d.at(j, c));
    for (int c = 0; c < nr; ++c) std::swap(s.u.at(i, c), s.u.at(j, c));
    for (int r = 0; r < nr; ++r) std::swap(s.u_inv.at(r, i), s.u_inv.at(r, j));
  };
  auto col_swap = [&](int i, int j) {
    if (i == j) return;
    for (int r = 0; r < nr; ++r) std::swap(d.at(r, i), d.at(r, j));
    for (int r = 0; r < nc; ++r) std::swap(s.v.at(r, i), s.v.at(r, j));
    for (int c = 0; c < nc; ++c) std::swap(s.v_inv.at(i, c), s.v_inv.at(j, c));
  };
  // row i += c * row j
  auto row_add = [&](int i, int j, i64 c) {
    if (!c) return;
    for (int k = 0; k < nc; ++k)
      d.at(i, k) = add_ck(d.at(i, k), mul_ck(c, d.at(j, k)));
    for (int k = 0; k < nr; ++k)
      s.u.at(i, k) = add_ck(s.u.at(i, k), mul_ck(c, s.u.at(j, k)));
    for (int r = 0; r < nr; ++r)  // u_inv: col j -= c * col i
      s.u_inv.at(r, j) = sub_ck(s.u_inv.at(r, j), mul_ck(c, s.u_inv.at(r, i)));
  };
  // col j += c * col i
  auto col_add = [&](int j, int i, i64 c) {
    if (!c) return;
    for (int r = 0; r < nr; ++r)
      d.at(r, j) = add_ck(d.at(r, j), mul_ck(c, d.at(r, i)));
    for (int r = 0; r < nc; ++r)
      s.v.at(r, j) = add_ck(s.v.at(r, j), mul_ck(c, s.v.at(r, i)));
    for (int c2 = 0; c2 < nc; ++c2)  // v_inv: row i -= c * row j
      s.v_inv.at(i, c2) = sub_ck(s.v_inv.at(i, c2), mul_ck(c, s.v_inv.at(j, c2)));
  };
  auto row_negate = [&](int i) {
    for (int k = 0; k < nc; ++k) d.at(i, k) = sub_ck(0, d.at(i, k));
    for (int k = 0; k < nr; ++k) s.u.at(i, k) = sub_ck(0, s.u.at(i, k));
    for (int r = 0; r < nr; ++r) s.u_inv.at(r, i) = sub_ck(0, s.u_inv.at(r, i));
  };
  // Round-to-nearest quotient: leaves |remainder| <= |b| / 2, which keeps the
  // transform entries from snowballing across elimination rounds.
  auto div_round = [](i64 a, i64 b) {
    i64 q = a / b, r = a % b;
    if (r == 0) return q;
    i64 ab = b < 0 ? -b : b, ar = r < 0 ? -r : r;
    if (ar > ab - ar) q += ((r > 0) == (b > 0)) ? 1 : -1;
    return q;
  };

  int n = std::min(nr, nc);
  for (int k = 0; k < n; ++k) {
    // Smallest nonzero entry of the trailing block becomes the pivot.
    auto pick_pivot = [&]() -> std::pair<int, int> {
      int pi = -1, pj = -1;
      i64 best = 0;
      for (int i = k; i < nr; ++i)
        for (int j = k; j < nc; ++j) {
          i64 v = d.at(i, j);
          if (!v) continue;
          i64 av = v < 0 ? -v : v;
          if (pi < 0 || av < best) { pi = i; pj = j; best = av; }
        }
      return {pi, pj};
    };
    auto [pi, pj] = pick_pivot();
    if (pi < 0) break;
    row_swap(k, pi);
    col_swap(k, pj);

    for (;;) {
      bool clean = true;
      for (int i = k + 1; i < nr; ++i) {
        i64 q = div_round(d.at(i, k), d.at(k, k));
        row_add(i, k, -q);
        if (d.at(i, k)) clean = false;
      }
      for (int j = k + 1; j < nc; ++j) {
        i64 q = div_round(d.at(k, j), d.at(k, k));
        col_add(j, k, -q);
        if (d.at(k, j)) clean = false;
      }
      if (clean) break;
      // A nonzero remainder is strictly smaller than the pivot: promote it.
      auto [qi, qj] = pick_pivot();
      row_swap(k, qi);
      col_swap(k, qj);
    }

    // Pivot must divide the whole trailing block; if not, fold the offending
    // row in and redo this step with a strictly smaller pivot.
    bool redo = false;
    for (int i = k + 1; i < nr && !redo; ++i)
      for (int j = k + 1; j < nc && !redo; ++j)
        if (d.at(i, j) % d.at(k, k) != 0) {
          row_add(k, i, 1);
          redo = true;
        }
    if (redo) { --k; continue; }

    if (d.at(k, k) < 0) row_negate(k);
    ++s.rank;
  }
  return s;
}

// -- group literals -------------------------------------------------------

// "Z+Z/2+Z/12", "Z/5", "0".  Whitespace is ignored.
inline FgAbGroup parse_group(const std::string& text, size_t base_pos = 0) {
  size_t i = 0;
  auto skip_ws = [&] { while (i < text.size() && isspace((unsigned char)text[i])) ++i; };
  skip_ws();
  if (i < text.size() && text[i] == '0') {
    ++i;
    skip_ws();
    if (i != text.size()) throw ParseError("unexpected input after trivial group", base_pos + i);
    return {};
  }
  int free_rank = 0;
  std::vector<i64> orders;
  for (;;) {
    skip_ws();
    if (i >= text.size() || text[i] != 'Z')
      throw ParseError("expected 'Z' in group expression", base_pos + i);
    ++i;
    skip_ws();
    if (i < text.size() && text[i] == '/') {
      ++i;
      skip_ws();
      size_t start = i;
      i64 n = 0;
      while (i < text.size() && isdigit((unsigned char)text[i])) {
        n = add_ck(mul_ck(n, 10), text[i] - '0');
        ++i;
      }
      if (i == start) throw ParseError("expected integer after 'Z/'", base_pos + i);
      if (n < 2) throw ParseError("cyclic order must be at least 2", base_pos + start);
      orders.push_back(n);
    } else {
      ++free_rank;
    }
    skip_ws();
    if (i >= text.size()) break;
    if (text[i] != '+') throw ParseError("expected '+' between group summands", base_pos + i);
    ++i;
  }
  return canon_from_orders(free_rank, orders);
}

inline std::string to_string(const FgAbGroup& g) {
  if (g.is_trivial()) return "0";
  std::ostringstream out;
  bool first = true;
  for (int i = 0; i < g.free_rank; ++i) {
    if (!first) out << "+";
    out << "Z";
    first = false;
  }
  for (i64 d : g.torsion) {
    if (!first) out << "+";
    out << "Z/" << d;
    first = false;
  }
  return out.str();
}

}  // namespace selfclose
