// Brute-force ground truth on small finite groups: full endomorphism rings,
// the Jacobson radical by its defining quantifiers, and enumeration labs for
// the ring and factorization lemmas the engine relies on.
#pragma once
#include <cmath>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>

#include "homs.hpp"

namespace selfclose {

struct RingBounds {
  i64 group_bound = 64;          // |G| cap for full End enumeration
  i64 end_cap = 4096;            // |End(G)| cap
  i64 grid_budget = 200000000;   // full (r,s)-grid confirmation budget
  i64 sample_pairs = 20000;      // fallback sample size when over budget
};

struct VecHash {
  size_t operator()(const std::vector<i64>& v) const {
    size_t h = 1469598103934665603ull;
    for (i64 x : v) {
      h ^= size_t(x) + 0x9e3779b97f4a7c15ull;
      h *= 1099511628211ull;
    }
    return h;
  }
};

// Fully enumerated End(G) with unit flags and O(1) element lookup.
struct EndRing {
  FgAbGroup g;
  std::vector<Homomorphism> elems;
  std::vector<bool> unit;
  std::unordered_map<std::vector<i64>, int, VecHash> index;
  int zero = -1, one = -1;

  size_t size() const { return elems.size(); }

  int idx(const Homomorphism& h) const {
    auto it = index.find(h.m.a);
    if (it == index.end()) fail("EndRing: element outside the ring");
    return it->second;
  }
  int mul(int a, int b) const { return idx(compose(elems[a], elems[b])); }
  int add(int a, int b) const { return idx(hom_add(elems[a], elems[b])); }
  int sub(int a, int b) const { return idx(hom_sub(elems[a], elems[b])); }
};

inline EndRing enumerate_end(const FgAbGroup& g, const RingBounds& bounds = {}) {
  auto ord = g.order();
  if (!ord) fail("enumerate_end: group is infinite");
  if (*ord > bounds.group_bound) fail("enumerate_end: group order exceeds bound");
  auto homs = enumerate_homs(g, g, bounds.end_cap);
  if (!homs) fail("enumerate_end: endomorphism ring exceeds bound");
  EndRing r;
  r.g = g;
  r.elems = std::move(*homs);
  r.unit.resize(r.elems.size());
  for (size_t i = 0; i < r.elems.size(); ++i) {
    r.index.emplace(r.elems[i].m.a, int(i));
    r.unit[i] = is_automorphism(r.elems[i]);
    if (r.elems[i].is_zero()) r.zero = int(i);
  }
  r.one = r.idx(identity_hom(g));
  return r;
}

// J(R) = { x : 1 + r x s is a unit for all r, s }.  A first pass applies the
// one-sided criterion (exact in a finite ring); the full two-sided grid is
// then replayed as confirmation, sampled when it exceeds the budget.
struct RadicalResult {
  std::vector<int> members;
  bool grid_complete = false;
  i64 grid_checks = 0;
};

inline RadicalResult jacobson_radical(const EndRing& r, const RingBounds& bounds = {}) {
  RadicalResult out;
  int n = int(r.size());
  for (int x = 0; x < n; ++x) {
    bool in = true;
    for (int rr = 0; rr < n && in; ++rr)
      if (!r.unit[r.sub(r.one, r.mul(rr, x))]) in = false;
    if (in) out.members.push_back(x);
  }
  i64 full = i64(out.members.size()) * n * n;
  std::mt19937_64 rng(0x5e1fc105eull);
  if (full <= bounds.grid_budget) {
    out.grid_complete = true;
    for (int x : out.members)
      for (int rr = 0; rr < n; ++rr)
        for (int s = 0; s < n; ++s) {
          if (!r.unit[r.add(r.one, r.mul(rr, r.mul(x, s)))])
            fail("jacobson_radical: grid confirmation failed");
          ++out.grid_checks;
        }
  } else {
    std::uniform_int_distribution<int> pick(0, n - 1);
    for (int x : out.members)
      for (i64 t = 0; t < bounds.sample_pairs; ++t) {
        int rr = pick(rng), s = pick(rng);
        if (!r.unit[r.add(r.one, r.mul(rr, r.mul(x, s)))])
          fail("jacobson_radical: grid confirmation failed");
        ++out.grid_checks;
      }
  }
  return out;
}

// Structural ideal check, used by the test suite on every computed radical.
inline bool is_two_sided_ideal(const EndRing& r, const std::vector<int>& members) {
  std::set<int> in(members.begin(), members.end());
  if (!in.count(r.zero)) return false;
  for (int x : members) {
    for (int y : members)
      if (!in.count(r.add(x, y))) return false;
    for (int a = 0; a < int(r.size()); ++a)
      if (!in.count(r.mul(a, x)) || !in.count(r.mul(x, a))) return false;
  }
  return true;
}

// -- independent brute-force predicates ------------------------------------

inline bool brute_is_bijective(const Homomorphism& f) {
  if (f.src != f.dst) return false;
  auto elems = all_elements(f.src);
  if (!elems) fail("brute_is_bijective: group is infinite");
  std::set<std::vector<i64>> image;
  for (const auto& x : *elems) image.insert(apply_hom(f, x));
  return image.size() == elems->size();
}

inline bool brute_is_nilpotent(const Homomorphism& f) {
  if (f.src != f.dst || !f.src.is_finite()) fail("brute_is_nilpotent: bad input");
  std::set<std::vector<i64>> seen;
  Homomorphism g = f;
  for (;;) {
    if (g.is_zero()) return true;
    if (!seen.insert(g.m.a).second) return false;  // entered a nonzero cycle
    g = compose(g, f);
  }
}

// #Hom(G, H) counted by enumerating, per generator of G, the elements of H
// killed by that generator's order.  Independent of the gcd formula.
inline std::optional<i64> brute_hom_count(const FgAbGroup& g, const FgAbGroup& h) {
  if (g.free_rank > 0 && !h.is_finite()) return std::nullopt;
  FgAbGroup ht{0, h.torsion};
  auto torsion_elems = all_elements(ht);
  if (!torsion_elems) fail("brute_hom_count: torsion part too large");
  i64 count = 1;
  if (g.free_rank > 0) {
    i64 sz = i64(torsion_elems->size());
    for (int i = 0; i < g.free_rank; ++i) count = mul_ck(count, sz);
  }
  for (i64 d : g.torsion) {
    i64 killed = 0;
    for (const auto& y : *torsion_elems) {
      std::vector<i64> dy(y.size());
      for (size_t i = 0; i < y.size(); ++i) dy[i] = mod_floor(d * y[i], ht.torsion[i]);
      bool zero = true;
      for (i64 v : dy) zero &= (v == 0);
      if (zero) ++killed;
    }
    count = mul_ck(count, killed);
  }
  return count;
}

// Element-order census; equal censuses characterize finite abelian groups.
inline std::map<i64, i64> order_census(const FgAbGroup& g) {
  auto elems = all_elements(g);
  if (!elems) fail("order_census: group is infinite");
  std::map<i64, i64> census;
  for (const auto& x : *elems) ++census[element_order(g, x)];
  return census;
}

inline bool brute_isomorphic(const FgAbGroup& g, const FgAbGroup& h) {
  if (!g.is_finite() || !h.is_finite()) fail("brute_isomorphic: finite groups only");
  return order_census(g) == order_census(h);
}

// Ulm-Kaplansky invariant straight from its definition: the index of
// p^(s+1)G[p] inside p^sG[p], where p^sG[p] = { p^s x : p^(s+1) x = 0 }.
inline int brute_ulm_kaplansky(const FgAbGroup& g, i64 p, int s) {
  auto elems = all_elements(g);
  if (!elems) fail("brute_ulm_kaplansky: group is infinite");
  auto layer = [&](int t) {
    i64 pt = 1;
    for (int i = 0; i < t; ++i) pt = mul_ck(pt, p);
    std::set<std::vector<i64>> out;
    for (const auto& x : *elems) {
      std::vector<i64> px(x.size()), ppx(x.size());
      for (size_t i = 0; i < x.size(); ++i) {
        px[i] = mod_floor(pt * x[i], g.torsion[i]);
        ppx[i] = mod_floor(p * px[i], g.torsion[i]);
      }
      bool killed = true;
      for (i64 v : ppx) killed &= (v == 0);
      if (killed) out.insert(px);
    }
    return out;
  };
  size_t a = layer(s).size(), b = layer(s + 1).size();
  if (a % b != 0) fail("brute_ulm_kaplansky: layer sizes inconsistent");
  i64 q = i64(a / b);
  int f = 0;
  while (q > 1) {
    if (q % p != 0) fail("brute_ulm_kaplansky: index not a p-power");
    q /= p;
    ++f;
  }
  return f;
}

// All finite abelian groups of order exactly n / at most n.
inline std::vector<FgAbGroup> abelian_groups_of_order(i64 n) {
  std::vector<std::vector<std::vector<int>>> parts_per_prime;
  std::vector<i64> primes;
  for (auto& [p, e] : factorize(n)) {
    std::vector<std::vector<int>> parts;
    std::vector<int> cur;
    auto rec = [&](auto&& self, int rem, int maxpart) -> void {
      if (rem == 0) { parts.push_back(cur); return; }
      for (int k = std::min(rem, maxpart); k >= 1; --k) {
        cur.push_back(k);
        self(self, rem - k, k);
        cur.pop_back();
      }
    };
    rec(rec, e, e);
    parts_per_prime.push_back(std::move(parts));
    primes.push_back(p);
  }
  std::vector<FgAbGroup> out;
  std::vector<size_t> pick(parts_per_prime.size(), 0);
  for (;;) {
    std::vector<i64> orders;
    for (size_t i = 0; i < primes.size(); ++i)
      for (int e : parts_per_prime[i][pick[i]]) {
        i64 q = 1;
        for (int t = 0; t < e; ++t) q = mul_ck(q, primes[i]);
        orders.push_back(q);
      }
    out.push_back(canon_from_orders(0, orders));
    size_t i = 0;
    while (i < pick.size()) {
      if (++pick[i] < parts_per_prime[i].size()) break;
      pick[i] = 0;
      ++i;
    }
    if (i == pick.size()) break;
    if (pick.empty()) break;
  }
  return out;
}

inline std::vector<FgAbGroup> abelian_groups_up_to(i64 max_order) {
  std::vector<FgAbGroup> out;
  for (i64 n = 1; n <= max_order; ++n)
    for (auto& g : abelian_groups_of_order(n)) out.push_back(g);
  return out;
}

// Deterministic sample of endomorphisms for rings too large to enumerate.
inline std::vector<Homomorphism> sample_endos(const FgAbGroup& g, int count,
                                              uint64_t seed = 0xab5eedull) {
  std::mt19937_64 rng(seed);
  std::vector<Homomorphism> out;
  int n = g.gens();
  for (int t = 0; t < count; ++t) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) {
      i64 d = gen_order(g, i);
      for (int j = 0; j < n; ++j) {
        i64 e = gen_order(g, j);
        if (e == 0) {
          if (d == 0) m.at(i, j) = i64(rng() % 7) - 3;
        } else if (d == 0) {
          m.at(i, j) = i64(rng() % uint64_t(e));
        } else {
          i64 gc = std::gcd(d, e), step = e / gc;
          m.at(i, j) = step * i64(rng() % uint64_t(gc));
        }
      }
    }
    out.push_back(make_hom(g, g, std::move(m)));
  }
  return out;
}

// -- labs -------------------------------------------------------------------

struct LabReport {
  std::string name;
  bool ok = true;
  std::map<std::string, i64> counts;
  std::string detail;
};

inline std::string lab_to_string(const LabReport& r) {
  std::ostringstream out;
  out << r.name << ": " << (r.ok ? "pass" : "FAIL");
  for (auto& [k, v] : r.counts) out << "  " << k << "=" << v;
  if (!r.detail.empty()) out << "\n" << r.detail;
  return out.str();
}

inline std::string matrix_to_string(const Mat& m) {
  std::ostringstream out;
  out << "[";
  for (int i = 0; i < m.rows; ++i) {
    out << (i ? "; " : "");
    for (int j = 0; j < m.cols; ++j) out << (j ? "," : "") << m.at(i, j);
  }
  out << "]";
  return out.str();
}

// Nilpotents are quasi-regular (1 +- t invertible), and a unit plus a
// commuting nilpotent is a unit.
inline LabReport check_quasi_regular_and_nc(const EndRing& r) {
  LabReport rep{"quasi-regular+unit-nilpotent"};
  std::vector<int> nilpotents, units;
  for (int i = 0; i < int(r.size()); ++i) {
    if (is_nilpotent(r.elems[i])) nilpotents.push_back(i);
    if (r.unit[i]) units.push_back(i);
  }
  rep.counts["ring"] = i64(r.size());
  rep.counts["nilpotents"] = i64(nilpotents.size());
  rep.counts["units"] = i64(units.size());
  for (int t : nilpotents) {
    if (!r.unit[r.sub(r.one, t)] || !r.unit[r.add(r.one, t)]) {
      rep.ok = false;
      rep.detail = "non-quasi-regular nilpotent " + matrix_to_string(r.elems[t].m);
      return rep;
    }
  }
  i64 pairs = 0;
  for (int u : units)
    for (int t : nilpotents) {
      if (r.mul(u, t) != r.mul(t, u)) continue;
      ++pairs;
      if (!r.unit[r.add(u, t)]) {
        rep.ok = false;
        rep.detail = "unit+commuting-nilpotent not a unit: u=" +
                     matrix_to_string(r.elems[u].m) + " t=" + matrix_to_string(r.elems[t].m);
        return rep;
      }
    }
  rep.counts["commuting-pairs"] = pairs;
  return rep;
}

// For a p-group: the strictly-increasing-exponents test, reducedness of
// End/J, and containment of nilpotents in J must line up.
inline LabReport check_nj_equivalence(const FgAbGroup& g, const RingBounds& bounds = {}) {
  LabReport rep{"nj-equivalence"};
  auto primary = primary_decomposition(g);
  if (!g.is_finite() || primary.size() != 1)
    fail("check_nj_equivalence: need a finite p-group");
  auto& exps = primary.begin()->second;
  bool criterion = true;
  for (size_t i = 1; i < exps.size(); ++i)
    if (exps[i] <= exps[i - 1]) criterion = false;

  EndRing r = enumerate_end(g, bounds);
  RadicalResult j = jacobson_radical(r, bounds);
  std::set<int> in_j(j.members.begin(), j.members.end());
  bool quotient_reduced = true;
  int square_zero_witness = -1;
  bool n_in_j = true;
  int nilpotent_witness = -1;
  for (int x = 0; x < int(r.size()); ++x) {
    if (in_j.count(r.mul(x, x)) && !in_j.count(x)) {
      quotient_reduced = false;
      if (square_zero_witness < 0) square_zero_witness = x;
    }
    if (is_nilpotent(r.elems[x]) && !in_j.count(x)) {
      n_in_j = false;
      if (nilpotent_witness < 0) nilpotent_witness = x;
    }
  }
  rep.counts["ring"] = i64(r.size());
  rep.counts["radical"] = i64(j.members.size());
  rep.counts["criterion"] = criterion;
  rep.counts["quotient-reduced"] = quotient_reduced;
  rep.counts["nilpotents-in-radical"] = n_in_j;
  if (criterion != quotient_reduced) {
    rep.ok = false;
    rep.detail = "exponent criterion and quotient reducedness disagree";
  }
  if (criterion && !n_in_j) {
    rep.ok = false;
    rep.detail = "criterion holds but nilpotent found outside the radical: " +
                 matrix_to_string(r.elems[nilpotent_witness].m);
  }
  if (!criterion && nilpotent_witness >= 0)
    rep.detail = "nilpotent outside radical (expected): " +
                 matrix_to_string(r.elems[nilpotent_witness].m);
  return rep;
}

// Every block map over the given parts, assembled cell by cell.
inline std::vector<BlockMap> all_block_maps(const std::vector<FgAbGroup>& parts,
                                            i64 cell_cap = 4096, i64 total_cap = 1 << 20) {
  size_t m = parts.size();
  std::vector<std::vector<Homomorphism>> cells;  // (i,j) flattened row-major
  i64 total = 1;
  for (size_t i = 0; i < m; ++i)
    for (size_t j = 0; j < m; ++j) {
      auto h = enumerate_homs(parts[j], parts[i], cell_cap);
      if (!h) fail("all_block_maps: hom set exceeds bound");
      total = mul_ck(total, i64(h->size()));
      if (total > total_cap) fail("all_block_maps: too many block maps");
      cells.push_back(std::move(*h));
    }
  std::vector<BlockMap> out;
  std::vector<size_t> pick(cells.size(), 0);
  for (;;) {
    BlockMap b(parts);
    for (size_t i = 0; i < m; ++i)
      for (size_t j = 0; j < m; ++j) b.set(i, j, cells[i * m + j][pick[i * m + j]]);
    out.push_back(std::move(b));
    size_t c = 0;
    while (c < cells.size()) {
      if (++pick[c] < cells[c].size()) break;
      pick[c] = 0;
      ++c;
    }
    if (c == cells.size()) break;
  }
  return out;
}

// No common direct factor should force every automorphism of G (+) H to have
// automorphism diagonal blocks; with a common factor, exhibit the violation.
inline LabReport check_bcm(const FgAbGroup& g, const FgAbGroup& h,
                           i64 order_bound = 64) {
  LabReport rep{"bcm"};
  auto total = direct_sum(g, h).order();
  if (!total || *total > order_bound) fail("check_bcm: order exceeds bound");
  bool common = has_common_direct_factor(g, h);
  rep.counts["common-factor"] = common;
  i64 autos = 0, irreducible = 0;
  std::string example;
  for (const BlockMap& b : all_block_maps({g, h})) {
    if (!is_block_invertible(b)) continue;
    ++autos;
    if (!is_automorphism(b.blocks[0][0]) || !is_automorphism(b.blocks[1][1])) {
      ++irreducible;
      if (example.empty())
        example = "automorphism with singular diagonal: " +
                  matrix_to_string(flatten(b).m);
    }
  }
  rep.counts["automorphisms"] = autos;
  rep.counts["irreducible"] = irreducible;
  if (!common) {
    rep.ok = irreducible == 0;
    if (!rep.ok) rep.detail = "violation despite no common factor: " + example;
  } else {
    rep.detail = irreducible ? example : "no irreducible automorphism found";
  }
  return rep;
}

// Exhaustive LU scan: soundness of every returned factorization, plus success
// statistics split by diagonal invertibility.
inline LabReport check_lu(const std::vector<FgAbGroup>& parts, i64 order_bound = 64) {
  LabReport rep{"lu"};
  FgAbGroup sum;
  for (auto& p : parts) sum = direct_sum(sum, p);
  auto total = sum.order();
  if (!total || *total > order_bound) fail("check_lu: order exceeds bound");
  i64 n_auto = 0, n_diag_auto = 0, n_lu_ok = 0, n_reducible_fail = 0, n_bad = 0;
  std::string example;
  for (const BlockMap& b : all_block_maps(parts)) {
    bool flat_auto = is_block_invertible(b);
    bool diag_auto = true;
    for (size_t i = 0; i < b.size(); ++i)
      diag_auto = diag_auto && is_automorphism(b.blocks[i][i]);
    BlockLu lu = lu_factorize(b);
    n_auto += flat_auto;
    n_diag_auto += (flat_auto && diag_auto);
    n_lu_ok += lu.ok;
    if (lu.ok) {
      bool sound = block_compose(lu.lower, lu.upper) == b;
      for (size_t i = 0; i < b.size() && sound; ++i) {
        sound = is_automorphism(lu.lower.blocks[i][i]) &&
                lu.upper.blocks[i][i] == identity_hom(b.parts[i]);
        for (size_t j = i + 1; j < b.size() && sound; ++j)
          sound = lu.lower.blocks[i][j].is_zero() && lu.upper.blocks[j][i].is_zero();
      }
      if (!sound || !flat_auto) {
        ++n_bad;
        if (example.empty())
          example = "unsound factorization for " + matrix_to_string(flatten(b).m);
      }
    } else if (flat_auto && diag_auto) {
      ++n_reducible_fail;
      if (example.empty())
        example = "reducible automorphism not factored: " + matrix_to_string(flatten(b).m);
    }
  }
  rep.counts["automorphisms"] = n_auto;
  rep.counts["reducible-automorphisms"] = n_diag_auto;
  rep.counts["lu-success"] = n_lu_ok;
  rep.counts["reducible-but-unfactored"] = n_reducible_fail;
  rep.counts["unsound"] = n_bad;
  rep.ok = n_bad == 0;
  if (!rep.ok || n_reducible_fail) rep.detail = example;
  return rep;
}

}  // namespace selfclose
