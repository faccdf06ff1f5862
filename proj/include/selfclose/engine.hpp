// The product engine: computes the self-closeness number of a finite product
// of catalogued spaces.  The diagonal gives the lower bound max over factors;
// exactness is certified by a fixed ordered list of reducibility rules, each
// emitting a certificate whose premises can be re-derived independently.
#pragma once
#include <nlohmann/json.hpp>

#include "catalog.hpp"
#include "ringprops.hpp"

namespace selfclose {

using json = nlohmann::json;

// -- certificates -------------------------------------------------------------

struct Certificate;

struct Premise {
  std::string fact;    // machine-checkable fact tag
  std::string anchor;  // why the fact yields the conclusion
  json data = json::object();
  std::vector<Certificate> sub;  // nested certificates (recursive premises)
};

struct Certificate {
  std::string rule_id;
  int level = 0;  // the degree bound the rule certifies
  std::string anchor;
  std::vector<Premise> premises;
  std::string conclusion;
};

inline void to_json(json& j, const Certificate& c);

inline void to_json(json& j, const Premise& p) {
  j = json{{"fact", p.fact}, {"anchor", p.anchor}, {"data", p.data}};
  json subs = json::array();
  for (const auto& s : p.sub) {
    json js;
    to_json(js, s);
    subs.push_back(std::move(js));
  }
  j["sub"] = std::move(subs);
}

inline void to_json(json& j, const Certificate& c) {
  json prems = json::array();
  for (const auto& p : c.premises) {
    json jp;
    to_json(jp, p);
    prems.push_back(std::move(jp));
  }
  j = json{{"rule_id", c.rule_id},
           {"level", c.level},
           {"anchor", c.anchor},
           {"premises", std::move(prems)},
           {"conclusion", json{{"statement", c.conclusion}}}};
}

inline Certificate certificate_from_json(const json& j);

inline Premise premise_from_json(const json& j) {
  Premise p;
  p.fact = j.at("fact").get<std::string>();
  p.anchor = j.at("anchor").get<std::string>();
  p.data = j.at("data");
  for (const auto& s : j.at("sub")) p.sub.push_back(certificate_from_json(s));
  return p;
}

inline Certificate certificate_from_json(const json& j) {
  Certificate c;
  c.rule_id = j.at("rule_id").get<std::string>();
  c.level = j.at("level").get<int>();
  c.anchor = j.at("anchor").get<std::string>();
  for (const auto& p : j.at("premises")) c.premises.push_back(premise_from_json(p));
  const auto& concl = j.at("conclusion");
  c.conclusion = concl.is_object() ? concl.at("statement").get<std::string>()
                                   : concl.get<std::string>();
  return c;
}

// -- engine results -----------------------------------------------------------

enum class NeStatus { exact, lower_bound };

inline std::string to_string(NeStatus s) {
  return s == NeStatus::exact ? "EXACT" : "LOWER_BOUND";
}

struct EngineResult {
  NeStatus status = NeStatus::lower_bound;
  int value = 0;
  std::optional<Certificate> certificate;
  std::string note;
};

struct EngineOptions {
  bool pivot_search = false;  // also try grouped (prefix) pivots in R3
};

inline int max_self_closeness(const std::vector<Factor>& factors) {
  int n = 0;
  for (const auto& f : factors) n = std::max(n, self_closeness(f));
  return n;
}

inline std::string product_to_string(const std::vector<Factor>& factors) {
  std::string out;
  for (size_t i = 0; i < factors.size(); ++i)
    out += (i ? " x " : "") + space_to_string(factors[i]);
  return out;
}

// -- product-level map triviality and distance ---------------------------------

inline std::optional<FgAbGroup> sum_pi_k(const Catalog& cat,
                                         const std::vector<Factor>& fs, int k) {
  FgAbGroup sum;
  for (const auto& f : fs) {
    auto g = homotopy_group(cat, f, k);
    if (!g) return std::nullopt;
    sum = direct_sum(sum, *g);
  }
  return sum;
}

// Every map from the product of xs to the product of ys induces zero on pi_k?
// A product map is determined by its components, and the induced morphism on
// the direct sum restricts factorwise, so pairwise triviality suffices.
inline std::optional<std::string> product_maps_trivial(const Catalog& cat,
                                                       const std::vector<Factor>& xs,
                                                       const std::vector<Factor>& ys,
                                                       int k) {
  auto sx = sum_pi_k(cat, xs, k);
  auto sy = sum_pi_k(cat, ys, k);
  if (sx && sx->is_trivial()) return "zero-source";
  if (sy && sy->is_trivial()) return "zero-target";
  if (sx && sy && hom_group(*sx, *sy).is_trivial()) return "hom-vanishing";
  bool factorwise = true;
  for (const auto& x : xs)
    for (const auto& y : ys)
      if (!all_maps_trivial_on_pik(cat, x, y, k)) {
        factorwise = false;
        break;
      }
  if (factorwise) return "factorwise-vanishing";
  return std::nullopt;
}

// Is every round trip through the other product nilpotent on pi_k?  The
// composite morphism splits as a sum of terms through single factors, so it
// vanishes outright when each term dies; otherwise both hom sets are
// enumerated and every composite is tested.
inline std::optional<std::string> product_distance_at(const Catalog& cat,
                                                      const std::vector<Factor>& xs,
                                                      const std::vector<Factor>& ys,
                                                      int k) {
  if (auto r = product_maps_trivial(cat, xs, ys, k)) return r;
  if (auto r = product_maps_trivial(cat, ys, xs, k)) return r;
  bool termwise = true;
  for (const auto& y : ys)
    if (!product_maps_trivial(cat, xs, {y}, k) &&
        !product_maps_trivial(cat, {y}, xs, k)) {
      termwise = false;
      break;
    }
  if (termwise) return "factorwise-vanishing";
  auto sx = sum_pi_k(cat, xs, k);
  auto sy = sum_pi_k(cat, ys, k);
  if (sx && sy && (sx->is_finite() || sy->is_finite())) {
    const FgAbGroup& a = sx->is_finite() ? *sx : *sy;
    const FgAbGroup& b = sx->is_finite() ? *sy : *sx;
    auto fwd = enumerate_homs(a, b, cat.bounds.hom_cap);
    auto bwd = enumerate_homs(b, a, cat.bounds.hom_cap);
    if (fwd && bwd &&
        i64(fwd->size()) * i64(bwd->size()) <= cat.bounds.pair_budget) {
      for (const auto& u : *fwd)
        for (const auto& v : *bwd)
          if (!is_nilpotent(compose(v, u))) return std::nullopt;
      return "nilpotent-composites";
    }
  }
  return std::nullopt;
}

// -- rules ----------------------------------------------------------------------

inline EngineResult compute_ne(const Catalog& cat, const std::vector<Factor>& factors,
                               const EngineOptions& opts = {});
inline std::optional<Certificate> check_reducible(const Catalog& cat,
                                                  const std::vector<Factor>& factors,
                                                  int n, const EngineOptions& opts = {});

inline Certificate rule_trivial_cert(const std::vector<Factor>& factors, int n) {
  Certificate c;
  c.rule_id = "R-TRIVIAL";
  c.level = n;
  c.anchor = "single-factor";
  c.premises.push_back(
      {"single-factor", "identity-splitting",
       json{{"factor", space_to_string(factors[0])}}, {}});
  c.conclusion = "a one-factor product splits componentwise by definition";
  return c;
}

// All factors Eilenberg-MacLane: coalesce equal degrees, since a product of
// such spaces in one degree is again one with the summed coefficient group,
// then certify the coalesced product.
inline std::optional<Certificate> rule_em_merge(const Catalog& cat,
                                                const std::vector<Factor>& factors,
                                                int n, const EngineOptions& opts) {
  for (const auto& f : factors)
    if (f.space.kind != SpaceKind::eilenberg_maclane) return std::nullopt;
  std::map<int, std::vector<size_t>> by_degree;
  for (size_t i = 0; i < factors.size(); ++i)
    by_degree[factors[i].space.dim].push_back(i);
  bool merged_any = false;
  for (auto& [d, idx] : by_degree) merged_any |= idx.size() > 1;
  if (!merged_any) return std::nullopt;

  Certificate c;
  c.rule_id = "R-EM-MERGE";
  c.level = n;
  c.anchor = "product-of-em-spaces";
  std::vector<Factor> merged;
  std::set<int> seen;
  for (const auto& f : factors) {
    int d = f.space.dim;
    if (seen.count(d)) continue;
    seen.insert(d);
    const auto& idx = by_degree[d];
    FgAbGroup sum;
    json parts = json::array();
    for (size_t i : idx) {
      sum = direct_sum(sum, factors[i].space.group);
      parts.push_back(to_string(factors[i].space.group));
    }
    Factor m;
    m.space = {SpaceKind::eilenberg_maclane, d, sum, 0};
    merged.push_back(m);
    if (idx.size() > 1)
      c.premises.push_back({"em-product-merge", "em-product-is-em",
                            json{{"degree", d},
                                 {"parts", parts},
                                 {"merged", to_string(sum)}},
                            {}});
  }
  auto sub = check_reducible(cat, merged, n, opts);
  if (!sub) return std::nullopt;
  c.premises.push_back({"reducible-at-level", "equivalent-product",
                        json{{"expression", product_to_string(merged)}},
                        {*sub}});
  c.conclusion = "the product is equivalent to the coalesced product, which splits";
  return c;
}

// Greedy source elimination: repeatedly peel off a factor all of whose
// outgoing maps are certifiably trivial in every degree up to n.  The induced
// endomorphism matrix is then block triangular, and diagonal blocks of a
// triangular automorphism of a finitely generated abelian group are
// automorphisms of the preserved summand and its quotient.
inline std::optional<Certificate> rule_triangular(const Catalog& cat,
                                                  const std::vector<Factor>& factors,
                                                  int n) {
  std::vector<size_t> remaining(factors.size());
  for (size_t i = 0; i < factors.size(); ++i) remaining[i] = i;
  Certificate c;
  c.rule_id = "R1";
  c.level = n;
  c.anchor = "source-elimination";
  while (remaining.size() > 1) {
    int found = -1;
    json targets;
    for (size_t pos = 0; pos < remaining.size() && found < 0; ++pos) {
      size_t i = remaining[pos];
      json tj = json::array();
      bool ok = true;
      for (size_t j : remaining) {
        if (j == i) continue;
        json reasons = json::array();
        for (int k = 1; k <= n && ok; ++k) {
          auto r = all_maps_trivial_on_pik(cat, factors[i], factors[j], k);
          if (!r) ok = false;
          else reasons.push_back(json{{"k", k}, {"reason", *r}});
        }
        if (!ok) break;
        tj.push_back(json{{"target", space_to_string(factors[j])},
                          {"target_index", j},
                          {"reasons", reasons}});
      }
      if (ok) {
        found = int(pos);
        targets = std::move(tj);
      }
    }
    if (found < 0) return std::nullopt;
    size_t i = remaining[found];
    c.premises.push_back({"trivial-outgoing-maps", "source-elimination",
                          json{{"source", space_to_string(factors[i])},
                               {"source_index", i},
                               {"targets", targets}},
                          {}});
    remaining.erase(remaining.begin() + found);
  }
  c.premises.push_back({"final-factor", "identity-splitting",
                        json{{"factor", space_to_string(factors[remaining[0]])},
                             {"index", remaining[0]}},
                        {}});
  c.conclusion = "triangular splitting forces componentwise membership";
  return c;
}

// All homotopy groups through degree n known, finite, and pairwise without a
// common direct factor: every automorphism of the direct sum then has
// automorphism diagonal blocks, in each degree.
inline std::optional<Certificate> rule_coprime(const Catalog& cat,
                                               const std::vector<Factor>& factors,
                                               int n) {
  Certificate c;
  c.rule_id = "R2";
  c.level = n;
  c.anchor = "coprime-summands";
  for (int k = 1; k <= n; ++k) {
    std::vector<FgAbGroup> gs;
    json names = json::array();
    for (const auto& f : factors) {
      auto g = homotopy_group(cat, f, k);
      if (!g || !g->is_finite()) return std::nullopt;
      names.push_back(to_string(*g));
      gs.push_back(std::move(*g));
    }
    for (size_t i = 0; i < gs.size(); ++i)
      for (size_t j = i + 1; j < gs.size(); ++j)
        if (has_common_direct_factor(gs[i], gs[j])) return std::nullopt;
    c.premises.push_back({"pairwise-coprime-summands", "auto-of-coprime-sum-splits",
                          json{{"k", k}, {"groups", names}}, {}});
  }
  c.conclusion = "degreewise automorphisms split along the factors";
  return c;
}

// All factors atomic with pairwise distinct bottom degrees and declared
// retract-freeness: indecomposable pieces cannot trade places.
inline std::optional<Certificate> rule_atomic(const Catalog& cat,
                                              const std::vector<Factor>& factors,
                                              int n) {
  std::set<int> dims;
  int maxdim = 0;
  for (const auto& f : factors) {
    if (f.space.kind != SpaceKind::atomic) return std::nullopt;
    if (!dims.insert(f.space.dim).second) return std::nullopt;
    maxdim = std::max(maxdim, f.space.dim);
  }
  if (maxdim != n) return std::nullopt;
  Certificate c;
  c.rule_id = "R-ATOMIC";
  c.level = n;
  c.anchor = "indecomposable-factors";
  json dj = json::array();
  for (const auto& f : factors) {
    dj.push_back(json{{"name", f.atomic_name}, {"dim", f.space.dim}});
    c.premises.push_back({"atomic-space", "declared-indecomposable",
                          json{{"name", f.atomic_name},
                               {"dim", f.space.dim},
                               {"module", to_string(f.space.group)}},
                          {}});
  }
  c.premises.push_back(
      {"distinct-dimensions", "bottom-degree-separation", json{{"spaces", dj}}, {}});
  for (size_t i = 0; i < factors.size(); ++i)
    for (size_t j = i + 1; j < factors.size(); ++j) {
      if (!cat.decls.has_no_retract(factors[i].atomic_name, factors[j].atomic_name))
        return std::nullopt;
      c.premises.push_back({"declared-no-retract", "no-crossing-retractions",
                            json{{"a", factors[i].atomic_name},
                                 {"b", factors[j].atomic_name}},
                            {}});
    }
  c.conclusion = "no factor retracts through another, so self-maps split";
  return c;
}

// A single-degree pivot whose bottom degree equals the level, kept apart from
// the rest by nilpotent round trips, reduces the problem to the remainder.
inline std::optional<Certificate> rule_moore(const Catalog& cat,
                                             const std::vector<Factor>& factors,
                                             int n, const EngineOptions& opts) {
  for (size_t i = 0; i < factors.size(); ++i) {
    auto deg = moore_degree(factors[i]);
    if (!deg || *deg != n) continue;
    std::vector<Factor> rest;
    for (size_t j = 0; j < factors.size(); ++j)
      if (j != i) rest.push_back(factors[j]);
    std::vector<Premise> dist;
    bool ok = true;
    for (int k = 1; k <= n && ok; ++k) {
      auto r = product_distance_at(cat, {factors[i]}, rest, k);
      if (!r) ok = false;
      else
        dist.push_back({"product-distance", "round-trip-nilpotence",
                        json{{"k", k}, {"reason", *r}}, {}});
    }
    if (!ok) continue;
    EngineResult rec = compute_ne(cat, rest, opts);
    if (rec.status != NeStatus::exact || rec.value > n) continue;
    Certificate c;
    c.rule_id = "R-MOORE";
    c.level = n;
    c.anchor = "single-homology-pivot";
    c.premises.push_back({"pivot-bottom-degree", "pivot-rigidity",
                          json{{"pivot", space_to_string(factors[i])},
                               {"pivot_index", i},
                               {"degree", n}},
                          {}});
    for (auto& p : dist) c.premises.push_back(std::move(p));
    c.premises.push_back({"remainder-self-closeness", "recursive-computation",
                          json{{"expression", product_to_string(rest)},
                               {"value", rec.value}},
                          {*rec.certificate}});
    c.conclusion = "the pivot is rigid at the level and the remainder is no stiffer";
    return c;
  }
  return std::nullopt;
}

// Pivot in a single degree equal to the level, with a remainder that has no
// homotopy above the level at all (a product of lower Eilenberg-MacLane
// spaces), so the remainder needs no recursive bound.
inline std::optional<Certificate> rule_em_truncation(const Catalog& cat,
                                                     const std::vector<Factor>& factors,
                                                     int n) {
  for (size_t i = 0; i < factors.size(); ++i) {
    const Factor& p = factors[i];
    if (p.space.kind != SpaceKind::eilenberg_maclane || p.space.dim != n) continue;
    std::vector<Factor> rest;
    bool all_em = true;
    json rj = json::array();
    for (size_t j = 0; j < factors.size(); ++j) {
      if (j == i) continue;
      if (factors[j].space.kind != SpaceKind::eilenberg_maclane ||
          factors[j].space.dim > n) {
        all_em = false;
        break;
      }
      rest.push_back(factors[j]);
      rj.push_back(space_to_string(factors[j]));
    }
    if (!all_em) continue;
    std::vector<Premise> dist;
    bool ok = true;
    for (int k = 1; k <= n && ok; ++k) {
      auto r = product_distance_at(cat, {p}, rest, k);
      if (!r) ok = false;
      else
        dist.push_back({"product-distance", "round-trip-nilpotence",
                        json{{"k", k}, {"reason", *r}}, {}});
    }
    if (!ok) continue;
    Certificate c;
    c.rule_id = "R-EM-TRUNC";
    c.level = n;
    c.anchor = "truncated-remainder";
    c.premises.push_back({"pivot-bottom-degree", "pivot-rigidity",
                          json{{"pivot", space_to_string(p)},
                               {"pivot_index", i},
                               {"degree", n}},
                          {}});
    c.premises.push_back({"vanishing-above-level", "em-truncation",
                          json{{"factors", rj}}, {}});
    for (auto& pr : dist) c.premises.push_back(std::move(pr));
    c.conclusion = "the remainder has no homotopy above the level, so the pivot decides";
    return c;
  }
  return std::nullopt;
}

// General pivot rule: the pivot's rigidity extends across the product when
// round trips are nilpotent, the remainder's endomorphism rings absorb those
// nilpotents in every degree, incoming maps die through the pivot's rigid
// range, and the remainder's self-closeness is no larger than the level.
inline std::optional<Certificate> rule_pivot(const Catalog& cat,
                                             const std::vector<Factor>& factors,
                                             int n, const EngineOptions& opts) {
  std::vector<std::vector<size_t>> pivots;
  for (size_t i = 0; i < factors.size(); ++i) pivots.push_back({i});
  if (opts.pivot_search)
    for (size_t len = 2; len + 1 <= factors.size(); ++len) {
      std::vector<size_t> prefix(len);
      for (size_t i = 0; i < len; ++i) prefix[i] = i;
      pivots.push_back(prefix);
    }
  for (const auto& pidx : pivots) {
    std::vector<Factor> pivot, rest;
    std::set<size_t> inp(pidx.begin(), pidx.end());
    for (size_t j = 0; j < factors.size(); ++j)
      (inp.count(j) ? pivot : rest).push_back(factors[j]);
    if (rest.empty()) continue;

    int vp;
    std::vector<Certificate> pivot_sub;
    if (pivot.size() == 1) {
      vp = self_closeness(pivot[0]);
    } else {
      EngineResult rp = compute_ne(cat, pivot, opts);
      if (rp.status != NeStatus::exact) continue;
      vp = rp.value;
      pivot_sub.push_back(*rp.certificate);
    }
    if (n < vp) continue;

    std::vector<Premise> prems;
    json pj = json::array(), ij = json::array();
    for (size_t i : pidx) {
      pj.push_back(space_to_string(factors[i]));
      ij.push_back(i);
    }
    prems.push_back({"pivot-self-closeness",
                     pivot.size() == 1 ? "catalogued-value" : "recursive-computation",
                     json{{"pivot", pj}, {"indices", ij}, {"value", vp}},
                     pivot_sub});

    bool ok = true;
    for (int k = 1; k <= n && ok; ++k) {
      auto r = product_distance_at(cat, pivot, rest, k);
      if (!r) ok = false;
      else
        prems.push_back({"product-distance", "round-trip-nilpotence",
                         json{{"k", k}, {"reason", *r}}, {}});
    }
    if (!ok) continue;
    for (int k = 1; k <= n && ok; ++k) {
      auto sum = sum_pi_k(cat, rest, k);
      if (!sum) {
        ok = false;
        break;
      }
      std::string option, criterion;
      RingVerdict v = is_end_commutative(*sum);
      if (v.status == Tri::yes) {
        option = "commutative";
        criterion = v.criterion;
      } else {
        v = subgroup_criterion(*sum);
        if (v.status == Tri::yes) {
          option = "subgroup";
          criterion = v.criterion;
        } else {
          v = is_J_reduced_end(*sum);
          if (v.status == Tri::yes) {
            option = "radical-containment";
            criterion = v.criterion;
          } else {
            ok = false;
            break;
          }
        }
      }
      prems.push_back({"ring-condition", "nilpotent-absorption",
                       json{{"k", k},
                            {"group", to_string(*sum)},
                            {"option", option},
                            {"criterion", criterion}},
                       {}});
    }
    if (!ok) continue;
    for (int k = 1; k <= vp && ok; ++k) {
      auto r = product_maps_trivial(cat, rest, pivot, k);
      if (!r) ok = false;
      else
        prems.push_back({"incoming-triviality", "pivot-untouched",
                         json{{"k", k}, {"reason", *r}}, {}});
    }
    if (!ok) continue;
    EngineResult rec = compute_ne(cat, rest, opts);
    if (rec.status != NeStatus::exact || rec.value > n) continue;
    prems.push_back({"remainder-self-closeness", "recursive-computation",
                     json{{"expression", product_to_string(rest)},
                          {"value", rec.value}},
                     {*rec.certificate}});
    Certificate c;
    c.rule_id = "R3";
    c.level = n;
    c.anchor = "rigid-pivot";
    c.premises = std::move(prems);
    c.conclusion = "the pivot's rigidity propagates across nilpotent interactions";
    return c;
  }
  return std::nullopt;
}

// Two projective spaces from the same family with different dimensions.
inline std::optional<Certificate> rule_projective(const std::vector<Factor>& factors,
                                                  int n) {
  if (factors.size() != 2) return std::nullopt;
  SpaceKind k0 = factors[0].space.kind;
  if (k0 != factors[1].space.kind) return std::nullopt;
  if (k0 != SpaceKind::real_proj && k0 != SpaceKind::cplx_proj &&
      k0 != SpaceKind::quat_proj)
    return std::nullopt;
  if (factors[0].space.dim == factors[1].space.dim) return std::nullopt;
  if (n != std::max(self_closeness(factors[0]), self_closeness(factors[1])))
    return std::nullopt;
  Certificate c;
  c.rule_id = "R-PROJ";
  c.level = n;
  c.anchor = "projective-pair";
  c.premises.push_back(
      {"projective-family-pair", "same-family-distinct-dimensions",
       json{{"family", k0 == SpaceKind::real_proj
                           ? "RP"
                           : (k0 == SpaceKind::cplx_proj ? "CP" : "HP")},
            {"dims", json::array({factors[0].space.dim, factors[1].space.dim})}},
       {}});
  c.premises.push_back({"level-is-max-self-closeness", "pairwise-rigidity",
                        json{{"value", n}}, {}});
  c.conclusion = "cross maps between the pair cannot build an exotic equivalence";
  return c;
}

// Two lens spaces of different dimension, any (possibly equal) orders.
inline std::optional<Certificate> rule_lens(const std::vector<Factor>& factors, int n) {
  if (factors.size() != 2) return std::nullopt;
  if (factors[0].space.kind != SpaceKind::lens ||
      factors[1].space.kind != SpaceKind::lens)
    return std::nullopt;
  if (factors[0].space.dim == factors[1].space.dim) return std::nullopt;
  if (n != std::max(factors[0].space.dim, factors[1].space.dim)) return std::nullopt;
  Certificate c;
  c.rule_id = "R-LENS";
  c.level = n;
  c.anchor = "lens-pair";
  c.premises.push_back(
      {"lens-pair", "distinct-dimensions",
       json{{"dims", json::array({factors[0].space.dim, factors[1].space.dim})},
            {"orders",
             json::array({factors[0].space.lens_order, factors[1].space.lens_order})}},
       {}});
  c.premises.push_back({"level-is-max-self-closeness", "pairwise-rigidity",
                        json{{"value", n}}, {}});
  c.conclusion = "cross maps between the pair cannot build an exotic equivalence";
  return c;
}

inline std::optional<Certificate> check_reducible(const Catalog& cat,
                                                  const std::vector<Factor>& factors,
                                                  int n, const EngineOptions& opts) {
  if (factors.empty()) fail("check_reducible: empty product");
  if (factors.size() == 1) return rule_trivial_cert(factors, n);
  if (auto c = rule_em_merge(cat, factors, n, opts)) return c;
  if (auto c = rule_triangular(cat, factors, n)) return c;
  if (auto c = rule_coprime(cat, factors, n)) return c;
  if (auto c = rule_atomic(cat, factors, n)) return c;
  if (auto c = rule_moore(cat, factors, n, opts)) return c;
  if (auto c = rule_em_truncation(cat, factors, n)) return c;
  if (auto c = rule_pivot(cat, factors, n, opts)) return c;
  if (auto c = rule_projective(factors, n)) return c;
  if (auto c = rule_lens(factors, n)) return c;
  return std::nullopt;
}

inline EngineResult compute_ne(const Catalog& cat, const std::vector<Factor>& factors,
                               const EngineOptions& opts) {
  if (factors.empty()) fail("compute_ne: empty product");
  int n = max_self_closeness(factors);
  EngineResult out;
  out.value = n;
  if (factors.size() == 1) {
    Certificate c;
    c.rule_id = "R-SINGLE";
    c.level = n;
    c.anchor = "catalogued-value";
    c.premises.push_back({"factor-self-closeness", "catalogued-value",
                          json{{"factor", space_to_string(factors[0])},
                               {"index", 0},
                               {"value", n}},
                          {}});
    c.conclusion = "a single catalogued space has its catalogued self-closeness";
    out.status = NeStatus::exact;
    out.certificate = std::move(c);
    return out;
  }
  Certificate top;
  top.rule_id = "R-PRODUCT";
  top.level = n;
  top.anchor = "reducible-at-max-level";
  for (size_t i = 0; i < factors.size(); ++i)
    top.premises.push_back({"factor-self-closeness", "catalogued-value",
                            json{{"factor", space_to_string(factors[i])},
                                 {"index", i},
                                 {"value", self_closeness(factors[i])}},
                            {}});
  top.premises.push_back({"max-lower-bound", "diagonal-self-maps",
                          json{{"value", n}}, {}});
  auto sub = check_reducible(cat, factors, n, opts);
  if (!sub) {
    out.status = NeStatus::lower_bound;
    out.note = "no splitting rule applies at level " + std::to_string(n);
    return out;
  }
  top.premises.push_back({"reducible-at-level", "componentwise-splitting",
                          json::object(), {*sub}});
  top.conclusion = "the product's self-closeness equals the level";
  out.status = NeStatus::exact;
  out.certificate = std::move(top);
  return out;
}

// -- verification ---------------------------------------------------------------

struct VerifyOutcome {
  bool ok = true;
  std::string error;
};

inline VerifyOutcome verify_fail(const std::string& path, const std::string& why) {
  return {false, path + ": " + why};
}

inline VerifyOutcome verify_result(const Catalog& cat,
                                   const std::vector<Factor>& factors, NeStatus status,
                                   int value, const Certificate* cert);

namespace detail {

inline const Premise* find_premise(const Certificate& c, const std::string& fact,
                                   size_t nth = 0) {
  size_t seen = 0;
  for (const auto& p : c.premises)
    if (p.fact == fact && seen++ == nth) return &p;
  return nullptr;
}

inline std::vector<const Premise*> premises_of(const Certificate& c,
                                               const std::string& fact) {
  std::vector<const Premise*> out;
  for (const auto& p : c.premises)
    if (p.fact == fact) out.push_back(&p);
  return out;
}

// Degreewise premises carrying {"k", "reason"} tags, re-derived via fn.
template <typename Fn>
VerifyOutcome check_degree_reasons(const Certificate& c, const std::string& fact,
                                   int from_k, int to_k, const std::string& path,
                                   Fn&& recompute) {
  auto prems = premises_of(c, fact);
  if (int(prems.size()) != to_k - from_k + 1)
    return verify_fail(path, "expected " + std::to_string(to_k - from_k + 1) + " " +
                                 fact + " premises, found " +
                                 std::to_string(prems.size()));
  std::set<int> covered;
  for (const auto* p : prems) {
    int k = p->data.at("k").get<int>();
    if (k < from_k || k > to_k || !covered.insert(k).second)
      return verify_fail(path + "." + fact, "degree out of range or repeated");
    std::string claimed = p->data.at("reason").get<std::string>();
    auto actual = recompute(k);
    if (!actual)
      return verify_fail(path + "." + fact,
                         "no justification re-derivable at degree " + std::to_string(k));
    if (*actual != claimed)
      return verify_fail(path + "." + fact,
                         "recorded reason '" + claimed + "' at degree " +
                             std::to_string(k) + " does not re-derive (got '" +
                             *actual + "')");
  }
  return {};
}

inline VerifyOutcome verify_rule(const Catalog& cat, const std::vector<Factor>& factors,
                                 int level, const Certificate& c,
                                 const std::string& path);

inline VerifyOutcome verify_triangular(const Catalog& cat,
                                       const std::vector<Factor>& factors, int level,
                                       const Certificate& c, const std::string& path) {
  std::set<size_t> remaining;
  for (size_t i = 0; i < factors.size(); ++i) remaining.insert(i);
  size_t step = 0;
  for (const auto& p : c.premises) {
    std::string ppath = path + ".premises[" + std::to_string(step++) + "]";
    if (p.fact == "final-factor") {
      if (remaining.size() != 1)
        return verify_fail(ppath, "final factor before elimination finished");
      size_t idx = p.data.at("index").get<size_t>();
      if (!remaining.count(idx)) return verify_fail(ppath, "final factor mismatch");
      remaining.erase(idx);
      continue;
    }
    if (p.fact != "trivial-outgoing-maps")
      return verify_fail(ppath, "unexpected fact " + p.fact);
    size_t i = p.data.at("source_index").get<size_t>();
    if (!remaining.count(i)) return verify_fail(ppath, "source already eliminated");
    std::set<size_t> targets_seen;
    for (const auto& t : p.data.at("targets")) {
      size_t j = t.at("target_index").get<size_t>();
      if (j == i || !remaining.count(j))
        return verify_fail(ppath, "target not among remaining factors");
      targets_seen.insert(j);
      std::set<int> ks;
      for (const auto& r : t.at("reasons")) {
        int k = r.at("k").get<int>();
        ks.insert(k);
        auto actual = all_maps_trivial_on_pik(cat, factors[i], factors[j], k);
        if (!actual || *actual != r.at("reason").get<std::string>())
          return verify_fail(ppath, "triviality at degree " + std::to_string(k) +
                                        " toward " + space_to_string(factors[j]) +
                                        " does not re-derive");
      }
      for (int k = 1; k <= level; ++k)
        if (!ks.count(k))
          return verify_fail(ppath, "degree " + std::to_string(k) + " missing");
    }
    if (targets_seen.size() != remaining.size() - 1)
      return verify_fail(ppath, "not every remaining factor is covered");
    remaining.erase(i);
  }
  if (!remaining.empty()) return verify_fail(path, "elimination did not finish");
  return {};
}

inline VerifyOutcome verify_rule(const Catalog& cat, const std::vector<Factor>& factors,
                                 int level, const Certificate& c,
                                 const std::string& path) {
  if (c.level != level)
    return verify_fail(path, "level " + std::to_string(c.level) +
                                 " does not match expected " + std::to_string(level));
  if (c.rule_id == "R-TRIVIAL") {
    if (factors.size() != 1) return verify_fail(path, "more than one factor");
    return {};
  }
  if (c.rule_id == "R-EM-MERGE") {
    for (const auto& f : factors)
      if (f.space.kind != SpaceKind::eilenberg_maclane)
        return verify_fail(path, "non-EM factor present");
    std::map<int, FgAbGroup> sums;
    std::vector<int> degree_order;
    for (const auto& f : factors) {
      if (!sums.count(f.space.dim)) degree_order.push_back(f.space.dim);
      sums[f.space.dim] = direct_sum(sums[f.space.dim], f.space.group);
    }
    if (degree_order.size() == factors.size())
      return verify_fail(path, "no degree actually merges");
    for (const auto* p : premises_of(c, "em-product-merge")) {
      int d = p->data.at("degree").get<int>();
      if (!sums.count(d)) return verify_fail(path, "merge at absent degree");
      if (p->data.at("merged").get<std::string>() != to_string(sums[d]))
        return verify_fail(path, "merged group mismatch at degree " + std::to_string(d));
    }
    const Premise* red = find_premise(c, "reducible-at-level");
    if (!red || red->sub.size() != 1)
      return verify_fail(path, "missing merged reducibility premise");
    std::vector<Factor> merged;
    for (int d : degree_order) {
      Factor m;
      m.space = {SpaceKind::eilenberg_maclane, d, sums[d], 0};
      merged.push_back(m);
    }
    return verify_rule(cat, merged, level, red->sub[0], path + ".sub");
  }
  if (c.rule_id == "R1") return verify_triangular(cat, factors, level, c, path);
  if (c.rule_id == "R2") {
    auto prems = premises_of(c, "pairwise-coprime-summands");
    if (int(prems.size()) != level)
      return verify_fail(path, "expected one premise per degree");
    for (const auto* p : prems) {
      int k = p->data.at("k").get<int>();
      if (k < 1 || k > level) return verify_fail(path, "degree out of range");
      std::vector<FgAbGroup> gs;
      for (const auto& f : factors) {
        auto g = homotopy_group(cat, f, k);
        if (!g || !g->is_finite())
          return verify_fail(path, "group not known finite at degree " +
                                       std::to_string(k));
        gs.push_back(std::move(*g));
      }
      for (size_t i = 0; i < gs.size(); ++i)
        for (size_t j = i + 1; j < gs.size(); ++j)
          if (has_common_direct_factor(gs[i], gs[j]))
            return verify_fail(path, "common direct factor at degree " +
                                         std::to_string(k));
    }
    return {};
  }
  if (c.rule_id == "R-ATOMIC") {
    std::set<int> dims;
    int maxdim = 0;
    for (const auto& f : factors) {
      if (f.space.kind != SpaceKind::atomic)
        return verify_fail(path, "non-atomic factor");
      if (!dims.insert(f.space.dim).second)
        return verify_fail(path, "repeated bottom degree");
      maxdim = std::max(maxdim, f.space.dim);
    }
    if (maxdim != level) return verify_fail(path, "level is not the top degree");
    for (size_t i = 0; i < factors.size(); ++i)
      for (size_t j = i + 1; j < factors.size(); ++j)
        if (!cat.decls.has_no_retract(factors[i].atomic_name, factors[j].atomic_name))
          return verify_fail(path, "retract-freeness not declared for " +
                                       factors[i].atomic_name + ", " +
                                       factors[j].atomic_name);
    return {};
  }
  if (c.rule_id == "R-MOORE" || c.rule_id == "R-EM-TRUNC") {
    const Premise* pp = find_premise(c, "pivot-bottom-degree");
    if (!pp) return verify_fail(path, "missing pivot premise");
    size_t i = pp->data.at("pivot_index").get<size_t>();
    if (i >= factors.size()) return verify_fail(path, "pivot index out of range");
    if (c.rule_id == "R-MOORE") {
      auto deg = moore_degree(factors[i]);
      if (!deg || *deg != level)
        return verify_fail(path, "pivot bottom degree is not the level");
    } else {
      if (factors[i].space.kind != SpaceKind::eilenberg_maclane ||
          factors[i].space.dim != level)
        return verify_fail(path, "pivot is not a level-degree EM space");
    }
    std::vector<Factor> rest;
    for (size_t j = 0; j < factors.size(); ++j)
      if (j != i) rest.push_back(factors[j]);
    auto vo = check_degree_reasons(
        c, "product-distance", 1, level, path, [&](int k) {
          return product_distance_at(cat, {factors[i]}, rest, k);
        });
    if (!vo.ok) return vo;
    if (c.rule_id == "R-EM-TRUNC") {
      for (const auto& f : rest)
        if (f.space.kind != SpaceKind::eilenberg_maclane || f.space.dim > level)
          return verify_fail(path, "remainder has possible homotopy above the level");
      if (!find_premise(c, "vanishing-above-level"))
        return verify_fail(path, "missing truncation premise");
      return {};
    }
    const Premise* rp = find_premise(c, "remainder-self-closeness");
    if (!rp || rp->sub.size() != 1)
      return verify_fail(path, "missing remainder recursion");
    int v = rp->data.at("value").get<int>();
    if (v > level) return verify_fail(path, "remainder exceeds the level");
    auto sub = verify_result(cat, rest, NeStatus::exact, v, &rp->sub[0]);
    if (!sub.ok) return verify_fail(path + ".sub", sub.error);
    return {};
  }
  if (c.rule_id == "R3") {
    const Premise* pp = find_premise(c, "pivot-self-closeness");
    if (!pp) return verify_fail(path, "missing pivot premise");
    std::set<size_t> pidx;
    for (const auto& e : pp->data.at("indices")) pidx.insert(e.get<size_t>());
    if (pidx.empty() || pidx.size() >= factors.size() ||
        *pidx.rbegin() >= factors.size())
      return verify_fail(path, "bad pivot index set");
    std::vector<Factor> pivot, rest;
    for (size_t j = 0; j < factors.size(); ++j)
      (pidx.count(j) ? pivot : rest).push_back(factors[j]);
    int vp = pp->data.at("value").get<int>();
    if (pivot.size() == 1) {
      if (self_closeness(pivot[0]) != vp)
        return verify_fail(path, "pivot self-closeness mismatch");
    } else {
      if (pp->sub.size() != 1)
        return verify_fail(path, "grouped pivot needs a recursive certificate");
      auto sub = verify_result(cat, pivot, NeStatus::exact, vp, &pp->sub[0]);
      if (!sub.ok) return verify_fail(path + ".pivot-sub", sub.error);
    }
    if (vp > level) return verify_fail(path, "pivot exceeds the level");
    auto vo = check_degree_reasons(c, "product-distance", 1, level, path, [&](int k) {
      return product_distance_at(cat, pivot, rest, k);
    });
    if (!vo.ok) return vo;
    auto rings = premises_of(c, "ring-condition");
    if (int(rings.size()) != level)
      return verify_fail(path, "expected one ring premise per degree");
    for (const auto* p : rings) {
      int k = p->data.at("k").get<int>();
      if (k < 1 || k > level) return verify_fail(path, "ring degree out of range");
      auto sum = sum_pi_k(cat, rest, k);
      if (!sum)
        return verify_fail(path, "remainder group unknown at degree " +
                                     std::to_string(k));
      if (to_string(*sum) != p->data.at("group").get<std::string>())
        return verify_fail(path, "remainder group mismatch at degree " +
                                     std::to_string(k));
      std::string option = p->data.at("option").get<std::string>();
      RingVerdict v;
      if (option == "commutative") v = is_end_commutative(*sum);
      else if (option == "subgroup") v = subgroup_criterion(*sum);
      else if (option == "radical-containment") v = is_J_reduced_end(*sum);
      else return verify_fail(path, "unknown ring option " + option);
      if (v.status != Tri::yes)
        return verify_fail(path, "ring condition '" + option +
                                     "' does not re-derive at degree " +
                                     std::to_string(k));
      if (v.criterion != p->data.at("criterion").get<std::string>())
        return verify_fail(path, "ring criterion mismatch at degree " +
                                     std::to_string(k));
    }
    vo = check_degree_reasons(c, "incoming-triviality", 1, vp, path, [&](int k) {
      return product_maps_trivial(cat, rest, pivot, k);
    });
    if (!vo.ok) return vo;
    const Premise* rp = find_premise(c, "remainder-self-closeness");
    if (!rp || rp->sub.size() != 1)
      return verify_fail(path, "missing remainder recursion");
    int v = rp->data.at("value").get<int>();
    if (v > level) return verify_fail(path, "remainder exceeds the level");
    auto sub = verify_result(cat, rest, NeStatus::exact, v, &rp->sub[0]);
    if (!sub.ok) return verify_fail(path + ".sub", sub.error);
    return {};
  }
  if (c.rule_id == "R-PROJ") {
    if (factors.size() != 2) return verify_fail(path, "needs exactly two factors");
    SpaceKind k0 = factors[0].space.kind;
    if (k0 != factors[1].space.kind ||
        (k0 != SpaceKind::real_proj && k0 != SpaceKind::cplx_proj &&
         k0 != SpaceKind::quat_proj))
      return verify_fail(path, "not a same-family projective pair");
    if (factors[0].space.dim == factors[1].space.dim)
      return verify_fail(path, "equal dimensions");
    if (level != std::max(self_closeness(factors[0]), self_closeness(factors[1])))
      return verify_fail(path, "level mismatch");
    return {};
  }
  if (c.rule_id == "R-LENS") {
    if (factors.size() != 2 || factors[0].space.kind != SpaceKind::lens ||
        factors[1].space.kind != SpaceKind::lens)
      return verify_fail(path, "not a lens pair");
    if (factors[0].space.dim == factors[1].space.dim)
      return verify_fail(path, "equal dimensions");
    if (level != std::max(factors[0].space.dim, factors[1].space.dim))
      return verify_fail(path, "level mismatch");
    return {};
  }
  return verify_fail(path, "unknown rule " + c.rule_id);
}

}  // namespace detail

inline VerifyOutcome verify_result(const Catalog& cat,
                                   const std::vector<Factor>& factors, NeStatus status,
                                   int value, const Certificate* cert) {
  if (factors.empty()) return verify_fail("result", "empty product");
  int n = max_self_closeness(factors);
  if (value != n)
    return verify_fail("result", "value " + std::to_string(value) +
                                     " is not the factor maximum " + std::to_string(n));
  if (status == NeStatus::lower_bound) {
    if (cert) return verify_fail("result", "lower bound must not carry a certificate");
    return {};
  }
  if (!cert) return verify_fail("result", "exact result requires a certificate");
  if (cert->level != n) return verify_fail("certificate", "level mismatch");
  if (factors.size() == 1) {
    if (cert->rule_id != "R-SINGLE")
      return verify_fail("certificate", "single factor needs rule R-SINGLE");
    const Premise* p = detail::find_premise(*cert, "factor-self-closeness");
    if (!p || p->data.at("value").get<int>() != n)
      return verify_fail("certificate", "catalogued value mismatch");
    return {};
  }
  if (cert->rule_id != "R-PRODUCT")
    return verify_fail("certificate", "products need rule R-PRODUCT at the top");
  auto facs = detail::premises_of(*cert, "factor-self-closeness");
  if (facs.size() != factors.size())
    return verify_fail("certificate", "one factor premise per factor required");
  for (const auto* p : facs) {
    size_t i = p->data.at("index").get<size_t>();
    if (i >= factors.size()) return verify_fail("certificate", "factor index range");
    if (p->data.at("value").get<int>() != self_closeness(factors[i]))
      return verify_fail("certificate", "catalogued value mismatch for " +
                                            space_to_string(factors[i]));
  }
  const Premise* mx = detail::find_premise(*cert, "max-lower-bound");
  if (!mx || mx->data.at("value").get<int>() != n)
    return verify_fail("certificate", "lower bound premise mismatch");
  const Premise* red = detail::find_premise(*cert, "reducible-at-level");
  if (!red || red->sub.size() != 1)
    return verify_fail("certificate", "missing reducibility premise");
  return detail::verify_rule(cat, factors, n, red->sub[0], "certificate.rule");
}

// -- result envelope ------------------------------------------------------------

struct Envelope {
  std::string expression;
  Declarations decls;
  NeStatus status = NeStatus::lower_bound;
  int value = 0;
  std::optional<Certificate> certificate;
};

inline json envelope_to_json(const std::string& expression, const Declarations& decls,
                             const EngineResult& r) {
  json atomics = json::array();
  for (const auto& [name, d] : decls.atomics)
    atomics.push_back(json{
        {"name", name}, {"dim", d.dim}, {"module", to_string(d.module)}});
  json pairs = json::array();
  for (const auto& [a, b] : decls.no_retract) pairs.push_back(json::array({a, b}));
  json out{{"expression", expression},
           {"declarations", json{{"atomics", atomics}, {"no_retract", pairs}}},
           {"status", to_string(r.status)},
           {"value", r.value}};
  if (r.certificate) {
    json jc;
    to_json(jc, *r.certificate);
    out["certificate"] = std::move(jc);
  } else {
    out["certificate"] = nullptr;
  }
  if (!r.note.empty()) out["note"] = r.note;
  return out;
}

inline Envelope envelope_from_json(const json& j) {
  Envelope e;
  e.expression = j.at("expression").get<std::string>();
  if (j.contains("declarations")) {
    for (const auto& a : j.at("declarations").at("atomics"))
      e.decls.declare_atomic(a.at("name").get<std::string>(), a.at("dim").get<int>(),
                             parse_group(a.at("module").get<std::string>()));
    for (const auto& p : j.at("declarations").at("no_retract"))
      e.decls.declare_no_retract(p.at(0).get<std::string>(),
                                 p.at(1).get<std::string>());
  }
  std::string st = j.at("status").get<std::string>();
  if (st == "EXACT") e.status = NeStatus::exact;
  else if (st == "LOWER_BOUND") e.status = NeStatus::lower_bound;
  else fail("envelope: unknown status " + st);
  e.value = j.at("value").get<int>();
  if (j.contains("certificate") && !j.at("certificate").is_null())
    e.certificate = certificate_from_json(j.at("certificate"));
  return e;
}

}  // namespace selfclose
