// The space catalogue: spheres, Moore and Eilenberg-MacLane spaces,
// projective spaces, lens spaces, and user-declared atomic spaces.  Provides
// homotopy groups (three-valued: known group or unknown), self-closeness
// values, and the distance predicates the product engine consumes.
#pragma once
#include <fstream>
#include <set>
#include <sstream>

#include "abgroup.hpp"
#include "homs.hpp"
#include "sphere_table_data.hpp"

namespace selfclose {

// -- sphere table ------------------------------------------------------------

// Homotopy groups of spheres above the diagonal.  Everything below the
// diagonal is zero and the diagonal is infinite cyclic; those facts are baked
// into lookups and enforced against explicit file entries.
class SphereTable {
 public:
  static SphereTable from_string(const std::string& text, const std::string& origin) {
    SphereTable t;
    std::istringstream in(text);
    std::string line;
    size_t line_no = 0, consumed = 0;
    while (std::getline(in, line)) {
      ++line_no;
      size_t pos = consumed;
      consumed += line.size() + 1;
      std::string body = line.substr(0, line.find('#'));
      std::istringstream ls(body);
      long long n = 0, k = 0;
      std::string grp;
      if (!(ls >> n)) continue;  // blank or comment-only line
      if (!(ls >> k >> grp))
        throw ParseError(origin + ": line " + std::to_string(line_no) +
                             ": expected \"n k group\"",
                         pos);
      std::string extra;
      if (ls >> extra)
        throw ParseError(origin + ": line " + std::to_string(line_no) +
                             ": trailing text after group",
                         pos);
      if (n < 1 || k < 1)
        throw ParseError(origin + ": line " + std::to_string(line_no) +
                             ": indices must be positive",
                         pos);
      FgAbGroup g = parse_group(grp, pos);
      if (k < n && !g.is_trivial())
        throw ParseError(origin + ": line " + std::to_string(line_no) +
                             ": groups below the diagonal must be trivial",
                         pos);
      if (k == n && g != FgAbGroup{1, {}})
        throw ParseError(origin + ": line " + std::to_string(line_no) +
                             ": diagonal groups must be infinite cyclic",
                         pos);
      auto key = std::make_pair(int(n), int(k));
      if (t.table_.count(key))
        throw ParseError(origin + ": line " + std::to_string(line_no) +
                             ": duplicate entry for this (n, k)",
                         pos);
      t.table_.emplace(key, std::move(g));
    }
    return t;
  }

  static SphereTable from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("sphere table: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_string(buf.str(), path);
  }

  static SphereTable builtin() {
    return from_string(builtin_sphere_table_text(), "builtin table");
  }

  std::optional<FgAbGroup> get(int n, int k) const {
    if (n < 1 || k < 1) fail("sphere table: indices must be positive");
    if (k < n) return FgAbGroup{};
    if (k == n) return FgAbGroup{1, {}};
    auto it = table_.find({n, k});
    if (it == table_.end()) return std::nullopt;
    return it->second;
  }

  size_t entries() const { return table_.size(); }

 private:
  std::map<std::pair<int, int>, FgAbGroup> table_;
};

// -- spaces -------------------------------------------------------------------

enum class SpaceKind {
  sphere,
  moore,
  eilenberg_maclane,
  real_proj,
  cplx_proj,
  quat_proj,
  lens,
  atomic
};

struct Space {
  SpaceKind kind = SpaceKind::sphere;
  int dim = 1;        // sphere/projective index, Moore/EM degree, lens dimension,
                      // or the atomic space's first nontrivial degree
  FgAbGroup group;    // Moore/EM coefficients or the atomic space's bottom module
  i64 lens_order = 0; // fundamental group order of a lens space

  bool operator==(const Space& o) const = default;
};

inline Space make_sphere(int n) {
  if (n < 1) fail("sphere: dimension must be at least 1");
  return {SpaceKind::sphere, n, {}, 0};
}
inline Space make_moore(const FgAbGroup& g, int n) {
  if (n < 2) fail("Moore space: degree must be at least 2");
  if (g.is_trivial()) fail("Moore space: coefficient group must be nontrivial");
  return {SpaceKind::moore, n, g, 0};
}
inline Space make_em(const FgAbGroup& g, int n) {
  if (n < 1) fail("Eilenberg-MacLane space: degree must be at least 1");
  if (g.is_trivial()) fail("Eilenberg-MacLane space: coefficient group must be nontrivial");
  return {SpaceKind::eilenberg_maclane, n, g, 0};
}
inline Space make_real_proj(int n) {
  if (n < 2) fail("real projective space: dimension must be at least 2");
  return {SpaceKind::real_proj, n, {}, 0};
}
inline Space make_cplx_proj(int n) {
  if (n < 2) fail("complex projective space: dimension must be at least 2");
  return {SpaceKind::cplx_proj, n, {}, 0};
}
inline Space make_quat_proj(int n) {
  if (n < 2) fail("quaternionic projective space: dimension must be at least 2");
  return {SpaceKind::quat_proj, n, {}, 0};
}
inline Space make_lens(int d, i64 p) {
  if (d < 3 || d % 2 == 0) fail("lens space: dimension must be odd and at least 3");
  if (!is_prime(p)) fail("lens space: fundamental group order must be prime");
  return {SpaceKind::lens, d, {}, p};
}

struct AtomicDecl {
  int dim = 0;        // first degree with a nontrivial homotopy group
  FgAbGroup module;   // that group
};

// Facts about atomic spaces are never inferred; they enter only by
// declaration (including which pairs admit no retract either way).
struct Declarations {
  std::map<std::string, AtomicDecl> atomics;
  std::set<std::pair<std::string, std::string>> no_retract;

  void declare_atomic(const std::string& name, int dim, const FgAbGroup& module) {
    if (dim < 1) fail("atomic declaration: degree must be at least 1");
    if (module.is_trivial()) fail("atomic declaration: module must be nontrivial");
    atomics[name] = {dim, module};
  }
  void declare_no_retract(const std::string& a, const std::string& b) {
    no_retract.insert({std::min(a, b), std::max(a, b)});
  }
  bool has_no_retract(const std::string& a, const std::string& b) const {
    return no_retract.count({std::min(a, b), std::max(a, b)}) > 0;
  }
};

// Space augmented with the atomic name (empty for catalogued kinds).
struct Factor {
  Space space;
  std::string atomic_name;

  bool operator==(const Factor& o) const = default;
};

inline Factor make_atomic_factor(const std::string& name, const Declarations& d) {
  auto it = d.atomics.find(name);
  if (it == d.atomics.end()) fail("atomic space not declared: " + name);
  Factor f;
  f.space = {SpaceKind::atomic, it->second.dim, it->second.module, 0};
  f.atomic_name = name;
  return f;
}

inline std::string space_to_string(const Factor& f) {
  const Space& s = f.space;
  switch (s.kind) {
    case SpaceKind::sphere: return "S^" + std::to_string(s.dim);
    case SpaceKind::moore: return "M(" + to_string(s.group) + "," + std::to_string(s.dim) + ")";
    case SpaceKind::eilenberg_maclane:
      return "K(" + to_string(s.group) + "," + std::to_string(s.dim) + ")";
    case SpaceKind::real_proj: return "RP^" + std::to_string(s.dim);
    case SpaceKind::cplx_proj: return "CP^" + std::to_string(s.dim);
    case SpaceKind::quat_proj: return "HP^" + std::to_string(s.dim);
    case SpaceKind::lens:
      return "L(" + std::to_string(s.dim) + "," + std::to_string(s.lens_order) + ")";
    case SpaceKind::atomic: return "atomic:" + f.atomic_name;
  }
  fail("space_to_string: bad kind");
}

// -- catalogue queries --------------------------------------------------------

struct CatalogBounds {
  i64 hom_cap = 4096;          // per hom-set enumeration cap
  i64 pair_budget = 1 << 22;   // composite pairs tried per degree
};

struct Catalog {
  SphereTable table = SphereTable::builtin();
  Declarations decls;
  CatalogBounds bounds;
};

// pi_k of a catalogued space, or nullopt when outside decidable range.
inline std::optional<FgAbGroup> homotopy_group(const Catalog& cat, const Factor& f, int k) {
  if (k < 1) fail("homotopy_group: degree must be at least 1");
  const Space& s = f.space;
  const FgAbGroup Z{1, {}};
  switch (s.kind) {
    case SpaceKind::sphere:
      return cat.table.get(s.dim, k);
    case SpaceKind::moore:
      if (s.group == Z) return cat.table.get(s.dim, k);  // a sphere in disguise
      if (k < s.dim) return FgAbGroup{};
      if (k == s.dim) return s.group;
      return std::nullopt;
    case SpaceKind::eilenberg_maclane:
      return k == s.dim ? s.group : FgAbGroup{};
    case SpaceKind::real_proj:
      // Universal cover S^n, unchanged above degree 1.
      if (k == 1) return FgAbGroup{0, {2}};
      return cat.table.get(s.dim, k);
    case SpaceKind::cplx_proj:
      // Fibration S^1 -> S^(2n+1) -> CP^n.
      if (k == 1) return FgAbGroup{};
      if (k == 2) return Z;
      return cat.table.get(2 * s.dim + 1, k);
    case SpaceKind::quat_proj:
      // Fibration S^3 -> S^(4n+3) -> HP^n shifts the fiber's groups up one
      // degree through the connectivity range.
      if (k == 1) return FgAbGroup{};
      if (k <= 4 * s.dim + 2) return cat.table.get(3, k - 1);
      return std::nullopt;
    case SpaceKind::lens:
      if (k == 1) return FgAbGroup{0, {s.lens_order}};
      return cat.table.get(s.dim, k);
    case SpaceKind::atomic:
      if (k < s.dim) return FgAbGroup{};
      if (k == s.dim) return s.group;
      return std::nullopt;
  }
  fail("homotopy_group: bad kind");
}

// Catalogued self-closeness of a single space.
inline int self_closeness(const Factor& f) {
  switch (f.space.kind) {
    case SpaceKind::sphere: return f.space.dim;
    case SpaceKind::moore: return f.space.dim;
    case SpaceKind::eilenberg_maclane: return f.space.dim;
    case SpaceKind::real_proj: return f.space.dim;
    case SpaceKind::cplx_proj: return 2;
    case SpaceKind::quat_proj: return 4;
    case SpaceKind::lens: return f.space.dim;
    case SpaceKind::atomic: return f.space.dim;
  }
  fail("self_closeness: bad kind");
}

// Moore-like spaces carry their reduced homology in a single degree, which
// drives the naturality arguments below.
inline std::optional<int> moore_degree(const Factor& f) {
  if (f.space.kind == SpaceKind::moore) return f.space.dim;
  if (f.space.kind == SpaceKind::sphere && f.space.dim >= 2) return f.space.dim;
  return std::nullopt;
}

// Can every map X -> Y be certified trivial on pi_k?  Returns the reason tag.
inline std::optional<std::string> all_maps_trivial_on_pik(const Catalog& cat,
                                                          const Factor& x,
                                                          const Factor& y, int k) {
  auto gx = homotopy_group(cat, x, k);
  auto gy = homotopy_group(cat, y, k);
  if (gx && gx->is_trivial()) return "zero-source";
  if (gy && gy->is_trivial()) return "zero-target";
  if (gx && gy && hom_group(*gx, *gy).is_trivial()) return "hom-vanishing";
  // A sphere with no essential maps into Y: the mapping set collapses, so
  // every induced morphism vanishes in every degree.
  bool x_is_sphere = x.space.kind == SpaceKind::sphere ||
                     (x.space.kind == SpaceKind::moore && x.space.group == FgAbGroup{1, {}});
  if (x_is_sphere) {
    auto ga = homotopy_group(cat, y, x.space.dim);
    if (ga && ga->is_trivial()) return "null-mapping-set";
  }
  // At the bottom degree of a single-homology target, the bottom homotopy
  // group maps isomorphically to homology, and the source has none there.
  auto dx = moore_degree(x);
  auto dy = moore_degree(y);
  if (dx && dy && *dy == k && *dx != k) return "hurewicz-naturality";
  return std::nullopt;
}

struct DegreeReason {
  int k = 0;
  std::string reason;
};

struct DistanceResult {
  bool ok = false;
  std::vector<DegreeReason> reasons;  // one per degree when ok
  int failed_k = 0;
};

// Nilpotence of every round trip through the other space, degree by degree.
inline DistanceResult are_n_distant(const Catalog& cat, const Factor& x,
                                    const Factor& y, int n) {
  DistanceResult out;
  for (int k = 1; k <= n; ++k) {
    auto gx = homotopy_group(cat, x, k);
    auto gy = homotopy_group(cat, y, k);
    std::optional<std::string> reason;
    if (gx && gx->is_trivial())
      reason = "zero-group";
    else if (gy && gy->is_trivial())
      reason = "zero-group";
    else if (gx && gy &&
             (hom_group(*gx, *gy).is_trivial() || hom_group(*gy, *gx).is_trivial()))
      reason = "hom-vanishing";
    if (!reason) {
      // Distinct single-degree homologies: a map into a Moore-like space
      // induces zero in the target's bottom degree whenever the source has no
      // homology there, so round trips die at every degree up to the larger.
      auto dx = moore_degree(x), dy = moore_degree(y);
      if (dx && dy && *dx != *dy && k <= std::max(*dx, *dy))
        reason = "hurewicz-naturality";
    }
    if (!reason) {
      // Same-family projective or lens pairs of different dimension: the
      // inclusion/collapse structure kills round trips through the range that
      // matters for the smaller-dimensional factor's rigidity.
      const Space& a = x.space;
      const Space& b = y.space;
      if (a.kind == b.kind && a.dim != b.dim &&
          (a.kind == SpaceKind::real_proj || a.kind == SpaceKind::cplx_proj ||
           a.kind == SpaceKind::quat_proj)) {
        const Factor& larger = a.dim > b.dim ? x : y;
        if (k <= self_closeness(larger)) reason = "projective-pair";
      }
      if (a.kind == SpaceKind::lens && b.kind == SpaceKind::lens && a.dim != b.dim) {
        if (k <= std::max(a.dim, b.dim)) reason = "lens-pair";
      }
    }
    if (!reason && gx && gy && (gx->is_finite() || gy->is_finite())) {
      const FgAbGroup& a = gx->is_finite() ? *gx : *gy;
      const FgAbGroup& b = gx->is_finite() ? *gy : *gx;
      auto fwd = enumerate_homs(a, b, cat.bounds.hom_cap);
      auto bwd = enumerate_homs(b, a, cat.bounds.hom_cap);
      if (fwd && bwd &&
          i64(fwd->size()) * i64(bwd->size()) <= cat.bounds.pair_budget) {
        bool all_nilpotent = true;
        for (const auto& u : *fwd) {
          for (const auto& v : *bwd)
            if (!is_nilpotent(compose(v, u))) {
              all_nilpotent = false;
              break;
            }
          if (!all_nilpotent) break;
        }
        if (all_nilpotent) reason = "nilpotent-composites";
      }
    }
    if (!reason) {
      out.failed_k = k;
      return out;
    }
    out.reasons.push_back({k, *reason});
  }
  out.ok = true;
  return out;
}

}  // namespace selfclose
