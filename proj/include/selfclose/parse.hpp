// Product expression grammar.  Factors are separated by a standalone `x`
// token at parenthesis depth zero; whitespace is otherwise insignificant, so
// "K(Z+Z/6, 4) x M(Z/2, 2)" and "K(Z+Z/6,4) x M(Z/2,2)" parse identically.
#pragma once
#include <cctype>

#include "catalog.hpp"

namespace selfclose {

namespace detail {

inline i64 parse_int_at(const std::string& s, size_t lo, size_t hi, size_t pos,
                        const std::string& what) {
  if (lo >= hi) throw ParseError("expected " + what, pos + lo);
  i64 v = 0;
  for (size_t i = lo; i < hi; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i])))
      throw ParseError("expected " + what + ", found '" + s.substr(lo, hi - lo) + "'",
                       pos + i);
    v = add_ck(mul_ck(v, 10), s[i] - '0');
  }
  return v;
}

// "<head>(<group>,<number>)" -> (group text, number), with offsets for errors.
inline std::pair<std::string, i64> parse_paren_pair(const std::string& s, size_t open,
                                                    size_t pos,
                                                    const std::string& what) {
  if (open >= s.size() || s[open] != '(')
    throw ParseError("expected '(' after " + what, pos + open);
  if (s.back() != ')') throw ParseError("expected ')' to close " + what, pos + s.size());
  size_t comma = s.rfind(',');
  if (comma == std::string::npos || comma <= open)
    throw ParseError("expected ',' inside " + what, pos + open);
  std::string first = s.substr(open + 1, comma - open - 1);
  if (first.empty()) throw ParseError("empty argument in " + what, pos + open + 1);
  i64 second = parse_int_at(s, comma + 1, s.size() - 1, pos, "a number in " + what);
  return {first, second};
}

}  // namespace detail

// One whitespace-stripped factor token, with its position in the original text.
inline Factor parse_factor(const std::string& tok, size_t pos,
                           const Declarations& decls) {
  if (tok.empty()) throw ParseError("empty factor", pos);
  auto wrap = [&](auto&& build) -> Factor {
    try {
      return build();
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(std::string(e.what()), pos);
    }
  };
  if (tok.rfind("S^", 0) == 0)
    return wrap([&] {
      Factor f;
      f.space = make_sphere(int(detail::parse_int_at(tok, 2, tok.size(), pos,
                                                     "a sphere dimension")));
      return f;
    });
  if (tok.rfind("RP^", 0) == 0 || tok.rfind("CP^", 0) == 0 || tok.rfind("HP^", 0) == 0)
    return wrap([&] {
      int n = int(detail::parse_int_at(tok, 3, tok.size(), pos,
                                       "a projective dimension"));
      Factor f;
      f.space = tok[0] == 'R' ? make_real_proj(n)
                              : (tok[0] == 'C' ? make_cplx_proj(n) : make_quat_proj(n));
      return f;
    });
  if (tok.rfind("M(", 0) == 0 || tok.rfind("K(", 0) == 0)
    return wrap([&] {
      auto [grp, n] = detail::parse_paren_pair(tok, 1, pos,
                                               tok[0] == 'M' ? "M(...)" : "K(...)");
      FgAbGroup g = parse_group(grp, pos + 2);
      Factor f;
      f.space = tok[0] == 'M' ? make_moore(g, int(n)) : make_em(g, int(n));
      return f;
    });
  if (tok.rfind("L(", 0) == 0)
    return wrap([&] {
      if (tok.back() != ')') throw ParseError("expected ')' to close L(...)", pos);
      size_t comma = tok.find(',');
      if (comma == std::string::npos)
        throw ParseError("expected ',' inside L(...)", pos);
      i64 d = detail::parse_int_at(tok, 2, comma, pos, "a lens dimension");
      i64 p = detail::parse_int_at(tok, comma + 1, tok.size() - 1, pos,
                                   "a prime order");
      Factor f;
      f.space = make_lens(int(d), p);
      return f;
    });
  if (tok.rfind("atomic:", 0) == 0) {
    std::string name = tok.substr(7);
    if (name.empty()) throw ParseError("atomic factor needs a name", pos + 7);
    if (!decls.atomics.count(name))
      throw ParseError("atomic space not declared: " + name, pos + 7);
    return make_atomic_factor(name, decls);
  }
  throw ParseError("unrecognized factor '" + tok + "'", pos);
}

// Splits at standalone `x` separators, strips whitespace inside factors.
inline std::vector<Factor> parse_product(const std::string& text,
                                         const Declarations& decls = {}) {
  struct Piece {
    std::string tok;
    size_t pos = 0;
    bool started = false;
  };
  std::vector<Piece> pieces(1);
  int depth = 0;
  auto is_sep = [&](size_t i) {
    if (text[i] != 'x' || depth != 0) return false;
    bool left = i == 0 || std::isspace(static_cast<unsigned char>(text[i - 1]));
    bool right = i + 1 == text.size() ||
                 std::isspace(static_cast<unsigned char>(text[i + 1]));
    return left && right;
  };
  for (size_t i = 0; i < text.size(); ++i) {
    char ch = text[i];
    if (ch == '(') ++depth;
    if (ch == ')') --depth;
    if (depth < 0) throw ParseError("unbalanced ')'", i);
    if (is_sep(i)) {
      pieces.emplace_back();
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(ch))) continue;
    if (!pieces.back().started) {
      pieces.back().pos = i;
      pieces.back().started = true;
    }
    pieces.back().tok += ch;
  }
  if (depth != 0) throw ParseError("unbalanced '('", text.size());
  std::vector<Factor> out;
  for (const auto& p : pieces) {
    if (!p.started) throw ParseError("missing factor", p.pos);
    out.push_back(parse_factor(p.tok, p.pos, decls));
  }
  return out;
}

}  // namespace selfclose
