// Shared plumbing: errors, checked 64-bit arithmetic, integer matrices,
// small number-theory helpers, tri-state values.
#pragma once
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace selfclose {

using i64 = std::int64_t;

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct ParseError : Error {
  size_t pos;
  ParseError(const std::string& msg, size_t at)
      : Error(msg + " (at position " + std::to_string(at) + ")"), pos(at) {}
};

struct OverflowError : Error {
  explicit OverflowError(const std::string& msg) : Error(msg) {}
};

[[noreturn]] inline void fail(const std::string& msg) { throw Error(msg); }

// Tri-state verdict for predicates that may run out of enumeration budget.
enum class Tri { no, yes, unknown };

inline const char* to_string(Tri t) {
  switch (t) {
    case Tri::no: return "FALSE";
    case Tri::yes: return "TRUE";
    default: return "UNKNOWN";
  }
}

// -- checked arithmetic -------------------------------------------------

inline i64 add_ck(i64 a, i64 b) {
  i64 r;
  if (__builtin_add_overflow(a, b, &r))
    throw OverflowError("integer overflow in addition");
  return r;
}

inline i64 sub_ck(i64 a, i64 b) {
  i64 r;
  if (__builtin_sub_overflow(a, b, &r))
    throw OverflowError("integer overflow in subtraction");
  return r;
}

inline i64 mul_ck(i64 a, i64 b) {
  i64 r;
  if (__builtin_mul_overflow(a, b, &r))
    throw OverflowError("integer overflow in multiplication");
  return r;
}

// Mathematical mod: result in [0, m) for m > 0.
inline i64 mod_floor(i64 a, i64 m) {
  i64 r = a % m;
  return r < 0 ? r + m : r;
}

inline i64 gcd_i64(i64 a, i64 b) { return std::gcd(a, b); }

// Extended gcd: returns g = gcd(a, b) with a*x + b*y = g.
inline i64 egcd(i64 a, i64 b, i64& x, i64& y) {
  if (b == 0) {
    x = a < 0 ? -1 : 1;
    y = 0;
    return a < 0 ? -a : a;
  }
  i64 x1, y1;
  i64 g = egcd(b, a % b, x1, y1);
  x = y1;
  y = x1 - (a / b) * y1;
  return g;
}

// Inverse of a modulo m (m > 1, gcd(a, m) = 1).
inline i64 mod_inverse(i64 a, i64 m) {
  i64 x, y;
  if (egcd(mod_floor(a, m), m, x, y) != 1) fail("mod_inverse: not invertible");
  return mod_floor(x, m);
}

inline i64 lcm_ck(i64 a, i64 b) {
  if (a == 0 || b == 0) return 0;
  return mul_ck(a / std::gcd(a, b), b);
}

// -- small number theory ------------------------------------------------

inline bool is_prime(i64 n) {
  if (n < 2) return false;
  for (i64 d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

// Prime factorization (p, exponent), p ascending. Trial division is plenty:
// catalogued orders are tiny.
inline std::vector<std::pair<i64, int>> factorize(i64 n) {
  if (n < 1) fail("factorize: argument must be positive");
  std::vector<std::pair<i64, int>> out;
  for (i64 p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    int e = 0;
    while (n % p == 0) { n /= p; ++e; }
    out.emplace_back(p, e);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

// Number of prime factors counted with multiplicity (composition length of Z/n).
inline int omega_total(i64 n) {
  int len = 0;
  for (auto& [p, e] : factorize(n)) len += e;
  return len;
}

// -- dense integer matrix ------------------------------------------------

struct Mat {
  int rows = 0, cols = 0;
  std::vector<i64> a;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(size_t(r) * c, 0) {}

  i64& at(int i, int j) { return a[size_t(i) * cols + j]; }
  i64 at(int i, int j) const { return a[size_t(i) * cols + j]; }

  static Mat identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
  }

  bool operator==(const Mat&) const = default;

  bool is_zero() const {
    for (i64 v : a) if (v) return false;
    return true;
  }
};

inline Mat mat_mul(const Mat& x, const Mat& y) {
  if (x.cols != y.rows) fail("mat_mul: shape mismatch");
  Mat r(x.rows, y.cols);
  for (int i = 0; i < x.rows; ++i)
    for (int k = 0; k < x.cols; ++k) {
      i64 v = x.at(i, k);
      if (!v) continue;
      for (int j = 0; j < y.cols; ++j)
        r.at(i, j) = add_ck(r.at(i, j), mul_ck(v, y.at(k, j)));
    }
  return r;
}

// Exact product comparisons for matrices whose entrywise products exceed
// i64.  smith_normal_form keeps each factor within i64, but multiplying the
// transforms back together can overflow, so these accumulate in 128-bit
// integers after checking that the headroom suffices.
inline unsigned __int128 mat_abs_bound(const Mat& m) {
  unsigned __int128 b = 1;
  for (i64 v : m.a) {
    unsigned __int128 a =
        v >= 0 ? (unsigned __int128)v : (unsigned __int128)(-(__int128)v);
    if (a > b) b = a;
  }
  return b;
}

inline bool mat_product_equals(const Mat& x, const Mat& y, const Mat& want) {
  if (x.cols != y.rows) fail("mat_product_equals: shape mismatch");
  if (x.rows != want.rows || y.cols != want.cols) return false;
  using i128 = __int128;
  using u128 = unsigned __int128;
  const u128 limit = ~u128(0) >> 2;
  if (mat_abs_bound(x) * mat_abs_bound(y) > limit / u128(x.cols ? x.cols : 1))
    fail("mat_product_equals: entries too large");
  for (int i = 0; i < x.rows; ++i)
    for (int j = 0; j < y.cols; ++j) {
      i128 s = 0;
      for (int k = 0; k < x.cols; ++k) s += i128(x.at(i, k)) * i128(y.at(k, j));
      if (s != i128(want.at(i, j))) return false;
    }
  return true;
}

// u * a * v == want, with the intermediate product held in 128-bit integers.
inline bool mat_sandwich_equals(const Mat& u, const Mat& a, const Mat& v,
                                const Mat& want) {
  if (u.cols != a.rows || a.cols != v.rows)
    fail("mat_sandwich_equals: shape mismatch");
  if (u.rows != want.rows || v.cols != want.cols) return false;
  using i128 = __int128;
  using u128 = unsigned __int128;
  const u128 limit = ~u128(0) >> 2;
  if (mat_abs_bound(u) * mat_abs_bound(a) > limit / u128(u.cols ? u.cols : 1))
    fail("mat_sandwich_equals: entries too large");
  std::vector<i128> t(size_t(u.rows) * a.cols, 0);
  u128 bt = 1;
  for (int i = 0; i < u.rows; ++i)
    for (int j = 0; j < a.cols; ++j) {
      i128 s = 0;
      for (int k = 0; k < u.cols; ++k) s += i128(u.at(i, k)) * i128(a.at(k, j));
      t[size_t(i) * a.cols + j] = s;
      u128 as = s >= 0 ? u128(s) : u128(-s);
      if (as > bt) bt = as;
    }
  u128 step = mat_abs_bound(v) * u128(v.cols ? v.cols : 1);
  if (bt > limit / step) fail("mat_sandwich_equals: entries too large");
  for (int i = 0; i < u.rows; ++i)
    for (int j = 0; j < v.cols; ++j) {
      i128 s = 0;
      for (int k = 0; k < v.rows; ++k)
        s += t[size_t(i) * a.cols + k] * i128(v.at(k, j));
      if (s != i128(want.at(i, j))) return false;
    }
  return true;
}

inline Mat mat_add(const Mat& x, const Mat& y) {
  if (x.rows != y.rows || x.cols != y.cols) fail("mat_add: shape mismatch");
  Mat r(x.rows, x.cols);
  for (size_t i = 0; i < x.a.size(); ++i) r.a[i] = add_ck(x.a[i], y.a[i]);
  return r;
}

inline Mat mat_neg(const Mat& x) {
  Mat r = x;
  for (i64& v : r.a) v = sub_ck(0, v);
  return r;
}

// Fraction-free (Bareiss) determinant over the integers.
inline i64 det_bareiss(Mat m) {
  if (m.rows != m.cols) fail("det_bareiss: matrix not square");
  int n = m.rows;
  if (n == 0) return 1;
  i64 sign = 1, prev = 1;
  for (int k = 0; k + 1 < n; ++k) {
    if (m.at(k, k) == 0) {
      int piv = -1;
      for (int i = k + 1; i < n; ++i)
        if (m.at(i, k) != 0) { piv = i; break; }
      if (piv < 0) return 0;
      for (int j = 0; j < n; ++j) std::swap(m.at(k, j), m.at(piv, j));
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j) {
        i64 num = sub_ck(mul_ck(m.at(i, j), m.at(k, k)),
                         mul_ck(m.at(i, k), m.at(k, j)));
        m.at(i, j) = num / prev;  // divides exactly (Bareiss)
      }
    prev = m.at(k, k);
  }
  return sign * m.at(n - 1, n - 1);
}

}  // namespace selfclose
