#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "condtherm/error.hpp"

namespace condtherm {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

enum class Mode { Float, Rational };

/// Comparison tolerances. Only consulted for floating-point scalars; exact
/// scalars always compare exactly.
struct NumericPolicy {
  Mode mode = Mode::Float;
  double eps_cmp = 1e-9;
  double eps_lp = 1e-7;
  double eps_merge = 1e-12;

  void validate() const {
    if (mode == Mode::Rational) return;
    if (!(eps_merge > 0 && eps_cmp > 0 && eps_lp > 0))
      fail(ErrorCode::ValidationError, "tolerances must be strictly positive");
    if (!(eps_merge <= eps_cmp && eps_cmp <= eps_lp))
      fail(ErrorCode::ValidationError, "tolerances must satisfy eps_merge <= eps_cmp <= eps_lp");
  }
};

template <class T>
inline constexpr bool is_exact_v = std::is_same_v<T, Rational>;

template <class T>
double to_double(const T& x) {
  if constexpr (is_exact_v<T>) {
    return x.template convert_to<double>();
  } else {
    return static_cast<double>(x);
  }
}

template <class T>
T abs_value(const T& x) {
  return x < T(0) ? T(-x) : x;
}

// Tolerance-aware comparisons; `eps` is ignored for exact scalars.
template <class T>
bool leq(const T& a, const T& b, double eps) {
  if constexpr (is_exact_v<T>) {
    return a <= b;
  } else {
    return a <= b + eps;
  }
}

template <class T>
bool geq(const T& a, const T& b, double eps) {
  return leq(b, a, eps);
}

template <class T>
bool near(const T& a, const T& b, double eps) {
  if constexpr (is_exact_v<T>) {
    return a == b;
  } else {
    return std::abs(a - b) <= eps;
  }
}

template <class T>
bool is_zero(const T& a, double eps) {
  return near(a, T(0), eps);
}

/// Parses "a/b", "a", or a plain decimal such as "-0.125" into an exact rational.
inline Rational parse_rational(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  auto parse_int = [](std::string_view s) -> BigInt {
    if (s.empty()) fail(ErrorCode::ParseError, "empty integer");
    std::size_t pos = 0;
    bool neg = false;
    if (s[0] == '+' || s[0] == '-') {
      neg = s[0] == '-';
      pos = 1;
    }
    if (pos == s.size()) fail(ErrorCode::ParseError, "malformed integer '" + std::string(s) + "'");
    BigInt value = 0;
    for (; pos < s.size(); ++pos) {
      if (!std::isdigit(static_cast<unsigned char>(s[pos])))
        fail(ErrorCode::ParseError, "malformed integer '" + std::string(s) + "'");
      value = value * 10 + (s[pos] - '0');
    }
    return neg ? BigInt(-value) : value;
  };

  text = trim(text);
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    BigInt num = parse_int(trim(text.substr(0, slash)));
    BigInt den = parse_int(trim(text.substr(slash + 1)));
    if (den == 0) fail(ErrorCode::ParseError, "zero denominator in '" + std::string(text) + "'");
    return Rational(num, den);
  }

  // Decimal with optional exponent, converted exactly.
  std::string_view mantissa = text;
  long exponent = 0;
  if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
    mantissa = text.substr(0, e);
    std::string exp_text(text.substr(e + 1));
    try {
      std::size_t used = 0;
      exponent = std::stol(exp_text, &used);
      if (used != exp_text.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      fail(ErrorCode::ParseError, "malformed exponent in '" + std::string(text) + "'");
    }
  }
  std::string digits;
  bool neg = false;
  long frac_len = 0;
  bool seen_dot = false;
  for (std::size_t i = 0; i < mantissa.size(); ++i) {
    char c = mantissa[i];
    if (i == 0 && (c == '+' || c == '-')) {
      neg = c == '-';
    } else if (c == '.' && !seen_dot) {
      seen_dot = true;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      digits.push_back(c);
      if (seen_dot) ++frac_len;
    } else {
      fail(ErrorCode::ParseError, "malformed number '" + std::string(text) + "'");
    }
  }
  if (digits.empty()) fail(ErrorCode::ParseError, "malformed number '" + std::string(text) + "'");
  BigInt num = parse_int(digits);
  if (neg) num = -num;
  long shift = exponent - frac_len;
  BigInt scale = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(std::abs(shift)));
  return shift >= 0 ? Rational(num * scale) : Rational(num, scale);
}

template <class T>
std::string format_scalar(const T& x) {
  if constexpr (is_exact_v<T>) {
    std::ostringstream out;
    out << boost::multiprecision::numerator(x);
    if (boost::multiprecision::denominator(x) != 1) out << '/' << boost::multiprecision::denominator(x);
    return out.str();
  } else {
    std::ostringstream out;
    out.precision(17);
    out << x;
    return out.str();
  }
}

/// Dense row-major matrix. Small sizes only (tens to a few hundred entries).
template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, const T& fill = T(0))
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::vector<T> column(std::size_t c) const {
    std::vector<T> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
    return out;
  }

  std::vector<T> apply(const std::vector<T>& x) const {
    if (x.size() != cols_) fail(ErrorCode::DimensionMismatch, "matrix-vector product");
    std::vector<T> y(rows_, T(0));
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) y[r] += (*this)(r, c) * x[c];
    return y;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

template <class T>
T sum(const std::vector<T>& v) {
  T total(0);
  for (const auto& x : v) total += x;
  return total;
}

template <class T>
double max_abs_diff(const std::vector<T>& a, const std::vector<T>& b) {
  if (a.size() != b.size()) fail(ErrorCode::DimensionMismatch, "vector sizes differ");
  double worst = 0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(to_double(T(a[i] - b[i]))));
  return worst;
}

/// Sorts and removes duplicates; float values closer than `eps` collapse to the first.
template <class T>
std::vector<T> sorted_unique(std::vector<T> values, double eps) {
  std::sort(values.begin(), values.end());
  std::vector<T> out;
  for (auto& v : values) {
    if (out.empty() || !near(out.back(), v, eps)) out.push_back(std::move(v));
  }
  return out;
}

}  // namespace condtherm
