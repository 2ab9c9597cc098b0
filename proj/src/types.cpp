#include "randmatch/types.hpp"

#include <cmath>
#include <numeric>

namespace randmatch {

namespace {
constexpr std::int64_t kMaxDecimalDenominator = 1000000;
}

Rational::Rational(std::int64_t n, std::int64_t d) {
  if (d == 0) throw Error(Errc::invalid_argument, "rational with zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  const std::int64_t g = std::gcd(n < 0 ? -n : n, d);
  num = g ? n / g : n;
  den = g ? d / g : d;
}

std::int64_t Rational::floor_times(std::int64_t k) const {
  const __int128 prod = static_cast<__int128>(num) * k;
  __int128 q = prod / den;
  if (prod % den != 0 && prod < 0) --q;
  return static_cast<std::int64_t>(q);
}

Rational Rational::operator+(const Rational& o) const {
  const __int128 n = static_cast<__int128>(num) * o.den + static_cast<__int128>(o.num) * den;
  const __int128 d = static_cast<__int128>(den) * o.den;
  if (n > INT64_MAX || n < INT64_MIN || d > INT64_MAX)
    throw Error(Errc::invalid_argument, "rational overflow");
  return Rational(static_cast<std::int64_t>(n), static_cast<std::int64_t>(d));
}

bool Rational::operator<(const Rational& o) const {
  return static_cast<__int128>(num) * o.den < static_cast<__int128>(o.num) * den;
}

bool Rational::times_at_least(std::int64_t k, std::int64_t m) const {
  return static_cast<__int128>(num) * k >= static_cast<__int128>(m) * den;
}

std::string Rational::to_string() const {
  if (den == 1) return std::to_string(num);
  return std::to_string(num) + "/" + std::to_string(den);
}

Rational Rational::parse(const std::string& text) {
  if (text.empty()) throw Error(Errc::parse_error, "empty rational literal");
  const auto slash = text.find('/');
  try {
    if (slash != std::string::npos) {
      const std::int64_t n = std::stoll(text.substr(0, slash));
      const std::int64_t d = std::stoll(text.substr(slash + 1));
      return Rational(n, d);
    }
    const auto dot = text.find('.');
    if (dot == std::string::npos) {
      return Rational(std::stoll(text), 1);
    }
    const std::string whole = text.substr(0, dot);
    const std::string frac = text.substr(dot + 1);
    if (frac.find_first_not_of("0123456789") != std::string::npos)
      throw Error(Errc::parse_error, "bad rational literal: " + text);
    std::int64_t den = 1;
    for (char c : frac) {
      (void)c;
      if (den > kMaxDecimalDenominator * 100)
        throw Error(Errc::irrational_cap,
                    "decimal '" + text + "' needs a denominator above 10^6");
      den *= 10;
    }
    const std::int64_t whole_part = whole.empty() || whole == "-" ? 0 : std::stoll(whole);
    const bool negative = !whole.empty() && whole[0] == '-';
    std::int64_t frac_part = frac.empty() ? 0 : std::stoll(frac);
    if (negative) frac_part = -frac_part;
    Rational r(whole_part * den + frac_part, den);
    if (r.den > kMaxDecimalDenominator)
      throw Error(Errc::irrational_cap,
                  "decimal '" + text + "' reduces to denominator " + std::to_string(r.den) +
                      " > 10^6");
    return r;
  } catch (const std::invalid_argument&) {
    throw Error(Errc::parse_error, "bad rational literal: " + text);
  } catch (const std::out_of_range&) {
    throw Error(Errc::parse_error, "rational literal out of range: " + text);
  }
}

Rational min(const Rational& a, const Rational& b) { return a < b ? a : b; }

std::uint64_t SplitMix64::next_below(std::uint64_t n) {
  if (n == 0) throw Error(Errc::invalid_argument, "next_below(0)");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t v = next();
  while (v >= limit) v = next();
  return v % n;
}

}  // namespace randmatch
