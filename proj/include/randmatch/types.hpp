#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace randmatch {

using Matrix = Eigen::MatrixXd;
using IntMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;
using BinaryMatrix = Eigen::MatrixXi;

enum class Errc {
  invalid_argument,
  invalid_cap,
  cap_too_small,
  irrational_cap,
  infeasible,
  dimension_mismatch,
  invalid_parameter,
  not_differentiable,
  floor_unachievable,
  non_monotone,
  parse_error,
  negative_similarity,
  unknown_level,
  malformed_input,
};

/// Library error carrying a machine-checkable code alongside the message.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

/// Report-style validation result: empty `violations` means valid.
/// `notes` carries non-fatal observations.
struct ValidationReport {
  std::vector<std::string> violations;
  std::vector<std::string> notes;
  bool ok() const { return violations.empty(); }
};

/// Exact rational with reduced, positive denominator. Used wherever a
/// probability cap has to survive scaling by an integer precision without
/// rounding.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d);

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }

  /// floor(q * k) for integer k >= 0.
  std::int64_t floor_times(std::int64_t k) const;

  Rational operator+(const Rational& o) const;

  bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
  bool operator<(const Rational& o) const;
  bool operator<=(const Rational& o) const { return *this < o || *this == o; }

  /// Compares q * k against m exactly.
  bool times_at_least(std::int64_t k, std::int64_t m) const;

  std::string to_string() const;

  /// Parses "0.5", "1", ".25" or "2/3". Decimal inputs must reduce to a
  /// denominator <= 10^6; otherwise throws Errc::irrational_cap.
  static Rational parse(const std::string& text);
};

Rational min(const Rational& a, const Rational& b);

/// SplitMix64: seedable PRNG with exactly 64 bits of state and identical
/// output on every platform. All randomness in the library flows through it.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n), bias-free via rejection.
  std::uint64_t next_below(std::uint64_t n);

 private:
  std::uint64_t state_;
};

}  // namespace randmatch
