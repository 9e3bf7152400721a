#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <ostream>
#include <variant>

namespace dphls {

/// Signed 32-bit score with saturating arithmetic. Sums clamp to the int32
/// range instead of wrapping, so sentinel-valued cells stay far below any
/// reachable alignment score.
class Sat32 {
 public:
  using value_type = std::int32_t;

  static constexpr value_type kMax = std::numeric_limits<value_type>::max();
  static constexpr value_type kMin = std::numeric_limits<value_type>::min();

  constexpr Sat32() = default;
  constexpr explicit Sat32(value_type v) : v_(v) {}

  constexpr value_type value() const { return v_; }

  friend constexpr Sat32 operator+(Sat32 a, Sat32 b) { return Sat32(clamp(std::int64_t{a.v_} + b.v_)); }
  friend constexpr Sat32 operator-(Sat32 a, Sat32 b) { return Sat32(clamp(std::int64_t{a.v_} - b.v_)); }
  friend constexpr Sat32 operator-(Sat32 a) { return Sat32(clamp(-std::int64_t{a.v_})); }
  friend constexpr Sat32 operator*(Sat32 a, Sat32 b) { return Sat32(clamp(std::int64_t{a.v_} * b.v_)); }
  constexpr Sat32& operator+=(Sat32 b) { return *this = *this + b; }

  friend constexpr bool operator==(Sat32, Sat32) = default;
  friend constexpr auto operator<=>(Sat32, Sat32) = default;

  friend std::ostream& operator<<(std::ostream& os, Sat32 s) { return os << s.v_; }

 private:
  static constexpr value_type clamp(std::int64_t x) {
    if (x > kMax) return kMax;
    if (x < kMin) return kMin;
    return static_cast<value_type>(x);
  }

  value_type v_ = 0;
};

enum class Objective { Maximize, Minimize };

template <class Scalar>
struct ScoreTraits;

template <>
struct ScoreTraits<Sat32> {
  static constexpr bool is_integral = true;
  // MIN/4 leaves >= 2^29 of headroom below the sentinel for gap additions.
  static constexpr Sat32 neg_sentinel() { return Sat32(Sat32::kMin / 4); }
  static constexpr Sat32 pos_sentinel() { return Sat32(Sat32::kMax / 4); }
  static constexpr Sat32 zero() { return Sat32(0); }
  static Sat32 from_double(double x) { return Sat32(static_cast<Sat32::value_type>(std::llround(x))); }
  static double to_double(Sat32 x) { return x.value(); }
};

template <>
struct ScoreTraits<double> {
  static constexpr bool is_integral = false;
  static constexpr double neg_sentinel() { return -std::numeric_limits<double>::infinity(); }
  static constexpr double pos_sentinel() { return std::numeric_limits<double>::infinity(); }
  static constexpr double zero() { return 0.0; }
  static double from_double(double x) { return x; }
  static double to_double(double x) { return x; }
};

/// The value a forbidden cell holds under the given objective.
template <class Scalar>
constexpr Scalar worst(Objective obj) {
  return obj == Objective::Maximize ? ScoreTraits<Scalar>::neg_sentinel() : ScoreTraits<Scalar>::pos_sentinel();
}

/// Strict improvement under the objective.
template <class Scalar>
constexpr bool better(Objective obj, Scalar candidate, Scalar incumbent) {
  return obj == Objective::Maximize ? incumbent < candidate : candidate < incumbent;
}

/// Type-erased score used at the host boundary.
using Score = std::variant<Sat32, double>;

inline double to_double(const Score& s) {
  return std::visit([](auto v) { return ScoreTraits<decltype(v)>::to_double(v); }, s);
}

/// Equality used when comparing integer and floating results: exact for
/// Sat32, and |a-b| <= rel * max(1, |a|, |b|) for doubles (infinities must
/// match exactly).
inline bool scores_equal(double a, double b, double rel = 1e-9) {
  if (a == b) return true;
  if (!std::isfinite(a) || !std::isfinite(b)) return false;
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}
inline bool scores_equal(Sat32 a, Sat32 b, double = 0.0) { return a == b; }

}  // namespace dphls
