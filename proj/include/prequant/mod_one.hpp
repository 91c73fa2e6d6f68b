#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace prequant {

// A real number modulo Z. Stored as a 64-bit fixed-point fraction of one
// turn so that the group operations are exact: a + (-a) is exactly zero and
// integer scaling wraps without drift.
class ModOne {
 public:
  constexpr ModOne() = default;

  static ModOne from_real(double x) {
    if (!std::isfinite(x)) return ModOne{};
    double frac = x - std::floor(x);
    if (frac >= 1.0) frac = 0.0;
    return ModOne(static_cast<std::uint64_t>(std::ldexp(frac, 64)));
  }

  /// Representative in [0, 1).
  [[nodiscard]] double value() const {
    const double v = std::ldexp(static_cast<double>(turns_), -64);
    return v >= 1.0 ? 0.0 : v;
  }

  /// Representative in (-1/2, 1/2].
  [[nodiscard]] double centered() const {
    if (turns_ == kHalf) return 0.5;
    return std::ldexp(static_cast<double>(static_cast<std::int64_t>(turns_)), -64);
  }

  /// Wrap-around distance min(d, 1 - d).
  [[nodiscard]] double distance(ModOne other) const {
    const auto d = static_cast<std::int64_t>(turns_ - other.turns_);
    if (d == std::numeric_limits<std::int64_t>::min()) return 0.5;
    return std::ldexp(static_cast<double>(d < 0 ? -d : d), -64);
  }

  [[nodiscard]] bool near(ModOne other, double tol) const { return distance(other) < tol; }
  [[nodiscard]] bool near_zero(double tol) const { return distance(ModOne{}) < tol; }

  [[nodiscard]] ModOne scaled(std::int64_t k) const {
    return ModOne(turns_ * static_cast<std::uint64_t>(k));
  }

  friend ModOne operator+(ModOne a, ModOne b) { return ModOne(a.turns_ + b.turns_); }
  friend ModOne operator-(ModOne a, ModOne b) { return ModOne(a.turns_ - b.turns_); }
  friend ModOne operator-(ModOne a) { return ModOne(std::uint64_t{0} - a.turns_); }
  ModOne& operator+=(ModOne b) {
    turns_ += b.turns_;
    return *this;
  }
  friend bool operator==(ModOne, ModOne) = default;

 private:
  static constexpr std::uint64_t kHalf = std::uint64_t{1} << 63;
  explicit constexpr ModOne(std::uint64_t turns) : turns_(turns) {}
  std::uint64_t turns_ = 0;
};

}  // namespace prequant
