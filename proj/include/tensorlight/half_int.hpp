#pragma once

#include <compare>
#include <string>
#include <string_view>

namespace tl {

/// Angular-momentum quantum number stored as twice its value so that
/// integer and half-integer arithmetic stays exact.
class HalfInt {
public:
  constexpr HalfInt() = default;
  constexpr explicit HalfInt(int value) : twice_(2 * value) {}

  static constexpr HalfInt from_twice(int twice) {
    HalfInt h;
    h.twice_ = twice;
    return h;
  }

  /// Parses "5/2", "-1/2", "+3/2", "2" or "-1". Throws std::invalid_argument.
  static HalfInt parse(std::string_view text);

  constexpr int twice() const { return twice_; }
  constexpr double value() const { return 0.5 * twice_; }
  constexpr bool is_integer() const { return twice_ % 2 == 0; }

  constexpr HalfInt operator-() const { return from_twice(-twice_); }
  constexpr HalfInt operator+(HalfInt o) const { return from_twice(twice_ + o.twice_); }
  constexpr HalfInt operator-(HalfInt o) const { return from_twice(twice_ - o.twice_); }
  constexpr auto operator<=>(const HalfInt&) const = default;

  std::string to_string() const;

private:
  int twice_ = 0;
};

constexpr HalfInt abs(HalfInt h) { return h.twice() < 0 ? -h : h; }

/// True when |m| <= j and m, j share integer/half-integer character.
constexpr bool valid_projection(HalfInt j, HalfInt m) {
  return j.twice() >= 0 && abs(m) <= j && (j.twice() - m.twice()) % 2 == 0;
}

/// |a - b| <= c <= a + b with a + b + c integer.
constexpr bool triangle(HalfInt a, HalfInt b, HalfInt c) {
  return abs(a - b) <= c && c <= a + b && (a + b + c).is_integer();
}

} // namespace tl
