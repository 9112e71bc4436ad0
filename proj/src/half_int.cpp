#include "tensorlight/half_int.hpp"

#include <charconv>
#include <stdexcept>

namespace tl {

namespace {

int parse_int(std::string_view s, std::string_view whole) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw std::invalid_argument("not an angular momentum value: '" + std::string(whole) + "'");
  return v;
}

} // namespace

HalfInt HalfInt::parse(std::string_view text) {
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return HalfInt(parse_int(text, text));
  if (text.substr(slash + 1) != "2")
    throw std::invalid_argument("only halves are allowed: '" + std::string(text) + "'");
  int numerator = parse_int(text.substr(0, slash), text);
  return from_twice(numerator);
}

std::string HalfInt::to_string() const {
  if (is_integer()) return std::to_string(twice_ / 2);
  return std::to_string(twice_) + "/2";
}

} // namespace tl
