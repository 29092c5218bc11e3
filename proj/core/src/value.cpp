#include "anyk/value.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace anyk {

std::string_view tag_name(ValueTag tag) {
  switch (tag) {
    case ValueTag::Int:
      return "int";
    case ValueTag::Float:
      return "float";
    case ValueTag::Text:
      return "text";
  }
  return "?";
}

std::optional<double> Value::numeric() const {
  switch (tag()) {
    case ValueTag::Int:
      return static_cast<double>(as_int());
    case ValueTag::Float:
      return as_float();
    case ValueTag::Text:
      break;
  }
  return std::nullopt;
}

std::string Value::to_string() const {
  switch (tag()) {
    case ValueTag::Int:
      return std::to_string(as_int());
    case ValueTag::Float: {
      std::ostringstream os;
      os.precision(17);
      os << as_float();
      return os.str();
    }
    case ValueTag::Text:
      return as_text();
  }
  return {};
}

namespace {

std::optional<std::int64_t> parse_int(std::string_view s) {
  std::int64_t v = 0;
  const char* end = s.data() + s.size();
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc{} || ptr != end) return std::nullopt;
  return v;
}

std::optional<double> parse_float(std::string_view s) {
  if (s.empty()) return std::nullopt;
  // from_chars for double is available in libstdc++ 11
  double v = 0;
  const char* end = s.data() + s.size();
  if (s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end || std::isnan(v)) return std::nullopt;
  return v;
}

}  // namespace

ValueTag Value::infer_tag(std::string_view text) {
  if (parse_int(text)) return ValueTag::Int;
  if (parse_float(text)) return ValueTag::Float;
  return ValueTag::Text;
}

Value Value::parse(std::string_view text, ValueTag tag) {
  switch (tag) {
    case ValueTag::Int:
      if (auto v = parse_int(text)) return Value(*v);
      break;
    case ValueTag::Float:
      if (auto v = parse_float(text)) return Value(*v);
      break;
    case ValueTag::Text:
      return Value(std::string(text));
  }
  throw std::invalid_argument("cannot parse '" + std::string(text) + "' as " +
                              std::string(tag_name(tag)));
}

std::strong_ordering operator<=>(const Value& a, const Value& b) {
  if (a.tag() != b.tag()) return a.tag() <=> b.tag();
  switch (a.tag()) {
    case ValueTag::Int:
      return a.as_int() <=> b.as_int();
    case ValueTag::Float: {
      // NaN is rejected at parse time, so the partial order is total here.
      const double x = a.as_float(), y = b.as_float();
      if (x < y) return std::strong_ordering::less;
      if (y < x) return std::strong_ordering::greater;
      return std::strong_ordering::equal;
    }
    case ValueTag::Text:
      return a.as_text().compare(b.as_text()) <=> 0;
  }
  return std::strong_ordering::equal;
}

std::size_t Value::hash() const {
  const std::size_t salt = static_cast<std::size_t>(tag()) * 0x9e3779b97f4a7c15ULL;
  switch (tag()) {
    case ValueTag::Int:
      return std::hash<std::int64_t>{}(as_int()) ^ salt;
    case ValueTag::Float:
      return std::hash<double>{}(as_float()) ^ salt;
    case ValueTag::Text:
      return std::hash<std::string>{}(as_text()) ^ salt;
  }
  return salt;
}

}  // namespace anyk
