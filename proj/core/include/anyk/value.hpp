#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace anyk {

enum class ValueTag : std::uint8_t { Int, Float, Text };

std::string_view tag_name(ValueTag tag);

/// A scalar drawn from the database domain. Values of one tag are totally
/// ordered; a column (and every column bound to one query variable) holds a
/// single tag, so cross-tag comparisons never decide query semantics.
class Value {
 public:
  Value() : data_(std::int64_t{0}) {}
  Value(std::int64_t v) : data_(v) {}  // NOLINT(google-explicit-constructor)
  Value(int v) : data_(std::int64_t{v}) {}  // NOLINT(google-explicit-constructor)
  Value(double v) : data_(v) {}  // NOLINT(google-explicit-constructor)
  Value(std::string v) : data_(std::move(v)) {}  // NOLINT(google-explicit-constructor)
  Value(const char* v) : data_(std::string(v)) {}  // NOLINT(google-explicit-constructor)

  ValueTag tag() const { return static_cast<ValueTag>(data_.index()); }
  bool is_numeric() const { return tag() != ValueTag::Text; }

  std::int64_t as_int() const { return std::get<std::int64_t>(data_); }
  double as_float() const { return std::get<double>(data_); }
  const std::string& as_text() const { return std::get<std::string>(data_); }

  /// Numeric value for identity weights; nullopt for text.
  std::optional<double> numeric() const;

  std::string to_string() const;

  /// Parses `text` as a value of the given tag. Throws std::invalid_argument.
  static Value parse(std::string_view text, ValueTag tag);
  /// Narrowest tag that can represent `text` (Int, then Float, then Text).
  static ValueTag infer_tag(std::string_view text);

  friend bool operator==(const Value& a, const Value& b) = default;
  friend std::strong_ordering operator<=>(const Value& a, const Value& b);

  std::size_t hash() const;

 private:
  std::variant<std::int64_t, double, std::string> data_;
};

struct ValueHash {
  std::size_t operator()(const Value& v) const { return v.hash(); }
};

}  // namespace anyk
