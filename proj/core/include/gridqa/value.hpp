#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include <nlohmann/json.hpp>

namespace gridqa {

enum class Datatype { String, Integer, Decimal, Date, Boolean };

std::string_view to_string(Datatype type);
std::optional<Datatype> datatype_from_string(std::string_view name);

/// Calendar date; serialized as ISO-8601 "YYYY-MM-DD".
using Date = std::chrono::sys_days;

std::optional<Date> parse_date(std::string_view text);
std::string format_date(Date date);
Date make_date(int year, unsigned month, unsigned day);
int year_of(Date date);

struct Duration {
  enum class Unit { Day, Month, Year };
  std::int64_t amount = 0;
  Unit unit = Unit::Year;

  auto operator<=>(const Duration&) const = default;
};

/// Calendar subtraction; month/year steps clamp the day to the target month.
Date subtract(Date date, const Duration& span);
std::string to_string(const Duration& span);

/// A typed literal. Attribute values only ever hold the first five
/// alternatives; Duration appears in question constraints.
using Value = std::variant<std::string, std::int64_t, double, Date, bool, Duration>;

/// Datatype of a value; nullopt for durations.
std::optional<Datatype> datatype_of(const Value& value);

std::string to_string(const Value& value);

/// Three-way comparison of two values of compatible type (integer and
/// decimal compare numerically). Returns nullopt for incompatible types.
std::optional<std::partial_ordering> compare(const Value& lhs, const Value& rhs);

/// Converts `value` to `type` where the conversion is lossless
/// (integer -> decimal, integral decimal -> integer). nullopt otherwise.
std::optional<Value> coerce(const Value& value, Datatype type);

/// Reads a JSON scalar as a value of the given datatype; dates are strings.
std::optional<Value> value_from_json(const nlohmann::json& j, Datatype type);
nlohmann::json value_to_json(const Value& value);

/// Lowercases ASCII letters.
std::string to_lower(std::string_view text);

}  // namespace gridqa
