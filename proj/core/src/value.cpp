#include "gridqa/value.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "gridqa/error.hpp"

namespace gridqa {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::UnknownVertex: return "UnknownVertex";
    case ErrorCode::UnknownAttribute: return "UnknownAttribute";
    case ErrorCode::TypeMismatch: return "TypeMismatch";
    case ErrorCode::EmptyQuestion: return "EmptyQuestion";
    case ErrorCode::UnparseableInput: return "UnparseableInput";
    case ErrorCode::NoTargetFound: return "NoTargetFound";
    case ErrorCode::DanglingQualifier: return "DanglingQualifier";
    case ErrorCode::NoPath: return "NoPath";
    case ErrorCode::UnresolvedTarget: return "UnresolvedTarget";
    case ErrorCode::InconsistentPlan: return "InconsistentPlan";
    case ErrorCode::UnknownSession: return "UnknownSession";
  }
  return "Unknown";
}

ErrorStage stage_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyQuestion:
    case ErrorCode::UnparseableInput:
    case ErrorCode::NoTargetFound:
    case ErrorCode::DanglingQualifier:
      return ErrorStage::Parsing;
    case ErrorCode::NoPath:
    case ErrorCode::UnresolvedTarget:
    case ErrorCode::InconsistentPlan:
      return ErrorStage::Reasoning;
    case ErrorCode::UnknownSession:
      return ErrorStage::Session;
    default:
      return ErrorStage::Data;
  }
}

std::string_view to_string(Datatype type) {
  switch (type) {
    case Datatype::String: return "string";
    case Datatype::Integer: return "integer";
    case Datatype::Decimal: return "decimal";
    case Datatype::Date: return "date";
    case Datatype::Boolean: return "boolean";
  }
  return "string";
}

std::optional<Datatype> datatype_from_string(std::string_view name) {
  if (name == "string") return Datatype::String;
  if (name == "integer") return Datatype::Integer;
  if (name == "decimal") return Datatype::Decimal;
  if (name == "date") return Datatype::Date;
  if (name == "boolean") return Datatype::Boolean;
  return std::nullopt;
}

Date make_date(int year, unsigned month, unsigned day) {
  return Date{std::chrono::year{year} / std::chrono::month{month} / std::chrono::day{day}};
}

int year_of(Date date) {
  return static_cast<int>(std::chrono::year_month_day{date}.year());
}

std::optional<Date> parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  auto number = [&](std::size_t pos, std::size_t len) -> std::optional<int> {
    int out = 0;
    auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, out);
    if (ec != std::errc{} || ptr != text.data() + pos + len) return std::nullopt;
    return out;
  };
  auto y = number(0, 4);
  auto m = number(5, 2);
  auto d = number(8, 2);
  if (!y || !m || !d || *m < 1 || *d < 1) return std::nullopt;
  std::chrono::year_month_day ymd{std::chrono::year{*y}, std::chrono::month{static_cast<unsigned>(*m)},
                                  std::chrono::day{static_cast<unsigned>(*d)}};
  if (!ymd.ok()) return std::nullopt;
  return Date{ymd};
}

std::string format_date(Date date) {
  std::chrono::year_month_day ymd{date};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

Date subtract(Date date, const Duration& span) {
  using namespace std::chrono;
  if (span.unit == Duration::Unit::Day) return date - days{span.amount};
  year_month_day ymd{date};
  year_month_day shifted = span.unit == Duration::Unit::Year
                               ? ymd - years{span.amount}
                               : ymd - months{span.amount};
  if (!shifted.ok()) {
    shifted = shifted.year() / shifted.month() / last;
  }
  return Date{shifted};
}

std::string to_string(const Duration& span) {
  const char* unit = span.unit == Duration::Unit::Day     ? "day"
                     : span.unit == Duration::Unit::Month ? "month"
                                                          : "year";
  std::string out = std::to_string(span.amount) + " " + unit;
  if (span.amount != 1) out += "s";
  return out;
}

std::optional<Datatype> datatype_of(const Value& value) {
  switch (value.index()) {
    case 0: return Datatype::String;
    case 1: return Datatype::Integer;
    case 2: return Datatype::Decimal;
    case 3: return Datatype::Date;
    case 4: return Datatype::Boolean;
    default: return std::nullopt;
  }
}

namespace {

std::string format_decimal(double d) {
  if (std::isfinite(d) && d == std::floor(d) && std::fabs(d) < 1e15) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", d);
    return buf;
  }
  // Shortest representation that round-trips.
  char buf[32];
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, d);
    if (std::strtod(buf, nullptr) == d) break;
  }
  return buf;
}

}  // namespace

std::string to_string(const Value& value) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::string>) return v;
        else if constexpr (std::is_same_v<T, std::int64_t>) return std::to_string(v);
        else if constexpr (std::is_same_v<T, double>) return format_decimal(v);
        else if constexpr (std::is_same_v<T, Date>) return format_date(v);
        else if constexpr (std::is_same_v<T, bool>) return v ? "true" : "false";
        else return to_string(v);
      },
      value);
}

std::optional<std::partial_ordering> compare(const Value& lhs, const Value& rhs) {
  if (lhs.index() == rhs.index()) {
    return std::visit(
        [&](const auto& a) -> std::optional<std::partial_ordering> {
          using T = std::decay_t<decltype(a)>;
          const auto& b = std::get<T>(rhs);
          if constexpr (std::is_same_v<T, Duration>) {
            if (a.unit != b.unit) return std::nullopt;
            return a.amount <=> b.amount;
          } else {
            return std::partial_ordering(a <=> b);
          }
        },
        lhs);
  }
  auto numeric = [](const Value& v) -> std::optional<double> {
    if (auto i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
    if (auto d = std::get_if<double>(&v)) return *d;
    return std::nullopt;
  };
  auto a = numeric(lhs);
  auto b = numeric(rhs);
  if (a && b) return *a <=> *b;
  return std::nullopt;
}

std::optional<Value> coerce(const Value& value, Datatype type) {
  auto current = datatype_of(value);
  if (!current) return std::nullopt;
  if (*current == type) return value;
  if (type == Datatype::Decimal) {
    if (auto i = std::get_if<std::int64_t>(&value)) return Value{static_cast<double>(*i)};
  }
  if (type == Datatype::Integer) {
    if (auto d = std::get_if<double>(&value)) {
      if (*d == std::floor(*d) && std::fabs(*d) < 9e15) return Value{static_cast<std::int64_t>(*d)};
    }
  }
  return std::nullopt;
}

std::optional<Value> value_from_json(const nlohmann::json& j, Datatype type) {
  switch (type) {
    case Datatype::String:
      if (j.is_string()) return Value{j.get<std::string>()};
      return std::nullopt;
    case Datatype::Integer:
      if (j.is_number_integer()) return Value{j.get<std::int64_t>()};
      if (j.is_number_float()) return coerce(Value{j.get<double>()}, Datatype::Integer);
      return std::nullopt;
    case Datatype::Decimal:
      if (j.is_number()) return Value{j.get<double>()};
      return std::nullopt;
    case Datatype::Date:
      if (j.is_string()) {
        if (auto d = parse_date(j.get<std::string>())) return Value{*d};
      }
      return std::nullopt;
    case Datatype::Boolean:
      if (j.is_boolean()) return Value{j.get<bool>()};
      return std::nullopt;
  }
  return std::nullopt;
}

nlohmann::json value_to_json(const Value& value) {
  return std::visit(
      [](const auto& v) -> nlohmann::json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Date>) return format_date(v);
        else if constexpr (std::is_same_v<T, Duration>) {
          const char* unit = v.unit == Duration::Unit::Day     ? "day"
                             : v.unit == Duration::Unit::Month ? "month"
                                                               : "year";
          return nlohmann::json{{"amount", v.amount}, {"unit", unit}};
        } else return v;
      },
      value);
}

std::string to_lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace gridqa
