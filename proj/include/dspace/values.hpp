#pragma once

// Scalar encodings of leaf values: decimal kinds, money, dates as UTC epoch
// seconds, list labels, and the 8-character base-37 "tux" code.

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "dspace/error.hpp"
#include "dspace/schema.hpp"
#include "dspace/text.hpp"

namespace dspace {

// ---------------------------------------------------------------------------
// tux

inline constexpr std::size_t kTuxLength = 8;
inline constexpr std::int64_t kTuxBase = 37;

namespace detail {

inline constexpr int tux_code(char ch) noexcept {
  if (ch >= '0' && ch <= '9') return ch - '0' + 1;
  if (ch >= 'a' && ch <= 'z') return ch - 'a' + 11;
  return -1;
}

inline constexpr char tux_char(int code) noexcept {
  if (code >= 1 && code <= 10) return static_cast<char>('0' + code - 1);
  if (code >= 11 && code <= 36) return static_cast<char>('a' + code - 11);
  return '\0';
}

inline constexpr std::int64_t tux_pow(std::size_t e) noexcept {
  std::int64_t p = 1;
  for (std::size_t i = 0; i < e; ++i) p *= kTuxBase;
  return p;
}

inline std::int64_t tux_fill(std::string_view s, int fill) {
  if (s.size() > kTuxLength) fail(Errc::parse_error, "tux '" + std::string(s) + "' is longer than 8 characters");
  std::int64_t v = 0;
  for (std::size_t i = 0; i < kTuxLength; ++i) {
    int code = fill;
    if (i < s.size()) {
      code = tux_code(s[i]);
      if (code < 0) fail(Errc::parse_error, "tux '" + std::string(s) + "' may only contain a-z and 0-9");
    }
    v = v * kTuxBase + code;
  }
  return v;
}

}  // namespace detail

inline constexpr std::int64_t kTuxLimit = detail::tux_pow(kTuxLength);  // 37^8

inline bool is_tux(std::string_view s) noexcept {
  if (s.empty() || s.size() > kTuxLength) return false;
  for (char ch : s) {
    if (detail::tux_code(ch) < 0) return false;
  }
  return true;
}

/// Sum of code(ch_i) * 37^(7-i), padding with code 0.
inline std::int64_t encode_tux(std::string_view s) {
  if (s.empty()) fail(Errc::parse_error, "empty tux");
  return detail::tux_fill(s, 0);
}

inline std::string decode_tux(std::int64_t v) {
  if (v <= 0 || v >= kTuxLimit) fail(Errc::out_of_range, "scalar " + std::to_string(v) + " is not a tux code");
  std::string out;
  bool padded = false;
  for (std::size_t i = 0; i < kTuxLength; ++i) {
    const auto p = detail::tux_pow(kTuxLength - 1 - i);
    const int code = static_cast<int>(v / p);
    v %= p;
    if (code == 0) {
      padded = true;
      continue;
    }
    if (padded) fail(Errc::out_of_range, "tux code has a character after padding");
    out.push_back(detail::tux_char(code));
  }
  return out;
}

/// Inclusive code range of every tux beginning with `prefix`.
inline std::pair<std::int64_t, std::int64_t> tux_prefix_range(std::string_view prefix) {
  return {detail::tux_fill(prefix, 0), detail::tux_fill(prefix, 36)};
}

// ---------------------------------------------------------------------------
// dates

struct CivilTime {
  std::int64_t year = 1970;
  int month = 1, day = 1, hour = 0, minute = 0, second = 0;
  int fields = 0;  // how many of year..second were given
};

namespace detail {

inline constexpr std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) noexcept {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const auto yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m > 2 ? m - 3 : m + 9) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

inline constexpr void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) noexcept {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const auto doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp < 10 ? mp + 3 : mp - 9;
  y = static_cast<std::int64_t>(yoe) + era * 400 + (m <= 2);
}

inline constexpr int days_in_month(std::int64_t y, int m) noexcept {
  constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
  return m == 2 && leap ? 29 : kDays[m - 1];
}

inline bool read_digits(std::string_view s, std::size_t& pos, std::size_t n, int& out) {
  if (pos + n > s.size()) return false;
  int v = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const char ch = s[pos + i];
    if (ch < '0' || ch > '9') return false;
    v = v * 10 + (ch - '0');
  }
  pos += n;
  out = v;
  return true;
}

inline bool is_time_only(const std::optional<std::string>& format) {
  return format && (*format == "hh:mm:ss" || *format == "hh:mm");
}

inline int format_fields(const std::optional<std::string>& format) {
  const std::string f = format.value_or("yyyy-mm-dd");
  if (f == "yyyy") return 1;
  if (f == "yyyy-mm") return 2;
  if (f == "yyyy-mm-dd") return 3;
  if (f == "yyyy-mm-dd hh") return 4;
  if (f == "yyyy-mm-dd hh:mm" || f == "hh:mm") return 5;
  return 6;
}

}  // namespace detail

/// Parses yyyy[-mm[-dd[ hh[:mm[:ss]]]]]; a 'T' may replace the space.
inline CivilTime parse_civil(std::string_view s) {
  auto bad = [&](const char* what) -> CivilTime {
    fail(Errc::parse_error, "malformed date '" + std::string(s) + "': " + what);
  };
  CivilTime t;
  std::size_t pos = 0;
  int year = 0;
  if (!detail::read_digits(s, pos, 4, year)) return bad("expected yyyy");
  t.year = year;
  t.fields = 1;
  int* next[] = {&t.month, &t.day, &t.hour, &t.minute, &t.second};
  const char seps[] = {'-', '-', ' ', ':', ':'};
  for (int i = 0; i < 5 && pos < s.size(); ++i) {
    const char sep = s[pos];
    if (sep != seps[i] && !(i == 2 && sep == 'T')) return bad("unexpected separator");
    ++pos;
    if (!detail::read_digits(s, pos, 2, *next[i])) return bad("expected two digits");
    t.fields = i + 2;
  }
  if (pos != s.size()) return bad("trailing characters");
  if (t.month < 1 || t.month > 12) return bad("month out of range");
  if (t.day < 1 || t.day > detail::days_in_month(t.year, t.month)) return bad("day out of range");
  if (t.hour > 23 || t.minute > 59 || t.second > 59) return bad("time out of range");
  return t;
}

/// UTC epoch seconds of the start of the given (possibly truncated) date.
inline std::int64_t epoch_seconds(const CivilTime& t) {
  const auto days = detail::days_from_civil(t.year, static_cast<unsigned>(t.month), static_cast<unsigned>(t.day));
  return days * 86400 + t.hour * 3600 + t.minute * 60 + t.second;
}

inline std::int64_t parse_date(std::string_view s) { return epoch_seconds(parse_civil(s)); }

/// Formats epoch seconds with the first `fields` components (1..6).
inline std::string format_date(std::int64_t secs, int fields = 3) {
  std::int64_t days = secs / 86400;
  std::int64_t rem = secs % 86400;
  if (rem < 0) {
    rem += 86400;
    --days;
  }
  std::int64_t y = 0;
  unsigned m = 0, d = 0;
  detail::civil_from_days(days, y, m, d);
  char buf[64];
  const int hh = static_cast<int>(rem / 3600), mi = static_cast<int>(rem / 60 % 60), ss = static_cast<int>(rem % 60);
  switch (fields) {
    case 1: std::snprintf(buf, sizeof buf, "%04lld", static_cast<long long>(y)); break;
    case 2: std::snprintf(buf, sizeof buf, "%04lld-%02u", static_cast<long long>(y), m); break;
    case 3: std::snprintf(buf, sizeof buf, "%04lld-%02u-%02u", static_cast<long long>(y), m, d); break;
    case 4: std::snprintf(buf, sizeof buf, "%04lld-%02u-%02u %02d", static_cast<long long>(y), m, d, hh); break;
    case 5: std::snprintf(buf, sizeof buf, "%04lld-%02u-%02u %02d:%02d", static_cast<long long>(y), m, d, hh, mi); break;
    default:
      std::snprintf(buf, sizeof buf, "%04lld-%02u-%02u %02d:%02d:%02d", static_cast<long long>(y), m, d, hh, mi, ss);
      break;
  }
  return buf;
}

namespace detail {

inline std::int64_t parse_time_of_day(std::string_view s) {
  std::size_t pos = 0;
  int h = 0, m = 0, sec = 0;
  const bool ok = read_digits(s, pos, 2, h) && pos < s.size() && s[pos++] == ':' && read_digits(s, pos, 2, m) &&
                  (pos == s.size() || (s[pos++] == ':' && read_digits(s, pos, 2, sec) && pos == s.size()));
  if (!ok || h > 23 || m > 59 || sec > 59) fail(Errc::parse_error, "malformed time '" + std::string(s) + "'");
  return h * 3600 + m * 60 + sec;
}

inline std::string format_time_of_day(std::int64_t v, bool seconds) {
  char buf[32];
  if (seconds) {
    std::snprintf(buf, sizeof buf, "%02d:%02d:%02d", static_cast<int>(v / 3600), static_cast<int>(v / 60 % 60),
                  static_cast<int>(v % 60));
  } else {
    std::snprintf(buf, sizeof buf, "%02d:%02d", static_cast<int>(v / 3600), static_cast<int>(v / 60 % 60));
  }
  return buf;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// list intervals

struct IntervalParams {
  std::optional<double> sim;
  std::optional<double> min;
  std::optional<double> max;
};

namespace detail {

inline std::optional<double> effective_lower(const LeafContent& l, std::size_t i) {
  if (l.intervals[i].lower) return l.intervals[i].lower;
  if (i > 0) return l.intervals[i - 1].upper;
  return std::nullopt;
}

inline std::size_t label_index(const LeafContent& l, std::string_view label) {
  const auto labels = l.labels();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == label) return i;
  }
  fail(Errc::parse_error, "unknown list label '" + std::string(label) + "'");
}

}  // namespace detail

/// Search-mask parameters for an interval label: the mean of its borders as
/// similarity target (or its only border), lower border as min and upper
/// border as max when they exist.
inline IntervalParams interval_search_params(const LeafContent& l, std::string_view label) {
  if (l.intervals.empty()) fail(Errc::invalid_interval, "dimension has no interval table");
  const auto i = detail::label_index(l, label);
  IntervalParams p;
  p.min = detail::effective_lower(l, i);
  p.max = l.intervals[i].upper;
  if (p.min && p.max) p.sim = (*p.min + *p.max) / 2.0;
  else p.sim = p.min ? p.min : p.max;
  return p;
}

// ---------------------------------------------------------------------------
// encode / decode

inline constexpr double kMaxExactInteger = 9007199254740992.0;  // 2^53

inline bool is_textual(LeafKind k) noexcept { return k == LeafKind::text; }

namespace detail {

inline double parse_number(std::string_view raw, std::string_view kind) {
  auto v = text::parse_double(raw);
  if (!v) fail(Errc::parse_error, "malformed " + std::string(kind) + " value '" + std::string(raw) + "'");
  return *v;
}

inline void check_range(const LeafContent& l, double v, std::string_view raw) {
  if ((l.min && v < *l.min) || (l.max && v > *l.max)) {
    fail(Errc::out_of_range, "value '" + std::string(raw) + "' outside [" + (l.min ? text::format_double(*l.min) : "") +
                                 ", " + (l.max ? text::format_double(*l.max) : "") + "]");
  }
}

}  // namespace detail

inline double round_money(double v) { return std::round(v * 100.0) / 100.0; }

/// Canonical scalar of a raw lexical value. Text dimensions have no scalar
/// encoding here; the index interns them.
inline double encode_value(const LeafContent& l, std::string_view raw) {
  raw = text::trim(raw);
  double v = 0.0;
  switch (l.kind) {
    case LeafKind::integer: {
      std::string_view s = raw;
      if (!s.empty() && s.front() == '+') s.remove_prefix(1);
      std::int64_t i = 0;
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), i);
      if (s.empty() || ec != std::errc{} || p != s.data() + s.size()) {
        fail(Errc::parse_error, "malformed integer value '" + std::string(raw) + "'");
      }
      v = static_cast<double>(i);
      if (std::abs(v) > kMaxExactInteger) fail(Errc::out_of_range, "integer beyond 2^53: " + std::string(raw));
      break;
    }
    case LeafKind::money: v = round_money(detail::parse_number(raw, "money")); break;
    case LeafKind::float_medium: {
      const double d = detail::parse_number(raw, "float");
      if (std::abs(d) >= 0x1.ffffffp127) fail(Errc::out_of_range, "float-medium overflow: " + std::string(raw));
      v = static_cast<double>(static_cast<float>(d));
      break;
    }
    case LeafKind::float_max: v = detail::parse_number(raw, "float"); break;
    case LeafKind::date: {
      std::string_view s = raw;
      if (!s.empty() && s.front() == 'd') s.remove_prefix(1);
      v = static_cast<double>(detail::is_time_only(l.date_format) ? detail::parse_time_of_day(s) : parse_date(s));
      break;
    }
    case LeafKind::list: {
      const auto i = detail::label_index(l, raw);
      if (l.interval_mode) return *interval_search_params(l, raw).sim;
      return static_cast<double>(i);
    }
    case LeafKind::tux: return static_cast<double>(encode_tux(raw));
    case LeafKind::text: fail(Errc::kind_mismatch, "text values have no scalar encoding");
  }
  detail::check_range(l, v, raw);
  return v;
}

/// Lexical form of a canonical scalar.
inline std::string decode_value(const LeafContent& l, double v) {
  if (!std::isfinite(v)) fail(Errc::out_of_range, "non-finite scalar");
  switch (l.kind) {
    case LeafKind::integer: {
      if (v != std::trunc(v) || std::abs(v) > kMaxExactInteger) {
        fail(Errc::out_of_range, "scalar " + text::format_double(v) + " is not an integer");
      }
      return std::to_string(static_cast<std::int64_t>(v));
    }
    case LeafKind::money: {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.2f", v);
      return buf;
    }
    case LeafKind::float_medium: {
      std::array<char, 32> buf{};
      auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), static_cast<float>(v));
      return std::string(buf.data(), p);
    }
    case LeafKind::float_max: return text::format_double(v);
    case LeafKind::date: {
      if (v != std::trunc(v)) fail(Errc::out_of_range, "date scalar must be whole seconds");
      const auto secs = static_cast<std::int64_t>(v);
      if (detail::is_time_only(l.date_format)) {
        if (secs < 0 || secs >= 86400) fail(Errc::out_of_range, "time of day out of range");
        return detail::format_time_of_day(secs, *l.date_format == "hh:mm:ss");
      }
      return format_date(secs, detail::format_fields(l.date_format));
    }
    case LeafKind::list: {
      const auto labels = l.labels();
      if (l.interval_mode) {
        for (const auto& lab : labels) {
          if (*interval_search_params(l, lab).sim == v) return lab;
        }
        fail(Errc::out_of_range, "scalar " + text::format_double(v) + " matches no interval");
      }
      if (v < 0 || v != std::trunc(v) || v >= static_cast<double>(labels.size())) {
        fail(Errc::out_of_range, "scalar " + text::format_double(v) + " is not a list index");
      }
      return labels[static_cast<std::size_t>(v)];
    }
    case LeafKind::tux: {
      if (v != std::trunc(v)) fail(Errc::out_of_range, "tux scalar must be integral");
      return decode_tux(static_cast<std::int64_t>(v));
    }
    case LeafKind::text: fail(Errc::kind_mismatch, "text values have no scalar encoding");
  }
  return {};
}

}  // namespace dspace
