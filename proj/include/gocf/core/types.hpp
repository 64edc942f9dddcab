#pragma once

#include <array>
#include <chrono>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gocf {

inline constexpr int kBoardSize = 19;
inline constexpr int kNumPoints = kBoardSize * kBoardSize;

enum class Color : std::uint8_t { Black = 0, White = 1 };

constexpr Color opponent(Color c) noexcept {
  return c == Color::Black ? Color::White : Color::Black;
}

constexpr char color_letter(Color c) noexcept { return c == Color::Black ? 'B' : 'W'; }

inline Color parse_color(std::string_view s) {
  if (s == "B" || s == "b" || s == "black") return Color::Black;
  if (s == "W" || s == "w" || s == "white") return Color::White;
  throw std::invalid_argument("bad color '" + std::string(s) + "'");
}

// A board coordinate or pass. Index = row * 19 + col; 361 encodes pass.
class Point {
 public:
  static constexpr std::uint16_t kPassIndex = kNumPoints;

  constexpr Point() noexcept = default;
  constexpr Point(int col, int row) noexcept
      : index_(static_cast<std::uint16_t>(row * kBoardSize + col)) {}

  static constexpr Point pass() noexcept { return from_index(kPassIndex); }
  static constexpr Point from_index(int index) noexcept {
    Point p;
    p.index_ = static_cast<std::uint16_t>(index);
    return p;
  }

  constexpr bool is_pass() const noexcept { return index_ == kPassIndex; }
  constexpr int index() const noexcept { return index_; }
  constexpr int col() const noexcept { return index_ % kBoardSize; }
  constexpr int row() const noexcept { return index_ / kBoardSize; }

  static constexpr bool on_board(int col, int row) noexcept {
    return col >= 0 && col < kBoardSize && row >= 0 && row < kBoardSize;
  }

  // SGF letter pair, "tt" or "" for pass.
  std::string to_sgf() const {
    if (is_pass()) return "tt";
    return {static_cast<char>('a' + col()), static_cast<char>('a' + row())};
  }

  static std::optional<Point> from_sgf(std::string_view s) {
    if (s.empty() || s == "tt" || s == "pass") return pass();
    if (s.size() != 2) return std::nullopt;
    int col = s[0] - 'a';
    int row = s[1] - 'a';
    if (!on_board(col, row)) return std::nullopt;
    return Point(col, row);
  }

  friend constexpr auto operator<=>(Point, Point) = default;

 private:
  std::uint16_t index_ = kPassIndex;
};

struct Move {
  int number = 0;  // 1-based ordinal within the game
  Color color = Color::Black;
  Point point;

  friend bool operator==(const Move&, const Move&) = default;
};

// Calendar date that remembers how precise its source was. Missing
// month/day are stored as 0.
struct Date {
  enum class Precision : std::uint8_t { Year, Month, Day };

  int year = 0;
  int month = 0;
  int day = 0;

  Precision precision() const noexcept {
    if (month == 0) return Precision::Year;
    if (day == 0) return Precision::Month;
    return Precision::Day;
  }

  // Month-only dates resolve to the 15th, year-only dates to July 1.
  std::chrono::year_month_day resolved() const {
    using namespace std::chrono;
    switch (precision()) {
      case Precision::Year: return year_month_day{std::chrono::year{year}, July, std::chrono::day{1}};
      case Precision::Month:
        return year_month_day{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                              std::chrono::day{15}};
      case Precision::Day: break;
    }
    return year_month_day{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                          std::chrono::day{static_cast<unsigned>(day)}};
  }

  // Days since 1970-01-01 of the resolved date; the ordering key.
  std::int32_t ordinal() const {
    return static_cast<std::int32_t>(std::chrono::sys_days{resolved()}.time_since_epoch().count());
  }

  bool valid() const {
    if (month < 0 || month > 12 || day < 0 || day > 31) return false;
    if (month == 0 && day != 0) return false;
    return resolved().ok();
  }

  std::string to_string() const {
    char buf[16];
    switch (precision()) {
      case Precision::Year: std::snprintf(buf, sizeof buf, "%04d", year); break;
      case Precision::Month: std::snprintf(buf, sizeof buf, "%04d-%02d", year, month); break;
      case Precision::Day: std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day); break;
    }
    return buf;
  }

  // Accepts YYYY, YYYY-MM, YYYY-MM-DD; trailing text after a complete
  // prefix (",16", " (approx)") is ignored. Day/month "00" or "??" mean
  // unknown.
  static std::optional<Date> parse_lenient(std::string_view s);

  // Strict YYYY-MM-DD, for command-line arguments.
  static Date parse_iso(std::string_view s) {
    auto d = parse_lenient(s);
    if (!d || d->precision() != Precision::Day || s.size() != 10)
      throw std::invalid_argument("expected YYYY-MM-DD, got '" + std::string(s) + "'");
    return *d;
  }

  static Date today() {
    using namespace std::chrono;
    year_month_day ymd{floor<days>(system_clock::now())};
    return Date{static_cast<int>(ymd.year()), static_cast<int>(static_cast<unsigned>(ymd.month())),
                static_cast<int>(static_cast<unsigned>(ymd.day()))};
  }

  friend bool operator==(const Date&, const Date&) = default;
};

namespace detail {
inline int parse_digits(std::string_view s, std::size_t pos, std::size_t n) {
  if (pos + n > s.size()) return -1;
  int v = 0;
  for (std::size_t i = 0; i < n; ++i) {
    char c = s[pos + i];
    if (c < '0' || c > '9') return -1;
    v = v * 10 + (c - '0');
  }
  return v;
}
}  // namespace detail

inline std::optional<Date> Date::parse_lenient(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  Date d;
  d.year = detail::parse_digits(s, 0, 4);
  if (d.year < 0) return std::nullopt;
  if (s.size() > 4 && s[4] >= '0' && s[4] <= '9') return std::nullopt;
  if (s.size() >= 7 && s[4] == '-') {
    int m = detail::parse_digits(s, 5, 2);
    if (m > 0 && !(s.size() > 7 && s[7] >= '0' && s[7] <= '9')) {
      d.month = m;
      if (s.size() >= 10 && s[7] == '-') {
        int day = detail::parse_digits(s, 8, 2);
        if (day > 0 && !(s.size() > 10 && s[10] >= '0' && s[10] <= '9')) d.day = day;
      }
    }
  }
  if (!d.valid()) return std::nullopt;
  return d;
}

}  // namespace gocf
