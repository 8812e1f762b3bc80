#include "vdm/calendar.hpp"

#include <charconv>
#include <fmt/format.h>

namespace vdm {

std::optional<Date> parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  auto number = [&](std::size_t pos, std::size_t len) -> std::optional<int> {
    int v = 0;
    const char* first = text.data() + pos;
    const char* last = first + len;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last) return std::nullopt;
    return v;
  };
  const auto y = number(0, 4), m = number(5, 2), d = number(8, 2);
  if (!y || !m || !d) return std::nullopt;
  const Date date{std::chrono::year{*y}, std::chrono::month{static_cast<unsigned>(*m)},
                  std::chrono::day{static_cast<unsigned>(*d)}};
  if (!date.ok()) return std::nullopt;
  return date;
}

std::string format_date(const Date& d) {
  return fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(d.year()),
                     static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
}

Date month_end_after(const Date& d, int months) {
  const std::chrono::year_month ym = d.year() / d.month() + std::chrono::months{months};
  return Date{ym / std::chrono::last};
}

Date add_months_clamped(const Date& d, int months) {
  const std::chrono::year_month ym = d.year() / d.month() + std::chrono::months{months};
  const Date last{ym / std::chrono::last};
  return d.day() > last.day() ? last : Date{ym / d.day()};
}

}  // namespace vdm
