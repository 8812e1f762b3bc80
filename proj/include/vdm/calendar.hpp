#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace vdm {

/// Calendar date in the proleptic Gregorian calendar, no time of day.
using Date = std::chrono::year_month_day;

std::optional<Date> parse_date(std::string_view text);
std::string format_date(const Date& d);

/// Last day of the month that is `months` calendar months after d's month.
Date month_end_after(const Date& d, int months);

/// End of month-since-release m (m >= 1): the last day of the m-th calendar
/// month after the release month.
inline Date msr_end(const Date& release, int msr) { return month_end_after(release, msr); }

Date add_months_clamped(const Date& d, int months);

}  // namespace vdm
