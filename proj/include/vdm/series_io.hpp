#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vdm/series.hpp"

namespace vdm {

/// CSV with header product,version,dataset,msr,cumulative. Lines starting
/// with '#' are metadata and skipped on read.
void write_series_csv(std::ostream& out, std::span<const ObservationSeries> series);

/// Groups rows by (product, version, dataset) in first-seen order and
/// validates each group. Throws ParseError.
std::vector<ObservationSeries> read_series_csv(std::istream& in);

/// Splits one CSV line. Double-quoted fields may contain commas; "" is a
/// literal quote.
std::vector<std::string> split_csv_line(const std::string& line);

/// Quotes a field when it contains a comma, quote or line break.
std::string csv_field(std::string_view text);

}  // namespace vdm
