#include "vdm/series_io.hpp"

#include <charconv>
#include <istream>
#include <map>
#include <ostream>
#include <tuple>

#include "vdm/errors.hpp"

namespace vdm {
namespace {

constexpr const char* kHeader = "product,version,dataset,msr,cumulative";

template <typename T>
T parse_number(const std::string& text, std::size_t line) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ParseError(line, "not an integer: '" + text + "'");
  }
  return value;
}

}  // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(field));
      field.clear();
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  out.push_back(std::move(field));
  return out;
}

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out.push_back('"');
    out.push_back(c == '\n' || c == '\r' ? ' ' : c);
  }
  out.push_back('"');
  return out;
}

void write_series_csv(std::ostream& out, std::span<const ObservationSeries> series) {
  out << kHeader << '\n';
  for (const auto& s : series) {
    for (const auto& p : s.points) {
      out << csv_field(s.product) << ',' << csv_field(s.version) << ',' << to_string(s.dataset) << ',' << p.msr
          << ',' << p.cumulative << '\n';
    }
  }
}

std::vector<ObservationSeries> read_series_csv(std::istream& in) {
  std::vector<ObservationSeries> out;
  std::map<std::tuple<std::string, std::string, DatasetKind>, std::size_t> index;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#' || line == "\r") continue;
    if (!header_seen) {
      if (line.rfind(kHeader, 0) != 0) {
        throw ParseError(line_no, std::string("expected header '") + kHeader + "'");
      }
      header_seen = true;
      continue;
    }
    const auto fields = split_csv_line(line);
    if (fields.size() != 5) throw ParseError(line_no, "expected 5 fields");
    const auto kind = parse_dataset_kind(fields[2]);
    if (!kind) throw ParseError(line_no, "unknown dataset '" + fields[2] + "'");
    const auto key = std::make_tuple(fields[0], fields[1], *kind);
    auto [it, inserted] = index.emplace(key, out.size());
    if (inserted) out.push_back(ObservationSeries{fields[0], fields[1], *kind, {}});
    out[it->second].points.push_back({parse_number<int>(fields[3], line_no),
                                      parse_number<std::int64_t>(fields[4], line_no)});
  }
  for (const auto& s : out) {
    try {
      validate(s);
    } catch (const Error& e) {
      throw ParseError(line_no, s.product + " " + s.version + " " +
                                    std::string(to_string(s.dataset)) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace vdm
