#include "vdm/datasets.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <nlohmann/json.hpp>

#include "vdm/errors.hpp"

namespace vdm {
namespace {

using nlohmann::json;

std::optional<RecordKind> parse_record_kind(std::string_view text) {
  if (text == "nvd") return RecordKind::NvdEntry;
  if (text == "bug") return RecordKind::BugReport;
  if (text == "advisory") return RecordKind::AdvisoryReport;
  return std::nullopt;
}

std::set<std::string> string_set(const json& obj, const char* key, std::size_t line) {
  std::set<std::string> out;
  if (!obj.contains(key)) return out;
  const auto& arr = obj.at(key);
  if (!arr.is_array()) throw ParseError(line, std::string("'") + key + "' must be an array");
  for (const auto& v : arr) {
    if (!v.is_string()) {
      throw ParseError(line, std::string("'") + key + "' entries must be strings");
    }
    out.insert(v.get<std::string>());
  }
  return out;
}

SecurityRecord parse_record(const json& obj, std::size_t line) {
  if (!obj.is_object()) throw ParseError(line, "record must be a JSON object");
  auto text_field = [&](const char* key) {
    if (!obj.contains(key) || !obj.at(key).is_string()) {
      throw ParseError(line, std::string("missing string field '") + key + "'");
    }
    return obj.at(key).get<std::string>();
  };
  SecurityRecord rec;
  rec.id = text_field("id");
  if (rec.id.empty()) throw ParseError(line, "empty id");
  const auto kind = parse_record_kind(text_field("kind"));
  if (!kind) throw ParseError(line, "kind must be nvd, bug or advisory");
  rec.kind = *kind;
  const auto date = parse_date(text_field("published"));
  if (!date) throw ParseError(line, "published must be a valid YYYY-MM-DD date");
  rec.published = *date;
  rec.affects = string_set(obj, "affects", line);
  rec.refs = string_set(obj, "refs", line);
  return rec;
}

}  // namespace

std::string_view to_string(RecordKind kind) {
  switch (kind) {
    case RecordKind::NvdEntry: return "nvd";
    case RecordKind::BugReport: return "bug";
    case RecordKind::AdvisoryReport: return "advisory";
  }
  return "?";
}

Corpus::Corpus(std::vector<SecurityRecord> records) : records_(std::move(records)) {
  std::sort(records_.begin(), records_.end(),
            [](const auto& a, const auto& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < records_.size(); ++i) {
    if (!index_.emplace(records_[i].id, i).second) throw DuplicateId(records_[i].id);
  }
  for (auto& rec : records_) {
    for (auto it = rec.refs.begin(); it != rec.refs.end();) {
      if (index_.find(*it) == index_.end()) {
        warnings_.push_back("record " + rec.id + ": dropped dangling reference " + *it);
        it = rec.refs.erase(it);
      } else {
        ++it;
      }
    }
  }
}

const SecurityRecord* Corpus::find(std::string_view id) const {
  const auto it = index_.find(id);
  return it == index_.end() ? nullptr : &records_[it->second];
}

std::set<LinkEdge> link_bugs_to_nvd(const Corpus& corpus) {
  std::set<LinkEdge> edges;
  auto kind_of = [&](const std::string& id) { return corpus.find(id)->kind; };
  for (const auto& rec : corpus.records()) {
    if (rec.kind == RecordKind::NvdEntry) {
      for (const auto& ref : rec.refs) {
        if (kind_of(ref) == RecordKind::BugReport) edges.emplace(ref, rec.id);
      }
    } else if (rec.kind == RecordKind::AdvisoryReport) {
      std::vector<const std::string*> bugs, nvds;
      for (const auto& ref : rec.refs) {
        const auto k = kind_of(ref);
        if (k == RecordKind::BugReport) bugs.push_back(&ref);
        if (k == RecordKind::NvdEntry) nvds.push_back(&ref);
      }
      for (const auto* b : bugs) {
        for (const auto* n : nvds) edges.emplace(*b, *n);
      }
    }
  }
  return edges;
}

DatasetSelector::DatasetSelector(const Corpus& corpus)
    : corpus_(&corpus), edges_(link_bugs_to_nvd(corpus)) {
  for (const auto& [bug, nvd] : edges_) bugs_by_nvd_[nvd].insert(bug);
}

std::set<std::string> DatasetSelector::nvd_for(const std::string& version) const {
  std::set<std::string> out;
  for (const auto& rec : corpus_->records()) {
    if (rec.kind == RecordKind::NvdEntry && rec.affects.count(version)) out.insert(rec.id);
  }
  return out;
}

std::vector<DatedVulnerability> DatasetSelector::select(DatasetKind kind,
                                                        const Release& release) const {
  const auto nvd = nvd_for(release.version);
  auto has_ref_of_kind = [&](const std::string& id, RecordKind k) {
    const auto& refs = corpus_->find(id)->refs;
    return std::any_of(refs.begin(), refs.end(),
                       [&](const std::string& r) { return corpus_->find(r)->kind == k; });
  };

  std::set<std::string> chosen;
  switch (kind) {
    case DatasetKind::NVD:
      chosen = nvd;
      break;
    case DatasetKind::NVD_Bug:
      for (const auto& n : nvd) {
        if (has_ref_of_kind(n, RecordKind::BugReport)) chosen.insert(n);
      }
      break;
    case DatasetKind::NVD_Advice:
      for (const auto& n : nvd) {
        if (has_ref_of_kind(n, RecordKind::AdvisoryReport)) chosen.insert(n);
      }
      break;
    case DatasetKind::NVD_Nbug:
      for (const auto& n : nvd) {
        const auto it = bugs_by_nvd_.find(n);
        if (it != bugs_by_nvd_.end()) chosen.insert(it->second.begin(), it->second.end());
      }
      break;
    case DatasetKind::Advice_Nbug:
      for (const auto& rec : corpus_->records()) {
        if (rec.kind != RecordKind::AdvisoryReport) continue;
        bool links_selected = false, links_any_nvd = false;
        for (const auto& ref : rec.refs) {
          if (corpus_->find(ref)->kind != RecordKind::NvdEntry) continue;
          links_any_nvd = true;
          if (nvd.count(ref)) links_selected = true;
        }
        const bool take =
            links_selected || (release.include_unlinked_advisory_bugs && !links_any_nvd);
        if (!take) continue;
        for (const auto& ref : rec.refs) {
          if (corpus_->find(ref)->kind == RecordKind::BugReport) chosen.insert(ref);
        }
      }
      break;
  }

  std::vector<DatedVulnerability> out;
  out.reserve(chosen.size());
  for (const auto& id : chosen) out.push_back({id, corpus_->find(id)->published});
  return out;
}

std::vector<std::string> DatasetSelector::advisories(const Release& release) const {
  const auto nvd = nvd_for(release.version);
  std::set<std::string> out;
  for (const auto& rec : corpus_->records()) {
    if (rec.kind == RecordKind::AdvisoryReport) {
      for (const auto& ref : rec.refs) {
        if (nvd.count(ref)) out.insert(rec.id);
      }
    } else if (rec.kind == RecordKind::NvdEntry && nvd.count(rec.id)) {
      for (const auto& ref : rec.refs) {
        if (corpus_->find(ref)->kind == RecordKind::AdvisoryReport) out.insert(ref);
      }
    }
  }
  return {out.begin(), out.end()};
}

std::vector<DatedVulnerability> select_dataset(DatasetKind kind, std::string_view version,
                                               const Corpus& corpus,
                                               std::span<const Release> releases) {
  const auto it = std::find_if(releases.begin(), releases.end(),
                               [&](const Release& r) { return r.version == version; });
  if (it == releases.end()) {
    throw UnknownVersion("no release with version '" + std::string(version) + "'");
  }
  return DatasetSelector(corpus).select(kind, *it);
}

ObservationSeries build_series(std::span<const DatedVulnerability> vulns,
                               const Release& release, DatasetKind kind,
                               const Date& as_of) {
  using std::chrono::sys_days;
  if (sys_days{msr_end(release.release_date, 1)} > sys_days{as_of}) {
    throw EmptyWindow("as-of date " + format_date(as_of) + " precedes the end of MSR 1 (" +
                      format_date(msr_end(release.release_date, 1)) + ")");
  }
  std::vector<sys_days> dates;
  dates.reserve(vulns.size());
  for (const auto& v : vulns) dates.emplace_back(v.published);
  std::sort(dates.begin(), dates.end());

  ObservationSeries series{release.product, release.version, kind, {}};
  for (int m = 1;; ++m) {
    const sys_days end{msr_end(release.release_date, m)};
    if (end > sys_days{as_of}) break;
    const auto count = std::upper_bound(dates.begin(), dates.end(), end) - dates.begin();
    series.points.push_back({m, static_cast<std::int64_t>(count)});
  }
  return series;
}

Corpus parse_corpus(std::istream& in) {
  std::vector<SecurityRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(line_no, e.what());
    }
    records.push_back(parse_record(obj, line_no));
  }
  return Corpus(std::move(records));
}

Corpus import_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open corpus file " + path);
  return parse_corpus(in);
}

void write_corpus(std::ostream& out, const Corpus& corpus) {
  for (const auto& rec : corpus.records()) {
    json obj;
    obj["id"] = rec.id;
    obj["kind"] = to_string(rec.kind);
    obj["published"] = format_date(rec.published);
    obj["affects"] = rec.affects;
    obj["refs"] = rec.refs;
    out << obj.dump() << '\n';
  }
}

std::vector<Release> parse_releases(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(0, e.what());
  }
  if (!doc.is_array()) throw ParseError(0, "releases file must hold a JSON array");
  std::vector<Release> out;
  std::set<std::pair<std::string, std::string>> seen;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& obj = doc[i];
    auto text = [&](const char* key) {
      if (!obj.is_object() || !obj.contains(key) || !obj.at(key).is_string()) {
        throw ParseError(i + 1, std::string("release missing string field '") + key + "'");
      }
      return obj.at(key).get<std::string>();
    };
    Release r;
    r.product = text("product");
    r.version = text("version");
    const auto date = parse_date(text("release_date"));
    if (!date) throw ParseError(i + 1, "release_date must be YYYY-MM-DD");
    r.release_date = *date;
    if (obj.contains("include_unlinked_advisory_bugs")) {
      r.include_unlinked_advisory_bugs = obj.at("include_unlinked_advisory_bugs").get<bool>();
    }
    if (obj.contains("cutoff")) {
      const auto c = parse_date(obj.at("cutoff").get<std::string>());
      if (!c) throw ParseError(i + 1, "cutoff must be YYYY-MM-DD");
      r.cutoff = *c;
    }
    if (!seen.emplace(r.product, r.version).second) {
      throw ParseError(i + 1, "duplicate release " + r.product + " " + r.version);
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<Release> load_releases(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open releases file " + path);
  return parse_releases(in);
}

void write_releases(std::ostream& out, std::span<const Release> releases) {
  json doc = json::array();
  for (const auto& r : releases) {
    json obj;
    obj["product"] = r.product;
    obj["version"] = r.version;
    obj["release_date"] = format_date(r.release_date);
    obj["include_unlinked_advisory_bugs"] = r.include_unlinked_advisory_bugs;
    if (r.cutoff) obj["cutoff"] = format_date(*r.cutoff);
    doc.push_back(std::move(obj));
  }
  out << doc.dump(2) << '\n';
}

std::optional<Date> latest_publication(const Corpus& corpus) {
  std::optional<Date> best;
  for (const auto& rec : corpus.records()) {
    if (!best || std::chrono::sys_days{rec.published} > std::chrono::sys_days{*best}) {
      best = rec.published;
    }
  }
  return best;
}

}  // namespace vdm
