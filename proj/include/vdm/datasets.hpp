#pragma once

// Normalized vulnerability corpus, bug-to-NVD linking, the five dataset
// selectors, and monthly observation series.

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vdm/calendar.hpp"
#include "vdm/series.hpp"

namespace vdm {

enum class RecordKind { NvdEntry, BugReport, AdvisoryReport };

/// "nvd", "bug", "advisory" in the corpus file.
std::string_view to_string(RecordKind kind);

struct SecurityRecord {
  std::string id;
  RecordKind kind = RecordKind::NvdEntry;
  Date published{};
  std::set<std::string> affects;
  std::set<std::string> refs;

  friend bool operator==(const SecurityRecord&, const SecurityRecord&) = default;
};

/// Immutable, id-indexed set of records. Construction validates ids and
/// drops dangling references.
class Corpus {
 public:
  Corpus() = default;

  /// Throws DuplicateId. Dangling refs are removed and reported in
  /// warnings().
  explicit Corpus(std::vector<SecurityRecord> records);

  const std::vector<SecurityRecord>& records() const { return records_; }
  const SecurityRecord* find(std::string_view id) const;
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const std::vector<std::string>& warnings() const { return warnings_; }

  friend bool operator==(const Corpus& a, const Corpus& b) {
    return a.records_ == b.records_;
  }

 private:
  std::vector<SecurityRecord> records_;  // sorted by id
  std::map<std::string, std::size_t, std::less<>> index_;
  std::vector<std::string> warnings_;
};

struct Release {
  std::string product;
  std::string version;
  Date release_date{};
  bool include_unlinked_advisory_bugs = false;
  /// Reserved for bug-fix based overestimation cutoffs; not used by the
  /// selectors.
  std::optional<Date> cutoff;

  friend bool operator==(const Release&, const Release&) = default;
};

/// (bug id, nvd id).
using LinkEdge = std::pair<std::string, std::string>;

/// A bug is linked to an nvd entry if the entry references the bug, or if
/// one advisory references both.
std::set<LinkEdge> link_bugs_to_nvd(const Corpus& corpus);

struct DatedVulnerability {
  std::string id;
  Date published{};

  friend bool operator==(const DatedVulnerability&, const DatedVulnerability&) = default;
};

/// Applies one dataset definition for one release. Result is sorted by id.
class DatasetSelector {
 public:
  explicit DatasetSelector(const Corpus& corpus);

  std::vector<DatedVulnerability> select(DatasetKind kind, const Release& release) const;

  /// Advisories linked in either direction to an nvd entry mentioning the
  /// release version.
  std::vector<std::string> advisories(const Release& release) const;

  const std::set<LinkEdge>& edges() const { return edges_; }

 private:
  std::set<std::string> nvd_for(const std::string& version) const;

  const Corpus* corpus_;
  std::set<LinkEdge> edges_;
  std::map<std::string, std::set<std::string>> bugs_by_nvd_;
};

/// Looks the version up in `releases`; throws UnknownVersion if absent.
std::vector<DatedVulnerability> select_dataset(DatasetKind kind, std::string_view version,
                                               const Corpus& corpus,
                                               std::span<const Release> releases);

/// Monthly cumulative counts from MSR 1 through the last month whose end is
/// on or before as_of. Throws EmptyWindow if MSR 1 has not ended by as_of.
ObservationSeries build_series(std::span<const DatedVulnerability> vulns,
                               const Release& release, DatasetKind kind,
                               const Date& as_of);

// Corpus file: one JSON object per line.
Corpus parse_corpus(std::istream& in);
Corpus import_corpus(const std::string& path);
void write_corpus(std::ostream& out, const Corpus& corpus);

// Releases file: JSON array.
std::vector<Release> parse_releases(std::istream& in);
std::vector<Release> load_releases(const std::string& path);
void write_releases(std::ostream& out, std::span<const Release> releases);

/// Latest publish date in the corpus (or nullopt when empty).
std::optional<Date> latest_publication(const Corpus& corpus);

}  // namespace vdm
