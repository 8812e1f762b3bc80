#pragma once

// Independent reference computations used only by tests. Nothing here calls
// into the code paths it checks.

#include <algorithm>
#include <boost/multiprecision/cpp_dec_float.hpp>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "vdm/datasets.hpp"
#include "vdm/models.hpp"
#include "vdm/series.hpp"

namespace oracle {

using mp50 = boost::multiprecision::cpp_dec_float_50;
// Enough digits to resolve an AML curve against its asymptote when
// exp(-A*B*t) is as small as 1e-340.
using mp400 = boost::multiprecision::number<boost::multiprecision::cpp_dec_float<400>>;

// ---- models -------------------------------------------------------------

inline long double omega_ld(vdm::ModelId m, const std::vector<long double>& p, long double t) {
  using vdm::ModelId;
  switch (m) {
    case ModelId::AML: return p[1] / (p[1] * p[2] * std::exp(-p[0] * p[1] * t) + 1.0L);
    case ModelId::AT: return p[0] * std::log(t) + p[1];
    case ModelId::LN: return p[0] * t + p[1];
    case ModelId::LP: return p[0] * std::log(1.0L + p[1] * t);
    case ModelId::RE: return p[0] * (1.0L - std::exp(-p[1] * t));
    case ModelId::RQ: return p[0] * t * t / 2.0L + p[1] * t;
  }
  return 0.0L;
}

inline mp50 aml_mp(const mp50& a, const mp50& b, const mp50& c, const mp50& t) {
  return b / (b * c * boost::multiprecision::exp(-a * b * t) + 1);
}

inline mp400 omega_mp(vdm::ModelId m, const std::vector<mp400>& p, const mp400& t) {
  using boost::multiprecision::exp;
  using boost::multiprecision::log;
  using vdm::ModelId;
  switch (m) {
    case ModelId::AML: return p[1] / (p[1] * p[2] * exp(-p[0] * p[1] * t) + 1);
    case ModelId::AT: return p[0] * log(t) + p[1];
    case ModelId::LN: return p[0] * t + p[1];
    case ModelId::LP: return p[0] * log(1 + p[1] * t);
    case ModelId::RE: return p[0] * (1 - exp(-p[1] * t));
    case ModelId::RQ: return p[0] * t * t / 2 + p[1] * t;
  }
  return 0;
}

/// Central difference with step 1e-6 * |param|, evaluated with 400 digits so
/// that cancellation in the difference does not limit the comparison.
inline double central_difference(vdm::ModelId m, const std::vector<double>& params, double t,
                                 std::size_t j) {
  std::vector<mp400> hi(params.begin(), params.end()), lo = hi;
  const mp400 h = mp400("1e-6") * boost::multiprecision::abs(hi[j]);
  hi[j] += h;
  lo[j] -= h;
  const mp400 diff = (omega_mp(m, hi, t) - omega_mp(m, lo, t)) / (2 * h);
  return diff.convert_to<double>();
}

/// |a - r| / max(|a|, |r|), with the denominator floored at the smallest
/// normal double: values below that are not representable to relative
/// precision in the code under test.
inline double gradient_relative_error(double analytic, double reference) {
  const double scale = std::max({std::fabs(analytic), std::fabs(reference),
                                 std::numeric_limits<double>::min()});
  return std::fabs(analytic - reference) / scale;
}

// ---- quadrature ---------------------------------------------------------

namespace detail {

inline void gauss_kronrod(const std::function<long double(long double)>& f, long double a,
                          long double b, long double& estimate, long double& error) {
  static const long double xgk[8] = {
      0.991455371120812639206854697526329L, 0.949107912342758524526189684047851L,
      0.864864423359769072789712788640926L, 0.741531185599394439863864773280788L,
      0.586087235467691130294144845693013L, 0.405845151377397166906606412076961L,
      0.207784955007898467600689403773245L, 0.000000000000000000000000000000000L};
  static const long double wgk[8] = {
      0.022935322010529224963732008058970L, 0.063092092629978553290700663189204L,
      0.104790010322250183839876322541518L, 0.140653259715525918745189590510238L,
      0.169004726639267902826583426598550L, 0.190350578064785409913256402421014L,
      0.204432940075298892414161999234649L, 0.209482141084727828012999174891714L};
  static const long double wg[4] = {
      0.129484966168869693270611432679082L, 0.279705391489276667901467771423780L,
      0.381830050505118944950369775488975L, 0.417959183673469387755102040816327L};
  const long double c = (a + b) / 2.0L, h = (b - a) / 2.0L;
  const long double fc = f(c);
  long double kronrod = fc * wgk[7];
  long double gauss = fc * wg[3];
  for (int i = 0; i < 7; ++i) {
    const long double dx = h * xgk[i];
    const long double s = f(c - dx) + f(c + dx);
    kronrod += wgk[i] * s;
    if (i % 2 == 1) gauss += wg[i / 2] * s;
  }
  estimate = kronrod * h;
  error = std::fabs((kronrod - gauss) * h);
}

inline long double adaptive(const std::function<long double(long double)>& f, long double a,
                            long double b, long double tol, int depth) {
  long double est = 0, err = 0;
  gauss_kronrod(f, a, b, est, err);
  // Stop once the error estimate reaches rounding level; halving the
  // tolerance further would only subdivide noise.
  if (err <= tol || err <= 64.0L * std::numeric_limits<long double>::epsilon() * std::fabs(est) ||
      depth > 40) {
    return est;
  }
  const long double m = (a + b) / 2.0L;
  return adaptive(f, a, m, tol / 2.0L, depth + 1) + adaptive(f, m, b, tol / 2.0L, depth + 1);
}

}  // namespace detail

/// Adaptive Gauss-Kronrod (7/15) integral of f over [a, b].
inline long double integrate(const std::function<long double(long double)>& f, long double a,
                             long double b, long double tol = 1e-14L) {
  if (b <= a) return 0.0L;
  return detail::adaptive(f, a, b, tol, 0);
}

/// Regularized lower incomplete gamma by quadrature of t^(s-1) e^-t after
/// substituting t = u^2 (valid for s >= 1/2).
inline long double lower_gamma_quadrature(long double s, long double x) {
  const long double norm = std::exp(std::lgamma(s));
  auto f = [s](long double u) {
    return u == 0.0L ? (s == 0.5L ? 2.0L : 0.0L)
                     : 2.0L * std::pow(u, 2.0L * s - 1.0L) * std::exp(-u * u);
  };
  return integrate(f, 0.0L, std::sqrt(x), 1e-16L) / norm;
}

/// Upper tail of chi-square(dof) as 1 - integral of the density over [0, x].
inline long double chi2_sf_quadrature(long double x, int dof) {
  const long double k = dof;
  const long double c = 1.0L / (std::pow(2.0L, k / 2.0L) * std::exp(std::lgamma(k / 2.0L)));
  // y = u^2: density(y) dy = 2 c u^(k-1) exp(-u^2/2) du
  auto f = [c, k](long double u) {
    return u == 0.0L ? (k == 1.0L ? 2.0L * c : 0.0L)
                     : 2.0L * c * std::pow(u, k - 1.0L) * std::exp(-u * u / 2.0L);
  };
  return 1.0L - integrate(f, 0.0L, std::sqrt(x), 1e-15L);
}

inline mp50 chi_square_mp(const std::vector<double>& o, const std::vector<double>& e) {
  mp50 total = 0;
  for (std::size_t i = 0; i < o.size(); ++i) {
    const mp50 d = mp50(o[i]) - mp50(e[i]);
    total += d * d / mp50(e[i]);
  }
  return total;
}

// ---- fitting ------------------------------------------------------------

struct Range {
  double lo, hi;
};

inline double sse_ld(vdm::ModelId m, const std::vector<double>& p, const vdm::CurveData& data) {
  std::vector<long double> lp(p.begin(), p.end());
  long double s = 0;
  for (const auto& o : data) {
    const long double r = o.value - omega_ld(m, lp, o.t);
    s += r * r;
  }
  return static_cast<double>(s);
}

/// Exhaustive grid over the box, then `refinements` rounds of a finer grid
/// spanning two cells around the incumbent.
inline std::vector<double> grid_search(vdm::ModelId m, const vdm::CurveData& data,
                                       std::vector<Range> box, int points, int refinements) {
  const std::size_t k = box.size();
  std::vector<double> best(k);
  double best_sse = INFINITY;
  for (int round = 0; round <= refinements; ++round) {
    std::vector<int> idx(k, 0);
    std::vector<double> p(k);
    bool done = false;
    while (!done) {
      for (std::size_t j = 0; j < k; ++j) {
        p[j] = box[j].lo + (box[j].hi - box[j].lo) * idx[j] / (points - 1);
      }
      const double s = sse_ld(m, p, data);
      if (s < best_sse) {
        best_sse = s;
        best = p;
      }
      std::size_t j = k;
      while (true) {
        if (j == 0) {
          done = true;
          break;
        }
        --j;
        if (++idx[j] < points) break;
        idx[j] = 0;
      }
    }
    for (std::size_t j = 0; j < k; ++j) {
      const double cell = (box[j].hi - box[j].lo) / (points - 1);
      box[j] = {std::max(best[j] - 2 * cell, box[j].lo), best[j] + 2 * cell};
    }
  }
  return best;
}

// ---- datasets -----------------------------------------------------------

/// Random corpus over the given versions; about a third each of nvd entries,
/// bugs and advisories, with random cross references.
inline std::vector<vdm::SecurityRecord> random_records(std::mt19937_64& rng, int n,
                                                       const std::vector<std::string>& versions,
                                                       const vdm::Date& start) {
  using namespace std::chrono;
  std::vector<vdm::SecurityRecord> recs(n);
  std::uniform_int_distribution<int> kind(0, 2), day(0, 1500), coin(0, 3);
  for (int i = 0; i < n; ++i) {
    auto& r = recs[i];
    r.id = "R" + std::to_string(i);
    r.kind = static_cast<vdm::RecordKind>(kind(rng));
    r.published = vdm::Date{sys_days{start} + days{day(rng)}};
    if (r.kind == vdm::RecordKind::NvdEntry) {
      for (const auto& v : versions) {
        if (coin(rng) < 2) r.affects.insert(v);
      }
    }
  }
  std::uniform_int_distribution<int> pick(0, n - 1), nrefs(0, 4);
  for (auto& r : recs) {
    const int k = nrefs(rng);
    for (int j = 0; j < k; ++j) r.refs.insert(recs[pick(rng)].id);
  }
  return recs;
}

/// Every (bug, nvd) pair satisfying either linking rule, by enumerating all
/// record triples.
inline std::set<vdm::LinkEdge> brute_force_edges(const std::vector<vdm::SecurityRecord>& recs) {
  using vdm::RecordKind;
  std::set<vdm::LinkEdge> out;
  for (const auto& b : recs) {
    if (b.kind != RecordKind::BugReport) continue;
    for (const auto& n : recs) {
      if (n.kind != RecordKind::NvdEntry) continue;
      bool linked = n.refs.count(b.id) > 0;
      for (const auto& a : recs) {
        if (linked) break;
        if (a.kind == RecordKind::AdvisoryReport && a.refs.count(b.id) && a.refs.count(n.id)) {
          linked = true;
        }
      }
      if (linked) out.emplace(b.id, n.id);
    }
  }
  return out;
}

/// Dataset membership written straight from the five definitions.
inline std::set<std::string> comprehension_select(vdm::DatasetKind kind,
                                                  const std::string& version,
                                                  const std::vector<vdm::SecurityRecord>& recs,
                                                  bool include_unlinked = false) {
  using vdm::DatasetKind;
  using vdm::RecordKind;
  std::map<std::string, const vdm::SecurityRecord*> by_id;
  for (const auto& r : recs) by_id[r.id] = &r;
  auto is = [&](const std::string& id, RecordKind k) {
    return by_id.count(id) && by_id[id]->kind == k;
  };
  auto mentions = [&](const vdm::SecurityRecord& r) {
    return r.kind == RecordKind::NvdEntry && r.affects.count(version);
  };
  std::set<std::string> out;
  const auto edges = brute_force_edges(recs);
  for (const auto& r : recs) {
    switch (kind) {
      case DatasetKind::NVD:
        if (mentions(r)) out.insert(r.id);
        break;
      case DatasetKind::NVD_Bug:
        if (mentions(r) && std::any_of(r.refs.begin(), r.refs.end(),
                                       [&](auto& x) { return is(x, RecordKind::BugReport); }))
          out.insert(r.id);
        break;
      case DatasetKind::NVD_Advice:
        if (mentions(r) &&
            std::any_of(r.refs.begin(), r.refs.end(),
                        [&](auto& x) { return is(x, RecordKind::AdvisoryReport); }))
          out.insert(r.id);
        break;
      case DatasetKind::NVD_Nbug:
        if (r.kind != RecordKind::BugReport) break;
        for (const auto& n : recs) {
          if (mentions(n) && edges.count({r.id, n.id})) out.insert(r.id);
        }
        break;
      case DatasetKind::Advice_Nbug:
        if (r.kind != RecordKind::BugReport) break;
        for (const auto& a : recs) {
          if (a.kind != RecordKind::AdvisoryReport || !a.refs.count(r.id)) continue;
          bool any_nvd = false, selected_nvd = false;
          for (const auto& n : recs) {
            if (n.kind != RecordKind::NvdEntry || !a.refs.count(n.id)) continue;
            any_nvd = true;
            if (mentions(n)) selected_nvd = true;
          }
          if (selected_nvd || (include_unlinked && !any_nvd)) out.insert(r.id);
        }
        break;
    }
  }
  return out;
}

/// Count of dates on or before the last day of month (release month + m).
inline std::int64_t brute_force_count(const std::vector<vdm::Date>& dates,
                                      const vdm::Date& release, int m) {
  int y = static_cast<int>(release.year());
  int mon = static_cast<int>(static_cast<unsigned>(release.month())) + m;
  y += (mon - 1) / 12;
  mon = (mon - 1) % 12 + 1;
  std::int64_t n = 0;
  for (const auto& d : dates) {
    const int dy = static_cast<int>(d.year());
    const int dm = static_cast<int>(static_cast<unsigned>(d.month()));
    if (dy < y || (dy == y && dm <= mon)) ++n;
  }
  return n;
}

// ---- permutation tests --------------------------------------------------

/// Monte-Carlo one-sided ("a greater") permutation p-value of the U
/// statistic. Ranks come from pairwise counting (ties share the mean rank).
inline double mwu_permutation_p(const std::vector<double>& a, const std::vector<double>& b,
                                int permutations, std::uint64_t seed) {
  std::vector<double> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());
  std::vector<double> ranks(pooled.size());
  for (std::size_t i = 0; i < pooled.size(); ++i) {
    double less = 0, equal = 0;
    for (double y : pooled) {
      less += y < pooled[i];
      equal += y == pooled[i];
    }
    ranks[i] = less + (equal + 1.0) / 2.0;
  }
  auto rank_sum = [&](const std::vector<double>& rk) {
    return std::accumulate(rk.begin(), rk.begin() + a.size(), 0.0);
  };
  const double observed = rank_sum(ranks);
  std::mt19937_64 rng(seed);
  int hits = 0;
  for (int p = 0; p < permutations; ++p) {
    std::shuffle(ranks.begin(), ranks.end(), rng);
    if (rank_sum(ranks) >= observed - 1e-9) ++hits;
  }
  return static_cast<double>(hits) / permutations;
}

/// Kruskal-Wallis statistic computed from scratch (no tie correction
/// needed for continuous data) and its permutation p-value.
inline double kw_statistic_plain(const std::vector<double>& pooled,
                                 const std::vector<std::size_t>& sizes) {
  std::vector<std::size_t> order(pooled.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto i, auto j) { return pooled[i] < pooled[j]; });
  std::vector<double> rank(pooled.size());
  for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = r + 1.0;
  const double n = pooled.size();
  double h = 0, mean_rank = (n + 1) / 2;
  std::size_t off = 0;
  for (auto s : sizes) {
    double sum = 0;
    for (std::size_t i = 0; i < s; ++i) sum += rank[off + i];
    const double d = sum / s - mean_rank;
    h += s * d * d;
    off += s;
  }
  return 12.0 / (n * (n + 1)) * h;
}

inline double kw_permutation_p(const std::vector<std::vector<double>>& groups, int permutations,
                               std::uint64_t seed) {
  std::vector<double> pooled;
  std::vector<std::size_t> sizes;
  for (const auto& g : groups) {
    pooled.insert(pooled.end(), g.begin(), g.end());
    sizes.push_back(g.size());
  }
  // Work on ranks directly so each permutation is cheap.
  std::vector<std::size_t> order(pooled.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto i, auto j) { return pooled[i] < pooled[j]; });
  std::vector<double> ranks(pooled.size());
  for (std::size_t r = 0; r < order.size(); ++r) ranks[order[r]] = r + 1.0;
  const double n = pooled.size();
  const double mean_rank = (n + 1) / 2;
  auto stat = [&](const std::vector<double>& rk) {
    double h = 0;
    std::size_t off = 0;
    for (auto s : sizes) {
      double sum = 0;
      for (std::size_t i = 0; i < s; ++i) sum += rk[off + i];
      const double d = sum / s - mean_rank;
      h += s * d * d;
      off += s;
    }
    return 12.0 / (n * (n + 1)) * h;
  };
  const double observed = stat(ranks);
  std::mt19937_64 rng(seed);
  int hits = 0;
  for (int p = 0; p < permutations; ++p) {
    std::shuffle(ranks.begin(), ranks.end(), rng);
    if (stat(ranks) >= observed - 1e-9) ++hits;
  }
  return static_cast<double>(hits) / permutations;
}

}  // namespace oracle
