#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "netmon/distfit.hpp"
#include "netmon/ingest.hpp"
#include "netmon/linknet.hpp"

namespace netmon {

/// A resolved link together with who cited it and when.
struct CitedLink {
  ResolvedLink link;
  std::string author;
  Instant timestamp{};
};

/// Joins resolved links with their source messages by message id.
std::vector<CitedLink> attach_provenance(const std::vector<ResolvedLink>& links,
                                         const std::vector<Message>& messages);

enum class Granularity { document, host };

struct RankedResource {
  std::string key;
  std::uint64_t citations = 0;
  std::uint64_t distinct_authors = 0;
  std::uint64_t rank = 0;
  bool social = false;

  bool operator==(const RankedResource&) const = default;
};

/// Counts successfully resolved links per final URL (or per host) and orders
/// by citations, then distinct authors (both descending), then key. Ranks are
/// 1..N.
std::vector<RankedResource> rank_resources(std::span<const CitedLink> links, Granularity granularity);

/// The first `top_n` non-social entries of a document-level ranking.
std::vector<std::string> fetch_manifest(const std::vector<RankedResource>& ranked, std::size_t top_n);

struct ExportRecord {
  std::string url;
  Instant first_seen{};
  std::uint64_t citations = 0;
  std::vector<std::string> query_labels;
  std::vector<std::string> source_message_ids;
};

/// One record per distinct final URL among successfully resolved links.
/// Query labels follow packet order; message ids follow citation time.
std::vector<ExportRecord> build_export_records(std::span<const CitedLink> links,
                                               const std::vector<Message>& matched, const QueryPacket& packet);

inline constexpr std::string_view kCorporateV1 = "corporate-v1";

/// Line-delimited JSON sorted by citations (descending) then url. Throws
/// ValidationError on a repeated url or an unknown format version.
std::string export_stream(std::vector<ExportRecord> records, std::string_view format_version = kCorporateV1);

/// Baseline a set of counts is judged against.
using CountModel = std::variant<WeibullFit, PowerLawFit>;

/// Integer counts are compared with the model discretised onto the integers:
/// a Weibull baseline stands for ceil(X), so P(C <= c) = F(c) and
/// P(C < c) = F(c - 1); a power law is already discrete.
double model_cdf(const CountModel& model, std::uint64_t count);
double model_cdf_below(const CountModel& model, std::uint64_t count);
/// P(C >= count).
double model_tail_probability(const CountModel& model, std::uint64_t count);

/// sup |F_n - F| for integer counts against the discretised model. Exact
/// under ties, unlike the order-statistic formula.
double count_ks_statistic(std::span<const std::uint64_t> counts, const CountModel& model);

struct KeyedCount {
  std::string key;
  std::uint64_t count = 0;
};

struct Outlier {
  std::string key;
  std::uint64_t count = 0;
  double model_tail_probability = 0.0;
};

struct AnomalyReport {
  std::string series_name;
  CountModel model_fit;
  std::uint64_t n_samples = 0;
  double empirical_ks = 0.0;
  double threshold = 0.0;
  bool flagged = false;
  std::vector<Outlier> top_outliers;
};

/// Asymptotic 5% Kolmogorov critical value 1.36 / sqrt(n).
double kolmogorov_threshold(std::size_t n, double coefficient = 1.36);

inline constexpr double kOutlierTailProbability = 1e-3;
inline constexpr std::size_t kMaxOutliers = 10;

/// KS distance of the counts from the baseline and a flag when it exceeds
/// `threshold`. Outliers are keys with P(C >= count) < 1e-3, rarest first,
/// at most 10. Needs at least 10 counts (InputError).
AnomalyReport compare_to_model(std::span<const KeyedCount> counts, const CountModel& baseline, double threshold,
                               std::string series_name = "counts");

}  // namespace netmon
