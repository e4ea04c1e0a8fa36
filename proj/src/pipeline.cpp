#include "netmon/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_map>

#include "json.hpp"
#include "netmon/errors.hpp"
#include "netmon/url.hpp"

namespace netmon {

std::vector<CitedLink> attach_provenance(const std::vector<ResolvedLink>& links,
                                         const std::vector<Message>& messages) {
  std::unordered_map<std::string, const Message*> by_id;
  for (const auto& m : messages) by_id.emplace(m.id, &m);
  std::vector<CitedLink> out;
  out.reserve(links.size());
  for (const auto& l : links) {
    CitedLink c{l, {}, {}};
    if (auto it = by_id.find(l.message_id); it != by_id.end()) {
      c.author = it->second->author;
      c.timestamp = it->second->timestamp;
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<RankedResource> rank_resources(std::span<const CitedLink> links, Granularity granularity) {
  struct Tally {
    std::uint64_t citations = 0;
    std::set<std::string> authors;
    bool social = false;
  };
  std::map<std::string, Tally> tallies;
  for (const auto& c : links) {
    if (!c.link.succeeded()) continue;
    std::string key;
    bool social = c.link.social;
    if (granularity == Granularity::document) {
      key = c.link.final_url;
    } else {
      key = url_host(c.link.final_url);
      social = is_social_host(key);
    }
    Tally& t = tallies[key];
    ++t.citations;
    t.authors.insert(c.author);
    t.social = social;
  }

  std::vector<RankedResource> ranked;
  ranked.reserve(tallies.size());
  for (auto& [key, t] : tallies) ranked.push_back({key, t.citations, t.authors.size(), 0, t.social});
  std::sort(ranked.begin(), ranked.end(), [](const RankedResource& a, const RankedResource& b) {
    if (a.citations != b.citations) return a.citations > b.citations;
    if (a.distinct_authors != b.distinct_authors) return a.distinct_authors > b.distinct_authors;
    return a.key < b.key;
  });
  for (std::size_t i = 0; i < ranked.size(); ++i) ranked[i].rank = i + 1;
  return ranked;
}

std::vector<std::string> fetch_manifest(const std::vector<RankedResource>& ranked, std::size_t top_n) {
  if (top_n < 1) throw InputError("top_n must be >= 1");
  std::vector<std::string> manifest;
  for (const auto& r : ranked) {
    if (manifest.size() == top_n) break;
    if (!r.social) manifest.push_back(r.key);
  }
  return manifest;
}

std::vector<ExportRecord> build_export_records(std::span<const CitedLink> links,
                                               const std::vector<Message>& matched, const QueryPacket& packet) {
  std::unordered_map<std::string, const Message*> by_id;
  for (const auto& m : matched) by_id.emplace(m.id, &m);

  struct Group {
    std::uint64_t citations = 0;
    Instant first_seen = Instant::max();
    std::set<std::size_t> queries;
    std::set<std::pair<Instant, std::string>> sources;
  };
  std::map<std::string, Group> groups;
  for (const auto& c : links) {
    if (!c.link.succeeded()) continue;
    Group& g = groups[c.link.final_url];
    ++g.citations;
    g.first_seen = std::min(g.first_seen, c.timestamp);
    g.sources.emplace(c.timestamp, c.link.message_id);
    if (auto it = by_id.find(c.link.message_id); it != by_id.end())
      g.queries.insert(it->second->matched_queries.begin(), it->second->matched_queries.end());
  }

  std::vector<ExportRecord> records;
  records.reserve(groups.size());
  for (auto& [url, g] : groups) {
    ExportRecord r;
    r.url = url;
    r.first_seen = g.first_seen;
    r.citations = g.citations;
    for (std::size_t qi : g.queries) {
      if (qi < packet.queries.size()) r.query_labels.push_back(packet.queries[qi]);
    }
    std::set<std::string> seen;
    for (const auto& [when, id] : g.sources) {
      if (seen.insert(id).second) r.source_message_ids.push_back(id);
    }
    records.push_back(std::move(r));
  }
  return records;
}

std::string export_stream(std::vector<ExportRecord> records, std::string_view format_version) {
  if (format_version != kCorporateV1)
    throw ValidationError("unsupported export format '" + std::string(format_version) + "'");
  std::set<std::string> urls;
  for (const auto& r : records) {
    if (!urls.insert(r.url).second) throw ValidationError("duplicate url in export batch: " + r.url);
  }
  std::sort(records.begin(), records.end(), [](const ExportRecord& a, const ExportRecord& b) {
    if (a.citations != b.citations) return a.citations > b.citations;
    return a.url < b.url;
  });
  std::string out;
  for (const auto& r : records) {
    nlohmann::ordered_json j;
    j["url"] = r.url;
    j["first_seen"] = format_rfc3339(r.first_seen);
    j["citations"] = r.citations;
    j["query_labels"] = r.query_labels;
    j["source_message_ids"] = r.source_message_ids;
    out += j.dump();
    out += '\n';
  }
  return out;
}

double model_cdf(const CountModel& model, std::uint64_t count) {
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, WeibullFit>) {
          return weibull_cdf(static_cast<double>(count), m.k, m.lambda);
        } else {
          return powerlaw_cdf(static_cast<double>(count), m.alpha, m.xmin);
        }
      },
      model);
}

double model_cdf_below(const CountModel& model, std::uint64_t count) {
  if (count == 0) return 0.0;
  return model_cdf(model, count - 1);
}

double model_tail_probability(const CountModel& model, std::uint64_t count) {
  return std::max(0.0, 1.0 - model_cdf_below(model, count));
}

double count_ks_statistic(std::span<const std::uint64_t> counts, const CountModel& model) {
  if (counts.empty()) throw InputError("count_ks_statistic needs at least one count");
  std::vector<std::uint64_t> sorted(counts.begin(), counts.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    const std::uint64_t v = sorted[i];
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == v) ++j;
    const double below = static_cast<double>(i) / n;
    const double at = static_cast<double>(j) / n;
    d = std::max({d, std::abs(at - model_cdf(model, v)), std::abs(below - model_cdf_below(model, v))});
    i = j;
  }
  return std::min(1.0, d);
}

double kolmogorov_threshold(std::size_t n, double coefficient) {
  if (n == 0) throw InputError("threshold needs n >= 1");
  return coefficient / std::sqrt(static_cast<double>(n));
}

AnomalyReport compare_to_model(std::span<const KeyedCount> counts, const CountModel& baseline, double threshold,
                               std::string series_name) {
  if (counts.size() < 10)
    throw InputError("need at least 10 counts for a comparison, got " + std::to_string(counts.size()));
  std::vector<std::uint64_t> values;
  values.reserve(counts.size());
  for (const auto& c : counts) {
    if (c.count == 0) throw InputError("counts must be positive (key '" + c.key + "')");
    values.push_back(c.count);
  }

  AnomalyReport report;
  report.series_name = std::move(series_name);
  report.model_fit = baseline;
  report.n_samples = counts.size();
  report.empirical_ks = count_ks_statistic(values, baseline);
  report.threshold = threshold;
  report.flagged = report.empirical_ks > threshold;

  std::vector<Outlier> outliers;
  for (const auto& c : counts) {
    const double tail = model_tail_probability(baseline, c.count);
    if (tail < kOutlierTailProbability) outliers.push_back({c.key, c.count, tail});
  }
  std::sort(outliers.begin(), outliers.end(), [](const Outlier& a, const Outlier& b) {
    if (a.model_tail_probability != b.model_tail_probability)
      return a.model_tail_probability < b.model_tail_probability;
    if (a.count != b.count) return a.count > b.count;
    return a.key < b.key;
  });
  if (outliers.size() > kMaxOutliers) outliers.resize(kMaxOutliers);
  report.top_outliers = std::move(outliers);
  return report;
}

}  // namespace netmon
