#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "netmon/errors.hpp"
#include "netmon/pipeline.hpp"
#include "support/oracles.hpp"

namespace netmon {
namespace {

CitedLink cite(std::string url, std::string author, std::string message_id = "m",
               ResolveStatus status = ResolveStatus::resolved, bool social = false) {
  CitedLink c;
  c.link.message_id = std::move(message_id);
  c.link.raw_url = url;
  c.link.final_url = std::move(url);
  c.link.redirect_chain = {c.link.raw_url};
  c.link.status = status;
  c.link.social = social;
  c.author = std::move(author);
  return c;
}

TEST(RankResources, EmptyInput) { EXPECT_TRUE(rank_resources({}, Granularity::document).empty()); }

TEST(RankResources, LexicographicTieBreak) {
  std::vector<CitedLink> links;
  for (int i = 0; i < 5; ++i) links.push_back(cite("http://b.test", "u" + std::to_string(i % 2)));
  for (int i = 0; i < 5; ++i) links.push_back(cite("http://a.test", "u" + std::to_string(i % 2)));
  for (int i = 0; i < 2; ++i) links.push_back(cite("http://c.test", "u"));
  const auto ranked = rank_resources(links, Granularity::document);
  ASSERT_EQ(ranked.size(), 3u);
  EXPECT_EQ(ranked[0], (RankedResource{"http://a.test", 5, 2, 1, false}));
  EXPECT_EQ(ranked[1], (RankedResource{"http://b.test", 5, 2, 2, false}));
  EXPECT_EQ(ranked[2], (RankedResource{"http://c.test", 2, 1, 3, false}));
}

TEST(RankResources, AuthorDiversityBeforeKey) {
  const std::vector<CitedLink> links{cite("http://a.test", "x"), cite("http://a.test", "x"),
                                     cite("http://b.test", "x"), cite("http://b.test", "y")};
  const auto ranked = rank_resources(links, Granularity::document);
  EXPECT_EQ(ranked[0].key, "http://b.test");
  EXPECT_EQ(ranked[1].key, "http://a.test");
}

std::vector<CitedLink> host_fixture() {
  std::mt19937_64 rng(40);
  std::vector<CitedLink> links;
  for (int i = 0; i < 500; ++i) {
    // skewed host choice so counts differ and ties still happen
    const auto h = std::min<std::uint64_t>(rng() % 40, rng() % 40);
    const std::string url = "https://host" + std::to_string(h) + ".test/doc" + std::to_string(rng() % 4);
    const auto status = rng() % 25 == 0 ? ResolveStatus::fetch_failed : ResolveStatus::resolved;
    links.push_back(cite(url, "author" + std::to_string(rng() % 30), "m" + std::to_string(i), status));
  }
  return links;
}

TEST(RankResources, MatchesSortOracleOnHosts) {
  const auto links = host_fixture();
  std::map<std::string, std::pair<std::uint64_t, std::set<std::string>>> tally;
  std::size_t ok = 0;
  for (const auto& c : links) {
    if (!c.link.succeeded()) continue;
    ++ok;
    auto host = c.link.final_url.substr(8);
    host = host.substr(0, host.find('/'));
    ++tally[host].first;
    tally[host].second.insert(c.author);
  }
  std::vector<std::tuple<std::uint64_t, std::uint64_t, std::string>> oracle;
  for (const auto& [host, t] : tally) oracle.emplace_back(t.first, t.second.size(), host);
  std::sort(oracle.begin(), oracle.end(), [](const auto& a, const auto& b) {
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
    if (std::get<1>(a) != std::get<1>(b)) return std::get<1>(a) > std::get<1>(b);
    return std::get<2>(a) < std::get<2>(b);
  });

  const auto ranked = rank_resources(links, Granularity::host);
  ASSERT_EQ(ranked.size(), oracle.size());
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    EXPECT_EQ(ranked[i].key, std::get<2>(oracle[i]));
    EXPECT_EQ(ranked[i].citations, std::get<0>(oracle[i]));
    EXPECT_EQ(ranked[i].distinct_authors, std::get<1>(oracle[i]));
    EXPECT_EQ(ranked[i].rank, i + 1);
    total += ranked[i].citations;
  }
  EXPECT_EQ(total, ok);
}

TEST(RankResources, PermutationInvariant) {
  auto links = host_fixture();
  const auto base_docs = rank_resources(links, Granularity::document);
  const auto base_hosts = rank_resources(links, Granularity::host);
  std::mt19937_64 rng(2);
  for (int round = 0; round < 5; ++round) {
    std::shuffle(links.begin(), links.end(), rng);
    EXPECT_EQ(rank_resources(links, Granularity::document), base_docs);
    EXPECT_EQ(rank_resources(links, Granularity::host), base_hosts);
  }
  for (std::size_t i = 1; i < base_docs.size(); ++i) EXPECT_GE(base_docs[i - 1].citations, base_docs[i].citations);
}

TEST(FetchManifest, FiltersSocialAndTruncates) {
  const std::vector<RankedResource> ranked{{"https://news.test/1", 9, 3, 1, false},
                                           {"https://vk.com/wall", 7, 2, 2, true},
                                           {"https://blog.test/2", 4, 1, 3, false}};
  EXPECT_EQ(fetch_manifest(ranked, 2), (std::vector<std::string>{"https://news.test/1", "https://blog.test/2"}));
  EXPECT_EQ(fetch_manifest(ranked, 100), (std::vector<std::string>{"https://news.test/1", "https://blog.test/2"}));
  EXPECT_EQ(fetch_manifest(ranked, 1), (std::vector<std::string>{"https://news.test/1"}));
  EXPECT_THROW(fetch_manifest(ranked, 0), InputError);
}

TEST(FetchManifest, FollowsRankOrder) {
  auto links = host_fixture();
  for (std::size_t i = 0; i < links.size(); i += 7) links[i].link.social = true;
  const auto ranked = rank_resources(links, Granularity::document);
  const auto manifest = fetch_manifest(ranked, 15);
  std::vector<std::string> expected;
  for (const auto& r : ranked)
    if (!r.social && expected.size() < 15) expected.push_back(r.key);
  EXPECT_EQ(manifest, expected);
}

std::vector<ExportRecord> golden_batch() {
  auto at = [](const char* s) { return parse_rfc3339(s); };
  return {
      {"https://news.test/story1", at("2014-03-01T09:15:00Z"), 3, {"PrivatBank"}, {"101", "105", "107"}},
      {"https://blog.test/post?id=7", at("2014-03-02T18:00:00.250Z"), 1, {"Diamantbank", "Ukrsibbank"}, {"130"}},
      {"https://bank.test/rates", at("2014-02-28T23:59:59Z"), 3, {"PrivatBank", "Ukrsibbank"}, {"099", "100", "140"}},
      {"https://media.test/\xd0\xb1\xd0\xb0\xd0\xbd\xd0\xba", at("2014-03-03T00:00:00Z"), 2, {}, {"150", "151"}},
  };
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(ExportStream, EmptyAndOrdering) {
  EXPECT_EQ(export_stream({}), "");
  auto at = parse_rfc3339("2014-01-01T00:00:00Z");
  const auto two = export_stream({{"https://b.test", at, 1, {}, {"1"}}, {"https://a.test", at, 4, {}, {"2"}}});
  const auto newline = two.find('\n');
  ASSERT_NE(newline, std::string::npos);
  EXPECT_NE(two.substr(0, newline).find("https://a.test"), std::string::npos);
  EXPECT_EQ(std::count(two.begin(), two.end(), '\n'), 2);
}

TEST(ExportStream, GoldenFile) {
  const auto bytes = export_stream(golden_batch());
  EXPECT_EQ(bytes, read_file(NETMON_FIXTURE_DIR "/export_golden.jsonl"));
  auto shuffled = golden_batch();
  std::reverse(shuffled.begin(), shuffled.end());
  EXPECT_EQ(export_stream(shuffled), bytes);
}

TEST(ExportStream, RejectsDuplicatesAndUnknownVersion) {
  auto batch = golden_batch();
  batch.push_back(batch[1]);
  try {
    export_stream(batch);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("https://blog.test/post?id=7"), std::string::npos);
  }
  EXPECT_THROW(export_stream(golden_batch(), "corporate-v2"), ValidationError);
}

TEST(BuildExportRecords, GroupsBySuccessfulFinalUrl) {
  QueryPacket packet{"banks", {"PrivatBank", "Ukrsibbank", "Diamantbank"}};
  std::vector<Message> matched(3);
  matched[0].id = "1";
  matched[0].matched_queries = {2};
  matched[1].id = "2";
  matched[1].matched_queries = {0};
  matched[2].id = "3";
  matched[2].matched_queries = {1};
  auto c1 = cite("https://x.test", "a", "1");
  c1.timestamp = parse_rfc3339("2014-01-02T00:00:00Z");
  auto c2 = cite("https://x.test", "b", "2");
  c2.timestamp = parse_rfc3339("2014-01-01T00:00:00Z");
  auto c3 = cite("https://y.test", "c", "3", ResolveStatus::depth_exceeded);
  const std::vector<CitedLink> links{c1, c2, c3};
  const auto records = build_export_records(links, matched, packet);
  ASSERT_EQ(records.size(), 1u);
  EXPECT_EQ(records[0].url, "https://x.test");
  EXPECT_EQ(records[0].citations, 2u);
  EXPECT_EQ(records[0].first_seen, c2.timestamp);
  EXPECT_EQ(records[0].query_labels, (std::vector<std::string>{"PrivatBank", "Diamantbank"}));
  EXPECT_EQ(records[0].source_message_ids, (std::vector<std::string>{"2", "1"}));
}

TEST(AttachProvenance, JoinsById) {
  std::vector<Message> messages(2);
  messages[0].id = "1";
  messages[0].author = "alice";
  messages[1].id = "2";
  messages[1].author = "bob";
  ResolvedLink l;
  l.message_id = "2";
  const auto cited = attach_provenance({l}, messages);
  ASSERT_EQ(cited.size(), 1u);
  EXPECT_EQ(cited[0].author, "bob");
}

std::vector<KeyedCount> keyed(const std::vector<std::uint64_t>& counts) {
  std::vector<KeyedCount> out;
  for (std::size_t i = 0; i < counts.size(); ++i) out.push_back({"k" + std::to_string(i), counts[i]});
  return out;
}

std::vector<std::uint64_t> discretised_weibull(std::size_t n, double k, double lambda, std::uint64_t seed) {
  std::vector<std::uint64_t> out;
  for (double x : testing::weibull_samples(n, k, lambda, seed)) out.push_back(std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(x))));
  return out;
}

WeibullFit baseline(double k, double lambda) {
  WeibullFit fit;
  fit.k = k;
  fit.lambda = lambda;
  return fit;
}

TEST(CompareToModel, BaselineSamplesRarelyFlagged) {
  const auto model = baseline(1.9, 38.0);
  int quiet = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto counts = keyed(discretised_weibull(1000, 1.9, 38.0, seed));
    const auto report = compare_to_model(counts, model, 1.63 / std::sqrt(1000.0));
    if (!report.flagged) ++quiet;
  }
  EXPECT_GE(quiet, 95);
}

TEST(CompareToModel, InjectedOutlierIsListed) {
  const auto model = baseline(1.9, 38.0);
  auto counts = keyed(discretised_weibull(1000, 1.9, 38.0, 5));
  const double p999 = weibull_quantile(0.999, 1.9, 38.0);
  counts.push_back({"injected", static_cast<std::uint64_t>(std::ceil(100 * p999))});
  const auto report = compare_to_model(counts, model, kolmogorov_threshold(counts.size()));
  ASSERT_FALSE(report.top_outliers.empty());
  EXPECT_EQ(report.top_outliers.front().key, "injected");
  EXPECT_LT(report.top_outliers.front().model_tail_probability, 1e-3);
  EXPECT_LE(report.top_outliers.size(), kMaxOutliers);
}

TEST(CompareToModel, QuantileCountsAreTight) {
  const double k = 1.9, lambda = 1000.0;
  const std::size_t n = 300;
  std::vector<std::uint64_t> counts;
  for (std::size_t i = 1; i <= n; ++i)
    counts.push_back(static_cast<std::uint64_t>(std::ceil(weibull_quantile(static_cast<double>(i) / (n + 1), k, lambda))));
  // one integer step of the discretised model
  const double eps = weibull_pdf(lambda * std::pow((k - 1) / k, 1 / k), k, lambda);
  const auto report = compare_to_model(keyed(counts), baseline(k, lambda), kolmogorov_threshold(n));
  EXPECT_LE(report.empirical_ks, 1.0 / (n + 1) + eps);
  EXPECT_FALSE(report.flagged);
}

TEST(CompareToModel, ThresholdExtremes) {
  const auto counts = keyed(discretised_weibull(50, 1.9, 38.0, 9));
  const auto model = baseline(1.9, 38.0);
  EXPECT_FALSE(compare_to_model(counts, model, std::numeric_limits<double>::infinity()).flagged);
  EXPECT_TRUE(compare_to_model(counts, model, 0.0).flagged);
  const auto r = compare_to_model(counts, model, 0.1, "likes");
  EXPECT_EQ(r.flagged, r.empirical_ks > r.threshold);
  EXPECT_EQ(r.series_name, "likes");
  EXPECT_EQ(r.n_samples, 50u);
}

TEST(CompareToModel, RejectsBadInput) {
  const auto model = baseline(1.9, 38.0);
  EXPECT_THROW(compare_to_model(keyed({1, 2, 3}), model, 0.1), InputError);
  EXPECT_THROW(compare_to_model(keyed({1, 2, 3, 4, 5, 6, 7, 8, 9, 0}), model, 0.1), InputError);
}

TEST(CompareToModel, PowerLawBaseline) {
  PowerLawFit pl;
  pl.alpha = 2.5;
  pl.xmin = 1;
  const auto counts = keyed(testing::discrete_powerlaw_samples(2000, 2.5, 12));
  const auto r = compare_to_model(counts, pl, kolmogorov_threshold(2000));
  EXPECT_FALSE(r.flagged);
  EXPECT_NEAR(model_cdf(pl, 1), 1.0 / boost::math::zeta(2.5), 1e-12);
  EXPECT_NEAR(model_tail_probability(pl, 1), 1.0, 1e-12);
}

TEST(CountKs, ExactUnderTies) {
  // every count is 1 with model P(C = 1) = F(1): distance is 1 - F(1)
  const auto model = baseline(1.0, 2.0);
  const std::vector<std::uint64_t> ones(20, 1);
  EXPECT_NEAR(count_ks_statistic(ones, model), std::exp(-0.5), 1e-12);
  EXPECT_NEAR(model_cdf_below(model, 1), 0.0, 1e-15);
  EXPECT_NEAR(model_tail_probability(model, 3), std::exp(-1.0), 1e-12);
}

TEST(KolmogorovThreshold, Value) {
  EXPECT_DOUBLE_EQ(kolmogorov_threshold(100), 0.136);
  EXPECT_DOUBLE_EQ(kolmogorov_threshold(100, 1.63), 0.163);
}

}  // namespace
}  // namespace netmon
