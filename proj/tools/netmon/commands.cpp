#include "commands.hpp"

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "netmon/distfit.hpp"
#include "netmon/errors.hpp"
#include "netmon/http_fetcher.hpp"
#include "netmon/ingest.hpp"
#include "netmon/linknet.hpp"
#include "netmon/pipeline.hpp"
#include "netmon/serialize.hpp"
#include "netmon/simulator.hpp"

namespace netmon::cli {

namespace fs = std::filesystem;

namespace {

std::ifstream open_input(const std::string& path, const std::string& what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + what + " '" + path + "'");
  return in;
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw InputError("error while writing '" + path.string() + "'");
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

nlohmann::json read_json_file(const std::string& path, const std::string& what) {
  auto in = open_input(path, what);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(what + " '" + path + "' is not valid JSON: " + e.what());
  }
}

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_real(std::string_view text, std::size_t line_no) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw InputError("line " + std::to_string(line_no) + ": not a number: '" + std::string(text) + "'");
  return v;
}

std::uint64_t parse_count(std::string_view text, std::size_t line_no) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw InputError("line " + std::to_string(line_no) + ": not a nonnegative integer: '" + std::string(text) + "'");
  return v;
}

/// Plain text, one number per line; blank lines are skipped.
std::vector<double> read_numbers(const std::string& path) {
  auto in = open_input(path, "sample file");
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty()) continue;
    values.push_back(parse_real(t, line_no));
  }
  if (values.empty()) throw InputError("sample file '" + path + "' contains no numbers");
  return values;
}

LifeField parse_field(const std::string& name) {
  if (name == "lifetime") return LifeField::lifetime;
  if (name == "total_likes") return LifeField::total_likes;
  if (name == "total_reposts") return LifeField::total_reposts;
  throw ConfigError("field", "expected lifetime, total_likes or total_reposts");
}

std::vector<AgentLifeStats> read_life_stats(const std::string& path) {
  auto in = open_input(path, "life-stats file");
  std::vector<AgentLifeStats> stats;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      stats.push_back(life_stats_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      throw InputError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return stats;
}

/// "count", "key,count" or "key<TAB>count" per line.
std::vector<KeyedCount> read_keyed_counts(const std::string& path) {
  auto in = open_input(path, "empirical counts file");
  std::vector<KeyedCount> counts;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto sep = t.find_last_of(",\t ");
    KeyedCount kc;
    if (sep == std::string_view::npos) {
      kc.key = "line" + std::to_string(line_no);
      kc.count = parse_count(t, line_no);
    } else {
      kc.key = std::string(trim(t.substr(0, sep)));
      kc.count = parse_count(trim(t.substr(sep + 1)), line_no);
    }
    counts.push_back(std::move(kc));
  }
  return counts;
}

Json fit_or_error(const std::vector<double>& series) {
  try {
    return to_json(fit_weibull_mle(series));
  } catch (const std::exception& e) {
    return Json{{"error", e.what()}, {"n_samples", series.size()}};
  }
}

// ---------------------------------------------------------------- simulate

struct SimulateOptions {
  std::string config;
  std::optional<std::int64_t> steps;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> runs;
  unsigned threads = 1;
  std::string out = "sim_out";
  bool no_events = false;
};

int cmd_simulate(const SimulateOptions& o, std::ostream& out) {
  const auto j = read_json_file(o.config, "config");
  SimulationConfig config = simulation_config_from_json(j);
  std::uint64_t runs = 1;
  if (j.contains("runs")) {
    if (!j["runs"].is_number_unsigned() || j["runs"].get<std::uint64_t>() < 1)
      throw ConfigError("runs", "must be a positive integer");
    runs = j["runs"].get<std::uint64_t>();
  }
  if (o.steps) config.horizon = *o.steps;
  if (o.seed) config.seed = *o.seed;
  if (o.runs) runs = *o.runs;
  if (runs < 1) throw ConfigError("runs", "must be >= 1");
  config.validate();

  Json resolved = to_json(config);
  resolved["runs"] = runs;
  resolved["threads"] = o.threads;
  resolved["events"] = !o.no_events;

  const fs::path dir(o.out);
  fs::create_directories(dir);
  write_file(dir / "run_config.json", dump(resolved));

  ReplicationOptions ropt;
  ropt.threads = o.threads;
  ropt.keep_events = !o.no_events;
  const ReplicationResult result = replicate(config, runs, ropt);

  if (!o.no_events) {
    std::string events;
    for (const auto& run : result.events) {
      for (const auto& e : run.events) {
        events += to_json(e, run.seed).dump();
        events += '\n';
      }
    }
    write_file(dir / "events.jsonl", events);
  }
  write_file(dir / "life_stats.jsonl", to_jsonl(result.life_stats, [](const auto& s) { return to_json(s); }));

  Json summary;
  std::uint64_t censored = 0;
  for (const auto& s : result.life_stats) censored += s.censored ? 1 : 0;
  summary["runs"] = runs;
  summary["agents"] = result.life_stats.size();
  summary["censored_agents"] = censored;
  summary["truncated_runs"] = result.truncated_runs;
  summary["lifetime_fit"] = fit_or_error(fit_series(result.life_stats, LifeField::lifetime));
  summary["likes_fit"] = fit_or_error(fit_series(result.life_stats, LifeField::total_likes));
  summary["reposts_fit"] = fit_or_error(fit_series(result.life_stats, LifeField::total_reposts));
  const auto by_link = repost_counts_by_link(result.life_stats);
  std::vector<std::uint64_t> link_counts;
  for (const auto& [link, n] : by_link) {
    if (n > 0) link_counts.push_back(n);
  }
  try {
    const auto pl = fit_powerlaw_mle(link_counts);
    Json f = to_json(pl);
    f["llr_vs_exponential"] = powerlaw_vs_exponential_llr(link_counts);
    summary["link_reposts_fit"] = f;
  } catch (const InputError& e) {
    summary["link_reposts_fit"] = Json{{"error", e.what()}, {"n_samples", link_counts.size()}};
  }
  write_file(dir / "summary.json", dump(summary));

  out << "runs=" << runs << " agents=" << result.life_stats.size() << " censored=" << censored
      << " truncated_runs=" << result.truncated_runs << "\n";
  if (summary["reposts_fit"].contains("k")) {
    out << "reposts: k=" << summary["reposts_fit"]["k"].get<double>()
        << " lambda=" << summary["reposts_fit"]["lambda"].get<double>() << "\n";
  }
  return kSuccess;
}

// ---------------------------------------------------------------- fit

struct FitOptions {
  std::string distribution;
  std::string input;
  std::optional<std::string> field;
  std::uint64_t xmin = 1;
  std::optional<std::string> out;
  double tol = 1e-9;
  int max_iter = 200;
};

int cmd_fit(const FitOptions& o, std::ostream& out) {
  std::vector<double> samples;
  if (o.field) {
    samples = fit_series(read_life_stats(o.input), parse_field(*o.field));
    if (samples.empty()) throw InputError("no positive values for field '" + *o.field + "'");
  } else {
    samples = read_numbers(o.input);
  }

  Json result;
  if (o.distribution == "weibull") {
    const WeibullFit fit = fit_weibull_mle(samples, o.tol, o.max_iter);
    result = to_json(fit);
    out << "k=" << format_number(fit.k) << " lambda=" << format_number(fit.lambda) << "\n";
  } else {
    std::vector<std::uint64_t> counts;
    counts.reserve(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const double v = samples[i];
      if (!(v >= 1.0) || v != std::floor(v))
        throw InputError("sample " + std::to_string(i + 1) + " is not a positive integer");
      counts.push_back(static_cast<std::uint64_t>(v));
    }
    const PowerLawFit fit = fit_powerlaw_mle(counts, o.xmin);
    result = to_json(fit);
    result["llr_vs_exponential"] = powerlaw_vs_exponential_llr(counts, o.xmin);
    out << "alpha=" << format_number(fit.alpha) << " xmin=" << fit.xmin << "\n";
  }

  if (o.out) {
    write_file(*o.out, dump(result));
    Json echo{{"command", "fit"},  {"distribution", o.distribution}, {"input", o.input},
              {"xmin", o.xmin},    {"tol", o.tol},                   {"max_iter", o.max_iter},
              {"out", *o.out}};
    echo["field"] = o.field ? Json(*o.field) : Json(nullptr);
    write_file(*o.out + ".config.json", dump(echo));
  }
  return kSuccess;
}

// ---------------------------------------------------------------- pipeline

struct PipelineOptions {
  std::string queries;
  std::string corpus;
  std::optional<std::string> redirect_map;
  bool online = false;
  std::optional<std::string> registry;
  std::size_t top = 100;
  int max_depth = 10;
  unsigned jobs = 8;
  std::string out_dir = "pipeline_out";
};

int cmd_pipeline(const PipelineOptions& o, std::ostream& out, std::ostream& err) {
  auto query_in = open_input(o.queries, "query packet");
  const QueryPacket packet = parse_query_packet(query_in, fs::path(o.queries).stem().string());
  auto corpus_in = open_input(o.corpus, "corpus");
  const CorpusLoad corpus = load_corpus(corpus_in);

  ShortenerRegistry registry = ShortenerRegistry::defaults();
  if (o.registry) {
    auto reg_in = open_input(*o.registry, "shortener registry");
    registry = ShortenerRegistry::parse(reg_in);
  }

  const char* offline_env = std::getenv("NETMON_OFFLINE");
  const bool forced_offline = offline_env != nullptr && std::string_view(offline_env) == "1";
  std::unique_ptr<RedirectOracle> fetcher;
  std::string mode;
  if (o.online && !forced_offline) {
    fetcher = std::make_unique<HttpRedirectOracle>();
    mode = "online";
  } else if (o.redirect_map) {
    auto map_in = open_input(*o.redirect_map, "redirect map");
    fetcher = std::make_unique<OfflineRedirectMap>(OfflineRedirectMap::parse(map_in));
    mode = "offline";
  } else {
    fetcher = std::make_unique<OfflineRedirectMap>();
    mode = "offline";
  }
  if (o.online && forced_offline) err << "NETMON_OFFLINE=1: ignoring --online\n";

  const fs::path dir(o.out_dir);
  fs::create_directories(dir);
  Json resolved_config{{"command", "pipeline"},
                       {"queries", o.queries},
                       {"corpus", o.corpus},
                       {"redirect_map", o.redirect_map ? Json(*o.redirect_map) : Json(nullptr)},
                       {"mode", mode},
                       {"registry", o.registry ? Json(*o.registry) : Json(nullptr)},
                       {"shortener_hosts", registry.hosts()},
                       {"top", o.top},
                       {"max_depth", o.max_depth},
                       {"jobs", o.jobs},
                       {"out_dir", o.out_dir}};
  write_file(dir / "run_config.json", dump(resolved_config));

  // Stages 1-2: formally relevant, deduplicated messages.
  const std::vector<Message> matched = match_queries(dedupe(corpus.messages), packet);
  // Stage 3: hyperlinks.
  std::vector<ExtractedLink> links;
  for (const auto& m : matched) {
    auto found = extract_links(m);
    links.insert(links.end(), found.begin(), found.end());
  }
  // Stage 4: expansion and ranking.
  const std::vector<ResolvedLink> resolved = resolve_all(links, *fetcher, registry, o.max_depth, o.jobs);
  const std::vector<CitedLink> cited = attach_provenance(resolved, matched);
  const auto ranking = rank_resources(cited, Granularity::document);
  const auto host_ranking = rank_resources(cited, Granularity::host);
  // Stage 5 boundary and stage 6.
  const auto manifest = fetch_manifest(ranking, o.top);
  const std::string exported = export_stream(build_export_records(cited, matched, packet));

  write_file(dir / "matched.jsonl", to_jsonl(matched, [](const auto& m) { return to_json(m); }));
  write_file(dir / "links.jsonl", to_jsonl(links, [](const auto& l) { return to_json(l); }));
  write_file(dir / "resolved.jsonl", to_jsonl(resolved, [](const auto& l) { return to_json(l); }));
  Json ranking_json = Json::array();
  for (const auto& r : ranking) ranking_json.push_back(to_json(r));
  write_file(dir / "ranking.json", dump(ranking_json));
  Json host_json = Json::array();
  for (const auto& r : host_ranking) host_json.push_back(to_json(r));
  write_file(dir / "ranking_hosts.json", dump(host_json));
  std::string manifest_text;
  for (const auto& url : manifest) manifest_text += url + "\n";
  write_file(dir / "manifest.txt", manifest_text);
  write_file(dir / "export.jsonl", exported);

  Json rejects = Json::array();
  for (const auto& r : corpus.rejects) rejects.push_back(Json{{"line", r.line}, {"reason", r.reason}});
  write_file(dir / "rejects.json", dump(rejects));

  Json stats;
  if (matched.empty()) {
    stats = Json{{"total_messages", 0},
                 {"messages_with_links", 0},
                 {"total_links", 0},
                 {"messages_with_links_fraction", nullptr},
                 {"unique_links_fraction", nullptr},
                 {"unique_links_fraction_pre_resolution", nullptr},
                 {"per_source_counts", Json::object()}};
  } else {
    stats = to_json(link_stats(matched, resolved));
  }
  stats["corpus_lines_rejected"] = corpus.rejects.size();
  write_file(dir / "stats.json", dump(stats));

  if (!corpus.rejects.empty()) err << corpus.rejects.size() << " corpus line(s) rejected, see rejects.json\n";
  out << "messages=" << matched.size() << " links=" << links.size() << " documents=" << ranking.size()
      << " manifest=" << manifest.size() << "\n";
  return kSuccess;
}

// ---------------------------------------------------------------- compare

struct CompareOptions {
  std::string empirical;
  std::string baseline_fit;
  std::optional<double> threshold;
  std::string series = "counts";
  std::optional<std::string> out;
};

int cmd_compare(const CompareOptions& o, std::ostream& out) {
  const auto counts = read_keyed_counts(o.empirical);
  if (counts.size() < 10)
    throw InputError("need at least 10 counts, '" + o.empirical + "' has " + std::to_string(counts.size()));
  const CountModel baseline = count_model_from_json(read_json_file(o.baseline_fit, "baseline fit"));
  const double threshold = o.threshold ? *o.threshold : kolmogorov_threshold(counts.size());
  const AnomalyReport report = compare_to_model(counts, baseline, threshold, o.series);

  out << "ks=" << format_number(report.empirical_ks) << " threshold=" << format_number(report.threshold)
      << " flagged=" << (report.flagged ? "true" : "false") << " outliers=" << report.top_outliers.size() << "\n";
  if (o.out) {
    write_file(*o.out, dump(to_json(report)));
    Json echo{{"command", "compare"},   {"empirical", o.empirical}, {"baseline_fit", o.baseline_fit},
              {"threshold", threshold}, {"series", o.series},       {"out", *o.out}};
    write_file(*o.out + ".config.json", dump(echo));
  }
  return kSuccess;
}

// ---------------------------------------------------------------- plot-points

struct PlotOptions {
  std::string fit;
  double x_max = 0.0;
  int n = 100;
  std::optional<std::string> out;
};

int cmd_plot_points(const PlotOptions& o, std::ostream& out) {
  const CountModel model = count_model_from_json(read_json_file(o.fit, "fit file"));
  const auto* weibull = std::get_if<WeibullFit>(&model);
  if (!weibull) throw InputError("plot-points needs a Weibull fit");
  const auto points = emit_pdf_points(*weibull, o.x_max, o.n);
  std::string csv = "x,pdf\n";
  for (const auto& [x, y] : points) csv += format_number(x) + "," + format_number(y) + "\n";
  if (o.out) {
    write_file(*o.out, csv);
    Json echo{{"command", "plot-points"}, {"fit", o.fit}, {"x_max", o.x_max}, {"n", o.n}, {"out", *o.out}};
    write_file(*o.out + ".config.json", dump(echo));
  } else {
    out << csv;
  }
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Message diffusion modelling and link-monitoring pipeline", "netmon"};
  app.require_subcommand(1);

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Run the agent model and write event and life-stat logs");
  simulate->add_option("--config", sim.config, "Simulation config JSON")->required();
  simulate->add_option("--steps", sim.steps, "Horizon in ticks (overrides config)");
  simulate->add_option("--seed", sim.seed, "Base seed (overrides config)");
  simulate->add_option("--runs", sim.runs, "Number of replications (overrides config)");
  simulate->add_option("--threads", sim.threads, "Worker threads")->check(CLI::PositiveNumber);
  simulate->add_option("--out", sim.out, "Output directory");
  simulate->add_flag("--no-events", sim.no_events, "Skip the event log");

  FitOptions fit;
  auto* fitcmd = app.add_subcommand("fit", "Fit a Weibull or power-law distribution");
  fitcmd->add_option("distribution", fit.distribution, "weibull or powerlaw")
      ->required()
      ->check(CLI::IsMember({"weibull", "powerlaw"}));
  fitcmd->add_option("--input", fit.input, "Samples, one per line (or life stats with --field)")->required();
  fitcmd->add_option("--field", fit.field, "Read life_stats.jsonl and fit this field");
  fitcmd->add_option("--xmin", fit.xmin, "Power-law lower cutoff")->check(CLI::PositiveNumber);
  fitcmd->add_option("--tol", fit.tol, "Weibull shape tolerance");
  fitcmd->add_option("--max-iter", fit.max_iter, "Weibull iteration limit");
  fitcmd->add_option("--out", fit.out, "Fit JSON output");

  PipelineOptions pipe;
  auto* pipeline = app.add_subcommand("pipeline", "Build the ranked resource database from a message corpus");
  pipeline->add_option("--queries", pipe.queries, "Query packet file")->required();
  pipeline->add_option("--corpus", pipe.corpus, "Message corpus (JSON lines)")->required();
  auto* map_opt = pipeline->add_option("--redirect-map", pipe.redirect_map, "Offline redirect map JSON");
  auto* online_opt = pipeline->add_flag("--online", pipe.online, "Resolve short links over HTTP");
  map_opt->excludes(online_opt);
  pipeline->add_option("--registry", pipe.registry, "Shortener registry file");
  pipeline->add_option("--top", pipe.top, "Fetch manifest size")->check(CLI::PositiveNumber);
  pipeline->add_option("--max-depth", pipe.max_depth, "Redirect hop limit")->check(CLI::PositiveNumber);
  pipeline->add_option("--jobs", pipe.jobs, "Concurrent lookups")->check(CLI::PositiveNumber);
  pipeline->add_option("--out-dir", pipe.out_dir, "Output directory");

  CompareOptions cmp;
  auto* compare = app.add_subcommand("compare", "Compare empirical counts with a fitted baseline");
  compare->add_option("--empirical", cmp.empirical, "Counts file: count or key,count per line")->required();
  compare->add_option("--baseline-fit", cmp.baseline_fit, "Fit JSON from 'netmon fit'")->required();
  compare->add_option("--threshold", cmp.threshold, "KS threshold (default 1.36/sqrt(n))");
  compare->add_option("--series", cmp.series, "Series name for the report");
  compare->add_option("--out", cmp.out, "Anomaly report JSON");

  PlotOptions plot;
  auto* plot_points = app.add_subcommand("plot-points", "Write Weibull density points as CSV");
  plot_points->add_option("--fit", plot.fit, "Weibull fit JSON")->required();
  plot_points->add_option("--x-max", plot.x_max, "Right end of the grid")->required();
  plot_points->add_option("--n", plot.n, "Number of points (>= 2)");
  plot_points->add_option("--out", plot.out, "CSV output (stdout if omitted)");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(sim, out);
    if (fitcmd->parsed()) return cmd_fit(fit, out);
    if (pipeline->parsed()) return cmd_pipeline(pipe, out, err);
    if (compare->parsed()) return cmd_compare(cmp, out);
    if (plot_points->parsed()) return cmd_plot_points(plot, out);
  } catch (const ConfigError& e) {
    err << "error: invalid configuration field '" << e.field() << "': " << e.what() << "\n";
    return kUsageError;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << " (last iterate " << e.last_iterate() << ")\n";
    return kUsageError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
  return kUsageError;
}

}  // namespace netmon::cli
