#include "netmon/serialize.hpp"

#include <set>

#include "netmon/errors.hpp"

namespace netmon {

namespace {

template <typename T>
T get_field(const nlohmann::json& j, const std::string& field) {
  try {
    return j.at(field).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(field, "missing or has the wrong type");
  }
}

std::uint64_t get_unsigned(const nlohmann::json& j, const std::string& field) {
  const auto& v = j.at(field);
  if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0))
    throw ConfigError(field, "must be a nonnegative integer");
  return v.get<std::uint64_t>();
}

std::int64_t get_integer(const nlohmann::json& j, const std::string& field) {
  const auto& v = j.at(field);
  if (!v.is_number_integer()) throw ConfigError(field, "must be an integer");
  return v.get<std::int64_t>();
}

double get_real(const nlohmann::json& j, const std::string& field) {
  const auto& v = j.at(field);
  if (!v.is_number()) throw ConfigError(field, "must be a number");
  return v.get<double>();
}

}  // namespace

Json to_json(const StepFunction& f) {
  if (f.is_constant()) return f.steps().front().second;
  Json arr = Json::array();
  for (const auto& [from, p] : f.steps()) arr.push_back(Json{{"from", from}, {"p", p}});
  return arr;
}

StepFunction step_function_from_json(const nlohmann::json& j, const std::string& field) {
  try {
    if (j.is_number()) return StepFunction::constant(j.get<double>());
    if (!j.is_array()) throw ConfigError(field, "must be a number or a list of steps");
    std::vector<std::pair<Energy, double>> steps;
    for (const auto& s : j) {
      if (!s.is_object() || !s.contains("from") || !s.contains("p"))
        throw ConfigError(field, "each step needs 'from' and 'p'");
      steps.emplace_back(get_integer(s, "from"), get_real(s, "p"));
    }
    return StepFunction(std::move(steps));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(field, e.what());
  }
}

Json to_json(const SimulationConfig& c) {
  Json j;
  j["p_s"] = c.params.p_s;
  j["e0"] = c.params.e0;
  j["like_prob"] = to_json(c.params.like_prob);
  j["repost_prob"] = to_json(c.params.repost_prob);
  j["link_carrier_fraction"] = c.params.link_carrier_fraction;
  j["link_boost"] = c.params.link_boost;
  j["rich_get_richer_gamma"] = c.params.rich_get_richer_gamma;
  j["horizon"] = c.horizon;
  j["seed"] = c.seed;
  j["max_agents"] = c.max_agents ? Json(*c.max_agents) : Json(nullptr);
  j["initial_agents"] = c.initial_agents;
  return j;
}

SimulationConfig simulation_config_from_json(const nlohmann::json& j, SimulationConfig c) {
  if (!j.is_object()) throw ConfigError("<root>", "simulation config must be a JSON object");
  static const std::set<std::string> known = {"p_s",        "e0",   "like_prob",  "repost_prob",
                                              "link_carrier_fraction", "link_boost", "rich_get_richer_gamma",
                                              "horizon",    "seed", "max_agents", "initial_agents",
                                              "runs",       "description"};
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw ConfigError(key, "unknown configuration key");
  }
  if (j.contains("p_s")) c.params.p_s = get_real(j, "p_s");
  if (j.contains("e0")) c.params.e0 = get_integer(j, "e0");
  if (j.contains("like_prob")) c.params.like_prob = step_function_from_json(j["like_prob"], "like_prob");
  if (j.contains("repost_prob")) c.params.repost_prob = step_function_from_json(j["repost_prob"], "repost_prob");
  if (j.contains("link_carrier_fraction")) c.params.link_carrier_fraction = get_real(j, "link_carrier_fraction");
  if (j.contains("link_boost")) c.params.link_boost = get_real(j, "link_boost");
  if (j.contains("rich_get_richer_gamma")) c.params.rich_get_richer_gamma = get_real(j, "rich_get_richer_gamma");
  if (j.contains("horizon")) c.horizon = get_integer(j, "horizon");
  if (j.contains("seed")) c.seed = get_unsigned(j, "seed");
  if (j.contains("max_agents")) {
    if (j["max_agents"].is_null()) c.max_agents.reset();
    else c.max_agents = get_unsigned(j, "max_agents");
  }
  if (j.contains("initial_agents")) c.initial_agents = get_unsigned(j, "initial_agents");
  return c;
}

Json to_json(const EventRecord& e, std::uint64_t run_seed) {
  Json j;
  j["run_seed"] = run_seed;
  j["tick"] = e.tick;
  j["kind"] = std::string(to_string(e.kind));
  j["agent_id"] = e.agent_id;
  j["related_agent_id"] = e.related_agent_id ? Json(*e.related_agent_id) : Json(nullptr);
  return j;
}

EventRecord event_from_json(const nlohmann::json& j) {
  EventRecord e;
  e.tick = get_field<Tick>(j, "tick");
  e.kind = event_kind_from_string(get_field<std::string>(j, "kind"));
  e.agent_id = get_field<AgentId>(j, "agent_id");
  if (j.contains("related_agent_id") && !j["related_agent_id"].is_null())
    e.related_agent_id = get_field<AgentId>(j, "related_agent_id");
  return e;
}

Json to_json(const AgentLifeStats& s) {
  Json j;
  j["run_seed"] = s.run_seed;
  j["agent_id"] = s.agent_id;
  j["birth_tick"] = s.birth_tick;
  j["lifetime"] = s.lifetime;
  j["censored"] = s.censored;
  j["total_likes"] = s.total_likes;
  j["total_reposts"] = s.total_reposts;
  j["carried_link"] = s.carried_link ? Json(s.carried_link->str()) : Json(nullptr);
  return j;
}

AgentLifeStats life_stats_from_json(const nlohmann::json& j) {
  AgentLifeStats s;
  s.run_seed = get_field<std::uint64_t>(j, "run_seed");
  s.agent_id = get_field<AgentId>(j, "agent_id");
  s.birth_tick = get_field<Tick>(j, "birth_tick");
  s.lifetime = get_field<Tick>(j, "lifetime");
  s.censored = get_field<bool>(j, "censored");
  s.total_likes = get_field<std::uint64_t>(j, "total_likes");
  s.total_reposts = get_field<std::uint64_t>(j, "total_reposts");
  if (j.contains("carried_link") && !j["carried_link"].is_null()) {
    const auto text = get_field<std::string>(j, "carried_link");
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw ConfigError("carried_link", "expected '<seed>:<serial>'");
    try {
      s.carried_link = ResourceId{std::stoull(text.substr(0, colon)), std::stoull(text.substr(colon + 1))};
    } catch (const std::logic_error&) {
      throw ConfigError("carried_link", "expected '<seed>:<serial>'");
    }
  }
  return s;
}

Json to_json(const WeibullFit& fit) {
  Json j;
  j["distribution"] = "weibull";
  j["k"] = fit.k;
  j["lambda"] = fit.lambda;
  j["log_likelihood"] = fit.log_likelihood;
  j["n_samples"] = fit.n_samples;
  j["ks_statistic"] = fit.ks_statistic;
  return j;
}

Json to_json(const PowerLawFit& fit) {
  Json j;
  j["distribution"] = "powerlaw";
  j["alpha"] = fit.alpha;
  j["xmin"] = fit.xmin;
  j["log_likelihood"] = fit.log_likelihood;
  j["n_samples"] = fit.n_samples;
  j["n_tail"] = fit.n_tail;
  return j;
}

CountModel count_model_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("<root>", "fit must be a JSON object");
  std::string kind;
  if (j.contains("distribution")) kind = get_field<std::string>(j, "distribution");
  else if (j.contains("k") && j.contains("lambda")) kind = "weibull";
  else if (j.contains("alpha")) kind = "powerlaw";

  if (kind == "weibull") {
    WeibullFit fit;
    fit.k = get_real(j, "k");
    fit.lambda = get_real(j, "lambda");
    if (!(fit.k > 0.0)) throw ConfigError("k", "must be positive");
    if (!(fit.lambda > 0.0)) throw ConfigError("lambda", "must be positive");
    if (j.contains("log_likelihood")) fit.log_likelihood = get_real(j, "log_likelihood");
    if (j.contains("n_samples")) fit.n_samples = get_unsigned(j, "n_samples");
    if (j.contains("ks_statistic")) fit.ks_statistic = get_real(j, "ks_statistic");
    return fit;
  }
  if (kind == "powerlaw") {
    PowerLawFit fit;
    fit.alpha = get_real(j, "alpha");
    if (!(fit.alpha > 1.0)) throw ConfigError("alpha", "must exceed 1");
    fit.xmin = j.contains("xmin") ? get_unsigned(j, "xmin") : 1;
    if (fit.xmin < 1) throw ConfigError("xmin", "must be >= 1");
    if (j.contains("log_likelihood")) fit.log_likelihood = get_real(j, "log_likelihood");
    if (j.contains("n_samples")) fit.n_samples = get_unsigned(j, "n_samples");
    if (j.contains("n_tail")) fit.n_tail = get_unsigned(j, "n_tail");
    return fit;
  }
  throw ConfigError("distribution", "expected 'weibull' or 'powerlaw'");
}

Json to_json(const Message& m) {
  Json j;
  j["id"] = m.id;
  j["author"] = m.author;
  j["timestamp"] = format_rfc3339(m.timestamp);
  j["text"] = m.text;
  j["matched_queries"] = Json(std::vector<std::size_t>(m.matched_queries.begin(), m.matched_queries.end()));
  return j;
}

Json to_json(const ExtractedLink& l) {
  Json j;
  j["message_id"] = l.message_id;
  j["raw_url"] = l.raw_url;
  j["position"] = l.position;
  return j;
}

Json to_json(const ResolvedLink& l) {
  Json j;
  j["message_id"] = l.message_id;
  j["raw_url"] = l.raw_url;
  j["final_url"] = l.final_url;
  j["redirect_chain"] = l.redirect_chain;
  j["was_shortened"] = l.was_shortened;
  j["status"] = std::string(to_string(l.status));
  j["social"] = l.social;
  return j;
}

ResolvedLink resolved_link_from_json(const nlohmann::json& j) {
  ResolvedLink l;
  l.message_id = get_field<std::string>(j, "message_id");
  l.raw_url = get_field<std::string>(j, "raw_url");
  l.final_url = get_field<std::string>(j, "final_url");
  l.redirect_chain = get_field<std::vector<std::string>>(j, "redirect_chain");
  l.was_shortened = get_field<bool>(j, "was_shortened");
  l.status = resolve_status_from_string(get_field<std::string>(j, "status"));
  l.social = j.contains("social") ? get_field<bool>(j, "social") : false;
  return l;
}

Json to_json(const RankedResource& r) {
  Json j;
  j["key"] = r.key;
  j["citations"] = r.citations;
  j["distinct_authors"] = r.distinct_authors;
  j["rank"] = r.rank;
  j["social"] = r.social;
  return j;
}

Json to_json(const LinkStats& s) {
  Json j;
  j["total_messages"] = s.total_messages;
  j["messages_with_links"] = s.messages_with_links;
  j["total_links"] = s.total_links;
  j["distinct_final_urls"] = s.distinct_final_urls;
  j["distinct_raw_urls"] = s.distinct_raw_urls;
  j["resolved_links"] = s.resolved_links;
  j["messages_with_links_fraction"] = s.messages_with_links_fraction;
  j["unique_links_fraction"] = s.unique_links_fraction ? Json(*s.unique_links_fraction) : Json(nullptr);
  j["unique_links_fraction_pre_resolution"] =
      s.unique_links_fraction_pre_resolution ? Json(*s.unique_links_fraction_pre_resolution) : Json(nullptr);
  Json sources = Json::object();
  for (const auto& [host, n] : s.per_source_counts) sources[host] = n;
  j["per_source_counts"] = sources;
  return j;
}

Json to_json(const AnomalyReport& r) {
  Json j;
  j["series_name"] = r.series_name;
  j["model_fit"] = std::visit([](const auto& fit) { return to_json(fit); }, r.model_fit);
  j["n_samples"] = r.n_samples;
  j["empirical_ks"] = r.empirical_ks;
  j["threshold"] = r.threshold;
  j["flagged"] = r.flagged;
  Json outliers = Json::array();
  for (const auto& o : r.top_outliers) {
    outliers.push_back(Json{{"key", o.key}, {"count", o.count}, {"model_tail_probability", o.model_tail_probability}});
  }
  j["top_outliers"] = outliers;
  return j;
}

}  // namespace netmon
