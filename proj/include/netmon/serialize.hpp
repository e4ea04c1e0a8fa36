#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "netmon/distfit.hpp"
#include "netmon/linknet.hpp"
#include "netmon/pipeline.hpp"
#include "netmon/simulator.hpp"

// JSON encodings shared by the command-line tool and the tests. Integers are
// written unquoted; field names follow the struct members.
namespace netmon {

using Json = nlohmann::ordered_json;

/// Scalar or list of {"from": energy, "p": value} steps.
Json to_json(const StepFunction& f);
StepFunction step_function_from_json(const nlohmann::json& j, const std::string& field);

/// Flat object holding the behavior parameters and run settings. Unknown or
/// mistyped keys raise ConfigError naming the key. Keys not present keep the
/// value already in `base`.
Json to_json(const SimulationConfig& config);
SimulationConfig simulation_config_from_json(const nlohmann::json& j, SimulationConfig base = {});

Json to_json(const EventRecord& e, std::uint64_t run_seed);
EventRecord event_from_json(const nlohmann::json& j);
Json to_json(const AgentLifeStats& s);
AgentLifeStats life_stats_from_json(const nlohmann::json& j);

Json to_json(const WeibullFit& fit);
Json to_json(const PowerLawFit& fit);
/// Reads either fit; the "distribution" key decides, falling back on which
/// parameters are present.
CountModel count_model_from_json(const nlohmann::json& j);

Json to_json(const Message& m);
Json to_json(const ExtractedLink& l);
Json to_json(const ResolvedLink& l);
ResolvedLink resolved_link_from_json(const nlohmann::json& j);
Json to_json(const RankedResource& r);
Json to_json(const LinkStats& s);
Json to_json(const AnomalyReport& r);

/// One compact JSON document per line.
template <typename Range, typename Fn>
std::string to_jsonl(const Range& items, Fn&& encode) {
  std::string out;
  for (const auto& item : items) {
    out += encode(item).dump();
    out += '\n';
  }
  return out;
}

}  // namespace netmon
