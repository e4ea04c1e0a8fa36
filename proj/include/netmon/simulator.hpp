#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "netmon/diffusion.hpp"

namespace netmon {

struct SimulationConfig {
  BehaviorParams params;
  Tick horizon = 1;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> max_agents;
  std::uint64_t initial_agents = 1;

  void validate() const;
};

enum class EventKind { self_generate, repost, like, death, truncated };

std::string_view to_string(EventKind kind);
EventKind event_kind_from_string(std::string_view name);

struct EventRecord {
  Tick tick = 0;
  EventKind kind = EventKind::self_generate;
  AgentId agent_id = 0;
  std::optional<AgentId> related_agent_id;

  bool operator==(const EventRecord&) const = default;
};

struct AgentLifeStats {
  std::uint64_t run_seed = 0;
  AgentId agent_id = 0;
  Tick birth_tick = 0;
  /// Ticks from birth to death, or to the end of the run when censored.
  Tick lifetime = 0;
  bool censored = false;
  std::uint64_t total_likes = 0;
  std::uint64_t total_reposts = 0;
  std::optional<ResourceId> carried_link;

  bool operator==(const AgentLifeStats&) const = default;
};

struct SimulationResult {
  std::vector<EventRecord> events;
  std::vector<AgentState> agents;
  std::vector<AgentLifeStats> life_stats;
  bool truncated = false;
};

// Tick semantics: initial agents are born at tick 0. On every tick
// t = 0..horizon one self-generation draw happens first, then every live
// agent born before t takes one energy step in ascending id order. An agent
// created during tick t (either way) makes its first step at t + 1, so a
// lifetime equals the number of steps taken. Death is reported on the tick
// of the exhausting step.
SimulationResult run_simulation(const SimulationConfig& config);

struct ReplicationOptions {
  /// Worker threads; the pooled output does not depend on this.
  unsigned threads = 1;
  /// Keep per-run event logs (they dominate memory for large sweeps).
  bool keep_events = false;
};

struct RunEvents {
  std::uint64_t seed = 0;
  std::vector<EventRecord> events;
};

struct ReplicationResult {
  std::vector<AgentLifeStats> life_stats;
  std::vector<RunEvents> events;
  std::uint64_t truncated_runs = 0;
};

/// Runs seeds seed .. seed + n_runs - 1 and concatenates their statistics in
/// seed order.
ReplicationResult replicate(const SimulationConfig& config, std::uint64_t n_runs,
                            const ReplicationOptions& options = {});

std::map<ResourceId, std::uint64_t> repost_counts_by_link(const std::vector<AgentLifeStats>& stats);

enum class LifeField { lifetime, total_likes, total_reposts };

/// Values of one series for distribution fitting: censored agents and zero
/// values are dropped.
std::vector<double> fit_series(const std::vector<AgentLifeStats>& stats, LifeField field,
                               bool include_censored = false);

}  // namespace netmon
