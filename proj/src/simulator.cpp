#include "netmon/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <stdexcept>
#include <thread>

#include "netmon/errors.hpp"

namespace netmon {

void SimulationConfig::validate() const {
  params.validate();
  if (horizon < 1) throw ConfigError("horizon", "must be >= 1");
  if (initial_agents < 1) throw ConfigError("initial_agents", "must be >= 1");
  if (max_agents && *max_agents < 1) throw ConfigError("max_agents", "must be >= 1 when set");
}

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::self_generate: return "self_generate";
    case EventKind::repost: return "repost";
    case EventKind::like: return "like";
    case EventKind::death: return "death";
    case EventKind::truncated: return "truncated";
  }
  return "unknown";
}

EventKind event_kind_from_string(std::string_view name) {
  for (auto kind : {EventKind::self_generate, EventKind::repost, EventKind::like, EventKind::death,
                    EventKind::truncated}) {
    if (to_string(kind) == name) return kind;
  }
  throw InputError("unknown event kind '" + std::string(name) + "'");
}

namespace {

class Run {
 public:
  Run(const SimulationConfig& config, bool record_events)
      : config_(config), params_(config.params), rng_(config.seed), record_(record_events) {}

  SimulationResult execute() {
    const Tick horizon = config_.horizon;
    for (std::uint64_t i = 0; i < config_.initial_agents; ++i) {
      if (!spawn(0, std::nullopt, std::nullopt, true)) return finish(0);
    }

    std::vector<std::size_t> stepping;
    for (Tick t = 0; t <= horizon; ++t) {
      if (live_ == 0 && params_.p_s == 0.0) return finish(horizon);

      if (rng_.bernoulli(params_.p_s)) {
        if (!spawn(t, std::nullopt, std::nullopt, true)) return finish(t);
      }

      stepping.clear();
      for (std::size_t idx : live_index_) {
        if (agents_[idx].birth_tick < t) stepping.push_back(idx);
      }
      for (std::size_t idx : stepping) {
        if (!step(idx, t)) return finish(t);
      }
      compact_live_index();
    }
    return finish(horizon);
  }

 private:
  void emit(Tick t, EventKind kind, AgentId agent, std::optional<AgentId> related = std::nullopt) {
    if (record_) events_.push_back({t, kind, agent, related});
  }

  bool at_capacity() const {
    return config_.max_agents && agents_.size() >= *config_.max_agents;
  }

  // Returns false when the population cap stops the run.
  bool spawn(Tick t, std::optional<AgentId> parent, std::optional<ResourceId> inherited_link,
             bool self_generated) {
    if (at_capacity()) {
      truncated_ = true;
      emit(t, EventKind::truncated, parent.value_or(agents_.size()));
      return false;
    }
    AgentState agent;
    agent.id = agents_.size();
    agent.birth_tick = t;
    agent.energy = params_.e0;
    agent.parent_id = parent;
    agent.alive = true;
    if (self_generated) {
      if (rng_.bernoulli(params_.link_carrier_fraction)) {
        agent.link_ref = ResourceId{config_.seed, next_link_serial_++};
      }
      emit(t, EventKind::self_generate, agent.id);
    } else {
      agent.link_ref = inherited_link;
    }
    agents_.push_back(agent);
    death_tick_.push_back(-1);
    live_index_.push_back(agent.id);
    ++live_;
    return true;
  }

  bool step(std::size_t idx, Tick t) {
    const AgentState& current = agents_[idx];
    const DeltaDistribution dist = delta_distribution(current.energy, params_, context_of(current));
    const int delta = sample_delta(dist, rng_);
    const bool liked = delta == 2 || delta == 0;
    const bool reposted = delta == 2 || delta == 1;

    if (reposted && at_capacity()) {
      truncated_ = true;
      emit(t, EventKind::truncated, agents_[idx].id);
      return false;
    }
    if (liked) {
      ++agents_[idx].likes_received;
      emit(t, EventKind::like, agents_[idx].id);
    }
    if (reposted) {
      const AgentId parent = agents_[idx].id;
      const AgentId child = agents_.size();
      ++agents_[idx].reposts_spawned;
      ++agents_[idx].authority;
      emit(t, EventKind::repost, parent, child);
      // Invalidates references into agents_.
      spawn(t, parent, agents_[idx].link_ref, false);
    }
    AgentState& agent = agents_[idx];
    agent.energy += delta;
    if (agent.energy <= 0) {
      agent.energy = 0;
      agent.alive = false;
      death_tick_[idx] = t;
      --live_;
      emit(t, EventKind::death, agent.id);
    }
    return true;
  }

  void compact_live_index() {
    std::erase_if(live_index_, [&](std::size_t idx) { return !agents_[idx].alive; });
  }

  SimulationResult finish(Tick end_tick) {
    SimulationResult result;
    result.truncated = truncated_;
    result.life_stats.reserve(agents_.size());
    for (std::size_t i = 0; i < agents_.size(); ++i) {
      const AgentState& agent = agents_[i];
      AgentLifeStats stats;
      stats.run_seed = config_.seed;
      stats.agent_id = agent.id;
      stats.birth_tick = agent.birth_tick;
      stats.censored = agent.alive;
      stats.lifetime = agent.alive ? end_tick - agent.birth_tick : death_tick_[i] - agent.birth_tick;
      stats.total_likes = agent.likes_received;
      stats.total_reposts = agent.reposts_spawned;
      stats.carried_link = agent.link_ref;
      result.life_stats.push_back(stats);
    }
    result.events = std::move(events_);
    result.agents = std::move(agents_);
    return result;
  }

  const SimulationConfig& config_;
  const BehaviorParams& params_;
  RandomStream rng_;
  bool record_;
  bool truncated_ = false;
  std::uint64_t next_link_serial_ = 0;
  std::uint64_t live_ = 0;
  std::vector<AgentState> agents_;
  std::vector<Tick> death_tick_;
  std::vector<std::size_t> live_index_;
  std::vector<EventRecord> events_;
};

}  // namespace

SimulationResult run_simulation(const SimulationConfig& config) {
  config.validate();
  return Run(config, true).execute();
}

ReplicationResult replicate(const SimulationConfig& config, std::uint64_t n_runs,
                            const ReplicationOptions& options) {
  config.validate();
  if (n_runs < 1) throw ConfigError("runs", "must be >= 1");

  std::vector<SimulationResult> runs(n_runs);
  auto run_one = [&](std::uint64_t i) {
    SimulationConfig cfg = config;
    cfg.seed = config.seed + i;
    runs[i] = Run(cfg, options.keep_events).execute();
    runs[i].agents.clear();
    runs[i].agents.shrink_to_fit();
  };

  const unsigned threads = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(n_runs)));
  if (threads == 1) {
    for (std::uint64_t i = 0; i < n_runs; ++i) run_one(i);
  } else {
    std::atomic<std::uint64_t> next{0};
    std::vector<std::jthread> workers;
    for (unsigned w = 0; w < threads; ++w) {
      workers.emplace_back([&] {
        for (std::uint64_t i = next++; i < n_runs; i = next++) run_one(i);
      });
    }
  }

  ReplicationResult pooled;
  std::size_t total = 0;
  for (const auto& run : runs) total += run.life_stats.size();
  pooled.life_stats.reserve(total);
  for (std::uint64_t i = 0; i < n_runs; ++i) {
    auto& run = runs[i];
    pooled.life_stats.insert(pooled.life_stats.end(), run.life_stats.begin(), run.life_stats.end());
    if (run.truncated) ++pooled.truncated_runs;
    if (options.keep_events) pooled.events.push_back({config.seed + i, std::move(run.events)});
  }
  return pooled;
}

std::map<ResourceId, std::uint64_t> repost_counts_by_link(const std::vector<AgentLifeStats>& stats) {
  std::map<ResourceId, std::uint64_t> counts;
  for (const auto& s : stats) {
    if (s.carried_link) counts[*s.carried_link] += s.total_reposts;
  }
  return counts;
}

std::vector<double> fit_series(const std::vector<AgentLifeStats>& stats, LifeField field,
                               bool include_censored) {
  std::vector<double> out;
  out.reserve(stats.size());
  for (const auto& s : stats) {
    if (s.censored && !include_censored) continue;
    double v = 0.0;
    switch (field) {
      case LifeField::lifetime: v = static_cast<double>(s.lifetime); break;
      case LifeField::total_likes: v = static_cast<double>(s.total_likes); break;
      case LifeField::total_reposts: v = static_cast<double>(s.total_reposts); break;
    }
    if (v > 0.0) out.push_back(v);
  }
  return out;
}

}  // namespace netmon
