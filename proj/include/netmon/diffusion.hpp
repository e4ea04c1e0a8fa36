#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "netmon/random.hpp"

namespace netmon {

using Energy = std::int64_t;
using Tick = std::int64_t;
using AgentId = std::uint64_t;

/// Identifies the external resource a message links to. Serials are unique
/// within one run; the run seed keeps them distinct once runs are pooled.
struct ResourceId {
  std::uint64_t run_seed = 0;
  std::uint64_t serial = 0;

  auto operator<=>(const ResourceId&) const = default;
  std::string str() const;
};

/// Piecewise-constant probability over energy. Step i applies to energies in
/// [steps[i].first, steps[i+1].first); energies below the first breakpoint
/// use the first value.
class StepFunction {
 public:
  StepFunction() = default;
  static StepFunction constant(double value);
  /// Breakpoints must be strictly increasing; values must lie in [0, 1].
  explicit StepFunction(std::vector<std::pair<Energy, double>> steps);

  double operator()(Energy e) const;

  const std::vector<std::pair<Energy, double>>& steps() const { return steps_; }
  bool is_constant() const { return steps_.size() == 1; }

  bool operator==(const StepFunction&) const = default;

 private:
  std::vector<std::pair<Energy, double>> steps_{{1, 0.0}};
};

struct BehaviorParams {
  double p_s = 0.0;
  Energy e0 = 1;
  StepFunction like_prob = StepFunction::constant(0.0);
  StepFunction repost_prob = StepFunction::constant(0.0);
  double link_carrier_fraction = 0.0;
  double link_boost = 1.0;
  double rich_get_richer_gamma = 0.0;

  /// Throws ConfigError naming the first invalid field.
  void validate() const;

  bool operator==(const BehaviorParams&) const = default;
};

struct AgentState {
  AgentId id = 0;
  Tick birth_tick = 0;
  Energy energy = 0;
  std::optional<AgentId> parent_id;
  std::uint64_t likes_received = 0;
  std::uint64_t reposts_spawned = 0;
  std::uint64_t authority = 0;
  std::optional<ResourceId> link_ref;
  bool alive = false;
};

/// The static part of an agent that the kernel may depend on.
struct AgentContext {
  bool has_link = false;
  std::uint64_t reposts_spawned = 0;
};

inline AgentContext context_of(const AgentState& agent) {
  return {agent.link_ref.has_value(), agent.reposts_spawned};
}

/// P(delta = d | energy = E) for d in {2, 1, 0, -1}.
struct DeltaDistribution {
  double p_plus2 = 0.0;
  double p_plus1 = 0.0;
  double p_zero = 0.0;
  double p_minus1 = 0.0;

  /// Probability of the given step; 0 outside {-1, 0, 1, 2}.
  double probability(int delta) const;
  double sum() const { return p_plus2 + p_plus1 + p_zero + p_minus1; }
};

/// Repost probability after the link boost and the preferential term,
/// clamped to 1.
double effective_repost_probability(Energy e, const BehaviorParams& params,
                                    const std::optional<AgentContext>& context = std::nullopt);

/// Conditional step distribution of a live agent. Throws std::invalid_argument
/// for e <= 0: a dead agent has no step distribution.
DeltaDistribution delta_distribution(Energy e, const BehaviorParams& params,
                                     const std::optional<AgentContext>& context = std::nullopt);

/// p_ij of the energy chain for an agent without a link. State 0 absorbs.
double transition_probability(Energy i, Energy j, const BehaviorParams& params);

/// Inverse-CDF draw in the order 2, 1, 0, -1. Consumes exactly one uniform.
int sample_delta(const DeltaDistribution& dist, RandomStream& rng);

/// Reporting-only score; never feeds back into the dynamics.
struct PotentialWeights {
  double age = 1.0;
  double authority = 1.0;
  double fruitfulness = 1.0;
};

double potential(const AgentState& agent, Tick now, const PotentialWeights& weights = {});

}  // namespace netmon
