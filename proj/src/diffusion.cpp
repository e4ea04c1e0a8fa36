#include "netmon/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "netmon/errors.hpp"

namespace netmon {

std::string ResourceId::str() const {
  return std::to_string(run_seed) + ":" + std::to_string(serial);
}

StepFunction StepFunction::constant(double value) { return StepFunction({{1, value}}); }

StepFunction::StepFunction(std::vector<std::pair<Energy, double>> steps) : steps_(std::move(steps)) {
  if (steps_.empty()) throw std::invalid_argument("step function needs at least one step");
  for (std::size_t i = 0; i < steps_.size(); ++i) {
    const double v = steps_[i].second;
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("step value outside [0, 1]");
    if (i > 0 && steps_[i].first <= steps_[i - 1].first)
      throw std::invalid_argument("step breakpoints must be strictly increasing");
  }
}

double StepFunction::operator()(Energy e) const {
  auto it = std::upper_bound(steps_.begin(), steps_.end(), e,
                             [](Energy lhs, const auto& step) { return lhs < step.first; });
  if (it == steps_.begin()) return steps_.front().second;
  return std::prev(it)->second;
}

namespace {

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

}  // namespace

void BehaviorParams::validate() const {
  if (!is_probability(p_s)) throw ConfigError("p_s", "must lie in [0, 1]");
  if (e0 < 1) throw ConfigError("e0", "must be a positive integer");
  if (!is_probability(link_carrier_fraction))
    throw ConfigError("link_carrier_fraction", "must lie in [0, 1]");
  if (!(link_boost >= 1.0) || !std::isfinite(link_boost)) throw ConfigError("link_boost", "must be >= 1");
  if (!(rich_get_richer_gamma >= 0.0) || !std::isfinite(rich_get_richer_gamma))
    throw ConfigError("rich_get_richer_gamma", "must be >= 0");
  for (const auto& [from, p] : like_prob.steps())
    if (!is_probability(p)) throw ConfigError("like_prob", "values must lie in [0, 1]");
  for (const auto& [from, p] : repost_prob.steps())
    if (!is_probability(p)) throw ConfigError("repost_prob", "values must lie in [0, 1]");
}

double DeltaDistribution::probability(int delta) const {
  switch (delta) {
    case 2: return p_plus2;
    case 1: return p_plus1;
    case 0: return p_zero;
    case -1: return p_minus1;
    default: return 0.0;
  }
}

double effective_repost_probability(Energy e, const BehaviorParams& params,
                                    const std::optional<AgentContext>& context) {
  double p = params.repost_prob(e);
  if (context && context->has_link) {
    p *= params.link_boost *
         (1.0 + params.rich_get_richer_gamma * static_cast<double>(context->reposts_spawned));
  }
  return std::min(1.0, p);
}

DeltaDistribution delta_distribution(Energy e, const BehaviorParams& params,
                                     const std::optional<AgentContext>& context) {
  if (e <= 0) throw std::invalid_argument("delta_distribution: energy must be positive");
  const double like = params.like_prob(e);
  const double repost = effective_repost_probability(e, params, context);
  return {like * repost, (1.0 - like) * repost, like * (1.0 - repost), (1.0 - like) * (1.0 - repost)};
}

double transition_probability(Energy i, Energy j, const BehaviorParams& params) {
  if (i == 0) return j == 0 ? 1.0 : 0.0;
  if (i < 0) return 0.0;
  const Energy step = j - i;
  if (step < -1 || step > 2) return 0.0;
  return delta_distribution(i, params).probability(static_cast<int>(step));
}

int sample_delta(const DeltaDistribution& dist, RandomStream& rng) {
  const double u = rng.uniform();
  double acc = dist.p_plus2;
  if (u < acc) return 2;
  acc += dist.p_plus1;
  if (u < acc) return 1;
  acc += dist.p_zero;
  if (u < acc) return 0;
  return -1;
}

double potential(const AgentState& agent, Tick now, const PotentialWeights& weights) {
  const double age = static_cast<double>(std::max<Tick>(0, now - agent.birth_tick));
  return weights.age * age + weights.authority * static_cast<double>(agent.authority) +
         weights.fruitfulness * static_cast<double>(agent.reposts_spawned);
}

}  // namespace netmon
