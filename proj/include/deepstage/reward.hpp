#ifndef DEEPSTAGE_REWARD_HPP_
#define DEEPSTAGE_REWARD_HPP_

#include <array>

#include "deepstage/action.hpp"

namespace deepstage {

// Stage-conditioned reward coefficients. The stage-aware defaults emphasize
// late-stage mitigation; the stage-unaware variant neutralizes them.
struct RewardWeights {
  std::array<double, kNumStages> alpha;
  std::array<double, kNumStages> beta;
  double lambda = 0.1;
  // Analytic bound of |step_reward| over all stages and catalog actions.
  double normalizer = 2.0;

  static RewardWeights stage_aware();
  static RewardWeights stage_unaware();
};

// Piecewise security improvement between consecutive ground-truth stages:
// 1 when the attacker regressed, 0.5 when held, 0 when it escalated.
double security_reward(int stage_now, int stage_next);

// alpha[k_t] * security - beta[k_t] * lambda * C(a); the weighting stage is
// the stage at decision time.
double step_reward(int stage_now, int stage_next, const DefenseAction& act,
                   const RewardWeights& w);

// Scales into [-1, 1].
double normalize_reward(double r, const RewardWeights& w);

}  // namespace deepstage

#endif  // DEEPSTAGE_REWARD_HPP_
