#include "deepstage/reward.hpp"

#include "deepstage/util.hpp"

namespace deepstage {

RewardWeights RewardWeights::stage_aware() {
  RewardWeights w;
  w.alpha = {0.3, 0.5, 0.8, 1.0, 1.3, 1.5, 2.0};
  w.beta = {0.0, 0.5, 0.7, 1.0, 1.3, 1.6, 2.0};
  return w;
}

RewardWeights RewardWeights::stage_unaware() {
  RewardWeights w;
  w.alpha.fill(1.0);
  w.beta.fill(1.0);
  return w;
}

double security_reward(int stage_now, int stage_next) {
  if (stage_now < 0 || stage_now >= kNumStages || stage_next < 0 ||
      stage_next >= kNumStages)
    fail("security_reward: stage out of range (", stage_now, ", ", stage_next,
         ")");
  if (stage_next < stage_now) return 1.0;
  if (stage_next == stage_now) return 0.5;
  return 0.0;
}

double step_reward(int stage_now, int stage_next, const DefenseAction& act,
                   const RewardWeights& w) {
  const double security = security_reward(stage_now, stage_next);
  return w.alpha[static_cast<std::size_t>(stage_now)] * security -
         w.beta[static_cast<std::size_t>(stage_now)] * w.lambda * act.cost;
}

double normalize_reward(double r, const RewardWeights& w) {
  return r / w.normalizer;
}

}  // namespace deepstage
