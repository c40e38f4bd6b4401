#include "deepstage/campaign.hpp"

#include <algorithm>

#include "deepstage/util.hpp"

namespace deepstage {

void ActionEffectModel::validate() const {
  for (int a = 0; a < kNumActions; ++a) {
    for (int k = 0; k < kNumStages; ++k) {
      const double e = effectiveness[a][k];
      if (e < 0.0 || e > 1.0)
        fail("effect model: E[", a, "][", k, "]=", e, " outside [0,1]");
      if (is_monitoring(a) && e != 0.0)
        fail("effect model: monitoring action a", a, " must have E=0");
    }
    if (fidelity_boost[a] < 0.0 || fidelity_boost[a] > 1.0)
      fail("effect model: fidelity boost of a", a, " outside [0,1]");
  }
  if (evict_prob < 0.0 || evict_prob > 1.0)
    fail("effect model: evict_prob outside [0,1]");
}

bool family_effective_at_stage(ActionFamily f, int stage) {
  switch (stage) {
    case 1: return f == ActionFamily::monitoring;
    case 2: return f == ActionFamily::access_control;
    case 3:
      return f == ActionFamily::access_control || f == ActionFamily::containment;
    case 4: return f == ActionFamily::containment;
    case 5: return f == ActionFamily::containment;
    case 6:
      return f == ActionFamily::containment || f == ActionFamily::remediation;
    default: return false;
  }
}

ActionEffectModel default_effects(const EffectConfig& cfg) {
  // Fixed internal seed keeps the default matrix a constant of the build.
  Rng rng(derive_seed(0x9d5f0e5u, "default_effects"));
  ActionEffectModel model;
  model.evict_prob = cfg.evict_prob;
  for (int a = 0; a < kNumActions; ++a) {
    for (int k = 1; k < kNumStages; ++k) {
      if (is_monitoring(a)) {
        model.effectiveness[a][k] = 0.0;
      } else if (family_effective_at_stage(family_of(a), k)) {
        model.effectiveness[a][k] = rng.uniform(cfg.in_family_lo, cfg.in_family_hi);
      } else {
        model.effectiveness[a][k] = rng.uniform(cfg.off_family_lo, cfg.off_family_hi);
      }
    }
  }
  // Situational-awareness boosts for the monitoring family (a0 is baseline).
  const std::array<double, 8> boosts = {0.0,  0.20, 0.30, 0.15,
                                        0.10, 0.15, 0.20, 0.25};
  for (int a = 0; a < 8; ++a) model.fidelity_boost[a] = boosts[static_cast<std::size_t>(a)];
  model.validate();
  return model;
}

CampaignState CampaignState::make(Playbook pb) {
  CampaignState s;
  s.playbook = std::move(pb);
  return s;
}

void CampaignState::begin() {
  if (playbook.steps.empty()) fail("campaign: cannot begin an empty playbook");
  begun = true;
  cursor = 0;
  elapsed = 0;
  k_true = playbook.steps.front().stage;
  compromised = {playbook.steps.front().host};
}

int CampaignState::current_host() const {
  return playbook.steps[static_cast<std::size_t>(cursor)].host;
}

const std::string& CampaignState::current_technique() const {
  return playbook.steps[static_cast<std::size_t>(cursor)].technique;
}

namespace {

void recompute_compromised(CampaignState& s) {
  s.compromised.clear();
  for (int i = 0; i <= s.cursor; ++i)
    s.compromised.insert(s.playbook.steps[static_cast<std::size_t>(i)].host);
}

int last_step_of_stage(const Playbook& pb, int stage) {
  int idx = -1;
  for (std::size_t i = 0; i < pb.steps.size(); ++i)
    if (pb.steps[i].stage == stage) idx = static_cast<int>(i);
  return idx;
}

int first_step_of_stage(const Playbook& pb, int stage) {
  for (std::size_t i = 0; i < pb.steps.size(); ++i)
    if (pb.steps[i].stage == stage) return static_cast<int>(i);
  return -1;
}

}  // namespace

void advance(CampaignState& state, int action_id,
             const ActionEffectModel& effects, Rng& rng) {
  if (!state.begun || state.k_true == 0) return;

  const double e =
      effects.effectiveness[static_cast<std::size_t>(action_id)]
                           [static_cast<std::size_t>(state.k_true)];
  if (rng.uniform() < e) {
    // Successful mitigation: push the attacker back.
    if (state.k_true <= 2 && rng.uniform() < effects.evict_prob) {
      state.k_true = 0;  // full eviction, campaign over
      state.compromised.clear();
      return;
    }
    if (state.k_true == 1) {
      // Nowhere lower to go: restart the reconnaissance stage.
      state.cursor = first_step_of_stage(state.playbook, 1);
      state.elapsed = 0;
      recompute_compromised(state);
      return;
    }
    state.k_true -= 1;
    state.cursor = last_step_of_stage(state.playbook, state.k_true);
    state.elapsed = 0;
    recompute_compromised(state);
    return;
  }

  // No regression: dwell elapses, cursor walks the script.
  const auto& steps = state.playbook.steps;
  state.elapsed += 1;
  if (state.cursor + 1 < static_cast<int>(steps.size()) &&
      state.elapsed >= steps[static_cast<std::size_t>(state.cursor)].dwell) {
    state.cursor += 1;
    state.elapsed = 0;
    state.k_true = steps[static_cast<std::size_t>(state.cursor)].stage;
    state.compromised.insert(steps[static_cast<std::size_t>(state.cursor)].host);
  }
}

}  // namespace deepstage
