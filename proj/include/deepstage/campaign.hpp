#ifndef DEEPSTAGE_CAMPAIGN_HPP_
#define DEEPSTAGE_CAMPAIGN_HPP_

#include <array>
#include <set>

#include "deepstage/action.hpp"
#include "deepstage/playbook.hpp"
#include "deepstage/rng.hpp"

namespace deepstage {

// Calibration constants for the synthetic attacker response; the acceptance
// suite pins behavioural targets rather than these numbers.
struct EffectConfig {
  double in_family_lo = 0.6;
  double in_family_hi = 0.9;
  double off_family_lo = 0.0;
  double off_family_hi = 0.2;
  double evict_prob = 0.1;  // full eviction chance when regressing from k<=2
};

// Per-action, per-stage probability that executing the action pushes the
// attacker back one stage, plus the situational-awareness boost monitoring
// actions grant. Monitoring never regresses the attacker.
struct ActionEffectModel {
  // effectiveness[action][stage], stages 0..6 (column 0 unused, kept zero).
  std::array<std::array<double, kNumStages>, kNumActions> effectiveness{};
  std::array<double, kNumActions> fidelity_boost{};
  double evict_prob = 0.1;

  void validate() const;
};

// Deterministic default model: stage-appropriate families draw from the
// in-family range, everything else from the off-family range, monitoring 0.
ActionEffectModel default_effects(const EffectConfig& cfg = EffectConfig());

// Which families are effective at each attack stage.
bool family_effective_at_stage(ActionFamily f, int stage);

// Hidden attacker ground truth. A value type: episodes copy freely.
struct CampaignState {
  Playbook playbook;
  int cursor = 0;        // current step index
  int k_true = 0;        // 0 = Normal ... 6 = Exfiltration
  int elapsed = 0;       // windows spent in the current step
  bool begun = false;
  std::set<int> compromised;  // hosts touched by steps up to the cursor

  static CampaignState make(Playbook pb);

  // Activates the playbook: the first attack window runs at stage 1.
  void begin();
  bool evicted() const { return begun && k_true == 0; }
  int current_host() const;
  const std::string& current_technique() const;
};

// One control-loop tick. With probability effectiveness[action][k] the
// attacker regresses one stage (rewinding the cursor to that stage's last
// step); regressions from stage 1 or 2 fully evict with evict_prob, and the
// stage-1 fallback restarts that stage instead of leaving the 1..6 range.
// Otherwise dwell elapses and the cursor walks the playbook.
void advance(CampaignState& state, int action_id,
             const ActionEffectModel& effects, Rng& rng);

}  // namespace deepstage

#endif  // DEEPSTAGE_CAMPAIGN_HPP_
