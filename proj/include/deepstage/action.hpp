#ifndef DEEPSTAGE_ACTION_HPP_
#define DEEPSTAGE_ACTION_HPP_

#include <array>
#include <string>

namespace deepstage {

inline constexpr int kNumActions = 29;
inline constexpr int kNumFamilies = 4;
inline constexpr int kNumStages = 7;  // 0 = Normal ... 6 = Exfiltration

enum class ActionFamily { monitoring = 0, access_control = 1, containment = 2, remediation = 3 };

// One defense action from the fixed 29-entry catalog. Costs are the
// normalized operational impact of executing the action.
struct DefenseAction {
  int id;
  ActionFamily family;
  double cost;
  const char* label;
};

const std::array<DefenseAction, kNumActions>& action_catalog();
const DefenseAction& action(int id);

// Family index ranges inside the catalog: monitoring a0..a7, access control
// a8..a14, containment a15..a21, remediation a22..a28.
int family_size(ActionFamily f);
int family_offset(ActionFamily f);
ActionFamily family_of(int action_id);
const char* family_name(ActionFamily f);

inline bool is_monitoring(int action_id) {
  return family_of(action_id) == ActionFamily::monitoring;
}

double max_action_cost();

// Machine-readable catalog dump (JSON lines: id, family, cost, label).
std::string action_catalog_jsonl();

const char* stage_name(int stage);

}  // namespace deepstage

#endif  // DEEPSTAGE_ACTION_HPP_
