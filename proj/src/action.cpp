#include "deepstage/action.hpp"

#include <sstream>

#include "deepstage/util.hpp"

namespace deepstage {

namespace {

using F = ActionFamily;

constexpr std::array<DefenseAction, kNumActions> kCatalog = {{
    {0, F::monitoring, 0.01, "Maintain baseline monitoring"},
    {1, F::monitoring, 0.05, "Increase host logging level"},
    {2, F::monitoring, 0.10, "Activate deep packet inspection"},
    {3, F::monitoring, 0.20, "Memory/process snapshot"},
    {4, F::monitoring, 0.25, "Deploy honeypot redirect"},
    {5, F::monitoring, 0.10, "Log enrichment with threat intel"},
    {6, F::monitoring, 0.15, "Trigger system audit scan"},
    {7, F::monitoring, 0.20, "Cross-host correlation scan"},
    {8, F::access_control, 0.20, "Disable risky services"},
    {9, F::access_control, 0.30, "Rotate user credentials"},
    {10, F::access_control, 0.40, "Enforce MFA on privileged accounts"},
    {11, F::access_control, 0.25, "Revoke active sessions"},
    {12, F::access_control, 0.20, "Privilege escalation blocklist"},
    {13, F::access_control, 0.15, "Enable strict sudo logging"},
    {14, F::access_control, 0.30, "Lock compromised accounts"},
    {15, F::containment, 0.20, "Block malicious IP or domain"},
    {16, F::containment, 0.25, "Throttle suspicious network flows"},
    {17, F::containment, 0.35, "Micro-segmentation"},
    {18, F::containment, 0.20, "Kill malicious process"},
    {19, F::containment, 0.80, "Network interface isolation"},
    {20, F::containment, 0.40, "Contain file I/O access"},
    {21, F::containment, 0.50, "Block USB/external device usage"},
    {22, F::remediation, 0.40, "Emergency patching"},
    {23, F::remediation, 0.30, "Remove persistence artifacts"},
    {24, F::remediation, 0.90, "Rollback system to snapshot"},
    {25, F::remediation, 0.15, "Clean DNS and FW rules"},
    {26, F::remediation, 0.80, "Restore from backup"},
    {27, F::remediation, 0.20, "Permanent hardening of policies"},
    {28, F::remediation, 0.20, "Re-enable normal operation"},
}};

constexpr std::array<int, kNumFamilies> kFamilySize = {8, 7, 7, 7};
constexpr std::array<int, kNumFamilies> kFamilyOffset = {0, 8, 15, 22};
constexpr std::array<const char*, kNumFamilies> kFamilyName = {
    "monitoring", "access_control", "containment", "remediation"};

constexpr std::array<const char*, kNumStages> kStageName = {
    "Normal",           "Reconnaissance", "InitialCompromise",
    "PrivilegeEscalation", "LateralMovement", "CommandAndControl",
    "Exfiltration"};

}  // namespace

const std::array<DefenseAction, kNumActions>& action_catalog() {
  return kCatalog;
}

const DefenseAction& action(int id) {
  if (id < 0 || id >= kNumActions)
    fail("action id out of range: ", id, " (catalog has ", kNumActions, ")");
  return kCatalog[static_cast<std::size_t>(id)];
}

int family_size(ActionFamily f) { return kFamilySize[static_cast<int>(f)]; }
int family_offset(ActionFamily f) { return kFamilyOffset[static_cast<int>(f)]; }

ActionFamily family_of(int action_id) {
  return action(action_id).family;
}

const char* family_name(ActionFamily f) {
  return kFamilyName[static_cast<int>(f)];
}

double max_action_cost() {
  double m = 0;
  for (const auto& a : kCatalog) m = m > a.cost ? m : a.cost;
  return m;
}

std::string action_catalog_jsonl() {
  std::ostringstream os;
  for (const auto& a : kCatalog) {
    os << "{\"id\":" << a.id << ",\"family\":\"" << family_name(a.family)
       << "\",\"cost\":" << a.cost << ",\"label\":\"" << a.label << "\"}\n";
  }
  return os.str();
}

const char* stage_name(int stage) {
  if (stage < 0 || stage >= kNumStages) fail("stage out of range: ", stage);
  return kStageName[static_cast<std::size_t>(stage)];
}

}  // namespace deepstage
