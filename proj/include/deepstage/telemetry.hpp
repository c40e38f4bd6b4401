#ifndef DEEPSTAGE_TELEMETRY_HPP_
#define DEEPSTAGE_TELEMETRY_HPP_

#include <array>
#include <map>
#include <string>
#include <vector>

#include "deepstage/campaign.hpp"
#include "deepstage/rng.hpp"

namespace deepstage {

inline constexpr double kWindowSeconds = 300.0;

enum class EventKind {
  process_create,
  file_access,
  socket_connect,
  user_login,
  registry_write,
  alert
};

const char* event_kind_name(EventKind k);

// One host or network telemetry record. Entity references are typed strings
// ("proc:h0:sshd", "file:h1:/etc/passwd", "sock:...", "user:...", "host:h2",
// "alert:...").
struct Event {
  double timestamp = 0;
  int host = 0;
  EventKind kind = EventKind::process_create;
  std::string subject;
  std::string object;
  std::map<std::string, std::string> attrs;
};

struct NoiseProfile {
  double benign_rate = 20.0;  // benign events per host per window
  // Mean attack events per window at each stage (index 0 unused).
  std::array<double, kNumStages> attack_rate = {0, 8, 8, 8, 8, 6, 10};
  double alert_fp_rate = 1.0;  // Poisson mean of false alerts per window
  double alert_tp_rate = 0.6;  // per attack event, scaled by fidelity

  void validate() const;
};

// Emits one Delta-t window of telemetry: Poisson benign activity on every
// host, stage-templated attack events on compromised hosts, true alerts with
// probability tp_rate * (0.5 + 0.5 * fidelity) and false alerts at fp_rate.
std::vector<Event> emit_window(const CampaignState& campaign,
                               const NoiseProfile& profile, double fidelity,
                               int window_index, Rng& rng);

// Line-delimited export, fields in documented order:
// ts, host, kind, subject, object, attrs.
std::string events_to_jsonl(const std::vector<Event>& events);

}  // namespace deepstage

#endif  // DEEPSTAGE_TELEMETRY_HPP_
