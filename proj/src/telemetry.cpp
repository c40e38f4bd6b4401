#include "deepstage/telemetry.hpp"

#include <algorithm>

#include "deepstage/util.hpp"
#include "json.hpp"

namespace deepstage {

const char* event_kind_name(EventKind k) {
  switch (k) {
    case EventKind::process_create: return "process_create";
    case EventKind::file_access: return "file_access";
    case EventKind::socket_connect: return "socket_connect";
    case EventKind::user_login: return "user_login";
    case EventKind::registry_write: return "registry_write";
    case EventKind::alert: return "alert";
  }
  return "?";
}

void NoiseProfile::validate() const {
  if (benign_rate < 0) fail("noise profile: benign_rate < 0");
  for (double r : attack_rate)
    if (r < 0) fail("noise profile: attack_rate < 0");
  if (alert_fp_rate < 0) fail("noise profile: alert_fp_rate < 0");
  if (alert_tp_rate < 0 || alert_tp_rate > 1)
    fail("noise profile: alert_tp_rate outside [0,1]");
}

namespace {

const std::array<const char*, 8> kBenignProcs = {
    "systemd", "sshd", "cron", "bash", "nginx", "postgres", "backupd", "python3"};
const std::array<const char*, 6> kBenignFiles = {
    "/var/log/syslog", "/etc/hosts",      "/home/docs/report.txt",
    "/tmp/cache.dat",  "/opt/app/config", "/var/lib/db/table"};
const std::array<const char*, 4> kBenignUsers = {"alice", "bob", "svc_backup",
                                                 "deploy"};
const std::array<const char*, 4> kBenignPorts = {"443", "22", "5432", "80"};

std::string proc_ref(int host, const std::string& name) {
  return cat("proc:h", host, ":", name);
}
std::string file_ref(int host, const std::string& path) {
  return cat("file:h", host, ":", path);
}
std::string sock_ref(int host, const std::string& ep) {
  return cat("sock:h", host, ":", ep);
}
std::string user_ref(int host, const std::string& name) {
  return cat("user:h", host, ":", name);
}
std::string host_ref(int host) { return cat("host:h", host); }

Event benign_event(int host, double ts, Rng& rng) {
  Event e;
  e.timestamp = ts;
  e.host = host;
  const double u = rng.uniform();
  const auto pick = [&rng](const auto& pool) {
    return pool[rng.uniform_int(pool.size())];
  };
  if (u < 0.30) {
    e.kind = EventKind::process_create;
    const auto* parent = pick(kBenignProcs);
    const auto* child = pick(kBenignProcs);
    e.subject = proc_ref(host, parent);
    e.object = proc_ref(host, cat(child, "+", rng.uniform_int(4)));
  } else if (u < 0.65) {
    e.kind = EventKind::file_access;
    e.subject = proc_ref(host, pick(kBenignProcs));
    e.object = file_ref(host, pick(kBenignFiles));
    e.attrs["mode"] = rng.uniform() < 0.5 ? "read" : "write";
  } else if (u < 0.85) {
    e.kind = EventKind::socket_connect;
    e.subject = proc_ref(host, pick(kBenignProcs));
    e.object = sock_ref(host, cat("10.0.0.", 1 + rng.uniform_int(6), ":",
                                  pick(kBenignPorts)));
  } else if (u < 0.95) {
    e.kind = EventKind::user_login;
    e.subject = user_ref(host, pick(kBenignUsers));
    e.object = host_ref(host);
  } else {
    e.kind = EventKind::registry_write;
    e.subject = proc_ref(host, pick(kBenignProcs));
    e.object = file_ref(host, cat("registry/service", rng.uniform_int(5)));
  }
  return e;
}

// Stage-specific attack templates. Every attack event carries the technique
// tag of the playbook step that produced it.
Event attack_event(int stage, int host, const std::string& technique,
                   double ts, Rng& rng) {
  Event e;
  e.timestamp = ts;
  e.host = host;
  e.attrs["technique"] = technique;
  switch (stage) {
    case 1:  // Reconnaissance: socket fan-out across ports
      e.kind = EventKind::socket_connect;
      e.subject = proc_ref(host, "probe");
      e.object = sock_ref(host, cat("scan:", 1024 + rng.uniform_int(4096)));
      break;
    case 2:  // Initial compromise: service spawns payload, drops files
      if (rng.uniform() < 0.6) {
        e.kind = EventKind::process_create;
        e.subject = proc_ref(host, "nginx");
        e.object = proc_ref(host, cat("payload", rng.uniform_int(3)));
      } else {
        e.kind = EventKind::file_access;
        e.subject = proc_ref(host, cat("payload", rng.uniform_int(3)));
        e.object = file_ref(host, "/tmp/.dropper");
        e.attrs["mode"] = "write";
      }
      break;
    case 3:  // Privilege escalation: setuid spawn and persistence writes
      if (rng.uniform() < 0.6) {
        e.kind = EventKind::process_create;
        e.subject = proc_ref(host, cat("payload", rng.uniform_int(3)));
        e.object = proc_ref(host, "rootsh");
        e.attrs["setuid"] = "1";
      } else {
        e.kind = EventKind::registry_write;
        e.subject = proc_ref(host, "rootsh");
        e.object = file_ref(host, "registry/autorun_implant");
      }
      break;
    case 4:  // Lateral movement: remote logins and internal hops
      if (rng.uniform() < 0.5) {
        e.kind = EventKind::user_login;
        e.subject = user_ref(host, "svc_backup");
        e.object = host_ref(host);
        e.attrs["remote"] = "1";
      } else {
        e.kind = EventKind::socket_connect;
        e.subject = proc_ref(host, "rootsh");
        e.object = sock_ref(host, cat("10.0.0.", 1 + rng.uniform_int(6), ":445"));
      }
      break;
    case 5:  // Command and control: beaconing to an external endpoint
      e.kind = EventKind::socket_connect;
      e.subject = proc_ref(host, "implant");
      e.object = sock_ref(host, cat("ext:198.51.100.", 1 + rng.uniform_int(8),
                                    ":8443"));
      e.attrs["beacon"] = "1";
      break;
    default:  // 6, Exfiltration: bulk reads and large external transfers
      if (rng.uniform() < 0.5) {
        e.kind = EventKind::file_access;
        e.subject = proc_ref(host, "implant");
        e.object = file_ref(host, "/srv/data/secrets.db");
        e.attrs["mode"] = "read";
      } else {
        e.kind = EventKind::socket_connect;
        e.subject = proc_ref(host, "implant");
        e.object = sock_ref(host, "ext:198.51.100.77:443");
        e.attrs["bytes"] = std::to_string(1 << (20 + rng.uniform_int(6)));
      }
      break;
  }
  return e;
}

const std::array<const char*, 6> kAlertSignatures = {
    "ET-SCAN-PORTSWEEP", "ET-EXPLOIT-WEBSHELL", "ET-PRIVESC-SETUID",
    "ET-LATERAL-SMB",    "ET-C2-BEACON",        "ET-EXFIL-VOLUME"};

}  // namespace

std::vector<Event> emit_window(const CampaignState& campaign,
                               const NoiseProfile& profile, double fidelity,
                               int window_index, Rng& rng) {
  if (fidelity < 0.0 || fidelity > 1.0)
    fail("emit_window: fidelity ", fidelity, " outside [0,1]");
  profile.validate();

  const double t0 = window_index * kWindowSeconds;
  std::vector<Event> events;

  // Benign background on every host.
  int num_hosts = 6;
  // Hosts are implicit in the campaign playbook; keep the default testbed
  // scale unless a step references a larger id.
  for (const auto& s : campaign.playbook.steps)
    num_hosts = std::max(num_hosts, s.host + 1);
  for (int h = 0; h < num_hosts; ++h) {
    const int n = rng.poisson(profile.benign_rate);
    for (int i = 0; i < n; ++i)
      events.push_back(benign_event(h, t0 + rng.uniform() * kWindowSeconds, rng));
  }

  // Attack activity on compromised hosts while the campaign is live.
  std::vector<const Event*> attack_refs;
  const int stage = campaign.begun ? campaign.k_true : 0;
  if (stage >= 1) {
    const int n = rng.poisson(profile.attack_rate[static_cast<std::size_t>(stage)]);
    const std::vector<int> hosts(campaign.compromised.begin(),
                                 campaign.compromised.end());
    for (int i = 0; i < n; ++i) {
      int host = campaign.current_host();
      if (!hosts.empty() && rng.uniform() > 0.7)
        host = hosts[rng.uniform_int(hosts.size())];
      events.push_back(attack_event(stage, host,
                                    campaign.current_technique(),
                                    t0 + rng.uniform() * kWindowSeconds, rng));
    }
  }

  // True alerts: one chance per attack event, fidelity-scaled.
  std::vector<Event> alerts;
  const double p_true = profile.alert_tp_rate * (0.5 + 0.5 * fidelity);
  int alert_serial = 0;
  for (const Event& e : events) {
    if (!e.attrs.count("technique")) continue;
    if (rng.uniform() >= p_true) continue;
    Event a;
    a.timestamp = std::min(e.timestamp + 1.0, t0 + kWindowSeconds - 1e-3);
    a.host = e.host;
    a.kind = EventKind::alert;
    const int stage_idx = campaign.begun ? campaign.k_true : 1;
    a.subject = cat("alert:w", window_index, ":", alert_serial++);
    a.attrs["signature"] = kAlertSignatures[static_cast<std::size_t>(
        std::clamp(stage_idx - 1, 0, 5))];
    a.attrs["technique"] = e.attrs.at("technique");
    alerts.push_back(std::move(a));
  }

  // False alerts: random signature on a random host.
  const int n_false = rng.poisson(profile.alert_fp_rate);
  for (int i = 0; i < n_false; ++i) {
    Event a;
    a.timestamp = t0 + rng.uniform() * kWindowSeconds;
    a.host = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(num_hosts)));
    a.kind = EventKind::alert;
    a.subject = cat("alert:w", window_index, ":fp", i);
    a.attrs["signature"] =
        kAlertSignatures[rng.uniform_int(kAlertSignatures.size())];
    alerts.push_back(std::move(a));
  }
  events.insert(events.end(), alerts.begin(), alerts.end());

  std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
    if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
    if (a.subject != b.subject) return a.subject < b.subject;
    return a.object < b.object;
  });
  return events;
}

std::string events_to_jsonl(const std::vector<Event>& events) {
  std::string out;
  for (const Event& e : events) {
    nlohmann::ordered_json j;
    j["ts"] = e.timestamp;
    j["host"] = e.host;
    j["kind"] = event_kind_name(e.kind);
    j["subject"] = e.subject;
    j["object"] = e.object;
    j["attrs"] = e.attrs;
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace deepstage
