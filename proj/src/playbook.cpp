#include "deepstage/playbook.hpp"

#include <algorithm>
#include <cmath>

#include "deepstage/util.hpp"
#include "json.hpp"

namespace deepstage {

int Playbook::max_stage() const {
  int m = 0;
  for (const auto& s : steps) m = std::max(m, s.stage);
  return m;
}

int Playbook::total_dwell() const {
  int total = 0;
  for (const auto& s : steps) total += s.dwell;
  return total;
}

bool Playbook::has_stage(int stage) const {
  return std::any_of(steps.begin(), steps.end(),
                     [&](const PlaybookStep& s) { return s.stage == stage; });
}

std::vector<int> Playbook::expanded_stage_sequence() const {
  std::vector<int> seq;
  seq.reserve(static_cast<std::size_t>(total_dwell()));
  for (const auto& s : steps)
    for (int i = 0; i < s.dwell; ++i) seq.push_back(s.stage);
  return seq;
}

namespace {

bool stage_ladder_valid(const std::vector<PlaybookStep>& steps) {
  if (steps.empty() || steps.front().stage != 1) return false;
  for (std::size_t i = 1; i < steps.size(); ++i) {
    const int d = steps[i].stage - steps[i - 1].stage;
    if (d < 0 || d > 1) return false;
  }
  return true;
}

}  // namespace

void validate_playbook(const Playbook& pb, int num_hosts) {
  if (pb.id.empty()) fail("playbook: empty id");
  if (pb.steps.empty()) fail("playbook '", pb.id, "': no steps");
  if (!stage_ladder_valid(pb.steps))
    fail("playbook '", pb.id,
         "': stages must start at 1 and climb by at most one per step");
  for (std::size_t i = 0; i < pb.steps.size(); ++i) {
    const auto& s = pb.steps[i];
    if (s.stage < 1 || s.stage > 6)
      fail("playbook '", pb.id, "' step ", i, ": stage ", s.stage,
           " outside 1..6");
    if (s.dwell < 1)
      fail("playbook '", pb.id, "' step ", i, ": dwell must be >= 1");
    if (s.host < 0 || s.host >= num_hosts)
      fail("playbook '", pb.id, "' step ", i, ": host ", s.host,
           " outside 0..", num_hosts - 1);
    if (s.technique.empty())
      fail("playbook '", pb.id, "' step ", i, ": empty technique tag");
  }
  for (int stage = 1; stage <= pb.max_stage(); ++stage) {
    const bool anchored = std::any_of(
        pb.steps.begin(), pb.steps.end(), [&](const PlaybookStep& s) {
          return s.stage == stage && !s.optional;
        });
    if (!anchored)
      fail("playbook '", pb.id, "': stage ", stage,
           " has no non-optional step");
  }
}

std::string playbook_to_json(const Playbook& pb) {
  nlohmann::ordered_json j;
  j["id"] = pb.id;
  j["steps"] = nlohmann::ordered_json::array();
  for (const auto& s : pb.steps) {
    nlohmann::ordered_json step;
    step["stage"] = s.stage;
    step["dwell"] = s.dwell;
    step["technique"] = s.technique;
    step["host"] = s.host;
    step["optional"] = s.optional;
    j["steps"].push_back(step);
  }
  return j.dump(2) + "\n";
}

Playbook playbook_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail("playbook parse error: ", e.what());
  }
  Playbook pb;
  if (!j.contains("id") || !j.contains("steps"))
    fail("playbook: missing 'id' or 'steps'");
  for (const auto& [key, _] : j.items())
    if (key != "id" && key != "steps") fail("playbook: unknown key '", key, "'");
  pb.id = j["id"].get<std::string>();
  for (const auto& js : j["steps"]) {
    PlaybookStep s;
    for (const auto& [key, _] : js.items())
      if (key != "stage" && key != "dwell" && key != "technique" &&
          key != "host" && key != "optional")
        fail("playbook '", pb.id, "': unknown step key '", key, "'");
    s.stage = js.at("stage").get<int>();
    s.dwell = js.at("dwell").get<int>();
    s.technique = js.at("technique").get<std::string>();
    s.host = js.at("host").get<int>();
    s.optional = js.value("optional", false);
    pb.steps.push_back(std::move(s));
  }
  return pb;
}

Playbook load_playbook(const std::filesystem::path& path, int num_hosts) {
  Playbook pb = playbook_from_json(read_file(path));
  validate_playbook(pb, num_hosts);
  return pb;
}

std::vector<Playbook> load_playbook_dir(const std::filesystem::path& dir,
                                        int num_hosts) {
  if (!std::filesystem::is_directory(dir))
    fail("playbook directory not found: ", dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) fail("no .json playbooks in ", dir.string());
  std::vector<Playbook> out;
  out.reserve(files.size());
  for (const auto& f : files) out.push_back(load_playbook(f, num_hosts));
  return out;
}

void write_playbook(const Playbook& pb, const std::filesystem::path& path) {
  atomic_write_file(path, playbook_to_json(pb));
}

std::vector<Playbook> builtin_playbooks() {
  // Techniques are grouped per stage (recon, initial compromise, privilege
  // escalation, lateral movement, C2, exfiltration). Total dwell stays small
  // enough that any +50% variant plus the benign lead fits the shortest
  // episode budget.
  auto step = [](int stage, int dwell, const char* tech, int host,
                 bool optional = false) {
    return PlaybookStep{stage, dwell, tech, host, optional};
  };
  std::vector<Playbook> books;
  books.push_back({"pb01_web_shell_exfil",
                   {step(1, 2, "T1595", 1), step(1, 1, "T1046", 1, true),
                    step(2, 2, "T1190", 1), step(3, 2, "T1068", 1),
                    step(4, 2, "T1021", 2), step(4, 1, "T1570", 3, true),
                    step(5, 3, "T1071", 3), step(6, 2, "T1041", 3)}});
  books.push_back({"pb02_phish_cred_exfil",
                   {step(1, 2, "T1595", 0), step(2, 2, "T1566", 0),
                    step(3, 2, "T1548", 0), step(3, 1, "T1053", 0, true),
                    step(4, 2, "T1550", 4), step(5, 2, "T1095", 4),
                    step(6, 3, "T1048", 4)}});
  books.push_back({"pb03_dmz_pivot_exfil",
                   {step(1, 3, "T1046", 2), step(2, 2, "T1190", 2),
                    step(3, 1, "T1068", 2), step(4, 2, "T1021", 5),
                    step(4, 2, "T1570", 1, true), step(5, 2, "T1105", 5),
                    step(6, 2, "T1567", 5)}});
  books.push_back({"pb04_insider_lateral_c2",
                   {step(1, 2, "T1018", 3), step(2, 2, "T1059", 3),
                    step(3, 2, "T1053", 3), step(4, 3, "T1021", 0),
                    step(5, 4, "T1071", 0)}});
  books.push_back({"pb05_scan_heavy_exfil",
                   {step(1, 4, "T1595", 1), step(1, 2, "T1018", 2, true),
                    step(2, 2, "T1566", 2), step(3, 2, "T1548", 2),
                    step(4, 2, "T1550", 3), step(5, 2, "T1095", 3),
                    step(6, 2, "T1041", 3)}});
  books.push_back({"pb06_slow_burn_c2",
                   {step(1, 3, "T1046", 4), step(2, 3, "T1190", 4),
                    step(3, 3, "T1068", 4), step(4, 3, "T1570", 5),
                    step(5, 5, "T1105", 5)}});
  books.push_back({"pb07_smash_and_grab",
                   {step(1, 1, "T1595", 0), step(2, 1, "T1059", 0),
                    step(3, 1, "T1548", 0), step(4, 1, "T1021", 1),
                    step(5, 1, "T1071", 1), step(6, 4, "T1048", 1)}});
  books.push_back({"pb08_workstation_hop_exfil",
                   {step(1, 2, "T1018", 5), step(2, 2, "T1566", 5),
                    step(3, 2, "T1053", 5), step(4, 2, "T1021", 4),
                    step(4, 2, "T1550", 2, true), step(5, 2, "T1071", 2),
                    step(6, 3, "T1567", 2)}});
  books.push_back({"pb09_recon_probe_c2",
                   {step(1, 4, "T1595", 3), step(1, 2, "T1046", 1, true),
                    step(2, 2, "T1190", 1), step(3, 2, "T1068", 1),
                    step(4, 2, "T1570", 0), step(5, 4, "T1095", 0)}});
  books.push_back({"pb10_server_direct_exfil",
                   {step(1, 2, "T1046", 5), step(2, 2, "T1190", 5),
                    step(3, 2, "T1548", 5), step(4, 2, "T1570", 4),
                    step(5, 2, "T1105", 4), step(6, 3, "T1041", 4),
                    step(6, 1, "T1567", 4, true)}});
  return books;
}

Playbook generate_variant(const Playbook& base, std::uint64_t seed,
                          int num_hosts) {
  Rng rng(derive_seed(seed, "playbook_variant"));
  Playbook variant;
  {
    char suffix[20];
    std::snprintf(suffix, sizeof suffix, "#%016llx",
                  static_cast<unsigned long long>(seed));
    variant.id = base.id + suffix;
  }
  variant.steps = base.steps;

  for (auto& s : variant.steps) {
    const double factor = rng.uniform(0.5, 1.5);
    s.dwell = std::max(1, static_cast<int>(std::llround(s.dwell * factor)));
    s.host = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(num_hosts)));
  }

  // Drop optional steps one at a time; a drop that would break the stage
  // ladder is discarded, clamping degenerate variants back to valid.
  for (std::size_t i = variant.steps.size(); i-- > 0;) {
    if (!variant.steps[i].optional) continue;
    if (rng.uniform() >= 0.3) continue;
    std::vector<PlaybookStep> candidate = variant.steps;
    candidate.erase(candidate.begin() + static_cast<std::ptrdiff_t>(i));
    if (stage_ladder_valid(candidate)) variant.steps = std::move(candidate);
  }
  validate_playbook(variant, num_hosts);
  return variant;
}

}  // namespace deepstage
