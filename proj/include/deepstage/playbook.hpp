#ifndef DEEPSTAGE_PLAYBOOK_HPP_
#define DEEPSTAGE_PLAYBOOK_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "deepstage/rng.hpp"

namespace deepstage {

// One scripted attacker step: hold `dwell` observation windows at `stage`
// while running `technique` against `host`. Optional steps may be dropped
// when generating variants.
struct PlaybookStep {
  int stage = 1;        // 1..6
  int dwell = 1;        // windows, >= 1
  std::string technique;
  int host = 0;
  bool optional = false;
};

struct Playbook {
  std::string id;
  std::vector<PlaybookStep> steps;

  int max_stage() const;
  int total_dwell() const;
  bool has_stage(int stage) const;
  // Stage per window with each step repeated dwell times, i.e. the exact
  // trajectory an uninterfered campaign walks.
  std::vector<int> expanded_stage_sequence() const;
};

// Validates the schema: non-empty, first stage 1, stages non-decreasing and
// never jumping by more than one, dwell >= 1, hosts in [0, num_hosts),
// and every stage present keeps at least one non-optional step.
void validate_playbook(const Playbook& pb, int num_hosts);

std::string playbook_to_json(const Playbook& pb);
Playbook playbook_from_json(const std::string& text);
Playbook load_playbook(const std::filesystem::path& path, int num_hosts);
std::vector<Playbook> load_playbook_dir(const std::filesystem::path& dir,
                                        int num_hosts);
void write_playbook(const Playbook& pb, const std::filesystem::path& path);

// The ten base campaigns shipped with the simulator. Seven end in
// exfiltration, three are command-and-control terminal.
std::vector<Playbook> builtin_playbooks();

// Randomized variant: dwell times perturbed by +-50% (floor 1), optional
// steps dropped with probability 0.3 when the stage ladder stays intact,
// target hosts resampled. Deterministic per seed.
Playbook generate_variant(const Playbook& base, std::uint64_t seed,
                          int num_hosts);

}  // namespace deepstage

#endif  // DEEPSTAGE_PLAYBOOK_HPP_
