#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "portnav/env.hpp"

namespace portnav {

// Full round-trippable EnvConfig serialization; the episode log embeds it so
// a log file is self-contained for the replay audit.
nlohmann::json env_config_to_json(const EnvConfig& cfg);
EnvConfig env_config_from_json(const nlohmann::json& j);

// One JSONL record per step plus an episode header and footer. The step
// record carries the pose and a digest of the full simulator state, which is
// what makes the byte-identical replay audit sensitive to any divergence.
nlohmann::json episode_header_record(int episode, const Environment& env);
nlohmann::json step_record(int episode, int t, Action a, const StepResult& result,
                           const Environment& env);
nlohmann::json episode_end_record(int episode, TerminalKind kind, int length, double ret);

class EpisodeLogWriter {
 public:
  EpisodeLogWriter(const std::string& path, const EnvConfig& env_cfg,
                   const nlohmann::json& config_echo);

  void begin_episode(int episode, const Environment& env);
  void log_step(int episode, int t, Action a, const StepResult& result, const Environment& env);
  void end_episode(int episode, TerminalKind kind, int length, double ret);
  void flush();

 private:
  std::ofstream out_;
};

struct ReplayAuditResult {
  int episodes_checked = 0;
  int mismatches = 0;
  std::string first_mismatch;

  bool ok() const { return mismatches == 0 && episodes_checked > 0; }
};

// Re-simulates every episode in the log from its seeds and compares the
// regenerated step records byte-for-byte against the file.
ReplayAuditResult replay_audit(const std::string& log_path);

}  // namespace portnav
