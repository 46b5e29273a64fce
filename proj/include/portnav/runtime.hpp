#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "portnav/baseline_dwa.hpp"
#include "portnav/env.hpp"
#include "portnav/episode_log.hpp"
#include "portnav/mcts.hpp"
#include "portnav/train.hpp"

namespace portnav {

struct RunConfig {
  int workers = 4;
  std::uint64_t seed = 1;
  long total_env_steps = 50000;
  EnvConfig env;
  SearchConfig search;
  TrainConfig train;
  // Action-selection temperature schedule over the env-step budget.
  double temp_initial = 1.0;
  double temp_mid = 0.5;
  double temp_final = 0.25;
  double temp_drop1 = 0.5;  // fractions of the budget
  double temp_drop2 = 0.75;
  std::vector<long> milestones;  // env-step counts that get named checkpoints
  std::string out_dir = "run_out";

  static RunConfig from_config(const Config& cfg);
};

struct EpisodeStat {
  int episode = 0;
  long env_steps = 0;  // cumulative at episode end
  bool success = false;
  TerminalKind kind = TerminalKind::none;
  int length = 0;
  double mean_abs_ex = 0.0;
  double mean_abs_ey = 0.0;
  double mean_abs_epsi = 0.0;
  double episode_return = 0.0;
  std::uint64_t world_hash = 0;
};

nlohmann::json episode_stat_record(const EpisodeStat& s);

struct EvalReport {
  int episodes = 0;
  double success_rate = 0.0;
  double mean_ep_len = 0.0;
  double mean_abs_ex = 0.0;
  double mean_abs_ey = 0.0;
  double mean_abs_epsi = 0.0;
  double mean_return = 0.0;
  std::vector<EpisodeStat> per_episode;

  nlohmann::json to_json() const;
  static EvalReport from_stats(std::vector<EpisodeStat> stats);
};

class Policy {
 public:
  virtual ~Policy() = default;
  virtual const char* name() const = 0;
  virtual void begin_episode() {}
  virtual Action act(const Environment& env, const Observation& obs, std::uint64_t step_seed) = 0;
};

// Greedy (or tempered) MCTS over a fixed parameter snapshot.
class AgentPolicy : public Policy {
 public:
  AgentPolicy(std::shared_ptr<const ModelParams<float>> params, SearchConfig cfg,
              double temperature);
  const char* name() const override { return "agent"; }
  Action act(const Environment& env, const Observation& obs, std::uint64_t step_seed) override;
  const SearchResult& last_result() const { return last_; }

 private:
  NetLatentModel model_;
  SearchConfig cfg_;
  double temperature_;
  SearchResult last_;
};

class RandomPolicy : public Policy {
 public:
  const char* name() const override { return "random"; }
  Action act(const Environment& env, const Observation& obs, std::uint64_t step_seed) override;
};

class DwaPolicy : public Policy {
 public:
  explicit DwaPolicy(DwaConfig cfg) : cfg_(cfg) {}
  const char* name() const override { return "dwa"; }
  Action act(const Environment& env, const Observation& obs, std::uint64_t step_seed) override;
  const DwaDecision& last_decision() const { return last_; }

 private:
  DwaConfig cfg_;
  DwaDecision last_;
};

// Trailing running mean over the last `window` values.
std::vector<double> rolling_mean(const std::vector<double>& series, int window);

// Runs `episodes` episodes on freshly sampled worlds (one geometry per
// episode, seeds derived from `seed`). Two policies evaluated with the same
// seed see identical worlds.
EvalReport evaluate(Policy& policy, const EnvConfig& env_cfg, int episodes, std::uint64_t seed,
                    EpisodeLogWriter* log = nullptr);

struct PairedEvalReport {
  EvalReport a;
  EvalReport b;
  int a_wins = 0;  // a succeeded where b failed
  int b_wins = 0;
  nlohmann::json to_json() const;
};

PairedEvalReport evaluate_paired(Policy& a, Policy& b, const EnvConfig& env_cfg, int episodes,
                                 std::uint64_t seed);

// Published immutable parameter snapshots shared between learner and actors.
class SnapshotStore {
 public:
  explicit SnapshotStore(const ModelParams<float>& initial);
  std::shared_ptr<const ModelParams<float>> get() const;
  void publish(const ModelParams<float>& params, std::int64_t learner_step);
  std::int64_t published_at() const;

 private:
  mutable std::mutex mu_;
  std::shared_ptr<const ModelParams<float>> params_;
  std::int64_t published_at_ = 0;
};

struct RunOutputs {
  std::string final_checkpoint;
  std::vector<std::string> milestone_checkpoints;
  long env_steps = 0;
  std::int64_t learner_steps = 0;
  std::uint64_t episodes = 0;
  std::int64_t max_snapshot_staleness = 0;  // learner steps
};

// Actor/learner training: `workers` actor loops feed completed episodes into
// the replay buffer while the learner trains at train_interval pacing and
// publishes snapshots. workers == 1 runs fully inline and is deterministic.
RunOutputs run_training(const RunConfig& cfg);

}  // namespace portnav
