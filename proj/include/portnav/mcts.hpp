#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "portnav/config.hpp"
#include "portnav/nets.hpp"

namespace portnav {

// What the search needs from a model: evaluate the root observation, and
// follow an action edge from a latent state. Tests plug in tabular stubs.
class LatentModel {
 public:
  struct Eval {
    std::vector<double> latent;
    std::vector<double> policy;  // normalized prior over actions
    double value = 0.0;
    double reward = 0.0;  // reward on the edge just followed; 0 at the root
  };

  virtual ~LatentModel() = default;
  virtual int action_count() const = 0;
  virtual Eval initial(std::span<const double> observation) = 0;
  virtual Eval recur(std::span<const double> latent, int action) = 0;
};

// Adapter over the float network parameters.
class NetLatentModel : public LatentModel {
 public:
  explicit NetLatentModel(std::shared_ptr<const ModelParams<float>> params)
      : params_(std::move(params)) {}

  int action_count() const override { return params_->shape.action_count; }
  Eval initial(std::span<const double> observation) override;
  Eval recur(std::span<const double> latent, int action) override;

 private:
  std::shared_ptr<const ModelParams<float>> params_;
};

struct SearchConfig {
  int simulations = 50;
  double c1 = 1.25;           // pUCT exploration constants
  double c2 = 19652.0;
  double discount = 0.997;
  double dirichlet_alpha = 0.3;
  double dirichlet_fraction = 0.25;  // 0 disables root noise
  double policy_temperature = 1.0;   // visit exponent for the returned policy

  static SearchConfig from_config(const Config& cfg);
};

struct SearchResult {
  std::vector<double> policy;   // improved policy over actions
  std::vector<int> visits;      // per-action root visit counts
  double root_value = 0.0;      // mean of values backed up through the root
};

// pUCT tree search over the latent model. The first simulation expands and
// evaluates the root itself, so root child visits sum to simulations - 1;
// with a single simulation the returned policy is the (noised) prior.
SearchResult search(LatentModel& model, std::span<const double> observation,
                    const SearchConfig& cfg, std::uint64_t seed);

// temperature > 0 samples proportional to visits^(1/temperature);
// temperature == 0 takes the argmax, ties broken by lowest action index.
int select_action(const SearchResult& result, double temperature, std::uint64_t seed);

}  // namespace portnav
