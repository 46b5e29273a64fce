#include "portnav/mcts.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "portnav/rng.hpp"

namespace portnav {

LatentModel::Eval NetLatentModel::initial(std::span<const double> observation) {
  std::vector<float> obs(observation.begin(), observation.end());
  const std::vector<float> latent = represent(*params_, std::span<const float>(obs));
  const PredictOut<float> p = predict(*params_, std::span<const float>(latent));
  Eval e;
  e.latent.assign(latent.begin(), latent.end());
  e.policy.assign(p.policy.begin(), p.policy.end());
  e.value = static_cast<double>(p.value);
  return e;
}

LatentModel::Eval NetLatentModel::recur(std::span<const double> latent, int action) {
  std::vector<float> l(latent.begin(), latent.end());
  const TransitionOut<float> t = transition(*params_, std::span<const float>(l), action);
  const PredictOut<float> p = predict(*params_, std::span<const float>(t.latent));
  Eval e;
  e.latent.assign(t.latent.begin(), t.latent.end());
  e.policy.assign(p.policy.begin(), p.policy.end());
  e.value = static_cast<double>(p.value);
  e.reward = static_cast<double>(t.reward);
  return e;
}

SearchConfig SearchConfig::from_config(const Config& cfg) {
  SearchConfig s;
  const std::string sec = "search";
  s.simulations = static_cast<int>(cfg.get_int(sec, "simulations", s.simulations));
  s.c1 = cfg.get_double(sec, "c1", s.c1);
  s.c2 = cfg.get_double(sec, "c2", s.c2);
  s.discount = cfg.get_double(sec, "discount", s.discount);
  s.dirichlet_alpha = cfg.get_double(sec, "dirichlet_alpha", s.dirichlet_alpha);
  s.dirichlet_fraction = cfg.get_double(sec, "dirichlet_fraction", s.dirichlet_fraction);
  s.policy_temperature = cfg.get_double(sec, "policy_temperature", s.policy_temperature);
  return s;
}

namespace {

struct Node {
  std::vector<double> latent;
  std::vector<double> priors;    // over child edges, set on expansion
  std::vector<int> children;     // arena indices, -1 when unexpanded
  double reward = 0.0;           // on the edge into this node
  int visits = 0;
  double value_sum = 0.0;

  double mean_value() const { return visits > 0 ? value_sum / visits : 0.0; }
  bool expanded() const { return !children.empty(); }
};

struct MinMax {
  double mn = std::numeric_limits<double>::infinity();
  double mx = -std::numeric_limits<double>::infinity();
  void update(double v) {
    mn = std::min(mn, v);
    mx = std::max(mx, v);
  }
  double normalize(double v) const { return mx > mn ? (v - mn) / (mx - mn) : v; }
};

}  // namespace

SearchResult search(LatentModel& model, std::span<const double> observation,
                    const SearchConfig& cfg, std::uint64_t seed) {
  if (cfg.simulations < 1) {
    throw std::invalid_argument("simulations must be >= 1");
  }
  const int actions = model.action_count();
  Rng rng(seed);

  std::vector<Node> arena;
  arena.reserve(static_cast<std::size_t>(cfg.simulations) + 1);

  const LatentModel::Eval root_eval = model.initial(observation);
  Node root;
  root.latent = root_eval.latent;
  root.priors = root_eval.policy;
  root.children.assign(static_cast<std::size_t>(actions), -1);
  if (cfg.dirichlet_fraction > 0.0) {
    std::vector<double> noise(static_cast<std::size_t>(actions));
    double sum = 0.0;
    for (double& n : noise) {
      n = rng.gamma(cfg.dirichlet_alpha);
      sum += n;
    }
    for (int a = 0; a < actions; ++a) {
      root.priors[static_cast<std::size_t>(a)] =
          (1.0 - cfg.dirichlet_fraction) * root.priors[static_cast<std::size_t>(a)] +
          cfg.dirichlet_fraction * noise[static_cast<std::size_t>(a)] / sum;
    }
  }
  // The root expansion is simulation 1: its prediction seeds the root value.
  root.visits = 1;
  root.value_sum = root_eval.value;
  arena.push_back(std::move(root));

  MinMax minmax;

  const auto puct_score = [&](const Node& parent, int action) {
    const Node* child = parent.children[static_cast<std::size_t>(action)] >= 0
                            ? &arena[static_cast<std::size_t>(
                                  parent.children[static_cast<std::size_t>(action)])]
                            : nullptr;
    const double prior = parent.priors[static_cast<std::size_t>(action)];
    const int child_visits = child ? child->visits : 0;
    const double pb_c = (cfg.c1 + std::log((parent.visits + cfg.c2 + 1.0) / cfg.c2)) * prior *
                        std::sqrt(static_cast<double>(parent.visits)) /
                        (1.0 + static_cast<double>(child_visits));
    double q = 0.0;
    if (child && child->visits > 0) {
      q = minmax.normalize(child->reward + cfg.discount * child->mean_value());
    }
    return q + pb_c;
  };

  for (int sim = 1; sim < cfg.simulations; ++sim) {
    std::vector<int> path{0};
    int node_idx = 0;
    int action = -1;
    for (;;) {
      const Node& node = arena[static_cast<std::size_t>(node_idx)];
      int best_a = 0;
      double best_s = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < actions; ++a) {
        const double s = puct_score(node, a);
        if (s > best_s) {
          best_s = s;
          best_a = a;
        }
      }
      action = best_a;
      const int child = node.children[static_cast<std::size_t>(action)];
      if (child < 0) {
        break;
      }
      node_idx = child;
      path.push_back(node_idx);
    }

    // Expand the chosen edge.
    const LatentModel::Eval eval =
        model.recur(arena[static_cast<std::size_t>(node_idx)].latent, action);
    Node leaf;
    leaf.latent = eval.latent;
    leaf.priors = eval.policy;
    leaf.children.assign(static_cast<std::size_t>(actions), -1);
    leaf.reward = eval.reward;
    arena.push_back(std::move(leaf));
    const int leaf_idx = static_cast<int>(arena.size()) - 1;
    arena[static_cast<std::size_t>(node_idx)].children[static_cast<std::size_t>(action)] =
        leaf_idx;
    path.push_back(leaf_idx);

    // Backup with discounting; refresh the normalization bounds.
    double value = eval.value;
    for (std::size_t i = path.size(); i-- > 0;) {
      Node& n = arena[static_cast<std::size_t>(path[i])];
      n.value_sum += value;
      n.visits += 1;
      minmax.update(n.reward + cfg.discount * n.mean_value());
      value = n.reward + cfg.discount * value;
    }
  }

  SearchResult result;
  result.visits.assign(static_cast<std::size_t>(actions), 0);
  const Node& root_node = arena[0];
  int total_visits = 0;
  for (int a = 0; a < actions; ++a) {
    const int c = root_node.children[static_cast<std::size_t>(a)];
    const int v = c >= 0 ? arena[static_cast<std::size_t>(c)].visits : 0;
    result.visits[static_cast<std::size_t>(a)] = v;
    total_visits += v;
  }
  result.policy.assign(static_cast<std::size_t>(actions), 0.0);
  if (total_visits == 0) {
    result.policy = root_node.priors;  // no search information yet
    double s = 0.0;
    for (double p : result.policy) s += p;
    for (double& p : result.policy) p /= s;
  } else {
    const double inv_temp = 1.0 / std::max(cfg.policy_temperature, 1e-9);
    double s = 0.0;
    for (int a = 0; a < actions; ++a) {
      const double w =
          std::pow(static_cast<double>(result.visits[static_cast<std::size_t>(a)]), inv_temp);
      result.policy[static_cast<std::size_t>(a)] = w;
      s += w;
    }
    for (double& p : result.policy) p /= s;
  }
  result.root_value = root_node.mean_value();
  return result;
}

int select_action(const SearchResult& result, double temperature, std::uint64_t seed) {
  if (temperature < 0.0) {
    throw std::invalid_argument("temperature must be >= 0");
  }
  const int n = static_cast<int>(result.visits.size());
  if (temperature == 0.0) {
    int best = 0;
    for (int a = 1; a < n; ++a) {
      if (result.visits[static_cast<std::size_t>(a)] > result.visits[static_cast<std::size_t>(best)]) {
        best = a;
      }
    }
    return best;
  }
  std::vector<double> weights(static_cast<std::size_t>(n));
  double sum = 0.0;
  bool any = false;
  for (int a = 0; a < n; ++a) {
    const int v = result.visits[static_cast<std::size_t>(a)];
    any = any || v > 0;
    weights[static_cast<std::size_t>(a)] =
        v > 0 ? std::pow(static_cast<double>(v), 1.0 / temperature) : 0.0;
    sum += weights[static_cast<std::size_t>(a)];
  }
  if (!any) {
    weights = result.policy;  // fall back to the prior-based policy
    sum = 0.0;
    for (double w : weights) sum += w;
  }
  Rng rng(seed);
  double u = rng.uniform() * sum;
  for (int a = 0; a < n; ++a) {
    u -= weights[static_cast<std::size_t>(a)];
    if (u <= 0.0) {
      return a;
    }
  }
  return n - 1;
}

}  // namespace portnav
