#include "oops/tabular_q.hpp"

#include "oops/errors.hpp"

#include <algorithm>
#include <random>

namespace oops {

void TabularQConfig::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("tabular q: alpha must be in (0, 1]");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("tabular q: gamma must be in [0, 1)");
  if (epsilon_start < 0.0 || epsilon_start > 1.0 || epsilon_end < 0.0 || epsilon_end > 1.0)
    throw ConfigError("tabular q: epsilon values must be in [0, 1]");
  if (!(epsilon_decay_fraction > 0.0)) throw ConfigError("tabular q: epsilon_decay_fraction must be > 0");
  if (updates_per_step < 0 || batch_size < 1) throw ConfigError("tabular q: bad update schedule");
}

double TabularQConfig::epsilon_at(long step, long total_steps) const {
  const double horizon = std::max(1.0, epsilon_decay_fraction * static_cast<double>(total_steps));
  const double frac = std::min(1.0, static_cast<double>(step) / horizon);
  return epsilon_start + frac * (epsilon_end - epsilon_start);
}

TabularQ::TabularQ(int num_states, int num_actions) : q_(Eigen::MatrixXd::Zero(num_states, num_actions)) {
  if (num_states < 1 || num_actions < 1) throw ConfigError("tabular q: table must be non-empty");
}

void TabularQ::check(int state, int action) const {
  if (state < 0 || state >= q_.rows() || action < 0 || action >= q_.cols())
    throw InputError("tabular q: state or action index out of range");
}

void TabularQ::update(const std::vector<IndexedTransition>& batch, const TabularQConfig& cfg) {
  for (const IndexedTransition& t : batch) {
    check(t.state, t.action);
    check(t.next_state, 0);
    const double bootstrap = t.done ? 0.0 : cfg.gamma * q_.row(t.next_state).maxCoeff();
    double& q = q_(t.state, t.action);
    q += cfg.alpha * (t.reward + bootstrap - q);
  }
}

int TabularQ::greedy(int state) const {
  check(state, 0);
  int best = 0;
  for (int a = 1; a < q_.cols(); ++a)
    if (q_(state, a) > q_(state, best)) best = a;
  return best;
}

int TabularQ::act(int state, bool explore, double epsilon, Rng& rng) const {
  if (explore) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (coin(rng) < epsilon) {
      std::uniform_int_distribution<int> pick(0, static_cast<int>(q_.cols()) - 1);
      return pick(rng);
    }
  }
  return greedy(state);
}

}  // namespace oops
