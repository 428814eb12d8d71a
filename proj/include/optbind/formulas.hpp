#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "optbind/error.hpp"

namespace optbind {

// Probability that an arriving customer waits in an M/M/s queue with offered
// load a = lambda / mu. Evaluated through the Erlang-B recursion, which stays
// finite for large s where a^s / s! would overflow.
inline double erlang_c_wait_probability(int servers, double offered_load) {
  if (servers < 1) throw data_error("erlang_c: servers must be at least 1");
  if (!(offered_load >= 0.0)) throw data_error("erlang_c: offered load must be non-negative");
  if (offered_load >= servers)
    throw data_error("erlang_c: offered load " + std::to_string(offered_load) + " >= servers " +
                     std::to_string(servers) + " (unstable queue)");
  if (offered_load == 0.0) return 0.0;
  double b = 1.0;
  for (int k = 1; k <= servers; ++k) b = offered_load * b / (k + offered_load * b);
  const double s = servers;
  return s * b / (s - offered_load * (1.0 - b));
}

// Mean waiting time in queue, in units of 1/mu.
inline double erlang_c_mean_wait(int servers, double offered_load) {
  return erlang_c_wait_probability(servers, offered_load) / (servers - offered_load);
}

// Probability that the wait exceeds t (t in units of 1/mu).
inline double erlang_c_wait_exceeds(int servers, double offered_load, double t) {
  return erlang_c_wait_probability(servers, offered_load) * std::exp(-(servers - offered_load) * t);
}

inline double power_loss_coefficient(double loss_cost_rate, double resistance, double voltage_kv) {
  if (voltage_kv == 0.0) throw data_error("power_loss_coefficient: voltage is zero");
  if (voltage_kv < 0.0) throw data_error("power_loss_coefficient: voltage must be positive");
  if (resistance < 0.0) throw data_error("power_loss_coefficient: resistance must be non-negative");
  return loss_cost_rate * resistance / (voltage_kv * voltage_kv);
}

using Coord = std::pair<double, double>;

inline std::vector<std::vector<double>> derive_euclidean_costs(const std::vector<Coord>& a,
                                                               const std::vector<Coord>& b, double rate) {
  if (a.empty() || b.empty()) throw data_error("derive_euclidean_costs: empty coordinate list");
  std::vector<std::vector<double>> out(a.size(), std::vector<double>(b.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      out[i][j] = rate * std::hypot(a[i].first - b[j].first, a[i].second - b[j].second);
  return out;
}

}  // namespace optbind
