#include "exchg/exchange.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace exchg {

namespace {

double held_location(const Instance& inst, const std::vector<int>& holding,
                     int agent) {
  return inst.positions[static_cast<std::size_t>(
      holding[static_cast<std::size_t>(agent)])];
}

double welfare_of_holding(const Instance& inst,
                          const std::vector<int>& holding, double facility) {
  double sum = 0.0;
  for (int i = 0; i < inst.size(); ++i) {
    sum += utility(facility, held_location(inst, holding, i),
                   inst.types[static_cast<std::size_t>(i)],
                   inst.segment_length);
  }
  return sum;
}

void check_inputs(const Instance& inst, const Assignment& start,
                  double facility) {
  inst.validate();
  if (start.size() != inst.size() || !start.is_permutation()) {
    throw std::invalid_argument("exchange: start assignment does not fit the instance");
  }
  if (facility < 0.0 || facility > inst.segment_length) {
    throw std::invalid_argument("exchange: facility outside [0, d]");
  }
}

// Owner of agent i's favorite remaining location. Two passes: the best
// utility first, then the tie-break chain over everything within kEps of it.
int preferred_owner(const Instance& inst, const std::vector<int>& holding,
                    const std::vector<char>& active, int agent,
                    double facility) {
  const PreferenceType type = inst.types[static_cast<std::size_t>(agent)];
  double best = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < inst.size(); ++j) {
    if (!active[static_cast<std::size_t>(j)]) continue;
    best = std::max(best, utility(facility, held_location(inst, holding, j),
                                  type, inst.segment_length));
  }
  int chosen = -1;
  double chosen_coord = 0.0;
  for (int j = 0; j < inst.size(); ++j) {
    if (!active[static_cast<std::size_t>(j)]) continue;
    const double coord = held_location(inst, holding, j);
    const double u = utility(facility, coord, type, inst.segment_length);
    if (u < best - kEps) continue;
    if (j == agent) return agent;  // own location wins every tie
    if (chosen < 0 || coord < chosen_coord) {
      chosen = j;
      chosen_coord = coord;
    }
  }
  return chosen;
}

}  // namespace

ExchangeTrace ttc(const Instance& inst, const Assignment& start,
                  double facility) {
  check_inputs(inst, start, facility);
  const int n = inst.size();

  std::vector<int> holding = start.perm;
  std::vector<char> active(static_cast<std::size_t>(n), 1);

  ExchangeTrace trace;
  trace.initial_welfare = welfare_of_holding(inst, holding, facility);

  int remaining = n;
  while (remaining > 0) {
    std::vector<int> target(static_cast<std::size_t>(n), -1);
    for (int i = 0; i < n; ++i) {
      if (active[static_cast<std::size_t>(i)]) {
        target[static_cast<std::size_t>(i)] =
            preferred_owner(inst, holding, active, i, facility);
      }
    }

    // Cycles of the pointing graph, each rotated to start at its smallest
    // member and ordered by that member. At least one cycle always exists.
    std::vector<std::vector<int>> cycles;
    std::vector<char> state(static_cast<std::size_t>(n), 0);  // 0 new, 1 path, 2 done
    for (int s = 0; s < n; ++s) {
      if (!active[static_cast<std::size_t>(s)] ||
          state[static_cast<std::size_t>(s)] != 0) {
        continue;
      }
      std::vector<int> path;
      int v = s;
      while (state[static_cast<std::size_t>(v)] == 0) {
        state[static_cast<std::size_t>(v)] = 1;
        path.push_back(v);
        v = target[static_cast<std::size_t>(v)];
      }
      if (state[static_cast<std::size_t>(v)] == 1) {
        auto it = std::find(path.begin(), path.end(), v);
        cycles.emplace_back(it, path.end());
      }
      for (int u : path) state[static_cast<std::size_t>(u)] = 2;
    }
    for (auto& cycle : cycles) {
      auto min_it = std::min_element(cycle.begin(), cycle.end());
      std::rotate(cycle.begin(), min_it, cycle.end());
    }
    std::sort(cycles.begin(), cycles.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });

    for (const auto& cycle : cycles) {
      if (cycle.size() > 1) {
        std::vector<int> received(cycle.size());
        for (std::size_t k = 0; k < cycle.size(); ++k) {
          received[k] = holding[static_cast<std::size_t>(
              target[static_cast<std::size_t>(cycle[k])])];
        }
        for (std::size_t k = 0; k < cycle.size(); ++k) {
          holding[static_cast<std::size_t>(cycle[k])] = received[k];
        }
        trace.steps.push_back(
            {cycle, welfare_of_holding(inst, holding, facility)});
      }
      for (int i : cycle) {
        active[static_cast<std::size_t>(i)] = 0;
        --remaining;
      }
    }
  }

  trace.final_assignment.perm = std::move(holding);
  return trace;
}

std::optional<std::pair<int, int>> beneficial_swap_exists(
    const Instance& inst, const Assignment& assignment, double facility) {
  check_inputs(inst, assignment, facility);
  const int n = inst.size();
  for (int i = 0; i < n; ++i) {
    const double loc_i = held_location(inst, assignment.perm, i);
    const PreferenceType t_i = inst.types[static_cast<std::size_t>(i)];
    const double u_i = utility(facility, loc_i, t_i, inst.segment_length);
    for (int j = i + 1; j < n; ++j) {
      const double loc_j = held_location(inst, assignment.perm, j);
      const PreferenceType t_j = inst.types[static_cast<std::size_t>(j)];
      const double u_j = utility(facility, loc_j, t_j, inst.segment_length);
      const double u_i_swapped = utility(facility, loc_j, t_i, inst.segment_length);
      const double u_j_swapped = utility(facility, loc_i, t_j, inst.segment_length);
      if (u_i_swapped > u_i + kEps && u_j_swapped > u_j + kEps) {
        return std::make_pair(i, j);
      }
    }
  }
  return std::nullopt;
}

ExchangeTrace swap_dynamics(const Instance& inst, const Assignment& start,
                            double facility) {
  check_inputs(inst, start, facility);

  ExchangeTrace trace;
  trace.initial_welfare =
      welfare_of_holding(inst, start.perm, facility);
  Assignment current = start;

  while (auto pair = beneficial_swap_exists(inst, current, facility)) {
    std::swap(current.perm[static_cast<std::size_t>(pair->first)],
              current.perm[static_cast<std::size_t>(pair->second)]);
    trace.steps.push_back(
        {{pair->first, pair->second},
         welfare_of_holding(inst, current.perm, facility)});
  }

  trace.final_assignment = std::move(current);
  return trace;
}

}  // namespace exchg
