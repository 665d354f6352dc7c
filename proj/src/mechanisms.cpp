#include "exchg/mechanisms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "exchg/parallel.hpp"

namespace exchg {

std::optional<MechanismKind> parse_mechanism(std::string_view token) {
  if (token == "central-opt") return MechanismKind::CentralOpt;
  if (token == "naive-opt") return MechanismKind::NaiveOptLocation;
  if (token == "opt-ttc") return MechanismKind::OptLocationThenTTC;
  if (token == "random-endpoints") return MechanismKind::RandomEndpoints;
  return std::nullopt;
}

std::string_view mechanism_token(MechanismKind kind) {
  switch (kind) {
    case MechanismKind::CentralOpt: return "central-opt";
    case MechanismKind::NaiveOptLocation: return "naive-opt";
    case MechanismKind::OptLocationThenTTC: return "opt-ttc";
    case MechanismKind::RandomEndpoints: return "random-endpoints";
  }
  return "";
}

namespace {

void check_reported(const Instance& inst, const PreferenceProfile& reported) {
  inst.validate();
  if (static_cast<int>(reported.size()) != inst.size()) {
    throw std::invalid_argument(
        "mechanism: reported profile length does not match the instance");
  }
}

// Agents of one type class ordered by distance to the facility; direction
// depends on the class. Ties break toward the smaller index (stable sort
// over an index-ascending base).
std::vector<int> sorted_agents(const Instance& inst,
                               const PreferenceProfile& reported,
                               PreferenceType type, double facility,
                               bool ascending) {
  std::vector<int> agents;
  for (int i = 0; i < inst.size(); ++i) {
    if (reported[static_cast<std::size_t>(i)] == type) agents.push_back(i);
  }
  std::stable_sort(agents.begin(), agents.end(), [&](int a, int b) {
    const double da = std::abs(inst.positions[static_cast<std::size_t>(a)] - facility);
    const double db = std::abs(inst.positions[static_cast<std::size_t>(b)] - facility);
    return ascending ? da < db : da > db;
  });
  return agents;
}

std::vector<int> sorted_locations(const Instance& inst,
                                  std::span<const int> location_indices,
                                  double facility, bool ascending) {
  std::vector<int> locs(location_indices.begin(), location_indices.end());
  std::sort(locs.begin(), locs.end(), [&](int a, int b) {
    const double xa = inst.positions[static_cast<std::size_t>(a)];
    const double xb = inst.positions[static_cast<std::size_t>(b)];
    const double da = std::abs(xa - facility);
    const double db = std::abs(xb - facility);
    if (da != db) return ascending ? da < db : da > db;
    if (xa != xb) return xa < xb;
    return a < b;
  });
  return locs;
}

}  // namespace

Assignment location_permutation_blocks(const Instance& inst,
                                       std::span<const int> like_locations,
                                       std::span<const int> dislike_locations,
                                       const PreferenceProfile& reported,
                                       double facility) {
  check_reported(inst, reported);
  if (facility < 0.0 || facility > inst.segment_length) {
    throw std::invalid_argument("location_permutation: facility outside [0, d]");
  }

  const auto like_agents =
      sorted_agents(inst, reported, PreferenceType::Like, facility, true);
  const auto dislike_agents =
      sorted_agents(inst, reported, PreferenceType::Dislike, facility, false);

  if (like_agents.size() != like_locations.size() ||
      dislike_agents.size() != dislike_locations.size()) {
    throw std::invalid_argument(
        "location_permutation: location blocks do not match the reported type counts");
  }

  const auto like_sorted = sorted_locations(inst, like_locations, facility, true);
  const auto dislike_sorted =
      sorted_locations(inst, dislike_locations, facility, false);

  Assignment out;
  out.perm.assign(static_cast<std::size_t>(inst.size()), -1);
  for (std::size_t k = 0; k < like_agents.size(); ++k) {
    out.perm[static_cast<std::size_t>(like_agents[k])] = like_sorted[k];
  }
  for (std::size_t k = 0; k < dislike_agents.size(); ++k) {
    out.perm[static_cast<std::size_t>(dislike_agents[k])] = dislike_sorted[k];
  }
  return out;
}

Assignment location_permutation(const Instance& inst, const Assignment& targets,
                                const PreferenceProfile& reported,
                                double facility) {
  check_reported(inst, reported);
  if (targets.size() != inst.size() || !targets.is_permutation()) {
    throw std::invalid_argument(
        "location_permutation: targets must be a permutation of the locations");
  }
  std::vector<int> like_locs;
  std::vector<int> dislike_locs;
  for (int i = 0; i < inst.size(); ++i) {
    if (reported[static_cast<std::size_t>(i)] == PreferenceType::Like) {
      like_locs.push_back(targets.perm[static_cast<std::size_t>(i)]);
    } else {
      dislike_locs.push_back(targets.perm[static_cast<std::size_t>(i)]);
    }
  }
  return location_permutation_blocks(inst, like_locs, dislike_locs, reported,
                                     facility);
}

std::vector<double> candidate_facilities(const Instance& inst) {
  inst.validate();
  std::vector<double> candidates = inst.positions;
  candidates.push_back(0.0);
  candidates.push_back(inst.segment_length);
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()),
                   candidates.end());
  return candidates;
}

namespace {

// Location indices sorted by coordinate; windows of the Like block are taken
// over this order.
std::vector<int> coordinate_order(const Instance& inst) {
  std::vector<int> order(static_cast<std::size_t>(inst.size()));
  for (int i = 0; i < inst.size(); ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double xa = inst.positions[static_cast<std::size_t>(a)];
    const double xb = inst.positions[static_cast<std::size_t>(b)];
    if (xa != xb) return xa < xb;
    return a < b;
  });
  return order;
}

struct WindowScore {
  double welfare = 0.0;
  int window_start = 0;
};

// Best Like window for one facility. With S(w) the summed distances inside
// the window and T the total, welfare(w) = nL*d + T - 2*S(w); maximizing it
// means minimizing S(w), evaluated in O(1) per window from a prefix sum.
WindowScore best_window_at(const Instance& inst, const std::vector<int>& order,
                           int like_count, double facility) {
  const int n = inst.size();
  std::vector<double> prefix(static_cast<std::size_t>(n) + 1, 0.0);
  for (int k = 0; k < n; ++k) {
    const double coord = inst.positions[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])];
    prefix[static_cast<std::size_t>(k) + 1] =
        prefix[static_cast<std::size_t>(k)] + std::abs(coord - facility);
  }
  const double total = prefix[static_cast<std::size_t>(n)];

  WindowScore best;
  bool first = true;
  for (int w0 = 0; w0 + like_count <= n; ++w0) {
    const double inside = prefix[static_cast<std::size_t>(w0 + like_count)] -
                          prefix[static_cast<std::size_t>(w0)];
    const double welfare =
        static_cast<double>(like_count) * inst.segment_length + total -
        2.0 * inside;
    if (first || welfare > best.welfare) {
      best = {welfare, w0};
      first = false;
    }
  }
  return best;
}

}  // namespace

RelocationScan best_relocation_at(const Instance& inst,
                                  const PreferenceProfile& reported,
                                  double facility) {
  check_reported(inst, reported);
  const auto order = coordinate_order(inst);
  const int like_count = static_cast<int>(
      std::count(reported.begin(), reported.end(), PreferenceType::Like));
  const auto window = best_window_at(inst, order, like_count, facility);

  RelocationScan scan;
  scan.facility = facility;
  scan.window_start = window.window_start;
  scan.welfare = window.welfare;
  for (int k = 0; k < inst.size(); ++k) {
    const int loc = order[static_cast<std::size_t>(k)];
    if (k >= window.window_start && k < window.window_start + like_count) {
      scan.like_locations.push_back(loc);
    } else {
      scan.dislike_locations.push_back(loc);
    }
  }
  return scan;
}

RelocationScan best_relocation(const Instance& inst,
                               const PreferenceProfile& reported,
                               int workers) {
  check_reported(inst, reported);
  const auto candidates = candidate_facilities(inst);
  const auto order = coordinate_order(inst);
  const int like_count = static_cast<int>(
      std::count(reported.begin(), reported.end(), PreferenceType::Like));

  std::vector<WindowScore> per_facility(candidates.size());
  parallel_index_for(
      static_cast<int>(candidates.size()), workers, [&](int k) {
        per_facility[static_cast<std::size_t>(k)] = best_window_at(
            inst, order, like_count, candidates[static_cast<std::size_t>(k)]);
      });

  // Candidates are facility-ascending, so keeping the first strict maximum
  // realizes the smallest-facility-then-leftmost-window tie-break.
  std::size_t best = 0;
  for (std::size_t k = 1; k < per_facility.size(); ++k) {
    if (per_facility[k].welfare > per_facility[best].welfare) best = k;
  }

  RelocationScan scan;
  scan.facility = candidates[best];
  scan.window_start = per_facility[best].window_start;
  scan.welfare = per_facility[best].welfare;
  for (int k = 0; k < inst.size(); ++k) {
    const int loc = order[static_cast<std::size_t>(k)];
    if (k >= scan.window_start && k < scan.window_start + like_count) {
      scan.like_locations.push_back(loc);
    } else {
      scan.dislike_locations.push_back(loc);
    }
  }
  return scan;
}

Outcome central_opt(const Instance& inst, const PreferenceProfile& reported,
                    int workers) {
  const auto scan = best_relocation(inst, reported, workers);
  Outcome outcome;
  outcome.facility = scan.facility;
  outcome.assignment = location_permutation_blocks(
      inst, scan.like_locations, scan.dislike_locations, reported,
      scan.facility);
  return outcome;
}

double naive_opt_location(const Instance& inst,
                          const PreferenceProfile& reported) {
  check_reported(inst, reported);
  const auto candidates = candidate_facilities(inst);
  double best_y = candidates.front();
  double best_welfare = -1.0;
  for (double y : candidates) {
    double welfare = 0.0;
    for (int i = 0; i < inst.size(); ++i) {
      welfare += utility(y, inst.positions[static_cast<std::size_t>(i)],
                         reported[static_cast<std::size_t>(i)],
                         inst.segment_length);
    }
    if (welfare > best_welfare) {
      best_welfare = welfare;
      best_y = y;
    }
  }
  return best_y;
}

std::pair<double, ExchangeTrace> opt_location_then_ttc(
    const Instance& inst, const PreferenceProfile& reported) {
  const auto scan = best_relocation(inst, reported);
  auto trace = ttc(inst, Assignment::identity(inst.size()), scan.facility);
  return {scan.facility, std::move(trace)};
}

RandomizedOutcome random_endpoints(const Instance& inst,
                                   const PreferenceProfile& reported) {
  check_reported(inst, reported);
  (void)reported;  // the lottery ignores the reports
  RandomizedOutcome out;
  out.support.push_back({{0.0, Assignment::identity(inst.size())}, 0.5});
  out.support.push_back(
      {{inst.segment_length, Assignment::identity(inst.size())}, 0.5});
  return out;
}

double expected_welfare(const RandomizedOutcome& outcome,
                        const Instance& inst) {
  double sum = 0.0;
  for (const auto& [point, probability] : outcome.support) {
    sum += probability * social_welfare(point, inst);
  }
  return sum;
}

}  // namespace exchg
