#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "exchg/core.hpp"
#include "exchg/exchange.hpp"

namespace exchg {

enum class MechanismKind {
  CentralOpt,          // welfare-optimal facility plus central relocation
  NaiveOptLocation,    // facility optimal for the positions as they stand
  OptLocationThenTTC,  // facility optimal assuming agents trade afterwards
  RandomEndpoints,     // fair coin over the two segment endpoints
};

// CLI / report tokens: "central-opt", "naive-opt", "opt-ttc",
// "random-endpoints".
std::optional<MechanismKind> parse_mechanism(std::string_view token);
std::string_view mechanism_token(MechanismKind kind);

// Finite-support lottery over outcomes. Expectations are computed exactly
// over the support; nothing is ever sampled outside the CLI demo path.
struct RandomizedOutcome {
  std::vector<std::pair<Outcome, double>> support;
};

// Reassigns a target location multiset within each reported type class:
// Like reporters sorted by distance to the facility (ascending) receive the
// Like-designated locations sorted the same way, Dislike reporters match in
// descending order. Distance ties fall back to the smaller coordinate, then
// the smaller index.
//
// The block overload takes the Like/Dislike location index sets directly and
// throws std::invalid_argument when the Like block size does not match the
// number of Like reporters. The assignment overload derives the blocks from
// each agent's reported type under `targets`.
Assignment location_permutation(const Instance& inst, const Assignment& targets,
                                const PreferenceProfile& reported,
                                double facility);
Assignment location_permutation_blocks(const Instance& inst,
                                       std::span<const int> like_locations,
                                       std::span<const int> dislike_locations,
                                       const PreferenceProfile& reported,
                                       double facility);

// {x_1..x_n} united with {0, d}, deduplicated and sorted ascending. Welfare
// as a function of the facility is piecewise linear with breakpoints at the
// positions, so an optimal facility always sits in this set.
std::vector<double> candidate_facilities(const Instance& inst);

// Best (facility, relocation) pair under a reported profile: facilities range
// over candidate_facilities and the Like reporters take one consecutive
// window of the coordinate-sorted location multiset. O(n^2) candidates, each
// scored in O(1) via prefix sums. Ties resolve to the smallest facility, then
// the leftmost window, identically in serial and parallel runs.
struct RelocationScan {
  double facility = 0.0;
  int window_start = 0;  // offset into the coordinate-sorted location order
  double welfare = 0.0;  // under the reported profile
  std::vector<int> like_locations;     // location indices for Like reporters
  std::vector<int> dislike_locations;  // the rest
};
RelocationScan best_relocation(const Instance& inst,
                               const PreferenceProfile& reported,
                               int workers = 0);
// Same scan restricted to one fixed facility.
RelocationScan best_relocation_at(const Instance& inst,
                                  const PreferenceProfile& reported,
                                  double facility);

// Welfare-optimal central-exchange mechanism: runs best_relocation and turns
// the winning window into an agent-level assignment via location_permutation.
Outcome central_opt(const Instance& inst, const PreferenceProfile& reported,
                    int workers = 0);

// Facility maximizing welfare with every agent kept at its own position,
// under the reported profile. Ties resolve to the smallest facility.
double naive_opt_location(const Instance& inst,
                          const PreferenceProfile& reported);

// Facility chosen by best_relocation under the reported profile (the optimum
// conditioned on agents trading afterwards), followed by a top-trading-cycle
// run from the identity assignment under the true types.
std::pair<double, ExchangeTrace> opt_location_then_ttc(
    const Instance& inst, const PreferenceProfile& reported);

// {(facility 0, identity), (facility d, identity)}, probability 1/2 each,
// independent of the reports.
RandomizedOutcome random_endpoints(const Instance& inst,
                                   const PreferenceProfile& reported);

// Exact expected true-type welfare over the support.
double expected_welfare(const RandomizedOutcome& outcome, const Instance& inst);

}  // namespace exchg
