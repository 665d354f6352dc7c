#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"

#include "exchg/builtin.hpp"
#include "exchg/exchange.hpp"

using namespace exchg;

namespace {

// Independent maximum over every permutation at a fixed facility.
double max_welfare_at(const Instance& inst, double facility) {
  std::vector<int> perm(inst.positions.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::sort(perm.begin(), perm.end());
  double best = -1.0;
  do {
    best = std::max(best, social_welfare({facility, {perm}}, inst));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

Instance random_case(std::mt19937_64& rng, int n_max = 7) {
  Instance inst;
  inst.segment_length = 8.0;
  const int n = std::uniform_int_distribution<int>(1, n_max)(rng);
  std::uniform_real_distribution<double> coord(0.0, 8.0);
  std::uniform_int_distribution<int> coin(0, 1);
  for (int i = 0; i < n; ++i) {
    inst.positions.push_back(coord(rng));
    inst.types.push_back(coin(rng) ? PreferenceType::Like
                                   : PreferenceType::Dislike);
  }
  return inst;
}

}  // namespace

TEST_CASE("ttc leaves fig2 untouched at facility 0") {
  const Instance inst = fig2_instance();
  const auto trace = ttc(inst, Assignment::identity(5), 0.0);
  CHECK(trace.steps.empty());
  CHECK(trace.final_assignment == Assignment::identity(5));
  CHECK(trace.initial_welfare == doctest::Approx(34.5));
}

TEST_CASE("ttc trades on fig2 at facility 8") {
  const Instance inst = fig2_instance();
  const auto trace = ttc(inst, Assignment::identity(5), 8.0);

  // Agents 0 and 4 swap first, then agents 1 and 3.
  REQUIRE(trace.steps.size() == 2);
  CHECK(trace.steps[0].cycle == std::vector<int>{0, 4});
  CHECK(trace.steps[1].cycle == std::vector<int>{1, 3});
  CHECK(trace.initial_welfare == doctest::Approx(5.5));
  CHECK(trace.steps[0].welfare_after == doctest::Approx(21.5));
  CHECK(trace.steps[1].welfare_after == doctest::Approx(32.5));

  // Agent 3 ends at coordinate 1: utility 7 for a Dislike type.
  const int loc = trace.final_assignment.perm[3];
  CHECK(inst.positions[loc] == doctest::Approx(1.0));
  CHECK(utility(8.0, inst.positions[loc], inst.types[3], 8.0) ==
        doctest::Approx(7.0));
}

TEST_CASE("ttc trades agent 4 down to the far end on fig1") {
  const Instance inst = fig1_instance();
  const auto trace = ttc(inst, Assignment::identity(5), 5.0);
  REQUIRE(trace.steps.size() == 1);
  CHECK(trace.steps[0].cycle == std::vector<int>{0, 3});
  CHECK(trace.steps[0].welfare_after == doctest::Approx(28.0));
  CHECK(inst.positions[trace.final_assignment.perm[3]] ==
        doctest::Approx(0.0));
}

TEST_CASE("ttc with a single agent is a no-op") {
  const Instance inst{8.0, {3.0}, {PreferenceType::Like}};
  for (double y : {0.0, 3.0, 8.0}) {
    const auto trace = ttc(inst, Assignment::identity(1), y);
    CHECK(trace.steps.empty());
    CHECK(trace.final_assignment == Assignment::identity(1));
  }
}

TEST_CASE("first mutually beneficial swap is found in scan order") {
  const Instance inst = fig1_instance();
  // At facility 5 both (0,1) and (0,3) gain; the scan returns the
  // lexicographically first pair.
  const auto pair = beneficial_swap_exists(inst, Assignment::identity(5), 5.0);
  REQUIRE(pair.has_value());
  CHECK(pair->first == 0);
  CHECK(pair->second == 1);
}

TEST_CASE("no beneficial swap on the fig1 relocation optimum") {
  const Instance inst = fig1_instance();
  // Facility 8 with agents relocated to 5, 0, 7, 1, 8.
  CHECK_FALSE(
      beneficial_swap_exists(inst, {{2, 0, 3, 1, 4}}, 8.0).has_value());
}

TEST_CASE("same-type populations never swap") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> coord(0.0, 8.0);
  for (int k = 0; k < 100; ++k) {
    Instance inst;
    inst.segment_length = 8.0;
    const int n = std::uniform_int_distribution<int>(2, 7)(rng);
    const PreferenceType t =
        k % 2 ? PreferenceType::Like : PreferenceType::Dislike;
    for (int i = 0; i < n; ++i) {
      inst.positions.push_back(coord(rng));
      inst.types.push_back(t);
    }
    Assignment start = Assignment::identity(n);
    std::shuffle(start.perm.begin(), start.perm.end(), rng);
    CHECK_FALSE(beneficial_swap_exists(inst, start, coord(rng)).has_value());
  }
}

TEST_CASE("swap dynamics on fig1 reaches the fixed-facility optimum") {
  const Instance inst = fig1_instance();
  const auto trace = swap_dynamics(inst, Assignment::identity(5), 5.0);

  REQUIRE(trace.steps.size() == 2);
  CHECK(trace.steps[0].cycle == std::vector<int>{0, 1});
  CHECK(trace.steps[0].welfare_after == doctest::Approx(24.0));
  CHECK(trace.steps[1].cycle == std::vector<int>{0, 3});
  CHECK(trace.steps[1].welfare_after == doctest::Approx(28.0));

  CHECK_FALSE(
      beneficial_swap_exists(inst, trace.final_assignment, 5.0).has_value());
  const double final_welfare =
      social_welfare({5.0, trace.final_assignment}, inst);
  CHECK(final_welfare >= trace.initial_welfare);
  CHECK(final_welfare == doctest::Approx(max_welfare_at(inst, 5.0)));
}

TEST_CASE("swap dynamics is a no-op on stable starts") {
  const Instance pair{8.0, {0.0, 8.0},
                      {PreferenceType::Like, PreferenceType::Dislike}};
  const auto trace = swap_dynamics(pair, Assignment::identity(2), 0.0);
  CHECK(trace.steps.empty());
  CHECK(trace.final_assignment == Assignment::identity(2));
}

TEST_CASE("a single opposite-type swap gains exactly twice the distance gap") {
  const Instance inst{1.0, {0.0, 1.0},
                      {PreferenceType::Like, PreferenceType::Dislike}};
  const auto trace = swap_dynamics(inst, Assignment::identity(2), 1.0);
  REQUIRE(trace.steps.size() == 1);
  CHECK(trace.steps[0].cycle == std::vector<int>{0, 1});
  CHECK(trace.steps[0].welfare_after - trace.initial_welfare ==
        doctest::Approx(2.0));
}

TEST_CASE("executed swaps match the pairwise welfare identity") {
  std::mt19937_64 rng(555);
  std::uniform_real_distribution<double> coord(0.0, 8.0);
  for (int k = 0; k < 200; ++k) {
    const Instance inst = random_case(rng);
    const int n = inst.size();
    Assignment start = Assignment::identity(n);
    std::shuffle(start.perm.begin(), start.perm.end(), rng);
    const double y = coord(rng);

    Assignment current = start;
    double welfare = social_welfare({y, current}, inst);
    const auto trace = swap_dynamics(inst, start, y);
    for (const auto& step : trace.steps) {
      REQUIRE(step.cycle.size() == 2);
      const int i = step.cycle[0];
      const int j = step.cycle[1];
      // One Like and one Dislike agent; the Like agent's held location is a.
      REQUIRE(inst.types[i] != inst.types[j]);
      const bool i_lik = inst.types[i] == PreferenceType::Like;
      const double a = inst.positions[current.perm[i_lik ? i : j]];
      const double b = inst.positions[current.perm[i_lik ? j : i]];
      const double predicted = 2.0 * (std::abs(a - y) - std::abs(b - y));
      CHECK(predicted > 0.0);
      CHECK(step.welfare_after - welfare ==
            doctest::Approx(predicted).epsilon(1e-9));
      std::swap(current.perm[i], current.perm[j]);
      welfare = step.welfare_after;
    }
  }
}

TEST_CASE("ttc properties over random markets") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> coord(0.0, 8.0);
  for (int k = 0; k < 300; ++k) {
    const Instance inst = random_case(rng);
    const int n = inst.size();
    Assignment start = Assignment::identity(n);
    std::shuffle(start.perm.begin(), start.perm.end(), rng);
    const double y = coord(rng);

    const auto trace = ttc(inst, start, y);
    REQUIRE(trace.final_assignment.is_permutation());

    // Individual rationality: nobody ends worse than they started.
    for (int i = 0; i < n; ++i) {
      const double before =
          utility(y, inst.positions[start.perm[i]], inst.types[i], 8.0);
      const double after = utility(
          y, inst.positions[trace.final_assignment.perm[i]], inst.types[i], 8.0);
      CHECK(after >= before - 1e-12);
    }

    // Non-decreasing welfare along the trace, strictly so per executed trade.
    double prev = trace.initial_welfare;
    for (const auto& step : trace.steps) {
      CHECK(step.welfare_after > prev);
      prev = step.welfare_after;
    }

    // Traded agents leave the market, so each appears at most once.
    std::vector<int> seen(n, 0);
    for (const auto& step : trace.steps) {
      for (int agent : step.cycle) {
        CHECK(seen[agent] == 0);
        seen[agent] += 1;
      }
    }

    // Core stability: no pair can mutually improve on the TTC outcome.
    CHECK_FALSE(
        beneficial_swap_exists(inst, trace.final_assignment, y).has_value());

    // Deterministic replay.
    const auto again = ttc(inst, start, y);
    CHECK(again.final_assignment == trace.final_assignment);
    REQUIRE(again.steps.size() == trace.steps.size());
    for (std::size_t s = 0; s < trace.steps.size(); ++s) {
      CHECK(again.steps[s].cycle == trace.steps[s].cycle);
      CHECK(again.steps[s].welfare_after == trace.steps[s].welfare_after);
    }
  }
}

TEST_CASE("swap dynamics terminates at a swap-free assignment") {
  std::mt19937_64 rng(9000);
  std::uniform_real_distribution<double> coord(0.0, 8.0);
  for (int k = 0; k < 200; ++k) {
    const Instance inst = random_case(rng);
    Assignment start = Assignment::identity(inst.size());
    std::shuffle(start.perm.begin(), start.perm.end(), rng);
    const double y = coord(rng);

    const auto trace = swap_dynamics(inst, start, y);
    CHECK_FALSE(
        beneficial_swap_exists(inst, trace.final_assignment, y).has_value());

    double prev = trace.initial_welfare;
    for (const auto& step : trace.steps) {
      CHECK(step.welfare_after > prev);
      prev = step.welfare_after;
    }
  }
}
