#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "exchg/core.hpp"

namespace exchg {

// One executed trade: the agents on the cycle, listed from the smallest
// member following the pointing order, and the true-type social welfare once
// the trade has been applied.
struct TradeEvent {
  std::vector<int> cycle;
  double welfare_after = 0.0;
};

// Welfare history of an exchange run. Welfare values are non-decreasing from
// initial_welfare. Top-trading-cycle traces also visit each agent at most
// once, since traded agents leave the market; swap dynamics may revisit.
struct ExchangeTrace {
  std::vector<TradeEvent> steps;
  double initial_welfare = 0.0;
  Assignment final_assignment;
};

// Classical top trading cycle over agent-held locations, always driven by the
// instance's true types. Each remaining agent points at the owner of its most
// preferred remaining location (Like: closest to the facility, Dislike:
// farthest); every cycle trades and leaves; self-pointers keep their location
// and produce no trade event. Ties in preference resolve to the agent's own
// held location first, then the smaller coordinate, then the smaller owner
// index, so runs are reproducible and no zero-gain trade ever executes.
ExchangeTrace ttc(const Instance& inst, const Assignment& start,
                  double facility);

// First pair (i, j), scanned lexicographically (lowest i, then lowest j),
// where both agents strictly gain by swapping their held locations under
// their true types. Gains within kEps count as ties, not improvements.
std::optional<std::pair<int, int>> beneficial_swap_exists(
    const Instance& inst, const Assignment& assignment, double facility);

// Applies beneficial_swap_exists repeatedly until no pair remains. Each swap
// strictly raises welfare, so this terminates.
ExchangeTrace swap_dynamics(const Instance& inst, const Assignment& start,
                            double facility);

}  // namespace exchg
