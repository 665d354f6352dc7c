#include "exchg/core.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace exchg {

std::optional<PreferenceType> parse_preference(std::string_view token) {
  if (token == "L") return PreferenceType::Like;
  if (token == "H") return PreferenceType::Dislike;
  return std::nullopt;
}

std::string_view preference_token(PreferenceType t) {
  return t == PreferenceType::Like ? "L" : "H";
}

PreferenceType flipped(PreferenceType t) {
  return t == PreferenceType::Like ? PreferenceType::Dislike
                                   : PreferenceType::Like;
}

void Instance::validate() const {
  if (!(segment_length > 0.0) || !std::isfinite(segment_length)) {
    throw std::invalid_argument("instance: segment length must be positive");
  }
  if (positions.empty()) {
    throw std::invalid_argument("instance: at least one agent required");
  }
  if (positions.size() != types.size()) {
    throw std::invalid_argument(
        "instance: positions and types must have the same length");
  }
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const double x = positions[i];
    if (!std::isfinite(x) || x < 0.0 || x > segment_length) {
      throw std::invalid_argument("instance: agent " + std::to_string(i) +
                                  " position outside [0, d]");
    }
  }
}

Assignment Assignment::identity(int n) {
  Assignment a;
  a.perm.resize(static_cast<std::size_t>(n));
  std::iota(a.perm.begin(), a.perm.end(), 0);
  return a;
}

bool Assignment::is_permutation() const {
  const int n = size();
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (int v : perm) {
    if (v < 0 || v >= n || seen[static_cast<std::size_t>(v)]) return false;
    seen[static_cast<std::size_t>(v)] = 1;
  }
  return true;
}

double utility(double facility, double location, PreferenceType t,
               double segment_length) {
  if (!(segment_length > 0.0)) {
    throw std::invalid_argument("utility: segment length must be positive");
  }
  if (facility < 0.0 || facility > segment_length || !std::isfinite(facility)) {
    throw std::invalid_argument("utility: facility outside [0, d]");
  }
  if (location < 0.0 || location > segment_length || !std::isfinite(location)) {
    throw std::invalid_argument("utility: location outside [0, d]");
  }
  const double dist = std::abs(location - facility);
  return t == PreferenceType::Like ? segment_length - dist : dist;
}

namespace {

void check_assignment(const Outcome& outcome, const Instance& inst,
                      const PreferenceProfile& types) {
  if (outcome.assignment.size() != inst.size() ||
      static_cast<int>(types.size()) != inst.size()) {
    throw std::invalid_argument(
        "social_welfare: assignment/type length does not match the instance");
  }
  if (!outcome.assignment.is_permutation()) {
    throw std::invalid_argument("social_welfare: assignment is not a permutation");
  }
}

}  // namespace

double social_welfare(const Outcome& outcome, const Instance& inst,
                      const PreferenceProfile& types) {
  check_assignment(outcome, inst, types);
  double sum = 0.0;
  for (int i = 0; i < inst.size(); ++i) {
    const double loc =
        inst.positions[static_cast<std::size_t>(outcome.assignment.perm[i])];
    sum += utility(outcome.facility, loc, types[static_cast<std::size_t>(i)],
                   inst.segment_length);
  }
  return sum;
}

double social_welfare(const Outcome& outcome, const Instance& inst) {
  return social_welfare(outcome, inst, inst.types);
}

double endpoint_utility_sum(double position, PreferenceType t,
                            double segment_length) {
  return utility(0.0, position, t, segment_length) +
         utility(segment_length, position, t, segment_length);
}

}  // namespace exchg
