#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "exchg/core.hpp"
#include "exchg/exchange.hpp"
#include "exchg/mechanisms.hpp"

namespace exchg {

// Factorial enumeration guard for the brute-force oracle.
inline constexpr int kBruteForceMaxAgents = 8;

// Independent optimum: every permutation of the location multiset crossed
// with every candidate facility, scored under the reported profile. Tie-break
// matches central_opt (smallest facility first, then the lexicographically
// smallest permutation). Throws std::invalid_argument above the agent guard.
Outcome brute_force_opt(const Instance& inst, const PreferenceProfile& reported);

// End-to-end evaluation of one mechanism on one reported profile: the
// mechanism placement plus its exchange phase, always scored under the
// instance's true types.
//   CentralOpt          relocation is the mechanism's own, no further trades
//   NaiveOptLocation    facility from the standing positions, then TTC
//   OptLocationThenTTC  exchange-aware facility, then TTC
//   RandomEndpoints     both endpoint support points, each followed by TTC
// `stages` holds per-agent utilities for every recorded stage (deterministic
// kinds record the single final stage; the endpoint lottery records both
// support points before and after TTC). `expected` weights the post-exchange
// stages by their probabilities.
struct PipelineEvaluation {
  std::vector<double> expected;
  std::vector<std::vector<double>> stages;
};
PipelineEvaluation evaluate_pipeline(MechanismKind kind, const Instance& inst,
                                     const PreferenceProfile& reported);

// Exhaustive misreport scan: every agent, its single alternative report, the
// full pipeline re-run under the deviated profile, utilities compared under
// the agent's true type. With two types the scan covers the whole deviation
// space. Randomized mechanisms are compared in expectation and per support
// point; a gain above kEps at any recorded stage is a violation.
AuditReport audit_truthfulness(MechanismKind kind, const Instance& inst);

struct GeneratorConfig {
  int n_min = 1;
  int n_max = 7;
  double segment_length = 8.0;
};

// Deterministic per-trial instance: positions uniform on [0, d], types fair
// coins, agent count uniform over [n_min, n_max]. The stream depends only on
// (seed, trial), never on worker scheduling.
Instance random_instance(std::uint64_t seed, std::uint64_t trial,
                         const GeneratorConfig& config);

// Worst observed optimal-to-achieved welfare quotient over seeded trials.
struct RatioEstimate {
  double worst_ratio = 1.0;
  Instance worst_instance;
  int trials = 0;
  int worst_trial = 0;
  // Trials where the optimum welfare was cross-checked against the
  // brute-force oracle (agent counts within the guard), and how often the
  // oracle won and replaced it. Disagreements should never happen.
  long long oracle_checked = 0;
  long long oracle_disagreements = 0;
};

// OPT welfare (central_opt under the true types, oracle-checked within the
// guard) against the mechanism's exact expected post-exchange welfare on the
// same instance, maximized over `trials` generated instances.
RatioEstimate estimate_ratio(MechanismKind kind, int trials,
                             const GeneratorConfig& config, std::uint64_t seed,
                             int workers = 0);

// Welfare-trace monotonicity over seeded random (instance, start, facility)
// triples, for both the top trading cycle and pairwise swap dynamics.
struct MonotonicityCounterexample {
  int trial = 0;
  Instance instance;
  Assignment start;
  double facility = 0.0;
  bool from_swap_dynamics = false;
};
struct MonotonicityCheck {
  bool ok = true;
  int trials = 0;
  std::optional<MonotonicityCounterexample> counterexample;
};
MonotonicityCheck verify_lemma_monotonicity(int trials, std::uint64_t seed,
                                            const GeneratorConfig& config = {},
                                            int workers = 0);

// One audited violation inside a campaign. Generated trials count from 0;
// an injected built-in instance runs as trial -1.
struct CampaignViolation {
  int trial = 0;
  Violation violation;
};

struct AuditCampaign {
  int trials = 0;  // generated trials, excluding any injected instance
  long long truthful_trials = 0;
  long long violation_trials = 0;
  double max_gain = 0.0;
  long long violations_total = 0;
  std::vector<CampaignViolation> violations;  // capped at kViolationDetailCap
};
inline constexpr int kViolationDetailCap = 100;

AuditCampaign audit_campaign(MechanismKind kind, int trials,
                             const GeneratorConfig& config, std::uint64_t seed,
                             const std::optional<Instance>& injected = {},
                             int workers = 0);

}  // namespace exchg
