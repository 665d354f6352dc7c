#include "exchg/audit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "exchg/parallel.hpp"

namespace exchg {

Outcome brute_force_opt(const Instance& inst,
                        const PreferenceProfile& reported) {
  inst.validate();
  if (static_cast<int>(reported.size()) != inst.size()) {
    throw std::invalid_argument(
        "brute_force_opt: reported profile length does not match the instance");
  }
  if (inst.size() > kBruteForceMaxAgents) {
    throw std::invalid_argument(
        "brute_force_opt: instance too large for factorial enumeration");
  }

  const int n = inst.size();
  Outcome best;
  double best_welfare = -1.0;
  bool first = true;

  for (double y : candidate_facilities(inst)) {
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
    do {
      double welfare = 0.0;
      for (int i = 0; i < n; ++i) {
        welfare += utility(
            y, inst.positions[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])],
            reported[static_cast<std::size_t>(i)], inst.segment_length);
      }
      // Strict improvement keeps the first maximum: smallest facility, then
      // the lexicographically smallest permutation.
      if (first || welfare > best_welfare) {
        best_welfare = welfare;
        best.facility = y;
        best.assignment.perm = perm;
        first = false;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return best;
}

namespace {

std::vector<double> true_type_utilities(const Instance& inst,
                                        const Outcome& outcome) {
  std::vector<double> u(static_cast<std::size_t>(inst.size()));
  for (int i = 0; i < inst.size(); ++i) {
    const double loc = inst.positions[static_cast<std::size_t>(
        outcome.assignment.perm[static_cast<std::size_t>(i)])];
    u[static_cast<std::size_t>(i)] =
        utility(outcome.facility, loc, inst.types[static_cast<std::size_t>(i)],
                inst.segment_length);
  }
  return u;
}

}  // namespace

PipelineEvaluation evaluate_pipeline(MechanismKind kind, const Instance& inst,
                                     const PreferenceProfile& reported) {
  PipelineEvaluation eval;
  switch (kind) {
    case MechanismKind::CentralOpt: {
      const Outcome outcome = central_opt(inst, reported);
      eval.expected = true_type_utilities(inst, outcome);
      eval.stages.push_back(eval.expected);
      break;
    }
    case MechanismKind::NaiveOptLocation: {
      const double y = naive_opt_location(inst, reported);
      const auto trace = ttc(inst, Assignment::identity(inst.size()), y);
      eval.expected = true_type_utilities(inst, {y, trace.final_assignment});
      eval.stages.push_back(eval.expected);
      break;
    }
    case MechanismKind::OptLocationThenTTC: {
      const auto [y, trace] = opt_location_then_ttc(inst, reported);
      eval.expected = true_type_utilities(inst, {y, trace.final_assignment});
      eval.stages.push_back(eval.expected);
      break;
    }
    case MechanismKind::RandomEndpoints: {
      const auto lottery = random_endpoints(inst, reported);
      eval.expected.assign(static_cast<std::size_t>(inst.size()), 0.0);
      std::vector<std::vector<double>> post_stages;
      for (const auto& [point, probability] : lottery.support) {
        eval.stages.push_back(true_type_utilities(inst, point));  // pre trade
        const auto trace = ttc(inst, point.assignment, point.facility);
        post_stages.push_back(
            true_type_utilities(inst, {point.facility, trace.final_assignment}));
        for (int i = 0; i < inst.size(); ++i) {
          eval.expected[static_cast<std::size_t>(i)] +=
              probability * post_stages.back()[static_cast<std::size_t>(i)];
        }
      }
      for (auto& stage : post_stages) eval.stages.push_back(std::move(stage));
      break;
    }
  }
  return eval;
}

AuditReport audit_truthfulness(MechanismKind kind, const Instance& inst) {
  inst.validate();
  const PipelineEvaluation truthful = evaluate_pipeline(kind, inst, inst.types);

  AuditReport report;
  for (int agent = 0; agent < inst.size(); ++agent) {
    PreferenceProfile deviated = inst.types;
    const PreferenceType misreport =
        flipped(deviated[static_cast<std::size_t>(agent)]);
    deviated[static_cast<std::size_t>(agent)] = misreport;

    const PipelineEvaluation dev = evaluate_pipeline(kind, inst, deviated);

    // Expected utilities decide the verdict; for randomized mechanisms each
    // recorded stage must hold up on its own as well.
    double best_gain = dev.expected[static_cast<std::size_t>(agent)] -
                       truthful.expected[static_cast<std::size_t>(agent)];
    double truthful_ref = truthful.expected[static_cast<std::size_t>(agent)];
    double deviating_ref = dev.expected[static_cast<std::size_t>(agent)];
    for (std::size_t s = 0; s < dev.stages.size(); ++s) {
      const double gain = dev.stages[s][static_cast<std::size_t>(agent)] -
                          truthful.stages[s][static_cast<std::size_t>(agent)];
      if (gain > best_gain) {
        best_gain = gain;
        truthful_ref = truthful.stages[s][static_cast<std::size_t>(agent)];
        deviating_ref = dev.stages[s][static_cast<std::size_t>(agent)];
      }
    }

    if (best_gain > kEps) {
      report.violations.push_back({agent, misreport, truthful_ref, deviating_ref});
      report.max_gain = std::max(report.max_gain, best_gain);
    }
  }
  report.truthful = report.violations.empty();
  return report;
}

namespace {

std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial),
                    static_cast<std::uint32_t>(trial >> 32), 0x9e3779b9u};
  return std::mt19937_64(seq);
}

Instance draw_instance(std::mt19937_64& rng, const GeneratorConfig& config) {
  if (config.n_min < 1 || config.n_max < config.n_min ||
      !(config.segment_length > 0.0)) {
    throw std::invalid_argument("generator: invalid configuration");
  }
  Instance inst;
  inst.segment_length = config.segment_length;
  const int n =
      std::uniform_int_distribution<int>(config.n_min, config.n_max)(rng);
  inst.positions.reserve(static_cast<std::size_t>(n));
  inst.types.reserve(static_cast<std::size_t>(n));
  std::uniform_real_distribution<double> position(0.0, config.segment_length);
  std::uniform_int_distribution<int> coin(0, 1);
  for (int i = 0; i < n; ++i) inst.positions.push_back(position(rng));
  for (int i = 0; i < n; ++i) {
    inst.types.push_back(coin(rng) == 0 ? PreferenceType::Like
                                        : PreferenceType::Dislike);
  }
  return inst;
}

// Exact expected post-exchange welfare of a mechanism run truthfully.
double achieved_welfare(MechanismKind kind, const Instance& inst,
                        double opt_welfare) {
  switch (kind) {
    case MechanismKind::CentralOpt:
      return opt_welfare;
    case MechanismKind::NaiveOptLocation: {
      const double y = naive_opt_location(inst, inst.types);
      const auto trace = ttc(inst, Assignment::identity(inst.size()), y);
      return social_welfare({y, trace.final_assignment}, inst);
    }
    case MechanismKind::OptLocationThenTTC: {
      const auto [y, trace] = opt_location_then_ttc(inst, inst.types);
      return social_welfare({y, trace.final_assignment}, inst);
    }
    case MechanismKind::RandomEndpoints: {
      double sum = 0.0;
      for (const auto& [point, probability] :
           random_endpoints(inst, inst.types).support) {
        const auto trace = ttc(inst, point.assignment, point.facility);
        sum += probability *
               social_welfare({point.facility, trace.final_assignment}, inst);
      }
      return sum;
    }
  }
  return 0.0;
}

}  // namespace

Instance random_instance(std::uint64_t seed, std::uint64_t trial,
                         const GeneratorConfig& config) {
  auto rng = trial_rng(seed, trial);
  return draw_instance(rng, config);
}

RatioEstimate estimate_ratio(MechanismKind kind, int trials,
                             const GeneratorConfig& config, std::uint64_t seed,
                             int workers) {
  if (trials < 1) {
    throw std::invalid_argument("estimate_ratio: trials must be >= 1");
  }

  struct TrialResult {
    double ratio = 1.0;
    bool oracle_checked = false;
    bool oracle_disagreed = false;
  };
  std::vector<TrialResult> results(static_cast<std::size_t>(trials));

  parallel_index_for(trials, workers, [&](int t) {
    const Instance inst =
        random_instance(seed, static_cast<std::uint64_t>(t), config);
    const Outcome opt = central_opt(inst, inst.types);
    double opt_welfare = social_welfare(opt, inst);

    TrialResult r;
    if (inst.size() <= kBruteForceMaxAgents) {
      r.oracle_checked = true;
      const Outcome oracle = brute_force_opt(inst, inst.types);
      const double oracle_welfare = social_welfare(oracle, inst);
      if (std::abs(oracle_welfare - opt_welfare) > kEps) {
        r.oracle_disagreed = true;
        opt_welfare = std::max(opt_welfare, oracle_welfare);
      }
    }

    const double achieved = achieved_welfare(kind, inst, opt_welfare);
    r.ratio = achieved > kEps
                  ? opt_welfare / achieved
                  : std::numeric_limits<double>::infinity();
    results[static_cast<std::size_t>(t)] = r;
  });

  RatioEstimate estimate;
  estimate.trials = trials;
  estimate.worst_trial = 0;
  estimate.worst_ratio = results[0].ratio;
  for (int t = 0; t < trials; ++t) {
    const auto& r = results[static_cast<std::size_t>(t)];
    estimate.oracle_checked += r.oracle_checked ? 1 : 0;
    estimate.oracle_disagreements += r.oracle_disagreed ? 1 : 0;
    if (r.ratio > estimate.worst_ratio) {
      estimate.worst_ratio = r.ratio;
      estimate.worst_trial = t;
    }
  }
  estimate.worst_instance = random_instance(
      seed, static_cast<std::uint64_t>(estimate.worst_trial), config);
  return estimate;
}

MonotonicityCheck verify_lemma_monotonicity(int trials, std::uint64_t seed,
                                            const GeneratorConfig& config,
                                            int workers) {
  if (trials < 1) {
    throw std::invalid_argument("verify_lemma_monotonicity: trials must be >= 1");
  }

  auto trace_monotone = [](const ExchangeTrace& trace) {
    double prev = trace.initial_welfare;
    for (const auto& step : trace.steps) {
      if (step.welfare_after < prev - kEps) return false;
      prev = step.welfare_after;
    }
    return true;
  };

  struct TrialResult {
    bool ttc_ok = true;
    bool swaps_ok = true;
  };
  std::vector<TrialResult> results(static_cast<std::size_t>(trials));

  parallel_index_for(trials, workers, [&](int t) {
    auto rng = trial_rng(seed, static_cast<std::uint64_t>(t));
    const Instance inst = draw_instance(rng, config);
    Assignment start = Assignment::identity(inst.size());
    std::shuffle(start.perm.begin(), start.perm.end(), rng);
    const double facility = std::uniform_real_distribution<double>(
        0.0, inst.segment_length)(rng);

    results[static_cast<std::size_t>(t)].ttc_ok =
        trace_monotone(ttc(inst, start, facility));
    results[static_cast<std::size_t>(t)].swaps_ok =
        trace_monotone(swap_dynamics(inst, start, facility));
  });

  MonotonicityCheck check;
  check.trials = trials;
  for (int t = 0; t < trials; ++t) {
    const auto& r = results[static_cast<std::size_t>(t)];
    if (r.ttc_ok && r.swaps_ok) continue;
    check.ok = false;
    MonotonicityCounterexample witness;
    witness.trial = t;
    auto rng = trial_rng(seed, static_cast<std::uint64_t>(t));
    witness.instance = draw_instance(rng, config);
    witness.start = Assignment::identity(witness.instance.size());
    std::shuffle(witness.start.perm.begin(), witness.start.perm.end(), rng);
    witness.facility = std::uniform_real_distribution<double>(
        0.0, witness.instance.segment_length)(rng);
    witness.from_swap_dynamics = r.ttc_ok;
    check.counterexample = std::move(witness);
    break;
  }
  return check;
}

AuditCampaign audit_campaign(MechanismKind kind, int trials,
                             const GeneratorConfig& config, std::uint64_t seed,
                             const std::optional<Instance>& injected,
                             int workers) {
  if (trials < 1) {
    throw std::invalid_argument("audit_campaign: trials must be >= 1");
  }

  // Slot 0 holds the injected instance when present; generated trial t sits
  // at slot t + offset. Aggregation walks slots in order, so reports are
  // identical for any worker count.
  const int offset = injected ? 1 : 0;
  const int total = trials + offset;
  std::vector<AuditReport> reports(static_cast<std::size_t>(total));

  parallel_index_for(total, workers, [&](int slot) {
    const Instance inst =
        (injected && slot == 0)
            ? *injected
            : random_instance(seed, static_cast<std::uint64_t>(slot - offset),
                              config);
    reports[static_cast<std::size_t>(slot)] = audit_truthfulness(kind, inst);
  });

  AuditCampaign campaign;
  campaign.trials = trials;
  for (int slot = 0; slot < total; ++slot) {
    const auto& report = reports[static_cast<std::size_t>(slot)];
    const int trial = slot - offset;  // injected instance reports as -1
    if (report.truthful) {
      ++campaign.truthful_trials;
    } else {
      ++campaign.violation_trials;
    }
    campaign.max_gain = std::max(campaign.max_gain, report.max_gain);
    for (const auto& violation : report.violations) {
      ++campaign.violations_total;
      if (static_cast<int>(campaign.violations.size()) < kViolationDetailCap) {
        campaign.violations.push_back({trial, violation});
      }
    }
  }
  return campaign;
}

}  // namespace exchg
