#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "exchg/audit.hpp"
#include "exchg/builtin.hpp"
#include "exchg/exchange.hpp"
#include "exchg/json_io.hpp"
#include "exchg/mechanisms.hpp"
#include "exchg/reports.hpp"

namespace {

using namespace exchg;

// Exit codes: 0 success, 1 replay assertion mismatch, 2 usage error,
// 3 I/O or parse failure.
constexpr int kExitOk = 0;
constexpr int kExitMismatch = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

int workers_from_env(int flag_value) {
  if (const char* env = std::getenv("EXCHG_MECH_WORKERS")) {
    char* end = nullptr;
    const long parsed = std::strtol(env, &end, 10);
    if (end && *end == '\0' && parsed > 0) {
      return static_cast<int>(parsed);
    }
    std::cerr << "warning: ignoring invalid EXCHG_MECH_WORKERS value \"" << env
              << "\"\n";
  }
  return flag_value;
}

std::string agent_label(int index) { return "a" + std::to_string(index + 1); }

std::string describe_instance(const Instance& inst) {
  std::ostringstream out;
  out << "d=" << format_metric(inst.segment_length) << ", agents";
  for (int i = 0; i < inst.size(); ++i) {
    out << " " << agent_label(i) << ":" << preference_token(inst.types[i])
        << "@" << format_metric(inst.positions[i]);
  }
  return out.str();
}

std::string describe_trades(const ExchangeTrace& trace) {
  if (trace.steps.empty()) return "none";
  std::ostringstream out;
  for (std::size_t s = 0; s < trace.steps.size(); ++s) {
    if (s) out << " ";
    out << "(";
    for (std::size_t k = 0; k < trace.steps[s].cycle.size(); ++k) {
      if (k) out << " ";
      out << agent_label(trace.steps[s].cycle[k]);
    }
    out << ")";
  }
  return out.str();
}

// Golden checks accumulated per replay run.
class ReplayChecks {
 public:
  void expect(const std::string& what, double actual, double expected) {
    const bool ok = std::abs(actual - expected) <= kEps;
    std::cout << "  " << what << ": " << format_metric(actual) << "  (expect "
              << format_metric(expected) << ")  " << (ok ? "ok" : "MISMATCH")
              << "\n";
    failed_ += ok ? 0 : 1;
  }
  void expect_flag(const std::string& what, bool actual, bool expected) {
    const bool ok = actual == expected;
    std::cout << "  " << what << ": " << (actual ? "yes" : "no")
              << "  (expect " << (expected ? "yes" : "no") << ")  "
              << (ok ? "ok" : "MISMATCH") << "\n";
    failed_ += ok ? 0 : 1;
  }
  int failed() const { return failed_; }

 private:
  int failed_ = 0;
};

int cmd_replay_fig1() {
  const Instance inst = fig1_instance();
  std::cout << "replay fig1: " << describe_instance(inst) << "\n";
  ReplayChecks checks;

  std::cout << "truthful reports\n";
  const double y_truthful = naive_opt_location(inst, inst.types);
  checks.expect("facility for the standing positions", y_truthful, 5.0);
  const auto trace_truthful =
      ttc(inst, Assignment::identity(inst.size()), y_truthful);
  std::cout << "  trades: " << describe_trades(trace_truthful) << "\n";
  const double loc_truthful =
      inst.positions[trace_truthful.final_assignment.perm[3]];
  checks.expect("agent a4 distance after trading",
                std::abs(loc_truthful - y_truthful), 5.0);

  std::cout << "agent a4 reports L\n";
  PreferenceProfile misreport = inst.types;
  misreport[3] = PreferenceType::Like;
  const double y_dev = naive_opt_location(inst, misreport);
  checks.expect("facility for the standing positions", y_dev, 7.0);
  const auto trace_dev = ttc(inst, Assignment::identity(inst.size()), y_dev);
  std::cout << "  trades: " << describe_trades(trace_dev) << "\n";
  const double loc_dev = inst.positions[trace_dev.final_assignment.perm[3]];
  checks.expect("agent a4 distance after trading", std::abs(loc_dev - y_dev),
                7.0);

  std::cout << "central relocation optimum\n";
  const Outcome opt = central_opt(inst, inst.types);
  checks.expect("facility", opt.facility, 8.0);
  std::cout << "  relocation:";
  for (int i = 0; i < inst.size(); ++i) {
    std::cout << " " << agent_label(i) << "->"
              << format_metric(inst.positions[opt.assignment.perm[i]]);
  }
  std::cout << "\n";
  const std::vector<double> expected_locations{5.0, 0.0, 7.0, 1.0, 8.0};
  for (int i = 0; i < inst.size(); ++i) {
    checks.expect("agent " + agent_label(i) + " relocated to",
                  inst.positions[opt.assignment.perm[i]],
                  expected_locations[i]);
  }
  checks.expect("welfare", social_welfare(opt, inst), 35.0);

  std::cout << (checks.failed() ? "replay fig1: FAILED" : "replay fig1: ok")
            << "\n";
  return checks.failed() ? kExitMismatch : kExitOk;
}

int cmd_replay_fig2() {
  const Instance inst = fig2_instance();
  std::cout << "replay fig2: " << describe_instance(inst) << "\n";
  ReplayChecks checks;

  std::cout << "truthful reports\n";
  const auto [y_truthful, trace_truthful] =
      opt_location_then_ttc(inst, inst.types);
  checks.expect("exchange-aware facility", y_truthful, 0.0);
  std::cout << "  trades: " << describe_trades(trace_truthful) << "\n";
  const double u_truthful =
      utility(y_truthful, inst.positions[trace_truthful.final_assignment.perm[3]],
              inst.types[3], inst.segment_length);
  checks.expect("agent a4 utility", u_truthful, 6.5);

  std::cout << "agent a4 reports L\n";
  PreferenceProfile misreport = inst.types;
  misreport[3] = PreferenceType::Like;
  const auto [y_dev, trace_dev] = opt_location_then_ttc(inst, misreport);
  checks.expect("exchange-aware facility", y_dev, 8.0);
  std::cout << "  trades: " << describe_trades(trace_dev) << "\n";
  const double u_dev =
      utility(y_dev, inst.positions[trace_dev.final_assignment.perm[3]],
              inst.types[3], inst.segment_length);
  checks.expect("agent a4 utility", u_dev, 7.0);

  std::cout << "truthfulness audit (opt-ttc)\n";
  const auto report =
      audit_truthfulness(MechanismKind::OptLocationThenTTC, inst);
  checks.expect_flag("truthful", report.truthful, false);
  checks.expect("max gain", report.max_gain, 0.5);

  std::cout << (checks.failed() ? "replay fig2: FAILED" : "replay fig2: ok")
            << "\n";
  return checks.failed() ? kExitMismatch : kExitOk;
}

nlohmann::ordered_json deterministic_run_json(const Instance& inst,
                                              double facility,
                                              const Assignment& assignment,
                                              const ExchangeTrace* trace) {
  nlohmann::ordered_json out;
  out["facility"] = facility;
  if (trace) out["trades"] = trace_to_json(*trace);
  out["assignment"] = assignment.perm;
  auto held = nlohmann::ordered_json::array();
  auto utilities = nlohmann::ordered_json::array();
  for (int i = 0; i < inst.size(); ++i) {
    const double loc = inst.positions[assignment.perm[i]];
    held.push_back(loc);
    utilities.push_back(
        utility(facility, loc, inst.types[i], inst.segment_length));
  }
  out["held_locations"] = std::move(held);
  out["utilities"] = std::move(utilities);
  out["welfare"] = social_welfare({facility, assignment}, inst);
  return out;
}

void print_deterministic_run(const Instance& inst, double facility,
                             const Assignment& assignment,
                             const ExchangeTrace* trace) {
  std::cout << "facility: " << format_metric(facility) << "\n";
  if (trace) {
    std::cout << "trades: " << describe_trades(*trace) << "\n";
  }
  std::cout << "assignment (agent: held location, utility):\n";
  for (int i = 0; i < inst.size(); ++i) {
    const double loc = inst.positions[assignment.perm[i]];
    std::cout << "  " << agent_label(i) << ": "
              << preference_token(inst.types[i]) << "@"
              << format_metric(inst.positions[i]) << " -> "
              << format_metric(loc) << "  utility "
              << format_metric(
                     utility(facility, loc, inst.types[i], inst.segment_length))
              << "\n";
  }
  std::cout << "welfare: "
            << format_metric(social_welfare({facility, assignment}, inst))
            << "\n";
}

int cmd_run(const std::string& mechanism_name, const std::string& path,
            std::optional<double> facility_override,
            std::optional<std::uint64_t> sample_seed,
            const std::string& format_name) {
  const auto kind = parse_mechanism(mechanism_name);
  if (!kind) {
    std::cerr << "error: unknown mechanism \"" << mechanism_name << "\"\n";
    return kExitUsage;
  }
  const bool as_json = format_name == "json";
  if (!as_json && format_name != "table") {
    std::cerr << "error: run supports --format table or json\n";
    return kExitUsage;
  }
  const Instance inst = load_instance_file(path);
  if (facility_override &&
      (*facility_override < 0.0 || *facility_override > inst.segment_length)) {
    std::cerr << "error: --facility must lie in [0, d]\n";
    return kExitUsage;
  }

  nlohmann::ordered_json report;
  report["mechanism"] = mechanism_name;
  report["instance"] = instance_to_json(inst);
  if (!as_json) {
    std::cout << "mechanism: " << mechanism_name << "\n";
    std::cout << "instance: " << describe_instance(inst) << "\n";
  }

  switch (*kind) {
    case MechanismKind::CentralOpt: {
      Outcome outcome;
      if (facility_override) {
        const auto scan = best_relocation_at(inst, inst.types, *facility_override);
        outcome.facility = scan.facility;
        outcome.assignment = location_permutation_blocks(
            inst, scan.like_locations, scan.dislike_locations, inst.types,
            scan.facility);
      } else {
        outcome = central_opt(inst, inst.types);
      }
      if (as_json) {
        report.update(
            deterministic_run_json(inst, outcome.facility, outcome.assignment,
                                   nullptr));
      } else {
        print_deterministic_run(inst, outcome.facility, outcome.assignment,
                                nullptr);
      }
      break;
    }
    case MechanismKind::NaiveOptLocation:
    case MechanismKind::OptLocationThenTTC: {
      double y;
      if (facility_override) {
        y = *facility_override;
      } else if (*kind == MechanismKind::NaiveOptLocation) {
        y = naive_opt_location(inst, inst.types);
      } else {
        y = opt_location_then_ttc(inst, inst.types).first;
      }
      const auto trace = ttc(inst, Assignment::identity(inst.size()), y);
      if (as_json) {
        report.update(
            deterministic_run_json(inst, y, trace.final_assignment, &trace));
      } else {
        print_deterministic_run(inst, y, trace.final_assignment, &trace);
      }
      break;
    }
    case MechanismKind::RandomEndpoints: {
      RandomizedOutcome lottery;
      if (facility_override) {
        lottery.support.push_back(
            {{*facility_override, Assignment::identity(inst.size())}, 1.0});
      } else {
        lottery = random_endpoints(inst, inst.types);
      }
      double expected_pre = 0.0;
      double expected_post = 0.0;
      auto support_json = nlohmann::ordered_json::array();
      for (const auto& [point, probability] : lottery.support) {
        const double pre = social_welfare(point, inst);
        const auto trace = ttc(inst, point.assignment, point.facility);
        const double post =
            social_welfare({point.facility, trace.final_assignment}, inst);
        expected_pre += probability * pre;
        expected_post += probability * post;
        if (as_json) {
          nlohmann::ordered_json entry;
          entry["facility"] = point.facility;
          entry["probability"] = probability;
          entry["trades"] = trace_to_json(trace);
          entry["welfare_before"] = pre;
          entry["welfare_after"] = post;
          support_json.push_back(std::move(entry));
        } else {
          std::cout << "support point: facility "
                    << format_metric(point.facility) << "  probability "
                    << format_metric(probability) << "\n";
          std::cout << "  trades: " << describe_trades(trace) << "\n";
          std::cout << "  welfare before trading: " << format_metric(pre)
                    << ", after: " << format_metric(post) << "\n";
        }
      }
      if (as_json) {
        report["support"] = std::move(support_json);
        report["expected_welfare_before"] = expected_pre;
        report["expected_welfare_after"] = expected_post;
      } else {
        std::cout << "expected welfare before trading: "
                  << format_metric(expected_pre) << "\n";
        std::cout << "expected welfare after trading: "
                  << format_metric(expected_post) << "\n";
      }
      if (sample_seed) {
        std::mt19937_64 rng(*sample_seed);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const double roll = unit(rng);
        double acc = 0.0;
        for (const auto& [point, probability] : lottery.support) {
          acc += probability;
          if (roll <= acc) {
            if (as_json) {
              report["sampled_facility"] = point.facility;
            } else {
              std::cout << "sampled facility (seed " << *sample_seed
                        << "): " << format_metric(point.facility) << "\n";
            }
            break;
          }
        }
      }
      break;
    }
  }
  if (as_json) std::cout << report.dump(2) << "\n";
  return kExitOk;
}

int cmd_audit(const std::string& mechanism_name, int trials, int n_min,
              int n_max, double d, std::uint64_t seed, bool ratio_mode,
              const std::string& format_name, const std::string& out_path,
              const std::string& inject, int workers) {
  const auto kind = parse_mechanism(mechanism_name);
  if (!kind) {
    std::cerr << "error: unknown mechanism \"" << mechanism_name << "\"\n";
    return kExitUsage;
  }
  const auto format = parse_format(format_name);
  if (!format) {
    std::cerr << "error: unknown format \"" << format_name << "\"\n";
    return kExitUsage;
  }
  if (trials < 1 || n_min < 1 || n_max < n_min || !(d > 0.0)) {
    std::cerr << "error: invalid campaign configuration\n";
    return kExitUsage;
  }
  std::optional<Instance> injected;
  if (!inject.empty()) {
    injected = builtin_instance(inject);
    if (!injected) {
      std::cerr << "error: unknown built-in instance \"" << inject << "\"\n";
      return kExitUsage;
    }
    if (ratio_mode) {
      std::cerr << "error: --inject applies to audit mode only\n";
      return kExitUsage;
    }
  }

  const GeneratorConfig config{n_min, n_max, d};
  CampaignHeader header;
  header.mechanism = *kind;
  header.trials = trials;
  header.generator = config;
  header.seed = seed;
  if (injected) header.injected = inject;

  std::string rendered;
  if (ratio_mode) {
    const auto estimate = estimate_ratio(*kind, trials, config, seed, workers);
    rendered = render_ratio_campaign(header, estimate, *format);
  } else {
    const auto campaign =
        audit_campaign(*kind, trials, config, seed, injected, workers);
    rendered = render_audit_campaign(header, campaign, *format);
  }

  if (out_path.empty()) {
    std::cout << rendered;
  } else {
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) {
      std::cerr << "error: cannot open output file: " << out_path << "\n";
      return kExitIo;
    }
    out << rendered;
    if (!out) {
      std::cerr << "error: failed writing output file: " << out_path << "\n";
      return kExitIo;
    }
  }
  return kExitOk;
}

int cmd_generate(int n, double d, std::uint64_t seed,
                 const std::string& out_path) {
  if (n < 1 || !(d > 0.0)) {
    std::cerr << "error: need n >= 1 and d > 0\n";
    return kExitUsage;
  }
  const Instance inst = random_instance(seed, 0, {n, n, d});
  save_instance_file(inst, out_path);
  std::cout << "wrote " << out_path << " (" << n << " agents, d "
            << format_metric(d) << ", seed " << seed << ")\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Facility location games with tradeable agent locations: "
               "mechanisms, exchange procedures, and truthfulness audits"};
  app.require_subcommand(1);

  std::string figure;
  auto* replay = app.add_subcommand(
      "replay", "Re-run a bundled walkthrough instance and check its numbers");
  replay->add_option("--figure", figure, "fig1 or fig2")->required();

  std::string mechanism;
  std::string instance_path;
  double facility = 0.0;
  std::uint64_t sample_seed = 0;
  std::string run_format = "table";
  auto* run = app.add_subcommand("run", "Run one mechanism on an instance file");
  run->add_option("--mechanism", mechanism,
                  "central-opt | naive-opt | opt-ttc | random-endpoints")
      ->required();
  run->add_option("--instance", instance_path, "instance JSON path")->required();
  auto* facility_opt =
      run->add_option("--facility", facility, "override the facility location");
  auto* sample_opt = run->add_option(
      "--sample-seed", sample_seed,
      "also draw one support point of a randomized mechanism");
  run->add_option("--format", run_format, "table | json");

  std::string audit_mechanism;
  int trials = 1000;
  int n_min = 1;
  int n_max = 7;
  double d = 8.0;
  std::uint64_t seed = 42;
  bool ratio_mode = false;
  std::string format_name = "table";
  std::string out_path;
  std::string inject;
  int workers = 0;
  auto* audit = app.add_subcommand(
      "audit", "Seeded truthfulness or approximation-ratio campaign");
  audit->add_option("--mechanism", audit_mechanism, "mechanism token")->required();
  audit->add_option("--trials", trials, "number of generated instances");
  audit->add_option("--n-min", n_min, "smallest agent count");
  audit->add_option("--n-max", n_max, "largest agent count");
  audit->add_option("--d", d, "segment length");
  audit->add_option("--seed", seed, "campaign seed");
  audit->add_flag("--ratio", ratio_mode,
                  "estimate the worst welfare ratio instead of auditing");
  audit->add_option("--format", format_name, "json | csv | table");
  audit->add_option("--out", out_path, "write the report to a file");
  audit->add_option("--inject", inject,
                    "prepend a built-in instance (fig1 or fig2) as trial -1");
  audit->add_option("--workers", workers,
                    "worker pool size (0 = all cores); the EXCHG_MECH_WORKERS "
                    "environment variable takes precedence");

  int gen_n = 0;
  double gen_d = 8.0;
  std::uint64_t gen_seed = 42;
  std::string gen_out;
  auto* generate =
      app.add_subcommand("generate", "Write a random instance JSON file");
  generate->add_option("--n", gen_n, "agent count")->required();
  generate->add_option("--d", gen_d, "segment length");
  generate->add_option("--seed", gen_seed, "generator seed");
  generate->add_option("--out", gen_out, "output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (replay->parsed()) {
      if (figure == "fig1") return cmd_replay_fig1();
      if (figure == "fig2") return cmd_replay_fig2();
      std::cerr << "error: unknown figure \"" << figure << "\"\n";
      return kExitUsage;
    }
    if (run->parsed()) {
      return cmd_run(mechanism, instance_path,
                     facility_opt->count() ? std::optional<double>(facility)
                                           : std::nullopt,
                     sample_opt->count()
                         ? std::optional<std::uint64_t>(sample_seed)
                         : std::nullopt,
                     run_format);
    }
    if (audit->parsed()) {
      return cmd_audit(audit_mechanism, trials, n_min, n_max, d, seed,
                       ratio_mode, format_name, out_path, inject,
                       workers_from_env(workers));
    }
    if (generate->parsed()) {
      return cmd_generate(gen_n, gen_d, gen_seed, gen_out);
    }
  } catch (const nlohmann::json::parse_error& e) {
    std::cerr << "error: malformed JSON: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitUsage;
}
