#include <chrono>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "exchg/audit.hpp"
#include "exchg/parallel.hpp"
#include "exchg/reports.hpp"

namespace {

using namespace exchg;
using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start)
      .count();
}

void report_line(const std::string& name, double serial_ms, double parallel_ms,
                 bool identical) {
  std::cout << name << ": serial " << serial_ms << " ms, parallel "
            << parallel_ms << " ms, speedup "
            << (parallel_ms > 0.0 ? serial_ms / parallel_ms : 0.0)
            << (identical ? "  (results identical)" : "  (RESULTS DIFFER)")
            << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Serial reference vs worker-pool timings"};
  int market_size = 4000;
  int campaign_trials = 4000;
  int ratio_trials = 400;
  int workers = 0;
  std::uint64_t seed = 42;
  app.add_option("--market-size", market_size,
                 "agent count for the relocation scan");
  app.add_option("--campaign-trials", campaign_trials,
                 "instances in the audit campaign");
  app.add_option("--ratio-trials", ratio_trials,
                 "instances in the ratio campaign");
  app.add_option("--workers", workers, "pool size (0 = all cores)");
  app.add_option("--seed", seed, "seed shared by both sides");
  CLI11_PARSE(app, argc, argv);

  const int pool = resolve_workers(workers);
  std::cout << "worker pool: " << pool << "\n";

  {
    const Instance market =
        random_instance(seed, 0, {market_size, market_size, 8.0});
    auto t0 = Clock::now();
    const Outcome serial = central_opt(market, market.types, 1);
    const double serial_ms = ms_since(t0);
    t0 = Clock::now();
    const Outcome parallel = central_opt(market, market.types, pool);
    const double parallel_ms = ms_since(t0);
    report_line("relocation scan (n=" + std::to_string(market_size) + ")",
                serial_ms, parallel_ms,
                serial.facility == parallel.facility &&
                    serial.assignment == parallel.assignment);
  }

  {
    const GeneratorConfig config{1, 7, 8.0};
    auto t0 = Clock::now();
    const auto serial = audit_campaign(MechanismKind::CentralOpt,
                                       campaign_trials, config, seed, {}, 1);
    const double serial_ms = ms_since(t0);
    t0 = Clock::now();
    const auto parallel = audit_campaign(MechanismKind::CentralOpt,
                                         campaign_trials, config, seed, {}, pool);
    const double parallel_ms = ms_since(t0);
    CampaignHeader header{MechanismKind::CentralOpt, campaign_trials, config,
                          seed, std::nullopt};
    report_line(
        "audit campaign (" + std::to_string(campaign_trials) + " trials)",
        serial_ms, parallel_ms,
        render_audit_campaign(header, serial, ReportFormat::Json) ==
            render_audit_campaign(header, parallel, ReportFormat::Json));
  }

  {
    const GeneratorConfig config{1, 7, 8.0};
    auto t0 = Clock::now();
    const auto serial = estimate_ratio(MechanismKind::RandomEndpoints,
                                       ratio_trials, config, seed, 1);
    const double serial_ms = ms_since(t0);
    t0 = Clock::now();
    const auto parallel = estimate_ratio(MechanismKind::RandomEndpoints,
                                         ratio_trials, config, seed, pool);
    const double parallel_ms = ms_since(t0);
    CampaignHeader header{MechanismKind::RandomEndpoints, ratio_trials, config,
                          seed, std::nullopt};
    report_line(
        "ratio campaign (" + std::to_string(ratio_trials) + " trials)",
        serial_ms, parallel_ms,
        render_ratio_campaign(header, serial, ReportFormat::Json) ==
            render_ratio_campaign(header, parallel, ReportFormat::Json));
  }

  return 0;
}
