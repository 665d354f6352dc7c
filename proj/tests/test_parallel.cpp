#include "doctest.h"

#include "exchg/audit.hpp"
#include "exchg/builtin.hpp"
#include "exchg/parallel.hpp"
#include "exchg/reports.hpp"

using namespace exchg;

TEST_CASE("worker resolution clamps to at least one") {
  CHECK(resolve_workers(1) == 1);
  CHECK(resolve_workers(4) == 4);
  CHECK(resolve_workers(0) >= 1);
  CHECK(resolve_workers(-3) >= 1);
}

TEST_CASE("relocation scan agrees between one worker and many") {
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    const Instance inst = random_instance(1234, trial, {1, 7, 8.0});
    const Outcome serial = central_opt(inst, inst.types, 1);
    const Outcome parallel = central_opt(inst, inst.types, 4);
    CHECK(serial.facility == parallel.facility);
    CHECK(serial.assignment == parallel.assignment);
  }

  // A larger market where the candidate scan actually splits.
  const Instance big = random_instance(99, 0, {300, 300, 8.0});
  const Outcome serial = central_opt(big, big.types, 1);
  const Outcome parallel = central_opt(big, big.types, 4);
  CHECK(serial.facility == parallel.facility);
  CHECK(serial.assignment == parallel.assignment);
}

TEST_CASE("campaign reports are byte-identical across pool sizes") {
  const GeneratorConfig config{1, 6, 8.0};
  const CampaignHeader header{MechanismKind::RandomEndpoints, 120, config, 42,
                              std::nullopt};

  const auto audit_serial =
      audit_campaign(MechanismKind::RandomEndpoints, 120, config, 42, {}, 1);
  const auto audit_parallel =
      audit_campaign(MechanismKind::RandomEndpoints, 120, config, 42, {}, 4);
  CHECK(render_audit_campaign(header, audit_serial, ReportFormat::Json) ==
        render_audit_campaign(header, audit_parallel, ReportFormat::Json));

  const auto ratio_serial =
      estimate_ratio(MechanismKind::RandomEndpoints, 120, config, 42, 1);
  const auto ratio_parallel =
      estimate_ratio(MechanismKind::RandomEndpoints, 120, config, 42, 4);
  CHECK(render_ratio_campaign(header, ratio_serial, ReportFormat::Json) ==
        render_ratio_campaign(header, ratio_parallel, ReportFormat::Json));
  CHECK(render_ratio_campaign(header, ratio_serial, ReportFormat::Csv) ==
        render_ratio_campaign(header, ratio_parallel, ReportFormat::Csv));
}

TEST_CASE("violating campaigns stay identical across pool sizes") {
  const GeneratorConfig config{2, 6, 8.0};
  const CampaignHeader header{MechanismKind::OptLocationThenTTC, 150, config,
                              7, std::string("fig2")};
  const auto serial = audit_campaign(MechanismKind::OptLocationThenTTC, 150,
                                     config, 7, fig2_instance(), 1);
  const auto parallel = audit_campaign(MechanismKind::OptLocationThenTTC, 150,
                                       config, 7, fig2_instance(), 4);
  CHECK(render_audit_campaign(header, serial, ReportFormat::Json) ==
        render_audit_campaign(header, parallel, ReportFormat::Json));
  CHECK(render_audit_campaign(header, serial, ReportFormat::Csv) ==
        render_audit_campaign(header, parallel, ReportFormat::Csv));
}

TEST_CASE("monotonicity checking agrees across pool sizes") {
  const auto serial = verify_lemma_monotonicity(150, 3, {1, 7, 8.0}, 1);
  const auto parallel = verify_lemma_monotonicity(150, 3, {1, 7, 8.0}, 4);
  CHECK(serial.ok == parallel.ok);
  CHECK(serial.trials == parallel.trials);
}
