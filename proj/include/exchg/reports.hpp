#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"

#include "exchg/audit.hpp"

namespace exchg {

enum class ReportFormat { Json, Csv, Table };
std::optional<ReportFormat> parse_format(std::string_view token);

// Campaign parameters echoed into every report so a run can be reproduced
// from its output alone. Worker counts are not recorded: reports are
// identical for any pool size.
struct CampaignHeader {
  MechanismKind mechanism = MechanismKind::CentralOpt;
  int trials = 0;
  GeneratorConfig generator;
  std::uint64_t seed = 0;
  std::optional<std::string> injected;  // built-in token run as trial -1
};

// Shortest round-trip rendering, shared by JSON and CSV cells so both carry
// identical numeric values.
std::string format_exact(double value);
// Human-facing rendering: up to 6 significant digits, trailing zeros trimmed.
std::string format_metric(double value);

nlohmann::ordered_json audit_report_to_json(const AuditReport& report);
std::string audit_report_table(const AuditReport& report);

nlohmann::ordered_json ratio_estimate_to_json(const RatioEstimate& estimate);
std::string ratio_estimate_table(const RatioEstimate& estimate);

nlohmann::ordered_json audit_campaign_to_json(const CampaignHeader& header,
                                              const AuditCampaign& campaign);
nlohmann::ordered_json ratio_campaign_to_json(const CampaignHeader& header,
                                              const RatioEstimate& estimate);

// Rendering in the requested format; JSON output is byte-stable for a fixed
// (header, result) pair.
std::string render_audit_campaign(const CampaignHeader& header,
                                  const AuditCampaign& campaign,
                                  ReportFormat format);
std::string render_ratio_campaign(const CampaignHeader& header,
                                  const RatioEstimate& estimate,
                                  ReportFormat format);

}  // namespace exchg
