#include "exchg/reports.hpp"

#include <cstdio>
#include <sstream>

#include "exchg/json_io.hpp"

namespace exchg {

std::optional<ReportFormat> parse_format(std::string_view token) {
  if (token == "json") return ReportFormat::Json;
  if (token == "csv") return ReportFormat::Csv;
  if (token == "table") return ReportFormat::Table;
  return std::nullopt;
}

std::string format_exact(double value) {
  return nlohmann::json(value).dump();
}

std::string format_metric(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", value);
  return buf;
}

namespace {

nlohmann::ordered_json violation_to_json(const Violation& v) {
  nlohmann::ordered_json out;
  out["agent"] = v.agent;
  out["misreport"] = preference_token(v.misreport);
  out["truthful_utility"] = v.truthful_utility;
  out["deviating_utility"] = v.deviating_utility;
  out["gain"] = v.gain();
  return out;
}

nlohmann::ordered_json header_to_json(const CampaignHeader& header) {
  nlohmann::ordered_json gen;
  gen["trials"] = header.trials;
  gen["n_min"] = header.generator.n_min;
  gen["n_max"] = header.generator.n_max;
  gen["d"] = header.generator.segment_length;
  gen["seed"] = header.seed;
  return gen;
}

// Minimal CSV quoting: wrap in quotes, double any embedded quote.
std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void append_header_csv(std::ostringstream& out, const char* kind,
                       const CampaignHeader& header) {
  out << "field,value\n";
  out << "report," << kind << "\n";
  out << "mechanism," << mechanism_token(header.mechanism) << "\n";
  out << "trials," << header.trials << "\n";
  out << "n_min," << header.generator.n_min << "\n";
  out << "n_max," << header.generator.n_max << "\n";
  out << "d," << format_exact(header.generator.segment_length) << "\n";
  out << "seed," << header.seed << "\n";
  if (header.injected) out << "injected," << *header.injected << "\n";
}

void append_header_table(std::ostringstream& out, const char* kind,
                         const CampaignHeader& header) {
  out << "report           " << kind << "\n";
  out << "mechanism        " << mechanism_token(header.mechanism) << "\n";
  out << "trials           " << header.trials << "\n";
  out << "n range          [" << header.generator.n_min << ", "
      << header.generator.n_max << "]\n";
  out << "d                " << format_metric(header.generator.segment_length)
      << "\n";
  out << "seed             " << header.seed << "\n";
  if (header.injected) out << "injected         " << *header.injected << "\n";
}

}  // namespace

nlohmann::ordered_json audit_report_to_json(const AuditReport& report) {
  nlohmann::ordered_json out;
  out["truthful"] = report.truthful;
  out["max_gain"] = report.max_gain;
  auto violations = nlohmann::ordered_json::array();
  for (const auto& v : report.violations) {
    violations.push_back(violation_to_json(v));
  }
  out["violations"] = std::move(violations);
  return out;
}

std::string audit_report_table(const AuditReport& report) {
  std::ostringstream out;
  out << "truthful   " << (report.truthful ? "yes" : "NO") << "\n";
  out << "max gain   " << format_metric(report.max_gain) << "\n";
  if (!report.violations.empty()) {
    out << "violations (agent, misreport, truthful -> deviating):\n";
    for (const auto& v : report.violations) {
      out << "  agent " << v.agent << "  " << preference_token(v.misreport)
          << "  " << format_metric(v.truthful_utility) << " -> "
          << format_metric(v.deviating_utility) << "  (+"
          << format_metric(v.gain()) << ")\n";
    }
  }
  return out.str();
}

nlohmann::ordered_json ratio_estimate_to_json(const RatioEstimate& estimate) {
  nlohmann::ordered_json out;
  out["worst_ratio"] = estimate.worst_ratio;
  out["trials"] = estimate.trials;
  out["worst_trial"] = estimate.worst_trial;
  out["oracle"] = {{"checked", estimate.oracle_checked},
                   {"disagreements", estimate.oracle_disagreements}};
  out["worst_instance"] = instance_to_json(estimate.worst_instance);
  return out;
}

std::string ratio_estimate_table(const RatioEstimate& estimate) {
  std::ostringstream out;
  out << "worst ratio      " << format_metric(estimate.worst_ratio) << "\n";
  out << "trials           " << estimate.trials << "\n";
  out << "worst trial      " << estimate.worst_trial << "\n";
  out << "oracle checked   " << estimate.oracle_checked << " (disagreements "
      << estimate.oracle_disagreements << ")\n";
  out << "worst instance   " << instance_to_json(estimate.worst_instance).dump()
      << "\n";
  return out.str();
}

nlohmann::ordered_json audit_campaign_to_json(const CampaignHeader& header,
                                              const AuditCampaign& campaign) {
  nlohmann::ordered_json out;
  out["report"] = "audit";
  out["mechanism"] = mechanism_token(header.mechanism);
  out["generator"] = header_to_json(header);
  if (header.injected) out["injected"] = *header.injected;
  out["truthful_trials"] = campaign.truthful_trials;
  out["violation_trials"] = campaign.violation_trials;
  out["violations_total"] = campaign.violations_total;
  out["max_gain"] = campaign.max_gain;
  auto violations = nlohmann::ordered_json::array();
  for (const auto& cv : campaign.violations) {
    auto v = violation_to_json(cv.violation);
    v["trial"] = cv.trial;
    violations.push_back(std::move(v));
  }
  out["violations"] = std::move(violations);
  return out;
}

nlohmann::ordered_json ratio_campaign_to_json(const CampaignHeader& header,
                                              const RatioEstimate& estimate) {
  nlohmann::ordered_json out;
  out["report"] = "ratio";
  out["mechanism"] = mechanism_token(header.mechanism);
  out["generator"] = header_to_json(header);
  out["worst_ratio"] = estimate.worst_ratio;
  out["worst_trial"] = estimate.worst_trial;
  out["oracle"] = {{"checked", estimate.oracle_checked},
                   {"disagreements", estimate.oracle_disagreements}};
  out["worst_instance"] = instance_to_json(estimate.worst_instance);
  return out;
}

std::string render_audit_campaign(const CampaignHeader& header,
                                  const AuditCampaign& campaign,
                                  ReportFormat format) {
  switch (format) {
    case ReportFormat::Json:
      return audit_campaign_to_json(header, campaign).dump(2) + "\n";
    case ReportFormat::Csv: {
      std::ostringstream out;
      append_header_csv(out, "audit", header);
      out << "truthful_trials," << campaign.truthful_trials << "\n";
      out << "violation_trials," << campaign.violation_trials << "\n";
      out << "violations_total," << campaign.violations_total << "\n";
      out << "max_gain," << format_exact(campaign.max_gain) << "\n";
      out << "\ntrial,agent,misreport,truthful_utility,deviating_utility,gain\n";
      for (const auto& cv : campaign.violations) {
        out << cv.trial << "," << cv.violation.agent << ","
            << preference_token(cv.violation.misreport) << ","
            << format_exact(cv.violation.truthful_utility) << ","
            << format_exact(cv.violation.deviating_utility) << ","
            << format_exact(cv.violation.gain()) << "\n";
      }
      return out.str();
    }
    case ReportFormat::Table: {
      std::ostringstream out;
      append_header_table(out, "audit", header);
      out << "truthful trials  " << campaign.truthful_trials << "\n";
      out << "violation trials " << campaign.violation_trials << "\n";
      out << "violations total " << campaign.violations_total << "\n";
      out << "max gain         " << format_metric(campaign.max_gain) << "\n";
      if (!campaign.violations.empty()) {
        out << "violations (trial, agent, misreport, truthful -> deviating):\n";
        for (const auto& cv : campaign.violations) {
          out << "  trial " << cv.trial << "  agent " << cv.violation.agent
              << "  " << preference_token(cv.violation.misreport) << "  "
              << format_metric(cv.violation.truthful_utility) << " -> "
              << format_metric(cv.violation.deviating_utility) << "  (+"
              << format_metric(cv.violation.gain()) << ")\n";
        }
      }
      return out.str();
    }
  }
  return "";
}

std::string render_ratio_campaign(const CampaignHeader& header,
                                  const RatioEstimate& estimate,
                                  ReportFormat format) {
  switch (format) {
    case ReportFormat::Json:
      return ratio_campaign_to_json(header, estimate).dump(2) + "\n";
    case ReportFormat::Csv: {
      std::ostringstream out;
      append_header_csv(out, "ratio", header);
      out << "worst_ratio," << format_exact(estimate.worst_ratio) << "\n";
      out << "worst_trial," << estimate.worst_trial << "\n";
      out << "oracle_checked," << estimate.oracle_checked << "\n";
      out << "oracle_disagreements," << estimate.oracle_disagreements << "\n";
      out << "worst_instance,"
          << csv_quote(instance_to_json(estimate.worst_instance).dump()) << "\n";
      return out.str();
    }
    case ReportFormat::Table: {
      std::ostringstream out;
      append_header_table(out, "ratio", header);
      out << ratio_estimate_table(estimate);
      return out.str();
    }
  }
  return "";
}

}  // namespace exchg
