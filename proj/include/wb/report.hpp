// Deterministic JSON reports.  Every builder keeps a fixed key insertion
// order and draws no wall-clock or host state, so identical configuration
// and seed produce byte-identical output.
#pragma once

#include <string>

#include <json.hpp>

#include "wb/attacks.hpp"
#include "wb/config.hpp"
#include "wb/cost.hpp"
#include "wb/evaluate.hpp"

namespace wb {

using Json = nlohmann::ordered_json;

Json suite_report(const SuiteParams& suite);
Json session_summary(const std::string& protocol_id, const SessionResult& session);
Json attack_report(const AttackOutcome& outcome);
Json pfs_report(const std::string& protocol_id, const PfsOutcome& outcome);
Json matrix_report(const EvaluationMatrix& matrix);
Json cost_report(const CostTable& table, const UnitTable& units);

// The whole workbench pass: honest runs, every attack, the criteria matrix,
// the forward-secrecy experiments, and the cost comparison.
Json full_report(const WorkbenchConfig& config);

// Canonical text form: two-space indent and a trailing newline.
std::string report_text(const Json& j);

}  // namespace wb
