// Criteria evaluation.  Scores every protocol model against the eight-point
// checklist — mutual authentication, factor distinctness, factor
// independence, key-leakage resilience, forward secrecy, anonymity and
// unlinkability, resistance to known session-specific attacks, and the
// adversary model it survives — by running the scripted attacks, the
// deduction engine, and wire-trace scans, then renders the results as a
// matrix and compares them to a frozen reference.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wb/attacks.hpp"
#include "wb/protocol.hpp"

namespace wb {

// How a single cell was decided.
enum class CellBasis {
    Structural,  // decided from the model's declarations alone
    Executed,    // decided by running attacks / experiments / scans
    Asserted,    // taken from the source analysis; carries a citation
};

struct CellResult {
    int criterion = 0;  // 1..8
    bool pass = false;
    CellBasis basis = CellBasis::Executed;
    std::string detail;    // one-line justification
    std::string citation;  // non-empty exactly when basis == Asserted
};

struct ProtocolEvaluation {
    std::string protocol_id;
    std::string domain;
    std::string factor_summary;
    std::string adversary_label;  // "WA" or "SA" (criterion 8 rendering)
    std::vector<CellResult> cells;  // exactly 8, criterion order

    const CellResult& cell(int criterion) const;
    bool passes(int criterion) const { return cell(criterion).pass; }
};

// Identity-linkability scan over several honest sessions: flags identity
// atoms travelling in the clear and identity-derived wire fields that stay
// constant across sessions.
struct ScanFinding {
    std::string field;
    std::string reason;
};
std::vector<ScanFinding> identity_linkability_scan(const ProtocolModel& model,
                                                   const SuiteParams& suite,
                                                   std::uint64_t seed,
                                                   std::size_t sessions = 3);

ProtocolEvaluation evaluate_protocol(const ProtocolModel& model, const SuiteParams& suite,
                                     std::uint64_t seed);

struct EvaluationMatrix {
    std::vector<ProtocolEvaluation> rows;

    const ProtocolEvaluation* find(const std::string& protocol_id) const;
    std::size_t asserted_cells() const;
};

// Evaluates every fixture in canonical order (hardened exemplar last).
EvaluationMatrix evaluate_all(const std::string& data_dir, const SuiteParams& suite,
                              std::uint64_t seed);

// Render as a markdown table: one row per protocol, pass = check mark,
// fail = cross, criterion 8 as the adversary label.
std::string render_matrix_markdown(const EvaluationMatrix& m);

// Reference-file round trip.  The reference holds one line per protocol:
//   id | domain | factors | v/x tokens for criteria 1..7 | adversary label
struct MatrixMismatch {
    std::string protocol_id;
    std::string column;
    std::string expected;
    std::string actual;
};
std::vector<MatrixMismatch> compare_with_reference(const EvaluationMatrix& m,
                                                   const std::string& reference_path);
std::string render_matrix_reference(const EvaluationMatrix& m);  // reference format

}  // namespace wb
