// Cost comparison.  Carries the per-protocol computation, communication,
// round, time, and storage figures as structured rows; op-count strings
// round-trip byte-exact through parse and render (including the z-parametric
// counts and the estimated / measured-elsewhere qualifiers), and per-op unit
// tables turn counts into time projections.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "wb/primitives.hpp"

namespace wb {

// One additive piece of an op-count string: (coeff_z * z + coeff_const) ops.
// Renders "26Th", "(2z)Ta", or "(2z+3)Tm".
struct OpTerm {
    std::string op;
    long coeff_const = 0;
    long coeff_z = 0;
};

struct CostRow {
    std::string protocol_id;
    std::vector<OpTerm> computation;
    bool computation_estimated = false;  // '#': figure backed out, not stated

    bool comm_present = false;
    long comm_bits = 0;
    bool comm_estimated = false;  // '*': bits reconstructed from field sizes

    bool rounds_present = false;
    int rounds = 0;

    bool time_present = false;
    std::string time_text;        // lexical form preserved for exact round-trip
    bool time_estimated = false;  // '#'

    std::string storage;  // verbatim ("3.4GB + 252B"); empty means absent

    double time_ms() const;  // parses time_text; throws when absent
};

struct CostTable {
    std::vector<CostRow> rows;
    int z = 5;  // group-size parameter the parametric counts expand with

    const CostRow* find(const std::string& protocol_id) const;
};

// The workbench's own cost accounting for every compared protocol.
CostTable builtin_cost_table();

// Text form: one row per line, "id | ops | bits | rounds | time | storage".
CostTable parse_cost_table(const std::string& text);
CostTable load_cost_table(const std::string& path);
std::string render_cost_table(const CostTable& table);

// Markdown rendering for reports.
std::string render_cost_markdown(const CostTable& table);

// Total op counts with the parametric terms expanded at the table's z.
std::map<std::string, long> expand_counts(const CostRow& row, int z);

// Milliseconds per single op, keyed by op mnemonic.
using UnitTable = std::map<std::string, double>;

UnitTable parse_units(const std::string& text);
UnitTable load_units(const std::string& path);

// Projected time in ms for one row under a unit table.  Linear in the units:
// scaling every unit scales the projection identically.
double estimate_time(const CostRow& row, const UnitTable& units, int z);

// Wall-clock medians for each op mnemonic measured on this host, in ms.
// Curve multiplication is stood in for by modular exponentiation over the
// suite's field, scaled up to a comparable work factor.
UnitTable measure_primitives(const SuiteParams& suite, std::size_t trials = 128);

// Human description for each op mnemonic.
const std::map<std::string, std::string>& op_descriptions();

}  // namespace wb
