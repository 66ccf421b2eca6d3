#include "wb/report.hpp"

#include "wb/adversary.hpp"

namespace wb {

namespace {

const char* basis_name(CellBasis b) {
    switch (b) {
        case CellBasis::Structural: return "structural";
        case CellBasis::Executed: return "executed";
        case CellBasis::Asserted: return "asserted";
    }
    return "unknown";
}

}  // namespace

Json suite_report(const SuiteParams& suite) {
    Json j;
    j["digest_len"] = suite.digest_len;
    j["key_len"] = suite.key_len;
    j["modulus"] = suite.modulus;
    j["group_generator"] = suite.group_generator;
    j["fuzzy_bits"] = suite.fuzzy_bits;
    j["fuzzy_t"] = suite.fuzzy_t;
    j["puf_noise_rate"] = suite.puf_noise_rate;
    j["entropy_flag_threshold"] = suite.entropy_flag_threshold;
    j["freshness_window"] = suite.freshness_window;
    return j;
}

Json session_summary(const std::string& protocol_id, const SessionResult& session) {
    Json j;
    j["protocol"] = protocol_id;
    j["seed"] = session.seed;
    j["messages"] = session.wire.size();
    Json accepted = Json::object();
    for (const auto& [role, ok] : session.accepted) accepted[role] = ok;
    j["accepted"] = accepted;
    j["all_accept"] = session.all_accept();
    j["keys_agree"] = session.keys_agree();
    if (!session.session_key.empty())
        j["session_key"] = to_hex(session.session_key.begin()->second);
    return j;
}

Json attack_report(const AttackOutcome& outcome) {
    Json j;
    j["attack"] = outcome.attack_id;
    j["protocol"] = outcome.protocol_id;
    j["trials"] = outcome.trials;
    j["successes"] = outcome.successes;
    j["success"] = outcome.success;
    j["withheld"] = outcome.withheld;
    if (outcome.symbolic_applicable) {
        Json sym;
        sym["derivable"] = outcome.symbolic_derivable;
        sym["replay_matches"] = outcome.replay_matches;
        j["symbolic"] = sym;
    }
    j["notes"] = outcome.notes;
    return j;
}

Json pfs_report(const std::string& protocol_id, const PfsOutcome& outcome) {
    Json j;
    j["protocol"] = protocol_id;
    j["applicable"] = outcome.applicable;
    if (outcome.applicable) {
        j["key_derivable_after_leak"] = outcome.derivable;
        j["engine_status"] = to_string(outcome.status);
        if (outcome.derivable) j["replay_matches"] = outcome.replay_matches;
    }
    return j;
}

Json matrix_report(const EvaluationMatrix& matrix) {
    Json rows = Json::array();
    for (const auto& r : matrix.rows) {
        Json row;
        row["protocol"] = r.protocol_id;
        row["domain"] = r.domain;
        row["factors"] = r.factor_summary;
        row["adversary"] = r.adversary_label;
        Json cells = Json::array();
        for (const auto& c : r.cells) {
            Json cell;
            cell["criterion"] = c.criterion;
            cell["pass"] = c.pass;
            cell["basis"] = basis_name(c.basis);
            cell["detail"] = c.detail;
            if (!c.citation.empty()) cell["citation"] = c.citation;
            cells.push_back(cell);
        }
        row["cells"] = cells;
        rows.push_back(row);
    }
    Json j;
    j["rows"] = rows;
    j["asserted_cells"] = matrix.asserted_cells();
    return j;
}

Json cost_report(const CostTable& table, const UnitTable& units) {
    Json rows = Json::array();
    for (const auto& r : table.rows) {
        Json row;
        row["protocol"] = r.protocol_id;
        Json ops = Json::object();
        for (const auto& [op, count] : expand_counts(r, table.z)) ops[op] = count;
        row["ops"] = ops;
        row["ops_estimated"] = r.computation_estimated;
        if (r.comm_present) {
            row["comm_bits"] = r.comm_bits;
            row["comm_estimated"] = r.comm_estimated;
        }
        if (r.rounds_present) row["rounds"] = r.rounds;
        if (r.time_present) {
            row["reported_time_ms"] = r.time_text;
            row["reported_time_estimated"] = r.time_estimated;
        }
        if (!r.storage.empty()) row["storage"] = r.storage;
        row["projected_time_ms"] = estimate_time(r, units, table.z);
        rows.push_back(row);
    }
    Json j;
    j["z"] = table.z;
    Json unit_obj = Json::object();
    for (const auto& [op, ms] : units) unit_obj[op] = ms;
    j["units_ms"] = unit_obj;
    j["rows"] = rows;
    return j;
}

Json full_report(const WorkbenchConfig& config) {
    const std::string data_dir = config.resolved_data_dir();
    const SuiteParams& suite = config.suite;

    Json j;
    j["tool"] = "mfa-workbench";
    j["seed"] = config.seed;
    j["trials"] = config.trials;
    j["suite"] = suite_report(suite);

    Json sessions = Json::array();
    Json pfs = Json::array();
    Json attacks = Json::array();
    for (const auto& id : protocol_fixture_ids(data_dir)) {
        ProtocolModel model = load_protocol_fixture(data_dir, id);
        if (model.runnable()) {
            DeploymentState st = register_deployment(model, suite, config.seed);
            SessionResult s = run_session(st, config.seed + 1);
            sessions.push_back(session_summary(id, s));
        }
        pfs.push_back(pfs_report(id, pfs_experiment(model, suite, config.seed)));
        for (const AttackInfo* info : attacks_for(id)) {
            AttackOpts opts;
            opts.trials = config.trials;
            attacks.push_back(
                attack_report(run_attack(*info, model, suite, config.seed, opts)));
        }
    }
    j["sessions"] = sessions;
    j["attacks"] = attacks;
    j["forward_secrecy"] = pfs;
    j["criteria_matrix"] = matrix_report(evaluate_all(data_dir, suite, config.seed));

    CostTable table = builtin_cost_table();
    table.z = config.cost_z;
    j["cost"] = cost_report(table, load_units(data_dir + "/default.units"));
    return j;
}

std::string report_text(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace wb
