#include "wb/evaluate.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "wb/adversary.hpp"
#include "wb/deduce.hpp"

namespace wb {

namespace {

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

// Roles that never receive a verified message cannot be authenticating
// their peer; a protocol with such a role fails mutual authentication
// structurally, before any attack runs.
std::vector<std::string> unverified_roles(const ProtocolModel& m) {
    std::vector<std::string> out;
    for (const auto& role : m.roles) {
        bool checked = false;
        for (const auto& md : m.messages) checked |= md.auth && md.dst == role;
        if (!checked) out.push_back(role);
    }
    return out;
}

std::vector<std::string> duplicate_category_roles(const ProtocolModel& m) {
    std::vector<std::string> out;
    for (const auto& role : m.roles) {
        std::set<std::string> seen;
        for (const auto& f : m.factors)
            if (f.role == role && !seen.insert(f.category).second) {
                out.push_back(role + " stacks two " + f.category + " factors");
            }
    }
    return out;
}

// Exhaustive compromise sweep: every proper subset of factors is handed to
// the adversary and the session key must stay underivable each time.
bool survives_compromise_sweep(const ProtocolModel& m, const SuiteParams& suite,
                               std::uint64_t seed, std::size_t& subsets_checked) {
    std::vector<std::string> names = factor_names(m);
    DeploymentState st = register_deployment(m, suite, seed);
    SessionResult s = run_session(st, seed + 1);
    subsets_checked = 0;
    for (std::uint64_t mask = 1; mask + 1 < (1ULL << names.size()); ++mask) {
        AdversaryModel adv;
        for (std::size_t i = 0; i < names.size(); ++i)
            if (mask & (1ULL << i)) adv.compromised_factors.push_back(names[i]);
        SymbolicSetup setup = as_symbolic(st, s, adv);
        if (derive(setup.facts, setup.goal, setup.params).derivable) return false;
        ++subsets_checked;
    }
    return true;
}

std::string glyph(bool pass) { return pass ? "v" : "x"; }

}  // namespace

const CellResult& ProtocolEvaluation::cell(int criterion) const {
    for (const auto& c : cells)
        if (c.criterion == criterion) return c;
    throw WbError("unknown-criterion", std::to_string(criterion));
}

std::vector<ScanFinding> identity_linkability_scan(const ProtocolModel& model,
                                                   const SuiteParams& suite,
                                                   std::uint64_t seed,
                                                   std::size_t sessions) {
    std::vector<ScanFinding> findings;
    if (!model.runnable() || sessions == 0) return findings;

    std::set<std::string> identity_atoms;
    for (const auto& a : model.atoms)
        if (a.identity) identity_atoms.insert(a.name);
    if (identity_atoms.empty()) return findings;

    DeploymentState st = register_deployment(model, suite, seed);
    std::map<std::string, std::vector<Bytes>> observed;
    for (std::size_t i = 0; i < sessions; ++i) {
        SessionResult s = run_session(st, seed + 100 + i);
        for (const auto& wm : s.wire)
            for (std::size_t f = 0; f < wm.fields.size(); ++f)
                observed[wm.fields[f]].push_back(wm.values[f]);
    }

    std::set<std::string> reported;
    for (const auto& [field, values] : observed) {
        if (!reported.insert(field).second) continue;
        TermPtr expanded = model.expanded_field(field);
        bool touches_identity = false;
        for (const auto& name : identity_atoms)
            touches_identity |= contains_atom(expanded, name);
        if (!touches_identity) continue;

        if (expanded->kind == TermKind::Atom) {
            findings.push_back({field, "identity travels in the clear"});
            continue;
        }
        bool constant = std::all_of(values.begin(), values.end(),
                                    [&](const Bytes& v) { return v == values.front(); });
        if (constant && values.size() > 1)
            findings.push_back(
                {field, "identity-derived value repeats unchanged across sessions"});
    }
    return findings;
}

ProtocolEvaluation evaluate_protocol(const ProtocolModel& model, const SuiteParams& suite,
                                     std::uint64_t seed) {
    ProtocolEvaluation ev;
    ev.protocol_id = model.id;
    ev.domain = model.domain;
    ev.factor_summary = model.factor_summary();
    ev.adversary_label = model.adversary;

    Rng lane(seed);
    std::uint64_t base = be_u64(lane.derive(model.id).bytes(8));

    // Run every registered attack against this model; collect the criteria
    // each confirmed break impacts.
    std::map<int, std::vector<std::string>> broken;
    for (const AttackInfo* info : attacks_for(model.id)) {
        AttackOutcome out =
            run_attack(*info, model, suite, base + static_cast<std::uint64_t>(info->criteria[0]),
                       AttackOpts{});
        if (out.success)
            for (int c : info->criteria) broken[c].push_back(info->id);
    }
    auto broken_by = [&](int c) {
        auto it = broken.find(c);
        return it == broken.end() ? std::vector<std::string>{} : it->second;
    };

    auto add = [&](int criterion, bool pass, CellBasis basis, std::string detail,
                   std::string citation = "") {
        ev.cells.push_back({criterion, pass, basis, std::move(detail), std::move(citation)});
    };

    // 1: mutual authentication.
    {
        auto attackers = broken_by(1);
        auto gaps = unverified_roles(model);
        auto claims = model.meta.find("claims");
        bool claims_mutual =
            claims != model.meta.end() &&
            std::find(claims->second.begin(), claims->second.end(), "mutual-authentication") !=
                claims->second.end();
        if (!model.runnable() && claims_mutual) {
            add(1, true, CellBasis::Asserted,
                "not executable at this fidelity; taken from the source analysis",
                "source analysis: \"claimed to have achieved several security goals, "
                "such as mutual authentication\"");
        } else if (!attackers.empty()) {
            add(1, false, CellBasis::Executed, "broken by " + join(attackers, ", "));
        } else if (!gaps.empty()) {
            add(1, false, CellBasis::Structural,
                join(gaps, ", ") + " never verifies a message from the peer");
        } else {
            add(1, true, CellBasis::Executed,
                "every role verifies the peer and no impersonation run succeeds");
        }
    }

    // 2: factor distinctness.
    {
        auto dupes = duplicate_category_roles(model);
        add(2, dupes.empty(), CellBasis::Structural,
            dupes.empty() ? "each role's factors draw on distinct categories"
                          : join(dupes, "; "));
    }

    // 3: factor independence.
    {
        auto attackers = broken_by(3);
        if (!model.edges.empty()) {
            std::vector<std::string> lines;
            for (const auto& e : model.edges) lines.push_back(e.a + " " + e.kind + " " + e.b);
            std::string detail = "declared dependence: " + join(lines, "; ");
            if (!attackers.empty()) detail += " (exploited by " + join(attackers, ", ") + ")";
            add(3, false, CellBasis::Structural, detail);
        } else if (!attackers.empty()) {
            add(3, false, CellBasis::Executed, "broken by " + join(attackers, ", "));
        } else {
            add(3, true, CellBasis::Structural, "no factor derives from or protects another");
        }
    }

    // 4: key-leakage resilience.
    {
        auto attackers = broken_by(4);
        auto weaknesses = model.meta.find("weakness");
        bool asserted_gap =
            weaknesses != model.meta.end() &&
            std::find(weaknesses->second.begin(), weaknesses->second.end(),
                      "leakage-unassessed") != weaknesses->second.end();
        if (asserted_gap) {
            add(4, false, CellBasis::Asserted,
                "leakage resilience is outside what the design ever considered",
                "source analysis: \"the authors did not consider other critical security "
                "requirements in MFA, such as key leakage resilience\"");
        } else if (!attackers.empty()) {
            add(4, false, CellBasis::Executed, "broken by " + join(attackers, ", "));
        } else if (model.runnable() && model.sk) {
            std::size_t subsets = 0;
            bool survives = survives_compromise_sweep(model, suite, base + 40, subsets);
            add(4, survives, CellBasis::Executed,
                survives ? "session key underivable under all " + std::to_string(subsets) +
                               " proper factor-compromise subsets"
                         : "a factor-compromise subset reaches the session key");
        } else {
            add(4, true, CellBasis::Structural, "no leakage path surfaced");
        }
    }

    // 5: forward secrecy.
    {
        auto attackers = broken_by(5);
        if (model.runnable() && !model.sk) {
            add(5, false, CellBasis::Structural,
                "no session key is ever established, so recorded traffic has no "
                "secrecy to preserve");
        } else if (!model.runnable()) {
            auto weaknesses = model.meta.find("weakness");
            bool rests_on_longterm =
                weaknesses != model.meta.end() &&
                std::find(weaknesses->second.begin(), weaknesses->second.end(),
                          "pfs-reliance") != weaknesses->second.end();
            add(5, !rests_on_longterm, CellBasis::Structural,
                rests_on_longterm
                    ? "audited key schedule rests only on long-term inputs"
                    : "no forward-secrecy weakness recorded");
        } else {
            PfsOutcome pfs = pfs_experiment(model, suite, base + 50);
            std::string detail =
                pfs.derivable
                    ? "leaked long-term material re-derives the recorded session key"
                    : "session key stays underivable after a full long-term leak";
            if (pfs.derivable && pfs.replay_matches) detail += " (trace replayed byte-exact)";
            if (!attackers.empty()) detail += "; also broken by " + join(attackers, ", ");
            add(5, !pfs.derivable, CellBasis::Executed, detail);
        }
    }

    // 6: anonymity and unlinkability.
    {
        auto attackers = broken_by(6);
        auto findings = identity_linkability_scan(model, suite, base + 60);
        if (!findings.empty()) {
            std::vector<std::string> lines;
            for (const auto& f : findings) lines.push_back(f.field + ": " + f.reason);
            std::string detail = join(lines, "; ");
            if (!attackers.empty()) detail += "; also broken by " + join(attackers, ", ");
            add(6, false, CellBasis::Executed, detail);
        } else if (!attackers.empty()) {
            add(6, false, CellBasis::Executed, "broken by " + join(attackers, ", "));
        } else {
            add(6, true,
                model.runnable() ? CellBasis::Executed : CellBasis::Structural,
                model.runnable()
                    ? "wire trace shows no cleartext identity and no cross-session constant "
                      "derived from one"
                    : "no identity material is exchanged at this fidelity");
        }
    }

    // 7: resistance to known session-level attacks.
    {
        auto attackers = broken_by(7);
        std::string replay_note;
        if (model.runnable()) {
            DeploymentState replay_state = register_deployment(model, suite, base + 70);
            bool rejected = stale_replay_rejected(replay_state, base + 71);
            replay_note = rejected ? "; stale replay of a recorded session is rejected"
                                   : "; stale replay of a recorded session is accepted";
        }
        if (!attackers.empty()) {
            add(7, false, CellBasis::Executed, "broken by " + join(attackers, ", ") + replay_note);
        } else {
            add(7, true, CellBasis::Executed,
                "no scripted session-level break applies" + replay_note);
        }
    }

    // 8: adversary model survived.
    add(8, model.adversary == "SA", CellBasis::Structural,
        model.adversary == "SA" ? "withstands the stronger adversary"
                                : "claims hold only against the weaker adversary");

    return ev;
}

const ProtocolEvaluation* EvaluationMatrix::find(const std::string& protocol_id) const {
    for (const auto& r : rows)
        if (r.protocol_id == protocol_id) return &r;
    return nullptr;
}

std::size_t EvaluationMatrix::asserted_cells() const {
    std::size_t n = 0;
    for (const auto& r : rows)
        for (const auto& c : r.cells)
            if (c.basis == CellBasis::Asserted) ++n;
    return n;
}

EvaluationMatrix evaluate_all(const std::string& data_dir, const SuiteParams& suite,
                              std::uint64_t seed) {
    EvaluationMatrix m;
    for (const auto& id : protocol_fixture_ids(data_dir))
        m.rows.push_back(evaluate_protocol(load_protocol_fixture(data_dir, id), suite, seed));
    return m;
}

std::string render_matrix_markdown(const EvaluationMatrix& m) {
    std::ostringstream out;
    out << "| Protocol | Domain | Factors | C1 | C2 | C3 | C4 | C5 | C6 | C7 | C8 |\n";
    out << "|---|---|---|---|---|---|---|---|---|---|---|\n";
    for (const auto& r : m.rows) {
        out << "| " << r.protocol_id << " | " << r.domain << " | " << r.factor_summary;
        for (int c = 1; c <= 7; ++c) out << " | " << (r.passes(c) ? "✓" : "✗");
        out << " | " << r.adversary_label << " |\n";
    }
    return out.str();
}

std::string render_matrix_reference(const EvaluationMatrix& m) {
    std::ostringstream out;
    for (const auto& r : m.rows) {
        if (r.protocol_id == "hardened") continue;  // exemplar is not a comparison row
        out << r.protocol_id << " | " << r.domain << " | " << r.factor_summary << " | ";
        for (int c = 1; c <= 7; ++c) out << glyph(r.passes(c)) << (c < 7 ? " " : "");
        out << " | " << r.adversary_label << "\n";
    }
    return out.str();
}

std::vector<MatrixMismatch> compare_with_reference(const EvaluationMatrix& m,
                                                   const std::string& reference_path) {
    std::ifstream in(reference_path);
    if (!in) throw WbError("reference-missing", reference_path);

    std::vector<MatrixMismatch> out;
    std::set<std::string> seen;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cols;
        std::stringstream ss(line);
        std::string col;
        while (std::getline(ss, col, '|')) cols.push_back(trim(col));
        if (cols.size() != 5)
            throw WbError("reference-parse-error", "expected 5 columns: " + line);
        const std::string& id = cols[0];
        seen.insert(id);

        const ProtocolEvaluation* row = m.find(id);
        if (!row) {
            out.push_back({id, "row", "present", "missing"});
            continue;
        }
        if (row->domain != cols[1]) out.push_back({id, "domain", cols[1], row->domain});
        if (row->factor_summary != cols[2])
            out.push_back({id, "factors", cols[2], row->factor_summary});

        std::stringstream ts(cols[3]);
        std::vector<std::string> tokens;
        std::string tok;
        while (ts >> tok) tokens.push_back(tok);
        if (tokens.size() != 7)
            throw WbError("reference-parse-error", "expected 7 verdict tokens: " + line);
        for (int c = 1; c <= 7; ++c) {
            const std::string& want = tokens[static_cast<std::size_t>(c - 1)];
            if (want != "v" && want != "x")
                throw WbError("reference-parse-error", "verdict token must be v or x: " + want);
            std::string got = glyph(row->passes(c));
            if (got != want)
                out.push_back({id, "C" + std::to_string(c), want, got});
        }
        if (row->adversary_label != cols[4])
            out.push_back({id, "C8", cols[4], row->adversary_label});
    }
    // Rows evaluated but absent from the reference are fine only for the
    // hardened exemplar.
    for (const auto& r : m.rows)
        if (r.protocol_id != "hardened" && !seen.count(r.protocol_id))
            out.push_back({r.protocol_id, "row", "missing", "present"});
    return out;
}

}  // namespace wb
