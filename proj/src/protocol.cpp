#include "wb/protocol.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "wb/adversary.hpp"

#ifndef WB_DEFAULT_DATA_DIR
#define WB_DEFAULT_DATA_DIR "data"
#endif

namespace wb {

namespace {

std::vector<std::string> split_ws(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> out;
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

std::string strip_comment(const std::string& line) {
    auto pos = line.find('#');
    return pos == std::string::npos ? line : line.substr(0, pos);
}

std::string rest_after(const std::string& line, const std::string& head) {
    auto pos = line.find(head);
    std::string rest = line.substr(pos + head.size());
    auto b = rest.find_first_not_of(" \t");
    auto e = rest.find_last_not_of(" \t");
    if (b == std::string::npos) return "";
    return rest.substr(b, e - b + 1);
}

[[noreturn]] void parse_fail(const std::string& origin, int line_no, const std::string& msg) {
    throw WbError("fixture-parse-error",
                  origin + ":" + std::to_string(line_no) + ": " + msg);
}

const std::set<std::string> kFactorCategories = {
    "knowledge", "possession", "inherent", "location",
    "historical-data", "puf", "firmware-integrity",
};

const std::set<std::string> kEdgeKinds = {"derived-from", "protects", "protected-by"};

AtomKind to_atom_kind(WireAtom k) {
    switch (k) {
        case WireAtom::Public: return AtomKind::PublicConst;
        case WireAtom::Timestamp: return AtomKind::PublicConst;
        case WireAtom::Nonce: return AtomKind::FreshNonce;
        case WireAtom::Secret: return AtomKind::Secret;
    }
    return AtomKind::Secret;
}

// Trailing 8 bytes carry the value big-endian; the rest is zero padding.
Bytes clock_bytes(std::uint64_t value, std::size_t len) {
    Bytes out(len < 8 ? 8 : len, 0);
    Bytes tail = u64_be(value);
    std::copy(tail.begin(), tail.end(), out.end() - 8);
    return out;
}

// Deterministic public-constant material: hash expansion of the atom name.
Bytes public_value(const std::string& name, std::size_t len, const SuiteParams& suite) {
    Bytes out;
    std::uint64_t counter = 0;
    while (out.size() < len) {
        Bytes seed(name.begin(), name.end());
        Bytes block = hash_raw(concat({seed, u64_be(counter++)}), suite.digest_len);
        out.insert(out.end(), block.begin(), block.end());
    }
    out.resize(len);
    return out;
}

Bytes bind_random(const AtomDecl& decl, Rng& rng, const SuiteParams& suite) {
    if (decl.scalar) return u64_be(rng.below(suite.modulus));
    return rng.bytes(decl.byte_len);
}

}  // namespace

// --- model helpers ----------------------------------------------------------

const AtomDecl* ProtocolModel::find_atom(const std::string& name) const {
    for (const auto& a : atoms)
        if (a.name == name) return &a;
    return nullptr;
}

TermPtr ProtocolModel::field_term(const std::string& name) const {
    auto it = term_atoms.find(name);
    if (it == term_atoms.end())
        throw WbError("unknown-field", id + ": no atom or equation named " + name);
    return it->second;
}

TermPtr ProtocolModel::expanded_field(const std::string& name) const {
    return expand(field_term(name), defs);
}

bool ProtocolModel::has_role(const std::string& role) const {
    return std::find(roles.begin(), roles.end(), role) != roles.end();
}

std::string ProtocolModel::factor_summary() const {
    // Collapse per-role declarations by factor name, keeping first-seen order.
    std::vector<std::string> order;
    std::map<std::string, std::vector<std::string>> holders;
    std::set<std::string> roles_with_factors;
    for (const auto& f : factors) {
        if (!holders.count(f.name)) order.push_back(f.name);
        holders[f.name].push_back(f.role);
        roles_with_factors.insert(f.role);
    }
    bool mark = roles_with_factors.size() > 1;
    std::string out;
    for (const auto& name : order) {
        if (!out.empty()) out += " + ";
        out += name;
        if (mark && holders[name].size() == 1) {
            out += holders[name][0] == roles.front() ? "^c" : "^s";
        }
    }
    return out;
}

bool SessionResult::all_accept() const {
    for (const auto& [role, ok] : accepted)
        if (!ok) return false;
    return true;
}

bool SessionResult::keys_agree() const {
    if (session_key.empty()) return true;
    const Bytes& first = session_key.begin()->second;
    for (const auto& [role, key] : session_key)
        if (key != first) return false;
    return true;
}

// --- fixture parsing --------------------------------------------------------

ProtocolModel parse_protocol_text(const std::string& text, const std::string& origin) {
    ProtocolModel m;
    struct EqLine {
        std::string name, body;
        int line_no;
    };
    std::vector<EqLine> eq_lines;
    std::string sk_body;
    int sk_line = 0;

    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = strip_comment(raw);
        auto toks = split_ws(line);
        if (toks.empty()) continue;
        const std::string& head = toks[0];

        if (head == "id" && toks.size() == 2) {
            m.id = toks[1];
        } else if (head == "title") {
            m.title = rest_after(line, "title");
        } else if (head == "domain") {
            m.domain = rest_after(line, "domain");
        } else if (head == "adversary" && toks.size() == 2) {
            if (toks[1] != "WA" && toks[1] != "SA")
                parse_fail(origin, line_no, "adversary must be WA or SA");
            m.adversary = toks[1];
        } else if (head == "fidelity" && toks.size() == 2) {
            if (toks[1] != "full" && toks[1] != "metadata")
                parse_fail(origin, line_no, "fidelity must be full or metadata");
            m.fidelity = toks[1];
        } else if (head == "role" && toks.size() == 2) {
            if (m.has_role(toks[1])) parse_fail(origin, line_no, "duplicate role");
            m.roles.push_back(toks[1]);
        } else if (head == "atom") {
            if (toks.size() < 4) parse_fail(origin, line_no, "atom needs name, kind, length");
            AtomDecl d;
            d.name = toks[1];
            if (m.find_atom(d.name)) parse_fail(origin, line_no, "duplicate atom " + d.name);
            if (toks[2] == "public") d.kind = WireAtom::Public;
            else if (toks[2] == "secret") d.kind = WireAtom::Secret;
            else if (toks[2] == "nonce") d.kind = WireAtom::Nonce;
            else if (toks[2] == "timestamp") d.kind = WireAtom::Timestamp;
            else parse_fail(origin, line_no, "bad atom kind " + toks[2]);
            try {
                d.byte_len = static_cast<std::size_t>(std::stoul(toks[3]));
            } catch (...) {
                parse_fail(origin, line_no, "bad atom length " + toks[3]);
            }
            for (std::size_t i = 4; i < toks.size(); ++i) {
                const std::string& flag = toks[i];
                if (flag == "identity") d.identity = true;
                else if (flag == "longterm") d.longterm = true;
                else if (flag == "hook") d.hook_bound = true;
                else if (flag == "scalar") d.scalar = true;
                else if (flag.rfind("from=", 0) == 0) d.from_role = flag.substr(5);
                else parse_fail(origin, line_no, "unknown atom flag " + flag);
            }
            if (d.scalar && d.byte_len != 8)
                parse_fail(origin, line_no, "scalar atoms are 8 bytes");
            if (d.kind == WireAtom::Timestamp && d.byte_len < 8)
                parse_fail(origin, line_no, "timestamp atoms are at least 8 bytes");
            m.atoms.push_back(d);
        } else if (head == "factor") {
            if (toks.size() != 4) parse_fail(origin, line_no, "factor needs role, name, category");
            if (!kFactorCategories.count(toks[3]))
                parse_fail(origin, line_no, "unknown factor category " + toks[3]);
            m.factors.push_back({toks[1], toks[2], toks[3]});
        } else if (head == "holds") {
            if (toks.size() < 3) parse_fail(origin, line_no, "holds needs factor and names");
            auto& list = m.holds[toks[1]];
            list.insert(list.end(), toks.begin() + 2, toks.end());
        } else if (head == "edge") {
            if (toks.size() != 4) parse_fail(origin, line_no, "edge needs a, kind, b");
            if (!kEdgeKinds.count(toks[2]))
                parse_fail(origin, line_no, "unknown edge kind " + toks[2]);
            m.edges.push_back({toks[1], toks[2], toks[3]});
        } else if (head == "eq") {
            if (toks.size() < 4 || toks[2] != "=")
                parse_fail(origin, line_no, "eq needs: eq <name> = <term>");
            auto eq_pos = line.find('=');
            eq_lines.push_back({toks[1], line.substr(eq_pos + 1), line_no});
        } else if (head == "msg") {
            if (toks.size() < 4) parse_fail(origin, line_no, "msg needs index, route, fields");
            MessageDecl md;
            try {
                md.index = std::stoi(toks[1]);
            } catch (...) {
                parse_fail(origin, line_no, "bad message index");
            }
            auto arrow = toks[2].find("->");
            if (arrow == std::string::npos)
                parse_fail(origin, line_no, "route must be src->dst");
            md.src = toks[2].substr(0, arrow);
            md.dst = toks[2].substr(arrow + 2);
            for (std::size_t i = 3; i < toks.size(); ++i) {
                if (toks[i] == "auth") md.auth = true;
                else md.fields.push_back(toks[i]);
            }
            if (md.fields.empty()) parse_fail(origin, line_no, "message carries no field");
            m.messages.push_back(md);
        } else if (head == "sk") {
            auto pos = line.find("sk");
            sk_body = line.substr(pos + 2);
            sk_line = line_no;
        } else if (head == "store") {
            if (toks.size() < 3) parse_fail(origin, line_no, "store needs role and names");
            auto& list = m.stores[toks[1]];
            list.insert(list.end(), toks.begin() + 2, toks.end());
        } else if (head == "hook" && toks.size() == 2) {
            m.hooks.push_back(toks[1]);
        } else if (head == "meta") {
            if (toks.size() < 3) parse_fail(origin, line_no, "meta needs key and values");
            auto& list = m.meta[toks[1]];
            list.insert(list.end(), toks.begin() + 2, toks.end());
        } else {
            parse_fail(origin, line_no, "unknown directive " + head);
        }
    }

    if (m.id.empty()) parse_fail(origin, 1, "missing id");
    if (m.roles.empty()) parse_fail(origin, 1, "missing roles");

    // Atom table: declared atoms first, then equation-defined names.
    for (const auto& d : m.atoms)
        m.term_atoms[d.name] = atom(d.name, to_atom_kind(d.kind), d.byte_len);
    for (const auto& e : eq_lines) {
        if (m.term_atoms.count(e.name) && m.find_atom(e.name))
            parse_fail(origin, e.line_no, "equation name collides with atom " + e.name);
        if (!m.term_atoms.count(e.name))
            m.term_atoms[e.name] = atom(e.name, AtomKind::PublicConst, 0);
    }
    for (const auto& e : eq_lines) {
        try {
            m.equations.push_back({e.name, parse_term(e.body, m.term_atoms)});
        } catch (const WbError& err) {
            parse_fail(origin, e.line_no, std::string("equation ") + e.name + ": " + err.what());
        }
    }
    try {
        m.defs = index_equations(m.equations);
    } catch (const WbError& err) {
        parse_fail(origin, 1, err.what());
    }
    if (!sk_body.empty()) {
        try {
            m.sk = parse_term(sk_body, m.term_atoms);
        } catch (const WbError& err) {
            parse_fail(origin, sk_line, std::string("sk: ") + err.what());
        }
    }

    // Referential checks.
    for (const auto& md : m.messages) {
        if (!m.has_role(md.src) || !m.has_role(md.dst))
            parse_fail(origin, 1, "message route uses unknown role in " + m.id);
        for (const auto& f : md.fields)
            if (!m.term_atoms.count(f))
                parse_fail(origin, 1, "message field " + f + " is not declared");
    }
    for (const auto& f : m.factors)
        if (!m.has_role(f.role)) parse_fail(origin, 1, "factor role " + f.role + " unknown");
    for (const auto& [factor, names] : m.holds) {
        bool known_factor = false;
        for (const auto& f : m.factors) known_factor |= f.name == factor;
        if (!known_factor) parse_fail(origin, 1, "holds references unknown factor " + factor);
        for (const auto& n : names)
            if (!m.term_atoms.count(n))
                parse_fail(origin, 1, "holds name " + n + " is not declared");
    }
    for (const auto& [role, names] : m.stores) {
        if (!m.has_role(role)) parse_fail(origin, 1, "store role " + role + " unknown");
        for (const auto& n : names)
            if (!m.term_atoms.count(n))
                parse_fail(origin, 1, "store name " + n + " is not declared");
    }
    for (const auto& h : m.hooks)
        if (!hook_table().count(h)) parse_fail(origin, 1, "unknown hook " + h);
    if (m.fidelity == "full" && m.messages.empty())
        parse_fail(origin, 1, "full-fidelity model declares no messages");
    return m;
}

ProtocolModel load_protocol_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw WbError("fixture-io-error", "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_protocol_text(buf.str(), path);
}

std::string default_data_dir() {
    if (const char* env = std::getenv("MFA_WORKBENCH_DATA"); env && *env) return env;
    return WB_DEFAULT_DATA_DIR;
}

std::vector<std::string> protocol_fixture_ids(const std::string& data_dir) {
    namespace fs = std::filesystem;
    static const std::vector<std::string> canonical = {
        "p1wofs", "p1fs", "p2", "p3", "p4", "p5",
        "p6",     "p7",   "p8", "p9", "p10", "hardened",
    };
    std::vector<std::string> found;
    fs::path dir = fs::path(data_dir) / "protocols";
    if (!fs::is_directory(dir))
        throw WbError("fixture-io-error", "no protocol directory at " + dir.string());
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.path().extension() == ".proto") found.push_back(entry.path().stem().string());
    auto rank = [&](const std::string& id) {
        auto it = std::find(canonical.begin(), canonical.end(), id);
        return it == canonical.end() ? canonical.size() : static_cast<std::size_t>(it - canonical.begin());
    };
    std::sort(found.begin(), found.end(), [&](const std::string& a, const std::string& b) {
        auto ra = rank(a), rb = rank(b);
        return ra != rb ? ra < rb : a < b;
    });
    return found;
}

ProtocolModel load_protocol_fixture(const std::string& data_dir, const std::string& id) {
    namespace fs = std::filesystem;
    fs::path path = fs::path(data_dir) / "protocols" / (id + ".proto");
    if (!fs::exists(path))
        throw WbError("unknown-protocol", "no fixture for protocol id " + id);
    ProtocolModel m = load_protocol_file(path.string());
    if (m.id != id)
        throw WbError("fixture-parse-error", path.string() + ": id " + m.id + " does not match filename");
    return m;
}

// --- deployments ------------------------------------------------------------

DeploymentState register_deployment(const ProtocolModel& model,
                                    const SuiteParams& suite, std::uint64_t seed) {
    DeploymentState st;
    st.model = &model;
    st.suite = suite;
    st.rng = Rng(seed);
    for (const auto& d : model.atoms) {
        if (d.hook_bound) continue;
        if (d.kind == WireAtom::Public)
            st.longterm[d.name] = public_value("wb-public:" + d.name, d.byte_len, suite);
        else if (d.kind == WireAtom::Secret)
            st.longterm[d.name] = bind_random(d, st.rng, suite);
        // Nonces and timestamps stay unbound until a session runs.
    }
    for (const auto& h : model.hooks) {
        const auto& fns = hook_table().at(h);
        if (fns.at_register) fns.at_register(st);
    }
    for (const auto& d : model.atoms) {
        if (d.kind != WireAtom::Public && d.kind != WireAtom::Secret) continue;
        if (!st.longterm.count(d.name))
            throw WbError("hook-unbound-atom",
                          model.id + ": atom " + d.name + " was never bound at registration");
    }
    return st;
}

// --- session execution ------------------------------------------------------

namespace {

void bind_session_atoms(DeploymentState& st, Env& env, Rng& srng) {
    const ProtocolModel& m = *st.model;
    // Timestamps bind at the index of the message that first carries them.
    for (const auto& md : m.messages) {
        for (const auto& f : md.fields) {
            const AtomDecl* d = m.find_atom(f);
            if (d && d->kind == WireAtom::Timestamp && !env.count(d->name))
                env[d->name] = clock_bytes(st.now + static_cast<std::uint64_t>(md.index), d->byte_len);
        }
    }
    for (const auto& d : m.atoms) {
        if (d.kind == WireAtom::Timestamp && !env.count(d.name))
            env[d.name] = clock_bytes(st.now, d.byte_len);
        if (d.kind == WireAtom::Nonce && !d.hook_bound && !env.count(d.name))
            env[d.name] = bind_random(d, srng, st.suite);
    }
    for (const auto& h : m.hooks) {
        const auto& fns = hook_table().at(h);
        if (fns.at_session) fns.at_session(st, env, srng);
    }
}

SessionResult execute_schema(DeploymentState& st, std::uint64_t seed,
                             const ChannelTap& tap, const std::string& played_role) {
    const ProtocolModel& m = *st.model;
    if (!m.runnable())
        throw WbError("metadata-fidelity",
                      m.id + " is modeled at metadata fidelity and has no executable schema");
    st.now += 60;
    ++st.sessions_run;
    Env env = st.longterm;
    Rng srng(seed);
    Rng fabricate(seed ^ 0x9e3779b97f4a7c15ULL);
    bind_session_atoms(st, env, srng);

    SessionResult result;
    result.seed = seed;
    for (const auto& role : m.roles) result.accepted[role] = true;

    for (const auto& md : m.messages) {
        WireMessage wm;
        wm.index = md.index;
        wm.src = md.src;
        wm.dst = md.dst;
        wm.fields = md.fields;
        wm.auth = md.auth;

        std::vector<Bytes> expected;
        for (const auto& f : md.fields)
            expected.push_back(evaluate(m.expanded_field(f), env, st.suite));

        if (md.src == played_role) {
            // Fabricated traffic: public constants and fresh timestamps are
            // reproduced honestly, everything else is noise of the right width.
            for (std::size_t i = 0; i < md.fields.size(); ++i) {
                const AtomDecl* d = m.find_atom(md.fields[i]);
                if (d && d->kind == WireAtom::Public) {
                    wm.values.push_back(expected[i]);
                } else if (d && d->kind == WireAtom::Timestamp) {
                    wm.values.push_back(clock_bytes(
                        st.now + static_cast<std::uint64_t>(md.index), d->byte_len));
                } else {
                    auto width = term_length(m.expanded_field(md.fields[i]), st.suite.digest_len);
                    wm.values.push_back(fabricate.bytes(width ? *width : st.suite.digest_len));
                }
            }
        } else {
            wm.values = expected;
        }
        if (tap) tap(wm);

        if (md.dst != played_role) {
            bool ok = true;
            if (md.auth) {
                for (std::size_t i = 0; i < expected.size(); ++i)
                    if (wm.values[i] != expected[i]) ok = false;
            }
            for (std::size_t i = 0; i < md.fields.size(); ++i) {
                const AtomDecl* d = m.find_atom(md.fields[i]);
                if (!d || d->kind != WireAtom::Timestamp) continue;
                if (wm.values[i].size() < 8) {
                    ok = false;
                    continue;
                }
                std::uint64_t seen = be_u64(wm.values[i]);
                std::uint64_t expect_at = st.now + static_cast<std::uint64_t>(md.index);
                std::uint64_t skew = seen > expect_at ? seen - expect_at : expect_at - seen;
                if (skew > static_cast<std::uint64_t>(st.suite.freshness_window)) ok = false;
            }
            if (!ok) result.accepted[md.dst] = false;
        }
        result.wire.push_back(std::move(wm));
    }

    if (m.sk) {
        Bytes key = evaluate(expand(m.sk, m.defs), env, st.suite);
        for (const auto& role : m.roles) result.session_key[role] = key;
    }
    for (const auto& h : m.hooks) {
        const auto& fns = hook_table().at(h);
        if (fns.after_session) fns.after_session(st, env);
    }
    result.env = std::move(env);
    return result;
}

}  // namespace

SessionResult run_session(DeploymentState& state, std::uint64_t seed, const ChannelTap& tap) {
    return execute_schema(state, seed, tap, "");
}

SessionResult adversarial_run(DeploymentState& state, std::uint64_t seed,
                              const std::string& played_role) {
    if (!state.model->has_role(played_role))
        throw WbError("unknown-role", state.model->id + " has no role " + played_role);
    return execute_schema(state, seed, nullptr, played_role);
}

// --- symbolic compilation ---------------------------------------------------

SymbolicSetup as_symbolic(const DeploymentState& state, const SessionResult& session,
                          const AdversaryModel& adversary) {
    const ProtocolModel& m = *state.model;
    SymbolicSetup setup;
    setup.params.equations = m.equations;
    setup.params.digest_len = state.suite.digest_len;
    setup.goal = m.sk ? expand(m.sk, m.defs) : nullptr;
    if (setup.goal) setup.params.extra_interest.push_back(setup.goal);

    TermSet seen;
    auto add_fact = [&](const std::string& name, const Bytes& value) {
        TermPtr t = m.term_atoms.at(name);
        if (seen.count(t)) return;
        seen.insert(t);
        setup.facts.push_back(t);
        setup.values[t] = value;
    };

    for (const auto& d : m.atoms) {
        if (d.kind == WireAtom::Public && session.env.count(d.name))
            add_fact(d.name, session.env.at(d.name));
        if (d.kind == WireAtom::Timestamp && session.env.count(d.name))
            add_fact(d.name, session.env.at(d.name));
    }
    for (const auto& wm : session.wire)
        for (std::size_t i = 0; i < wm.fields.size(); ++i) add_fact(wm.fields[i], wm.values[i]);

    auto add_held = [&](const std::vector<std::string>& names) {
        for (const auto& n : names) {
            Bytes v = evaluate(m.expanded_field(n), session.env, state.suite);
            add_fact(n, v);
        }
    };
    for (const auto& f : adversary.compromised_factors) {
        auto it = m.holds.find(f);
        if (it == m.holds.end())
            throw WbError("unknown-factor", m.id + " declares no held material for factor " + f);
        add_held(it->second);
    }
    if (!adversary.device_read_role.empty()) {
        auto it = m.stores.find(adversary.device_read_role);
        if (it != m.stores.end()) add_held(it->second);
    }
    if (adversary.longterm_leak)
        for (const auto& d : m.atoms)
            if (d.longterm && session.env.count(d.name)) add_fact(d.name, session.env.at(d.name));
    return setup;
}

}  // namespace wb
