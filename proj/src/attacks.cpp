#include "wb/attacks.hpp"

#include <algorithm>

#include "wb/primitives.hpp"

namespace wb {

namespace {

// --- small helpers ----------------------------------------------------------

std::uint64_t mix(std::uint64_t seed, std::uint64_t trial, std::uint64_t lane) {
    std::uint64_t x = seed + 0x9e3779b97f4a7c15ULL * (trial + 1) + 0xbf58476d1ce4e5b9ULL * lane;
    x ^= x >> 30;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

Bytes wire_value(const SessionResult& s, const std::string& field) {
    for (const auto& wm : s.wire)
        for (std::size_t i = 0; i < wm.fields.size(); ++i)
            if (wm.fields[i] == field) return wm.values[i];
    throw WbError("attack-missing-field", field + " never crossed the wire");
}

Bytes slice(const Bytes& b, std::size_t from, std::size_t to) {
    return Bytes(b.begin() + static_cast<std::ptrdiff_t>(from),
                 b.begin() + static_cast<std::ptrdiff_t>(to));
}

bool role_receives_verified_message(const ProtocolModel& m, const std::string& role) {
    for (const auto& md : m.messages)
        if (md.auth && md.dst == role) return true;
    return false;
}

// Prerequisite material: the real value, or random noise of the same length
// in a withheld run.
Bytes material(const DeploymentState& st, const std::string& atom_name, bool withheld,
               std::uint64_t noise_seed) {
    const Bytes& real = st.longterm.at(atom_name);
    if (!withheld) return real;
    Rng noise(noise_seed);
    const AtomDecl* d = st.model->find_atom(atom_name);
    if (d && d->scalar) return u64_be(noise.below(st.suite.modulus));
    return noise.bytes(real.size());
}

// --- scripted recoveries (shared by trials and symbolic twins) --------------

Bytes recover_key_masked_delivery(const SessionResult& s, const Bytes& id_i) {
    Bytes v1 = xor_bytes(wire_value(s, "GID_i"), id_i);
    return xor_bytes(wire_value(s, "M_2"), v1);
}

Bytes recover_key_modular_blinding(const DeploymentState& st, const SessionResult& s,
                                   const Bytes& mk) {
    const SuiteParams& suite = st.suite;
    Bytes r1 = xor_bytes(wire_value(s, "R1m"), mk);
    Bytes r2 = xor_bytes(wire_value(s, "R2m"), mk);
    std::uint64_t soh = to_scalar(hash_fields({r1, r2}, suite), suite);
    std::uint64_t x = sub_mod(be_u64(wire_value(s, "Y")), soh, suite);
    return hash_fields({mk, r1, r2, u64_be(x), wire_value(s, "TID_c"), st.longterm.at("spk_s")},
                       suite);
}

struct CardSplit {
    Bytes key;
    Bytes identity;
};
CardSplit recover_card_ciphertext(const DeploymentState& st, const SessionResult& s,
                                  const Bytes& k_sh) {
    Bytes body = sym_decrypt(k_sh, wire_value(s, "l_10"), st.suite);
    return {slice(body, 0, 32), slice(body, 32, body.size())};
}

Bytes recover_key_stolen_verifier(const DeploymentState& st, const SessionResult& s,
                                  const Bytes& x_s) {
    const SuiteParams& suite = st.suite;
    Bytes hs = hash_fields({x_s, wire_value(s, "MID")}, suite);
    Bytes n1 = xor_bytes(wire_value(s, "D_1"), hs);
    Bytes n2 = xor_bytes(wire_value(s, "D_2"), hash_fields({n1, hs}, suite));
    return hash_fields({hs, n1, n2, wire_value(s, "T_1"), wire_value(s, "T_2")}, suite);
}

Bytes recover_key_masked_random(const DeploymentState& st, const SessionResult& s,
                                const Bytes& pid_i, const Bytes& id_i) {
    const SuiteParams& suite = st.suite;
    const Bytes& sid = st.longterm.at("SID_j");
    Bytes hidp = hash_fields({pid_i}, suite);
    Bytes t1 = xor_bytes(wire_value(s, "T_1p"), hidp);
    Bytes rr2 = xor_bytes(wire_value(s, "R_rand2p"), id_i);
    Bytes yi = hash_fields({sid, hidp, rr2, t1}, suite);
    return hash_fields({yi, sid, wire_value(s, "T_3")}, suite);
}

Bytes recover_key_envelope(const DeploymentState& st, const SessionResult& s, const Bytes& k_x) {
    Bytes body = sym_decrypt(k_x, wire_value(s, "Ct"), st.suite);
    return hash_fields({slice(body, 0, 32), slice(body, 32, 64)}, st.suite);
}

struct ChannelRecovery {
    Bytes r_a, r_b, key;
};
ChannelRecovery recover_key_channel(const DeploymentState& st, const SessionResult& s,
                                    const Bytes& id_s, const Bytes& sigma) {
    const SuiteParams& suite = st.suite;
    Bytes ts_a = wire_value(s, "TS_A");
    Bytes ts_b = wire_value(s, "TS_B");
    Bytes r_a = xor_bytes(wire_value(s, "M_1"), hash_fields({id_s, ts_a}, suite));
    Bytes r_b = xor_bytes(wire_value(s, "M_4"), hash_fields({id_s, ts_b, ts_a, r_a}, suite));
    return {r_a, r_b, hash_fields({id_s, ts_a, ts_b, r_a, r_b, sigma}, suite)};
}

// --- symbolic twins ---------------------------------------------------------

struct TwinGoal {
    TermPtr goal;
    Bytes scripted;  // what the concrete script recovered on the same session
};

// Derive every goal from the adversary's view of one honest session and
// replay each trace; all goals must derive and all replays must agree.
void run_twin(AttackOutcome& out, const DeploymentState& st, const SessionResult& s,
              const AdversaryModel& adversary, const std::vector<TwinGoal>& goals) {
    SymbolicSetup setup = as_symbolic(st, s, adversary);
    out.symbolic_applicable = true;
    out.symbolic_derivable = true;
    out.replay_matches = true;
    for (const auto& g : goals) {
        CloseParams params = setup.params;
        DerivationResult d = derive(setup.facts, g.goal, params);
        if (!d.derivable) {
            out.symbolic_derivable = false;
            out.replay_matches = false;
            continue;
        }
        Bytes replayed = replay_trace(d.trace, setup.values, st.suite);
        if (replayed != g.scripted) out.replay_matches = false;
    }
}

// --- attack bodies ----------------------------------------------------------

using AttackFn = void (*)(AttackOutcome&, const ProtocolModel&, const SuiteParams&,
                          std::uint64_t, const AttackOpts&);

void attack_unverified_peer(AttackOutcome& out, const ProtocolModel& m, const SuiteParams& suite,
                            std::uint64_t seed, const AttackOpts& opts) {
    // Play the initiator with fabricated traffic; the responder runs no
    // verification step, so the fabricated peer is accepted every time.
    const std::string played = m.roles.front();
    const std::string responder = m.roles.back();
    bool gap = !role_receives_verified_message(m, responder);
    for (std::uint64_t t = 0; t < opts.trials; ++t) {
        DeploymentState st = register_deployment(m, suite, mix(seed, t, 1));
        SessionResult s = adversarial_run(st, mix(seed, t, 2), played);
        if (gap && s.accepted.at(responder)) ++out.successes;
    }
    out.notes.push_back("the responder has no verified message to check, so fabricated "
                        "initiator traffic is accepted as-is");
}

void attack_tag_chain(AttackOutcome& out, const ProtocolModel& m, const SuiteParams& suite,
                      std::uint64_t seed, const AttackOpts& opts) {
    // With the tag-generation key and the stored history, every
    // authentication tag in the table reconstructs exactly.
    for (std::uint64_t t = 0; t < opts.trials; ++t) {
        DeploymentState st = register_deployment(m, suite, mix(seed, t, 1));
        Bytes key_bytes = material(st, "K", opts.withhold, mix(seed, t, 3));
        std::uint64_t key = be_u64(key_bytes);
        std::size_t matched = 0;
        for (std::size_t i = 0; i < st.history.size(); ++i)
            if (tag_generate(key, st.history[i].first, i, suite) == st.history[i].second)
                ++matched;
        if (!st.history.empty() && matched == st.history.size()) ++out.successes;
    }
    out.notes.push_back("the whole tag table reconstructs from the tag-generation key, so "
                        "possession of one factor forges the other");
}

void attack_history_entropy(AttackOutcome& out, const ProtocolModel& m, const SuiteParams& suite,
                            std::uint64_t seed, const AttackOpts& opts) {
    // The telemetry pieces behind the history factor are low-entropy; the
    // suite's quality gate flags every one of them.
    double lo = 8.0, hi = 0.0;
    for (std::uint64_t t = 0; t < opts.trials; ++t) {
        DeploymentState st = register_deployment(m, suite, mix(seed, t, 1));
        bool all_flagged = !st.history.empty();
        for (const auto& [piece, tag] : st.history) {
            (void)tag;
            double e = shannon_entropy(piece);
            lo = std::min(lo, e);
            hi = std::max(hi, e);
            if (!entropy_flagged(e, suite)) all_flagged = false;
        }
        if (all_flagged) ++out.successes;
    }
    out.notes.push_back("measured " + std::to_string(lo) + ".." + std::to_string(hi) +
                        " bits/byte across history pieces, all below the " +
                        std::to_string(suite.entropy_flag_threshold) + " gate");
}

void attack_masked_delivery(AttackOutcome& out, const ProtocolModel& m, const SuiteParams& suite,
                            std::uint64_t seed, const AttackOpts& opts) {
    for (std::uint64_t t = 0; t < opts.trials; ++t) {
        DeploymentState st = register_deployment(m, suite, mix(seed, t, 1));
        SessionResult s = run_session(st, mix(seed, t, 2));
        Bytes id_i = material(st, "ID_i", opts.withhold, mix(seed, t, 3));
        if (recover_key_masked_delivery(s, id_i) == s.session_key.begin()->second)
            ++out.successes;
    }
    if (!opts.withhold) {
        DeploymentState st = register_deployment(m, suite, mix(seed, 7777, 1));
        SessionResult s = run_session(st, mix(seed, 7777, 2));
        AdversaryModel adv;
        adv.compromised_factors = {"PW"};
        run_twin(out, st, s, adv,
                 {{expand(m.sk, m.defs), recover_key_masked_delivery(s, st.longterm.at("ID_i"))}});
    }
    out.notes.push_back("the delivered key unmasks with a pad built from a public group "
                        "identifier and the password-side identity");
}

void attack_modular_blinding(AttackOutcome& out, const ProtocolModel& m, const SuiteParams& suite,
                             std::uint64_t seed, const AttackOpts& opts) {
    for (std::uint64_t t = 0; t < opts.trials; ++t) {
        DeploymentState st = register_deployment(m, suite, mix(seed, t, 1));
        SessionResult s = run_session(st, mix(seed, t, 2));
        Bytes mk = material(st, "mk", opts.withhold, mix(seed, t, 3));
        if (recover_key_modular_blinding(st, s, mk) == s.session_key.begin()->second)
            ++out.successes;
    }
    if (!opts.withhold) {
        DeploymentState st = register_deployment(m, suite, mix(seed, 7777, 1));
        SessionResult s = run_session(st, mix(seed, 7777, 2));
        AdversaryModel adv;
        adv.compromised_factors = {"LSK"};
        run_twin(out, st, s, adv,
                 {{expand(m.sk, m.defs), recover_key_modular_blinding(st, s, st.longterm.at("mk"))}});
    }
    out.notes.push_back("one long-term key strips both nonce masks and un-blinds the field "
                        "element, which rebuilds the session key");
}

void attack_card_ciphertext(AttackOutcome& out, const ProtocolModel& m, const SuiteParams& suite,
                            std::uint64_t seed, const AttackOpts& opts) {
    for (std::uint64_t t = 0; t < opts.trials; ++t) {
        DeploymentState st = register_deployment(m, suite, mix(seed, t, 1));
        SessionResult s = run_session(st, mix(seed, t, 2));
        Bytes k_sh = material(st, "K_sh", opts.withhold, mix(seed, t, 3));
        try {
            CardSplit got = recover_card_ciphertext(st, s, k_sh);
            if (got.key == s.session_key.begin()->second && got.identity == st.longterm.at("ID_ur"))
                ++out.successes;
        } catch (const WbError&) {
            // authentication failure under a withheld key: the trial fails
        }
    }
    if (!opts.withhold) {
        DeploymentState st = register_deployment(m, suite, mix(seed, 7777, 1));
        SessionResult s = run_session(st, mix(seed, 7777, 2));
        CardSplit got = recover_card_ciphertext(st, s, st.longterm.at("K_sh"));
        AdversaryModel adv;
        adv.compromised_factors = {"PW", "SC"};
        run_twin(out, st, s, adv,
                 {{expand(m.sk, m.defs), got.key}, {m.field_term("ID_ur"), got.identity}});
    }
    out.notes.push_back("card readout decrypts the returned ciphertext; a fixed-offset split "
                        "yields the session key and the user's real identity");
}

void attack_stolen_verifier(AttackOutcome& out, const ProtocolModel& m, const SuiteParams& suite,
                            std::uint64_t seed, const AttackOpts& opts) {
    for (std::uint64_t t = 0; t < opts.trials; ++t) {
        DeploymentState st = register_deployment(m, suite, mix(seed, t, 1));
        SessionResult s = run_session(st, mix(seed, t, 2));
        Bytes x_s = material(st, "x_s", opts.withhold, mix(seed, t, 3));
        if (recover_key_stolen_verifier(st, s, x_s) == s.session_key.begin()->second)
            ++out.successes;
    }
    if (!opts.withhold) {
        DeploymentState st = register_deployment(m, suite, mix(seed, 7777, 1));
        SessionResult s = run_session(st, mix(seed, 7777, 2));
        AdversaryModel adv;
        adv.device_read_role = "server";
        run_twin(out, st, s, adv,
                 {{expand(m.sk, m.defs), recover_key_stolen_verifier(st, s, st.longterm.at("x_s"))}});
    }
    out.notes.push_back("a server-database readout rebuilds the one mask every wire value "
                        "hangs off, replaying the whole key schedule");
}

void attack_masked_random(AttackOutcome& out, const ProtocolModel& m, const SuiteParams& suite,
                          std::uint64_t seed, const AttackOpts& opts) {
    for (std::uint64_t t = 0; t < opts.trials; ++t) {
        DeploymentState st = register_deployment(m, suite, mix(seed, t, 1));
        SessionResult s = run_session(st, mix(seed, t, 2));
        Bytes pid = material(st, "PID_i", opts.withhold, mix(seed, t, 3));
        Bytes idi = material(st, "ID_i", opts.withhold, mix(seed, t, 4));
        if (recover_key_masked_random(st, s, pid, idi) == s.session_key.begin()->second)
            ++out.successes;
    }
    if (!opts.withhold) {
        DeploymentState st = register_deployment(m, suite, mix(seed, 7777, 1));
        SessionResult s = run_session(st, mix(seed, 7777, 2));
        AdversaryModel adv;
        adv.compromised_factors = {"PW"};
        run_twin(out, st, s, adv,
                 {{expand(m.sk, m.defs),
                   recover_key_masked_random(st, s, st.longterm.at("PID_i"), st.longterm.at("ID_i"))}});
    }
    out.notes.push_back("password-side values strip both transported masks; the key then "
                        "follows from public fields alone");
}

void attack_null_server(AttackOutcome& out, const ProtocolModel& m, const SuiteParams& suite,
                        std::uint64_t seed, const AttackOpts& opts) {
    const std::string client = m.roles.front();
    const std::string played = m.roles.back();
    bool gap = !role_receives_verified_message(m, client);
    for (std::uint64_t t = 0; t < opts.trials; ++t) {
        DeploymentState st = register_deployment(m, suite, mix(seed, t, 1));
        SessionResult s = adversarial_run(st, mix(seed, t, 2), played);
        if (gap && s.accepted.at(client)) ++out.successes;
    }
    out.notes.push_back("the reply carries nothing the client verifies, so a server that "
                        "knows no secret at all is accepted");
}

void attack_envelope(AttackOutcome& out, const ProtocolModel& m, const SuiteParams& suite,
                     std::uint64_t seed, const AttackOpts& opts) {
    for (std::uint64_t t = 0; t < opts.trials; ++t) {
        DeploymentState st = register_deployment(m, suite, mix(seed, t, 1));
        SessionResult s = run_session(st, mix(seed, t, 2));
        // Identity off the wire (no compromise involved).
        bool anon_broken = wire_value(s, "ID_U") == st.longterm.at("ID_U");
        // Key recovery after the one pre-shared key leaks.
        Bytes k_x = material(st, "K_X", opts.withhold, mix(seed, t, 3));
        bool key_recovered = false;
        bool forged_accepted = false;
        try {
            Bytes body = sym_decrypt(k_x, wire_value(s, "Ct"), suite);
            key_recovered =
                hash_fields({slice(body, 0, 32), slice(body, 32, 64)}, suite) ==
                s.session_key.begin()->second;
            // Splice a fresh nonce behind the recovered credential and hand
            // the re-encrypted envelope to the server's decrypt-and-check.
            Rng forge_rng(mix(seed, t, 4));
            Bytes r_adv = forge_rng.bytes(32);
            Bytes forged = sym_encrypt(k_x, concat({slice(body, 0, 32), r_adv}), suite);
            Bytes opened = sym_decrypt(st.longterm.at("K_X"), forged, suite);
            bool server_accepts = slice(opened, 0, 32) == st.longterm.at("H_U");
            Bytes server_key = hash_fields({slice(opened, 0, 32), slice(opened, 32, 64)}, suite);
            Bytes adv_key = hash_fields({slice(body, 0, 32), r_adv}, suite);
            forged_accepted = server_accepts && server_key == adv_key;
        } catch (const WbError&) {
            // withheld key: decryption authentication fails
        }
        if (anon_broken && key_recovered && forged_accepted) ++out.successes;
    }
    if (!opts.withhold) {
        DeploymentState st = register_deployment(m, suite, mix(seed, 7777, 1));
        SessionResult s = run_session(st, mix(seed, 7777, 2));
        AdversaryModel adv;
        adv.longterm_leak = true;
        run_twin(out, st, s, adv,
                 {{expand(m.sk, m.defs), recover_key_envelope(st, s, st.longterm.at("K_X"))}});
    }
    out.notes.push_back("the identifier rides in the clear; the leaked envelope key opens "
                        "the credential ciphertext, rebuilds the session key, and re-encrypts "
                        "a spliced envelope the server accepts");
}

void attack_metadata_audit(AttackOutcome& out, const ProtocolModel& m, const SuiteParams&,
                           std::uint64_t, const AttackOpts&) {
    out.trials = 1;
    std::vector<std::string> findings;
    for (const auto& e : m.edges)
        findings.push_back("declared dependence: " + e.a + " " + e.kind + " " + e.b);
    auto it = m.meta.find("weakness");
    if (it != m.meta.end()) {
        for (const auto& w : it->second) {
            if (w == "pfs-reliance")
                findings.push_back("audit: the session key rests only on long-term inputs, so "
                                   "any later leak reopens recorded sessions");
            else if (w == "public-u")
                findings.push_back("audit: a fixed public parameter is reused across "
                                   "registrations and links them");
            else
                findings.push_back("audit: " + w);
        }
    }
    if (!findings.empty()) out.successes = 1;
    out.notes = std::move(findings);
}

void attack_channel_mitm(AttackOutcome& out, const ProtocolModel& m, const SuiteParams& suite,
                         std::uint64_t seed, const AttackOpts& opts) {
    for (std::uint64_t t = 0; t < opts.trials; ++t) {
        DeploymentState st = register_deployment(m, suite, mix(seed, t, 1));
        // Active run: both honest ends accept, each keyed to the adversary.
        DualTranscript tr = mitm_session(st, mix(seed, t, 2), !opts.withhold);
        bool active = tr.dual_keys() && tr.recovered_R_A == tr.honest_R_A &&
                      tr.recovered_tau == tr.honest_tau && tr.recovered_R_B == tr.honest_R_B;
        // Recorded-session recovery once the long-term pair leaks.
        SessionResult s = run_session(st, mix(seed, t, 3));
        Bytes id_s = material(st, "ID_s", opts.withhold, mix(seed, t, 4));
        ChannelRecovery rec = recover_key_channel(st, s, id_s, st.longterm.at("sigma_i"));
        bool recorded = rec.key == s.session_key.begin()->second;
        if (active && recorded) ++out.successes;
    }
    if (!opts.withhold) {
        DeploymentState st = register_deployment(m, suite, mix(seed, 7777, 1));
        SessionResult s = run_session(st, mix(seed, 7777, 2));
        ChannelRecovery rec =
            recover_key_channel(st, s, st.longterm.at("ID_s"), st.longterm.at("sigma_i"));
        AdversaryModel unmask;
        unmask.compromised_factors = {"SSID"};
        run_twin(out, st, s, unmask,
                 {{m.field_term("R_A"), rec.r_a}, {m.field_term("tau_i"), st.channel_tau}});
        AttackOutcome pfs_part;
        AdversaryModel leak;
        leak.longterm_leak = true;
        run_twin(pfs_part, st, s, leak, {{expand(m.sk, m.defs), rec.key}});
        out.symbolic_derivable = out.symbolic_derivable && pfs_part.symbolic_derivable;
        out.replay_matches = out.replay_matches && pfs_part.replay_matches;
    }
    out.notes.push_back("knowing the shared identifier, the channel adversary unmasks both "
                        "nonces and the helper string, enrolls its own extractor pair per "
                        "segment, and finishes holding one key with each honest end");
}

// --- registry ---------------------------------------------------------------

struct Entry {
    AttackInfo info;
    AttackFn fn;
};

const std::vector<Entry>& entries() {
    static const std::vector<Entry> table = {
        {{"A1-mutualauth",
          {"p1wofs", "p1fs"},
          {1},
          "fabricated initiator accepted: the responder never verifies anything",
          {},
          ""},
         attack_unverified_peer},
        {{"A1-tagchain",
          {"p1wofs", "p1fs"},
          {3, 4},
          "tag-generation key plus stored history reconstructs the whole tag table",
          {"TGK", "HD"},
          "TGK"},
         attack_tag_chain},
        {{"A1-entropy",
          {"p1wofs", "p1fs"},
          {4},
          "history pieces are low-entropy and the suite's quality gate flags every one",
          {"HD"},
          ""},
         attack_history_entropy},
        {{"A2-sk",
          {"p2"},
          {4, 5, 7},
          "session key unmasked from the wire with password-side identity material",
          {"PW"},
          "PW"},
         attack_masked_delivery},
        {{"A3-sk",
          {"p3"},
          {3, 4, 5, 7},
          "one long-term key unwinds every mask and the blinded field element",
          {"LSK"},
          "LSK"},
         attack_modular_blinding},
        {{"A4-sk",
          {"p4"},
          {4, 5, 6, 7},
          "card readout decrypts the returned ciphertext into session key and identity",
          {"PW", "SC"},
          "SC"},
         attack_card_ciphertext},
        {{"A5-sk",
          {"p5"},
          {4, 5, 7},
          "server-database readout replays the whole key schedule",
          {"device-read:server"},
          "device-read:server"},
         attack_stolen_verifier},
        {{"A6-sk",
          {"p6"},
          {4, 5, 7},
          "password-side values strip both transported masks and rebuild the key",
          {"PW"},
          "PW"},
         attack_masked_random},
        {{"A7-serverimp",
          {"p7"},
          {1, 7},
          "a server knowing no secret is accepted: the reply is never verified",
          {},
          ""},
         attack_null_server},
        {{"A8-envelope",
          {"p8"},
          {1, 4, 5, 6, 7},
          "cleartext identity, key recovery and envelope splicing once the one "
          "pre-shared key leaks",
          {"longterm-leak"},
          "longterm-leak"},
         attack_envelope},
        {{"A9-audit",
          {"p9"},
          {3, 4, 5, 7},
          "metadata audit: declared dependences and key-schedule reliance findings",
          {},
          ""},
         attack_metadata_audit},
        {{"A10-mitm",
          {"p10"},
          {1, 4, 5, 6, 7},
          "dual-key machine in the middle on the reciprocal channel, plus recorded-"
          "session recovery from the leaked long-term pair",
          {"SSID"},
          "SSID"},
         attack_channel_mitm},
    };
    return table;
}

}  // namespace

const std::vector<AttackInfo>& attack_registry() {
    static const std::vector<AttackInfo> infos = [] {
        std::vector<AttackInfo> v;
        for (const auto& e : entries()) v.push_back(e.info);
        return v;
    }();
    return infos;
}

const AttackInfo* find_attack(const std::string& id) {
    for (const auto& e : entries())
        if (e.info.id == id) return &e.info;
    return nullptr;
}

std::vector<const AttackInfo*> attacks_for(const std::string& protocol_id) {
    std::vector<const AttackInfo*> out;
    for (const auto& e : entries()) {
        const auto& p = e.info.protocols;
        if (std::find(p.begin(), p.end(), protocol_id) != p.end()) out.push_back(&e.info);
    }
    return out;
}

AttackOutcome run_attack(const AttackInfo& info, const ProtocolModel& model,
                         const SuiteParams& suite, std::uint64_t seed,
                         const AttackOpts& opts) {
    const auto& p = info.protocols;
    if (std::find(p.begin(), p.end(), model.id) == p.end())
        throw WbError("attack-mismatch", info.id + " does not target " + model.id);
    if (opts.no_compromise && info.needs_compromise())
        throw WbError("prerequisite-unmet",
                      info.id + " needs compromised material the run forbids");
    if (opts.withhold && info.withhold_target.empty())
        throw WbError("withhold-unsupported", info.id + " has no prerequisite to withhold");

    AttackFn fn = nullptr;
    for (const auto& e : entries())
        if (e.info.id == info.id) fn = e.fn;
    if (!fn) throw WbError("unknown-attack", info.id);

    AttackOutcome out;
    out.attack_id = info.id;
    out.protocol_id = model.id;
    out.trials = opts.trials;
    out.withheld = opts.withhold;
    fn(out, model, suite, seed, opts);
    out.success = out.trials > 0 && out.successes == out.trials;
    return out;
}

AttackOutcome run_attack(const std::string& attack_id, const std::string& protocol_id,
                         const std::string& data_dir, const SuiteParams& suite,
                         std::uint64_t seed, const AttackOpts& opts) {
    const AttackInfo* info = find_attack(attack_id);
    if (!info) throw WbError("unknown-attack", attack_id);
    ProtocolModel model = load_protocol_fixture(data_dir, protocol_id);
    return run_attack(*info, model, suite, seed, opts);
}

PfsOutcome pfs_experiment(const ProtocolModel& model, const SuiteParams& suite,
                          std::uint64_t seed) {
    PfsOutcome out;
    if (!model.runnable() || !model.sk) return out;
    out.applicable = true;
    DeploymentState st = register_deployment(model, suite, mix(seed, 0, 11));
    SessionResult s = run_session(st, mix(seed, 0, 12));
    AdversaryModel leak;
    leak.longterm_leak = true;
    SymbolicSetup setup = as_symbolic(st, s, leak);
    DerivationResult d = derive(setup.facts, setup.goal, setup.params);
    out.derivable = d.derivable;
    out.status = d.status;
    if (d.derivable)
        out.replay_matches =
            replay_trace(d.trace, setup.values, suite) == s.session_key.begin()->second;
    return out;
}

}  // namespace wb
