// Executable protocol models loaded from declarative fixture files.
//
// A fixture declares roles, typed atoms, authentication factors (with the
// dependence edges between them), defining equations, an ordered message
// schema, the session-key derivation, per-role stored material, and optional
// runtime hooks (PUF, fuzzy extractor, history tables, pseudonym rotation).
//
// register_deployment() instantiates long-term material; run_session()
// executes the message schema over a simulated public channel, binding fresh
// nonces and timestamps, and lets each receiver verify authenticator fields
// by recomputation plus plain-timestamp freshness.  adversarial_run() plays
// one role with fabricated traffic so mutual-authentication gaps become
// observable.  as_symbolic() compiles a deployment plus an adversary into a
// knowledge base for the deduction engine.
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "wb/bytes.hpp"
#include "wb/deduce.hpp"
#include "wb/primitives.hpp"
#include "wb/term.hpp"

namespace wb {

// --- fixture data model -----------------------------------------------------

enum class WireAtom { Public, Secret, Nonce, Timestamp };

struct AtomDecl {
    std::string name;
    WireAtom kind = WireAtom::Secret;
    std::size_t byte_len = 0;
    bool identity = false;    // names a party; the linkability scan cares
    bool longterm = false;    // leaked by the forward-secrecy experiment
    bool hook_bound = false;  // a runtime hook supplies the value
    bool scalar = false;      // bound reduced mod p (8-byte big-endian)
    std::string from_role;    // nonce origin, informational
};

struct FactorDecl {
    std::string role;
    std::string name;      // e.g. LSK, TGK, PW, SC, BD, TOTP, PUF, SSID, SCP
    std::string category;  // knowledge | possession | inherent | location |
                           // historical-data | puf | firmware-integrity
};

struct EdgeDecl {
    std::string a;
    std::string kind;  // derived-from | protects | protected-by
    std::string b;
};

struct MessageDecl {
    int index = 0;
    std::string src;
    std::string dst;
    std::vector<std::string> fields;  // atom or equation names
    bool auth = false;  // receiver recomputes every field and compares
};

struct ProtocolModel {
    std::string id;
    std::string title;
    std::string domain;
    std::string adversary = "WA";   // declared adversary: WA | SA
    std::string fidelity = "full";  // full | metadata
    std::vector<std::string> roles;  // first entry initiates
    std::vector<AtomDecl> atoms;
    std::vector<FactorDecl> factors;
    std::map<std::string, std::vector<std::string>> holds;  // factor -> names
    std::vector<EdgeDecl> edges;
    std::vector<Equation> equations;
    Definitions defs;
    std::vector<MessageDecl> messages;
    TermPtr sk;  // null when the source gives no session-key equation
    std::map<std::string, std::vector<std::string>> stores;  // role -> names
    std::vector<std::string> hooks;
    std::map<std::string, std::vector<std::string>> meta;

    // Declared atoms plus equation-defined names, for parse_term.
    std::map<std::string, TermPtr> term_atoms;

    const AtomDecl* find_atom(const std::string& name) const;
    TermPtr field_term(const std::string& name) const;      // bare atom node
    TermPtr expanded_field(const std::string& name) const;  // defs applied
    bool has_role(const std::string& role) const;
    bool runnable() const { return fidelity == "full"; }

    // "LSK + TGK^c + HD^s + HDT^s" style summary.  Single-holder factors get
    // a role superscript only when more than one role declares factors.
    std::string factor_summary() const;
};

// Throws WbError("fixture-parse-error", "<origin>:<line>: <message>").
ProtocolModel parse_protocol_text(const std::string& text, const std::string& origin);
ProtocolModel load_protocol_file(const std::string& path);

// Fixture directory resolution: explicit argument, else MFA_WORKBENCH_DATA,
// else the compiled-in default.  Protocol files live in <dir>/protocols.
std::string default_data_dir();
std::vector<std::string> protocol_fixture_ids(const std::string& data_dir);
ProtocolModel load_protocol_fixture(const std::string& data_dir, const std::string& id);

// --- deployments ------------------------------------------------------------

struct DeploymentState {
    const ProtocolModel* model = nullptr;
    SuiteParams suite;
    Rng rng;                                   // registration stream
    Env longterm;                              // atom name -> bytes
    std::map<std::string, PufDevice> pufs;     // role -> device
    std::vector<std::pair<Bytes, std::uint64_t>> history;  // (d_i, t_i)
    Bytes channel_base;   // reciprocal channel reading (noisy-source hooks)
    Bytes channel_sigma;  // enrolled channel secret
    Bytes channel_tau;    // enrolled public helper string
    Bytes bio_base;       // enrolled biometric reading
    Bytes bio_helper;     // biometric helper string
    Bytes pseudonym;      // rotating transmitted identity
    std::uint64_t totp_epoch = 0;
    std::uint64_t totp_interval = 30;
    std::uint64_t now = 1'000'000;  // simulated clock, seconds
    std::uint64_t sessions_run = 0;

    DeploymentState() : rng(0) {}
};

// Deterministic: same model + suite + seed gives an identical state.
DeploymentState register_deployment(const ProtocolModel& model,
                                    const SuiteParams& suite, std::uint64_t seed);

// --- sessions ---------------------------------------------------------------

struct WireMessage {
    int index = 0;
    std::string src;
    std::string dst;
    std::vector<std::string> fields;
    std::vector<Bytes> values;  // as delivered (after any channel tampering)
    bool auth = false;
};

struct SessionResult {
    std::vector<WireMessage> wire;
    Env env;  // full session environment snapshot
    std::map<std::string, bool> accepted;      // role -> accept
    std::map<std::string, Bytes> session_key;  // role -> bytes (if derived)
    std::uint64_t seed = 0;

    bool all_accept() const;
    bool keys_agree() const;
};

// A channel tap sees each message after the sender emits it and may rewrite
// the delivered values; receivers then verify what was delivered.
using ChannelTap = std::function<void(WireMessage&)>;

// Throws WbError("metadata-fidelity") for models with no executable schema.
SessionResult run_session(DeploymentState& state, std::uint64_t seed,
                          const ChannelTap& tap = nullptr);

// Runs the schema with every message originating from `played_role` replaced
// by fabricated traffic: public constants and fresh-looking timestamps are
// filled honestly (the adversary knows both), everything else is random noise
// of the right width.  Honest receivers verify as usual.
SessionResult adversarial_run(DeploymentState& state, std::uint64_t seed,
                              const std::string& played_role);

// --- symbolic compilation ---------------------------------------------------

struct AdversaryModel;  // adversary.hpp

struct SymbolicSetup {
    std::vector<TermPtr> facts;
    CloseParams params;
    TermPtr goal;     // model sk unless overridden
    ValueMap values;  // concrete bytes for every fact, for trace replay
};

// facts = wire fields (channel >= eavesdrop) + public constants + bound
// timestamps + compromised factor material + device-read stores +
// (optionally) long-term secrets leaked after the session.
SymbolicSetup as_symbolic(const DeploymentState& state, const SessionResult& session,
                          const AdversaryModel& adversary);

// --- runtime hooks ----------------------------------------------------------

struct HookFns {
    std::function<void(DeploymentState&)> at_register;
    std::function<void(DeploymentState&, Env&, Rng&)> at_session;
    std::function<void(DeploymentState&, const Env&)> after_session;
};

const std::map<std::string, HookFns>& hook_table();

}  // namespace wb
