// Scripted attack library.  Every entry reproduces a concrete break against
// one or more protocol models — key recovery, impersonation, identity
// extraction, tag-table reconstruction, machine-in-the-middle, audit findings
// — and, where the break is a value-derivation, re-derives it symbolically
// through the deduction engine and replays the derivation trace for
// byte-exact agreement with the scripted recovery.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wb/adversary.hpp"
#include "wb/protocol.hpp"

namespace wb {

struct AttackInfo {
    std::string id;
    std::vector<std::string> protocols;  // fixture ids this attack applies to
    std::vector<int> criteria;           // criteria numbers the attack impacts
    std::string description;
    // Prerequisite capabilities beyond watching the channel: factor names,
    // "device-read:<role>", or "longterm-leak".  Empty means eavesdrop-only.
    std::vector<std::string> prerequisites;
    // Prerequisite whose material is replaced by random bytes in a withheld
    // run; empty when the attack has no meaningful withheld variant.
    std::string withhold_target;

    bool needs_compromise() const { return !prerequisites.empty(); }
};

struct AttackOpts {
    std::uint64_t trials = 100;
    bool withhold = false;       // substitute random bytes for the target
    bool no_compromise = false;  // refuse attacks that need compromised input
};

struct AttackOutcome {
    std::string attack_id;
    std::string protocol_id;
    std::uint64_t trials = 0;
    std::uint64_t successes = 0;
    bool success = false;  // every trial succeeded
    bool withheld = false;
    // Symbolic twin, when the break is a value derivation.
    bool symbolic_applicable = false;
    bool symbolic_derivable = false;
    bool replay_matches = false;  // trace replay equals the scripted bytes
    std::vector<std::string> notes;
};

const std::vector<AttackInfo>& attack_registry();
const AttackInfo* find_attack(const std::string& id);
std::vector<const AttackInfo*> attacks_for(const std::string& protocol_id);

// Throws WbError("unknown-attack"), WbError("attack-mismatch") when the
// protocol is not a target, WbError("prerequisite-unmet") under
// no_compromise, WbError("withhold-unsupported") when there is no target.
AttackOutcome run_attack(const AttackInfo& info, const ProtocolModel& model,
                         const SuiteParams& suite, std::uint64_t seed,
                         const AttackOpts& opts);
AttackOutcome run_attack(const std::string& attack_id, const std::string& protocol_id,
                         const std::string& data_dir, const SuiteParams& suite,
                         std::uint64_t seed, const AttackOpts& opts);

// Forward-secrecy experiment: run one honest session, leak every long-term
// atom afterwards, and ask the deduction engine for the session key.  When it
// derives, the trace is replayed and compared byte-for-byte to the honest key.
struct PfsOutcome {
    bool applicable = false;  // model runs and derives a session key
    bool derivable = false;   // engine reaches the key from leaked material
    bool replay_matches = false;
    CloseStatus status = CloseStatus::Completed;
};
PfsOutcome pfs_experiment(const ProtocolModel& model, const SuiteParams& suite,
                          std::uint64_t seed);

}  // namespace wb
