// Adversary capability model plus the channel-level experiments that need
// more than a scripted tap: stale-message replay and the full
// machine-in-the-middle run against reciprocal-channel key agreement.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wb/bytes.hpp"
#include "wb/protocol.hpp"

namespace wb {

enum class ChannelPower { Eavesdrop, InterceptInject, FullMitm };

struct AdversaryModel {
    ChannelPower channel = ChannelPower::Eavesdrop;
    // Factor names (per the model's factor table) whose held material the
    // adversary reads.  Strictly fewer than the protocol's factor count.
    std::vector<std::string> compromised_factors;
    // Role whose device storage is read out (smart card, server table, ...).
    std::string device_read_role;
    // Long-term secrets leak after the session (forward-secrecy experiments).
    bool longterm_leak = false;
};

// Enforces the compromise budget: every named factor must exist and at least
// one factor must stay uncompromised.  Throws WbError("unknown-factor") /
// WbError("all-factors-compromised").
void validate_compromise(const ProtocolModel& model, const AdversaryModel& adversary);

// Distinct factor names declared by the model (categories collapse per name).
std::vector<std::string> factor_names(const ProtocolModel& model);

// Re-read of an enrolled noisy source: flips exactly `flips` distinct bits.
Bytes flip_random_bits(const Bytes& reading, std::size_t flips, Rng& rng);

// Per-endpoint noise on a reciprocal channel.  Each endpoint reads the shared
// base with at most half the correction threshold, so any two endpoint
// readings stay within distance t of each other and extraction always decodes.
inline std::size_t channel_reading_noise(const SuiteParams& suite) {
    return suite.fuzzy_t / 2;
}

// Records one fresh session, then replays its opening verified-or-timestamped
// message into a later session.  Returns true when the receiver rejects the
// stale traffic (freshness holds) and false when it is accepted.  Models with
// nothing to replay against (no verified or timestamped message) return false.
bool stale_replay_rejected(DeploymentState& state, std::uint64_t seed);

// --- full machine-in-the-middle against channel-derived keys ----------------

// Both honest endpoints finish, each sharing a key with the adversary rather
// than with each other.  `recovered_*` hold what the adversary computed from
// wire traffic alone; `honest_*` the true values, for byte-exact comparison.
struct DualTranscript {
    bool device_accept = false;
    bool gateway_accept = false;
    Bytes sk_device;           // key the device derived
    Bytes sk_gateway;          // key the gateway derived
    Bytes adv_device_side;     // adversary's copy of the device-facing key
    Bytes adv_gateway_side;    // adversary's copy of the gateway-facing key
    Bytes recovered_R_A, honest_R_A;
    Bytes recovered_tau, honest_tau;
    Bytes recovered_R_B, honest_R_B;

    bool dual_keys() const {
        return device_accept && gateway_accept && sk_device == adv_device_side &&
               sk_gateway == adv_gateway_side && !sk_device.empty() &&
               sk_device != sk_gateway;
    }
};

// Runs the reciprocal-channel schema with an active adversary sitting on both
// channel segments.  With `know_identity` the adversary uses the protocol's
// shared identity (its secrecy is the scheme's only barrier); without it every
// unmasking step below produces noise and both endpoints reject.
// Requires a model with the channel-enrollment hook; throws
// WbError("mitm-unsupported") otherwise.
DualTranscript mitm_session(DeploymentState& state, std::uint64_t seed, bool know_identity);

}  // namespace wb
