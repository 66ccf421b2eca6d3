// Runtime hooks give fixture models access to stateful primitives that a
// pure term-equation schema cannot express: PUF enrollment, fuzzy-extractor
// enrollment over noisy sources, historical-data tag tables, step counters
// and rotating transmitted pseudonyms.  Each hook binds the atoms the fixture
// declares with the `hook` flag.
#include "wb/adversary.hpp"
#include "wb/primitives.hpp"
#include "wb/protocol.hpp"

namespace wb {

namespace {

constexpr std::size_t kHistoryPieces = 8;
constexpr std::size_t kHistoryPieceLen = 256;
constexpr std::uint64_t kTotpEpoch = 500'000;
constexpr std::uint64_t kTotpInterval = 30;

Bytes truncated(Bytes b, std::size_t len) {
    b.resize(len);
    return b;
}

const AtomDecl& need_atom(const DeploymentState& st, const std::string& name) {
    const AtomDecl* d = st.model->find_atom(name);
    if (!d)
        throw WbError("hook-missing-atom",
                      st.model->id + ": hook expects a declared atom " + name);
    return *d;
}

// Sensor telemetry is low-entropy by nature: each byte comes from a 64-symbol
// alphabet, so the per-byte entropy sits well under the full 8 bits.
Bytes biased_piece(Rng& rng) {
    Bytes piece(kHistoryPieceLen);
    for (auto& b : piece) b = static_cast<std::uint8_t>(rng.below(64));
    return piece;
}

void hook_group_generator_register(DeploymentState& st) {
    const AtomDecl& g = need_atom(st, "G");
    Bytes value(g.byte_len < 8 ? 8 : g.byte_len, 0);
    Bytes tail = u64_be(st.suite.group_generator);
    std::copy(tail.begin(), tail.end(), value.end() - 8);
    st.longterm[g.name] = value;
}

void hook_history_register(DeploymentState& st) {
    need_atom(st, "K");
    std::uint64_t key = be_u64(st.longterm.at("K"));
    Rng hrng = st.rng.derive("history-table");
    st.history.clear();
    for (std::size_t i = 0; i < kHistoryPieces; ++i) {
        Bytes piece = biased_piece(hrng);
        std::uint64_t tag = tag_generate(key, piece, i, st.suite);
        st.history.emplace_back(std::move(piece), tag);
    }
}

void hook_totp_register(DeploymentState& st) {
    need_atom(st, "c_1");
    need_atom(st, "c_2");
    const std::string& holder = st.model->roles.front();
    Rng prng = st.rng.derive("puf-device");
    st.pufs.emplace(holder, PufDevice(prng.bytes(32)));
    st.totp_epoch = kTotpEpoch;
    st.totp_interval = kTotpInterval;
    const PufDevice& puf = st.pufs.at(holder);
    // Step-counter keys regenerate from the physical function; neither key
    // lives in storage.
    st.longterm["k_1"] = puf.response(st.longterm.at("c_1"), st.suite);
    st.longterm["k_2"] = puf.response(st.longterm.at("c_2"), st.suite);
}

void hook_totp_session(DeploymentState& st, Env& env, Rng&) {
    need_atom(st, "ctr");
    std::uint64_t counter = totp_counter(static_cast<std::int64_t>(st.now),
                                         static_cast<std::int64_t>(st.totp_epoch),
                                         static_cast<std::int64_t>(st.totp_interval));
    env["ctr"] = u64_be(counter);
}

void hook_channel_register(DeploymentState& st) {
    need_atom(st, "sigma_i");
    need_atom(st, "tau_i");
    Rng crng = st.rng.derive("channel-enroll");
    st.channel_base = crng.bytes(st.suite.fuzzy_bits / 8);
    FuzzyPair pair = fuzzy_gen(st.channel_base, st.suite, crng);
    st.channel_sigma = pair.sigma;
    st.channel_tau = pair.tau;
    Bytes reread = flip_random_bits(st.channel_base, channel_reading_noise(st.suite), crng);
    if (fuzzy_rep(reread, st.channel_tau, st.suite) != st.channel_sigma)
        throw WbError("hook-enroll-failure", "channel re-reading did not reproduce the secret");
    st.longterm["sigma_i"] = st.channel_sigma;
    st.longterm["tau_i"] = st.channel_tau;
}

void hook_channel_session(DeploymentState& st, Env& env, Rng& srng) {
    // The responder regenerates the channel secret from a fresh noisy reading
    // each session; the schema then uses the reproduced value.
    Bytes reading = flip_random_bits(st.channel_base, channel_reading_noise(st.suite), srng);
    env["sigma_i"] = fuzzy_rep(reading, st.channel_tau, st.suite);
}

void hook_pseudonym_register(DeploymentState& st) {
    need_atom(st, "B_1");
    need_atom(st, "TID_i");
    Rng brng = st.rng.derive("bio-enroll");
    st.bio_base = brng.bytes(st.suite.fuzzy_bits / 8);
    FuzzyPair pair = fuzzy_gen(st.bio_base, st.suite, brng);
    st.bio_helper = pair.tau;
    st.longterm["B_1"] = pair.sigma;
    const AtomDecl& tid = need_atom(st, "TID_i");
    st.pseudonym = truncated(
        hash_fields({st.longterm.at("ID_u"), st.longterm.at("K_GW"), st.longterm.at("R_GW1")},
                    st.suite),
        tid.byte_len);
    st.longterm["TID_i"] = st.pseudonym;
}

void hook_pseudonym_session(DeploymentState& st, Env& env, Rng& srng) {
    env["TID_i"] = st.pseudonym;
    Bytes reading = flip_random_bits(st.bio_base, st.suite.fuzzy_t, srng);
    if (fuzzy_rep(reading, st.bio_helper, st.suite) != st.longterm.at("B_1"))
        throw WbError("hook-bio-failure", "biometric re-reading did not reproduce the key");
}

void hook_pseudonym_after(DeploymentState& st, const Env& env) {
    const AtomDecl& tid = need_atom(st, "TID_i");
    st.pseudonym = truncated(hash_fields({st.pseudonym, env.at("N_2")}, st.suite), tid.byte_len);
}

}  // namespace

const std::map<std::string, HookFns>& hook_table() {
    static const std::map<std::string, HookFns> table = {
        {"group-generator", {hook_group_generator_register, nullptr, nullptr}},
        {"history-table", {hook_history_register, nullptr, nullptr}},
        {"step-counter-puf", {hook_totp_register, hook_totp_session, nullptr}},
        {"reciprocal-channel", {hook_channel_register, hook_channel_session, nullptr}},
        {"rotating-pseudonym", {hook_pseudonym_register, hook_pseudonym_session, hook_pseudonym_after}},
    };
    return table;
}

}  // namespace wb
