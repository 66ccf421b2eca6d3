#include "wb/adversary.hpp"

#include <algorithm>
#include <set>

#include "wb/primitives.hpp"

namespace wb {

std::vector<std::string> factor_names(const ProtocolModel& model) {
    std::vector<std::string> names;
    for (const auto& f : model.factors)
        if (std::find(names.begin(), names.end(), f.name) == names.end())
            names.push_back(f.name);
    return names;
}

void validate_compromise(const ProtocolModel& model, const AdversaryModel& adversary) {
    auto names = factor_names(model);
    std::set<std::string> chosen;
    for (const auto& f : adversary.compromised_factors) {
        if (std::find(names.begin(), names.end(), f) == names.end())
            throw WbError("unknown-factor", model.id + " declares no factor " + f);
        chosen.insert(f);
    }
    if (!names.empty() && chosen.size() >= names.size())
        throw WbError("all-factors-compromised",
                      model.id + ": at least one factor must stay uncompromised");
}

Bytes flip_random_bits(const Bytes& reading, std::size_t flips, Rng& rng) {
    if (flips > reading.size() * 8)
        throw WbError("flip-out-of-range", "more flips than bits");
    Bytes out = reading;
    std::set<std::uint64_t> picked;
    while (picked.size() < flips) picked.insert(rng.below(reading.size() * 8));
    for (auto bit : picked) out[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
    return out;
}

bool stale_replay_rejected(DeploymentState& state, std::uint64_t seed) {
    const ProtocolModel& m = *state.model;
    // Pick the first message a receiver actually checks.
    int target = -1;
    for (const auto& md : m.messages) {
        bool has_ts = false;
        for (const auto& f : md.fields) {
            const AtomDecl* d = m.find_atom(f);
            if (d && d->kind == WireAtom::Timestamp) has_ts = true;
        }
        if (md.auth || has_ts) {
            target = md.index;
            break;
        }
    }
    if (target < 0) return false;

    SessionResult first = run_session(state, seed);
    std::vector<Bytes> stale;
    for (const auto& wm : first.wire)
        if (wm.index == target) stale = wm.values;

    ChannelTap tap = [&](WireMessage& wm) {
        if (wm.index == target) wm.values = stale;
    };
    SessionResult second = run_session(state, seed + 1, tap);
    return !second.all_accept();
}

// --- machine in the middle --------------------------------------------------

namespace {

Bytes clock_tail(std::uint64_t value, std::size_t len) {
    Bytes out(len < 8 ? 8 : len, 0);
    Bytes tail = u64_be(value);
    std::copy(tail.begin(), tail.end(), out.end() - 8);
    return out;
}

Bytes rep_or_noise(const Bytes& reading, const Bytes& tau, const SuiteParams& suite, Rng& rng) {
    try {
        return fuzzy_rep(reading, tau, suite);
    } catch (const WbError&) {
        return rng.bytes(suite.digest_len);
    }
}

}  // namespace

DualTranscript mitm_session(DeploymentState& state, std::uint64_t seed, bool know_identity) {
    const ProtocolModel& m = *state.model;
    if (state.channel_base.empty() || !m.find_atom("ID_s"))
        throw WbError("mitm-unsupported",
                      m.id + " has no enrolled reciprocal channel to sit on");
    const SuiteParams& suite = state.suite;
    state.now += 60;
    ++state.sessions_run;

    Rng srng(seed);                    // honest endpoints
    Rng arng(seed ^ 0xa5a5a5a5a5a5a5a5ULL);  // adversary
    const Bytes& id_s = state.longterm.at("ID_s");
    Bytes id_guess = know_identity ? id_s : arng.bytes(id_s.size());

    DualTranscript out;
    out.honest_tau = state.channel_tau;

    // Device opens: TS_A, M_1 = H(ID_s, TS_A) xor R_A, M_2 = R_A xor tau_i.
    const AtomDecl* ra_decl = m.find_atom("R_A");
    std::size_t nlen = ra_decl ? ra_decl->byte_len : suite.digest_len;
    Bytes ts_a = clock_tail(state.now + 1, 32);
    Bytes r_a = srng.bytes(nlen);
    out.honest_R_A = r_a;
    Bytes m1 = xor_bytes(hash_fields({id_s, ts_a}, suite), r_a);
    Bytes m2 = xor_bytes(r_a, state.channel_tau);

    // Adversary on the device-side segment: unmask R_A, then the helper
    // string, then regenerate the channel secret from its own reading.
    out.recovered_R_A = xor_bytes(m1, hash_fields({id_guess, ts_a}, suite));
    out.recovered_tau = xor_bytes(m2, out.recovered_R_A);
    Bytes adv_reading_a = flip_random_bits(state.channel_base, channel_reading_noise(suite), arng);
    Bytes sigma_dev_side = rep_or_noise(adv_reading_a, out.recovered_tau, suite, arng);

    // Adversary enrolls its own pair on the gateway-side segment and swaps
    // the helper string before forwarding.
    Bytes adv_reading_b = flip_random_bits(state.channel_base, channel_reading_noise(suite), arng);
    FuzzyPair adv_pair = fuzzy_gen(adv_reading_b, suite, arng);
    Bytes m2_fwd = xor_bytes(out.recovered_R_A, adv_pair.tau);

    // Gateway answers the forwarded opener.
    Bytes r_a_gw = xor_bytes(m1, hash_fields({id_s, ts_a}, suite));
    Bytes tau_gw = xor_bytes(m2_fwd, r_a_gw);
    Bytes gw_reading = flip_random_bits(state.channel_base, channel_reading_noise(suite), srng);
    Bytes sigma_gw = rep_or_noise(gw_reading, tau_gw, suite, srng);
    Bytes ts_b = clock_tail(state.now + 2, 32);
    Bytes r_b = srng.bytes(nlen);
    out.honest_R_B = r_b;
    out.sk_gateway = hash_fields({id_s, ts_a, ts_b, r_a_gw, r_b, sigma_gw}, suite);
    Bytes m4 = xor_bytes(hash_fields({id_s, ts_b, ts_a, r_a_gw}, suite), r_b);

    // Adversary unmasks R_B and re-authenticates toward the device with the
    // device-side key, and toward the gateway with the gateway-side key.
    out.recovered_R_B = xor_bytes(m4, hash_fields({id_guess, ts_b, ts_a, out.recovered_R_A}, suite));
    out.adv_device_side =
        hash_fields({id_guess, ts_a, ts_b, out.recovered_R_A, out.recovered_R_B, sigma_dev_side}, suite);
    out.adv_gateway_side =
        hash_fields({id_guess, ts_a, ts_b, out.recovered_R_A, out.recovered_R_B, adv_pair.sigma}, suite);
    Bytes m5_fwd = hash_fields(
        {xor_bytes(xor_bytes(out.adv_device_side, out.recovered_R_A), out.recovered_R_B)}, suite);

    // Device closes its side against the forwarded confirmation.
    out.sk_device = hash_fields({id_s, ts_a, ts_b, r_a, r_b, state.channel_sigma}, suite);
    Bytes m5_expected =
        hash_fields({xor_bytes(xor_bytes(out.sk_device, r_a), r_b)}, suite);
    out.device_accept = m5_fwd == m5_expected;

    // Device's closing receipt, re-authenticated by the adversary.
    Bytes m8_fwd = hash_fields({out.adv_gateway_side, id_guess}, suite);
    Bytes m8_expected = hash_fields({out.sk_gateway, id_s}, suite);
    out.gateway_accept = m8_fwd == m8_expected;
    return out;
}

}  // namespace wb
