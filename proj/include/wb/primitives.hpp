// Deterministic, seedable building blocks backing every protocol model:
// digest with configurable output length, canonical multi-field encoding,
// authenticated symmetric encryption, code-offset fuzzy extractor, noisy PUF,
// prime-field scalar algebra (historical-data tags, one-way exponentiation),
// time-step counters and a byte-entropy estimate.
//
// Everything here is a pure function of its inputs (plus an explicit Rng where
// randomness is part of the contract), so experiment results are reproducible
// from a seed alone.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wb/bytes.hpp"

namespace wb {

// ---------------------------------------------------------------------------
// Suite parameters
// ---------------------------------------------------------------------------

struct SuiteParams {
    std::size_t digest_len = 32;          // L_h bytes
    std::size_t key_len = 32;             // symmetric key bytes
    std::uint64_t modulus = (1ULL << 61) - 1;  // prime field for tag/group math
    std::uint64_t group_generator = 3;    // one-way exponentiation base value
    std::size_t fuzzy_bits = 192;         // reading width for the fuzzy extractor
    std::size_t fuzzy_t = 3;              // exact correction threshold (Hamming)
    double puf_noise_rate = 0.0;          // Bernoulli per-bit flip probability
    double entropy_flag_threshold = 7.99; // bits/byte below which a source is flagged
    std::int64_t freshness_window = 5;    // accepted timestamp skew, simulated seconds

    void validate() const;
};

// ---------------------------------------------------------------------------
// Digest
// ---------------------------------------------------------------------------

// Raw digest of a single byte string, expanded or truncated to out_len.
Bytes hash_raw(const Bytes& data, std::size_t out_len);

// Canonical encoding of a field sequence: each field is length-prefixed
// (4-byte big-endian), so distinct argument vectors never collide.
Bytes encode_fields(const std::vector<Bytes>& fields);

// Digest over the canonical encoding. This is the H(a, b, ...) every protocol
// equation uses for "a || b || ..." inputs.
Bytes hash_fields(const std::vector<Bytes>& fields, const SuiteParams& suite);

// ---------------------------------------------------------------------------
// Authenticated symmetric encryption
// ---------------------------------------------------------------------------
//
// Deterministic keystream cipher with an appended 16-byte tag. Wrong key or a
// modified ciphertext fails authentication; decrypt never returns garbage.

constexpr std::size_t kSymTagLen = 16;

Bytes sym_encrypt(const Bytes& key, const Bytes& plaintext, const SuiteParams& suite);
// Throws WbError("sym-auth-failure") on tamper/wrong key,
// WbError("sym-ciphertext-short") when shorter than the tag.
Bytes sym_decrypt(const Bytes& key, const Bytes& ciphertext, const SuiteParams& suite);

// ---------------------------------------------------------------------------
// Fuzzy extractor (code-offset over a repetition code)
// ---------------------------------------------------------------------------
//
// gen(reading) draws a fresh coded secret, returns (sigma, tau). rep applied
// to a second reading succeeds with the enrollment sigma exactly when the two
// readings are within Hamming distance t; every farther reading raises
// decode-failure (majority ties, bounded-distance excess and a truncated
// commitment mismatch all fail closed).

struct FuzzyPair {
    Bytes sigma;  // extracted key material (digest length)
    Bytes tau;    // public helper: reading-sized offset plus 8-byte commitment
};

FuzzyPair fuzzy_gen(const Bytes& reading, const SuiteParams& suite, Rng& rng);
// Throws WbError("fuzzy-decode-failure") when the distance exceeds t;
// WbError("fuzzy-helper-malformed") / WbError("fuzzy-bad-params") on misuse.
Bytes fuzzy_rep(const Bytes& reading, const Bytes& tau, const SuiteParams& suite);

// Repetition factor used for threshold t (even so majority ties fail closed).
inline std::size_t fuzzy_repetition(std::size_t t) { return 2 * t + 2; }

// ---------------------------------------------------------------------------
// PUF
// ---------------------------------------------------------------------------
//
// Keyed PRF of the challenge plus Bernoulli bit noise: evaluations of one
// (device, challenge) pair agree up to the noise rate and are unrelated across
// devices or challenges.

class PufDevice {
public:
    explicit PufDevice(Bytes device_secret) : secret_(std::move(device_secret)) {}

    // Noise-free reference response.
    Bytes response(const Bytes& challenge, const SuiteParams& suite) const;
    // Response with per-bit Bernoulli noise at suite.puf_noise_rate.
    Bytes noisy_response(const Bytes& challenge, const SuiteParams& suite, Rng& rng) const;

private:
    Bytes secret_;
};

// ---------------------------------------------------------------------------
// Prime-field scalar algebra
// ---------------------------------------------------------------------------

std::uint64_t add_mod(std::uint64_t a, std::uint64_t b, std::uint64_t p);
std::uint64_t sub_mod(std::uint64_t a, std::uint64_t b, std::uint64_t p);
std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t p);
std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t p);

// Fold arbitrary bytes into a field scalar (big-endian Horner mod p).
std::uint64_t to_scalar(const Bytes& data, std::uint64_t p);

// Suite-parameter conveniences: all scalar work happens modulo suite.modulus.
inline std::uint64_t add_mod(std::uint64_t a, std::uint64_t b, const SuiteParams& s) {
    return add_mod(a, b, s.modulus);
}
inline std::uint64_t sub_mod(std::uint64_t a, std::uint64_t b, const SuiteParams& s) {
    return sub_mod(a, b, s.modulus);
}
inline std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, const SuiteParams& s) {
    return mul_mod(a, b, s.modulus);
}
inline std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, const SuiteParams& s) {
    return pow_mod(base, exp, s.modulus);
}
inline std::uint64_t to_scalar(const Bytes& data, const SuiteParams& s) {
    return to_scalar(data, s.modulus);
}

// Historical-data authentication tag:
//   tag = (K * toScalar(H(d, i)) + toScalar(H(K, i))) mod p
// with i and K encoded as 8-byte big-endian fields.
std::uint64_t tag_generate(std::uint64_t key, const Bytes& data_point,
                           std::uint64_t index, const SuiteParams& suite);

// ---------------------------------------------------------------------------
// Time-step counter
// ---------------------------------------------------------------------------

// floor((now - epoch) / interval). Throws WbError("totp-invalid-interval")
// when interval <= 0 and WbError("totp-time-before-epoch") when now < epoch.
std::uint64_t totp_counter(std::int64_t now, std::int64_t epoch, std::int64_t interval);

// ---------------------------------------------------------------------------
// Byte entropy
// ---------------------------------------------------------------------------

// Shannon entropy of the byte histogram, in bits per byte (0..8).
// Throws WbError("entropy-empty-sample") for an empty sample.
double shannon_entropy(const Bytes& sample);

inline bool entropy_flagged(double bits_per_byte, const SuiteParams& suite) {
    return bits_per_byte < suite.entropy_flag_threshold;
}
inline bool entropy_flagged(const Bytes& sample, const SuiteParams& suite) {
    return entropy_flagged(shannon_entropy(sample), suite);
}

}  // namespace wb
