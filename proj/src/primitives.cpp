#include "wb/primitives.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstring>

namespace wb {

// ---------------------------------------------------------------------------
// Suite parameters
// ---------------------------------------------------------------------------

void SuiteParams::validate() const {
    if (digest_len == 0 || digest_len > 64) fail("suite-bad-digest-len", std::to_string(digest_len));
    if (key_len == 0) fail("suite-bad-key-len", "0");
    if (modulus < 3) fail("suite-bad-modulus", std::to_string(modulus));
    if (fuzzy_bits == 0 || fuzzy_bits % 8 != 0)
        fail("suite-bad-fuzzy-bits", std::to_string(fuzzy_bits));
    std::size_t r = fuzzy_repetition(fuzzy_t);
    if (fuzzy_t == 0 || fuzzy_bits % r != 0)
        fail("fuzzy-bad-params", "reading width " + std::to_string(fuzzy_bits) +
                                     " not divisible by repetition factor " + std::to_string(r));
    if (puf_noise_rate < 0.0 || puf_noise_rate > 1.0)
        fail("suite-bad-puf-noise", std::to_string(puf_noise_rate));
    if (freshness_window <= 0) fail("suite-bad-window", std::to_string(freshness_window));
}

// ---------------------------------------------------------------------------
// Digest
// ---------------------------------------------------------------------------

static Bytes sha256(const Bytes& data) {
    Bytes out(32);
    unsigned int written = 0;
    if (EVP_Digest(data.data(), data.size(), out.data(), &written, EVP_sha256(), nullptr) != 1 ||
        written != 32)
        fail("hash-backend-failure", "EVP_Digest");
    return out;
}

Bytes hash_raw(const Bytes& data, std::size_t out_len) {
    if (out_len == 0) fail("hash-bad-length", "0");
    if (out_len <= 32) {
        Bytes d = sha256(data);
        d.resize(out_len);
        return d;
    }
    // Counter-mode expansion for wider digests.
    Bytes out;
    out.reserve(out_len);
    std::uint32_t counter = 0;
    while (out.size() < out_len) {
        Bytes block = data;
        block.push_back(static_cast<std::uint8_t>(counter >> 24));
        block.push_back(static_cast<std::uint8_t>(counter >> 16));
        block.push_back(static_cast<std::uint8_t>(counter >> 8));
        block.push_back(static_cast<std::uint8_t>(counter));
        Bytes d = sha256(block);
        out.insert(out.end(), d.begin(), d.end());
        ++counter;
    }
    out.resize(out_len);
    return out;
}

Bytes encode_fields(const std::vector<Bytes>& fields) {
    Bytes out;
    std::size_t total = 0;
    for (const auto& f : fields) total += f.size() + 4;
    out.reserve(total);
    for (const auto& f : fields) {
        std::uint32_t n = static_cast<std::uint32_t>(f.size());
        out.push_back(static_cast<std::uint8_t>(n >> 24));
        out.push_back(static_cast<std::uint8_t>(n >> 16));
        out.push_back(static_cast<std::uint8_t>(n >> 8));
        out.push_back(static_cast<std::uint8_t>(n));
        out.insert(out.end(), f.begin(), f.end());
    }
    return out;
}

Bytes hash_fields(const std::vector<Bytes>& fields, const SuiteParams& suite) {
    return hash_raw(encode_fields(fields), suite.digest_len);
}

// ---------------------------------------------------------------------------
// Authenticated symmetric encryption
// ---------------------------------------------------------------------------

static Bytes keystream(const Bytes& key, std::size_t n) {
    Bytes out;
    out.reserve(n + 32);
    std::uint32_t counter = 0;
    static const Bytes kStreamSep = {'s', 'y', 'm', '-', 'k', 's'};
    while (out.size() < n) {
        Bytes block = encode_fields({kStreamSep, key, u64_be(counter)});
        Bytes d = sha256(block);
        out.insert(out.end(), d.begin(), d.end());
        ++counter;
    }
    out.resize(n);
    return out;
}

static Bytes sym_tag(const Bytes& key, const Bytes& body) {
    static const Bytes kTagSep = {'s', 'y', 'm', '-', 't', 'a', 'g'};
    Bytes t = sha256(encode_fields({kTagSep, key, body}));
    t.resize(kSymTagLen);
    return t;
}

Bytes sym_encrypt(const Bytes& key, const Bytes& plaintext, const SuiteParams& suite) {
    if (key.size() != suite.key_len)
        fail("sym-bad-key-length", std::to_string(key.size()) + " != " + std::to_string(suite.key_len));
    Bytes body = xor_bytes(plaintext, keystream(key, plaintext.size()));
    Bytes tag = sym_tag(key, body);
    body.insert(body.end(), tag.begin(), tag.end());
    return body;
}

Bytes sym_decrypt(const Bytes& key, const Bytes& ciphertext, const SuiteParams& suite) {
    if (key.size() != suite.key_len)
        fail("sym-bad-key-length", std::to_string(key.size()) + " != " + std::to_string(suite.key_len));
    if (ciphertext.size() < kSymTagLen)
        fail("sym-ciphertext-short", std::to_string(ciphertext.size()) + " bytes");
    Bytes body(ciphertext.begin(), ciphertext.end() - kSymTagLen);
    Bytes tag(ciphertext.end() - kSymTagLen, ciphertext.end());
    Bytes expect = sym_tag(key, body);
    if (tag != expect) fail("sym-auth-failure", "tag mismatch");
    return xor_bytes(body, keystream(key, body.size()));
}

// ---------------------------------------------------------------------------
// Fuzzy extractor
// ---------------------------------------------------------------------------

static bool get_bit(const Bytes& b, std::size_t i) {
    return (b[i / 8] >> (7 - i % 8)) & 1u;
}

static void set_bit(Bytes& b, std::size_t i, bool v) {
    std::uint8_t mask = static_cast<std::uint8_t>(1u << (7 - i % 8));
    if (v)
        b[i / 8] |= mask;
    else
        b[i / 8] &= static_cast<std::uint8_t>(~mask);
}

// Expand k secret bits into the n-bit repetition codeword.
static Bytes repetition_encode(const Bytes& secret_bits, std::size_t k, std::size_t r) {
    std::size_t n = k * r;
    Bytes code(n / 8, 0);
    for (std::size_t i = 0; i < k; ++i) {
        bool bit = get_bit(secret_bits, i);
        for (std::size_t j = 0; j < r; ++j) set_bit(code, i * r + j, bit);
    }
    return code;
}

static Bytes fuzzy_commitment(const Bytes& secret_bits) {
    static const Bytes kComSep = {'f', 'e', '-', 'c', 'o', 'm'};
    Bytes c = sha256(encode_fields({kComSep, secret_bits}));
    c.resize(8);
    return c;
}

static Bytes fuzzy_sigma(const Bytes& secret_bits, const SuiteParams& suite) {
    static const Bytes kSigSep = {'f', 'e', '-', 's', 'i', 'g'};
    return hash_raw(encode_fields({kSigSep, secret_bits}), suite.digest_len);
}

static void fuzzy_check_params(std::size_t reading_bytes, const SuiteParams& suite) {
    std::size_t n = reading_bytes * 8;
    std::size_t r = fuzzy_repetition(suite.fuzzy_t);
    if (n != suite.fuzzy_bits)
        fail("fuzzy-bad-params", "reading of " + std::to_string(n) + " bits, suite expects " +
                                     std::to_string(suite.fuzzy_bits));
    if (n == 0 || n % r != 0)
        fail("fuzzy-bad-params", "reading of " + std::to_string(n) +
                                     " bits with repetition factor " + std::to_string(r));
}

FuzzyPair fuzzy_gen(const Bytes& reading, const SuiteParams& suite, Rng& rng) {
    fuzzy_check_params(reading.size(), suite);
    std::size_t r = fuzzy_repetition(suite.fuzzy_t);
    std::size_t n = reading.size() * 8;
    std::size_t k = n / r;
    Bytes secret_bits((k + 7) / 8, 0);
    for (std::size_t i = 0; i < k; ++i) set_bit(secret_bits, i, rng.next_u64() & 1u);
    Bytes offset = xor_bytes(reading, repetition_encode(secret_bits, k, r));
    Bytes tau = offset;
    Bytes com = fuzzy_commitment(secret_bits);
    tau.insert(tau.end(), com.begin(), com.end());
    return FuzzyPair{fuzzy_sigma(secret_bits, suite), tau};
}

Bytes fuzzy_rep(const Bytes& reading, const Bytes& tau, const SuiteParams& suite) {
    fuzzy_check_params(reading.size(), suite);
    if (tau.size() != reading.size() + 8)
        fail("fuzzy-helper-malformed", std::to_string(tau.size()) + " bytes");
    std::size_t r = fuzzy_repetition(suite.fuzzy_t);
    std::size_t n = reading.size() * 8;
    std::size_t k = n / r;
    Bytes offset(tau.begin(), tau.begin() + static_cast<std::ptrdiff_t>(reading.size()));
    Bytes com(tau.end() - 8, tau.end());
    Bytes shifted = xor_bytes(reading, offset);  // codeword plus reading noise
    Bytes secret_bits((k + 7) / 8, 0);
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t ones = 0;
        for (std::size_t j = 0; j < r; ++j) ones += get_bit(shifted, i * r + j) ? 1 : 0;
        if (ones * 2 == r) fail("fuzzy-decode-failure", "majority tie in block " + std::to_string(i));
        set_bit(secret_bits, i, ones * 2 > r);
    }
    if (fuzzy_commitment(secret_bits) != com)
        fail("fuzzy-decode-failure", "commitment mismatch");
    std::size_t dist = hamming_distance(shifted, repetition_encode(secret_bits, k, r));
    if (dist > suite.fuzzy_t)
        fail("fuzzy-decode-failure", "residual distance " + std::to_string(dist) +
                                         " exceeds threshold " + std::to_string(suite.fuzzy_t));
    return fuzzy_sigma(secret_bits, suite);
}

// ---------------------------------------------------------------------------
// PUF
// ---------------------------------------------------------------------------

Bytes PufDevice::response(const Bytes& challenge, const SuiteParams& suite) const {
    static const Bytes kPufSep = {'p', 'u', 'f'};
    return hash_raw(encode_fields({kPufSep, secret_, challenge}), suite.digest_len);
}

Bytes PufDevice::noisy_response(const Bytes& challenge, const SuiteParams& suite,
                                Rng& rng) const {
    Bytes out = response(challenge, suite);
    for (std::size_t i = 0; i < out.size() * 8; ++i)
        if (rng.uniform01() < suite.puf_noise_rate) set_bit(out, i, !get_bit(out, i));
    return out;
}

// ---------------------------------------------------------------------------
// Prime-field scalar algebra
// ---------------------------------------------------------------------------

std::uint64_t add_mod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a % p) + (b % p)) % p);
}

std::uint64_t sub_mod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
    a %= p;
    b %= p;
    return a >= b ? a - b : a + (p - b);
}

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a % p) * (b % p)) % p);
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t p) {
    std::uint64_t acc = 1 % p;
    base %= p;
    // Fixed 64-iteration ladder keeps the measured cost input-independent.
    for (int i = 63; i >= 0; --i) {
        acc = mul_mod(acc, acc, p);
        if ((exp >> i) & 1u) acc = mul_mod(acc, base, p);
    }
    return acc;
}

std::uint64_t to_scalar(const Bytes& data, std::uint64_t p) {
    std::uint64_t acc = 0;
    for (std::uint8_t b : data) acc = add_mod(mul_mod(acc, 256 % p, p), b % p, p);
    return acc;
}

std::uint64_t tag_generate(std::uint64_t key, const Bytes& data_point, std::uint64_t index,
                           const SuiteParams& suite) {
    std::uint64_t p = suite.modulus;
    std::uint64_t data_term = to_scalar(hash_fields({data_point, u64_be(index)}, suite), p);
    std::uint64_t blind_term = to_scalar(hash_fields({u64_be(key), u64_be(index)}, suite), p);
    return add_mod(mul_mod(key % p, data_term, p), blind_term, p);
}

// ---------------------------------------------------------------------------
// Time-step counter
// ---------------------------------------------------------------------------

std::uint64_t totp_counter(std::int64_t now, std::int64_t epoch, std::int64_t interval) {
    if (interval <= 0) fail("totp-invalid-interval", std::to_string(interval));
    if (now < epoch) fail("totp-time-before-epoch",
                          std::to_string(now) + " < " + std::to_string(epoch));
    return static_cast<std::uint64_t>((now - epoch) / interval);
}

// ---------------------------------------------------------------------------
// Byte entropy
// ---------------------------------------------------------------------------

double shannon_entropy(const Bytes& sample) {
    if (sample.empty()) fail("entropy-empty-sample", "no bytes");
    std::size_t counts[256] = {0};
    for (std::uint8_t b : sample) ++counts[b];
    double total = static_cast<double>(sample.size());
    double h = 0.0;
    for (std::size_t c : counts) {
        if (c == 0) continue;
        double pr = static_cast<double>(c) / total;
        h -= pr * std::log2(pr);
    }
    return h;
}

}  // namespace wb
