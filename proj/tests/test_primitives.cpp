#include <catch2/catch_amalgamated.hpp>

#include "wb/bytes.hpp"
#include "wb/primitives.hpp"

using namespace wb;

namespace {
SuiteParams suite() {
    SuiteParams s;
    s.validate();
    return s;
}
}  // namespace

TEST_CASE("digest output length and determinism") {
    Bytes msg = {1, 2, 3};
    CHECK(hash_raw(msg, 32).size() == 32);
    CHECK(hash_raw(msg, 16).size() == 16);
    CHECK(hash_raw(msg, 48).size() == 48);
    CHECK(hash_raw(msg, 32) == hash_raw(msg, 32));
    CHECK(hash_raw(msg, 32) != hash_raw(Bytes{1, 2, 4}, 32));
    // Short outputs truncate the full digest.
    Bytes full = hash_raw(msg, 32);
    Bytes half = hash_raw(msg, 16);
    CHECK(Bytes(full.begin(), full.begin() + 16) == half);
}

TEST_CASE("field encoding is injective across boundaries") {
    Bytes ab_c = encode_fields({{'a', 'b'}, {'c'}});
    Bytes a_bc = encode_fields({{'a'}, {'b', 'c'}});
    CHECK(ab_c != a_bc);
    auto s = suite();
    CHECK(hash_fields({{'a', 'b'}, {'c'}}, s) != hash_fields({{'a'}, {'b', 'c'}}, s));
    CHECK(hash_fields({{'a', 'b'}}, s) != hash_fields({{'a', 'b'}, {}}, s));
}

TEST_CASE("xor behaves as an abelian group of involutions") {
    Rng rng(7);
    for (int i = 0; i < 20; ++i) {
        Bytes a = rng.bytes(32), b = rng.bytes(32), c = rng.bytes(32);
        Bytes zero(32, 0);
        CHECK(xor_bytes(a, b) == xor_bytes(b, a));
        CHECK(xor_bytes(xor_bytes(a, b), c) == xor_bytes(a, xor_bytes(b, c)));
        CHECK(xor_bytes(a, zero) == a);
        CHECK(xor_bytes(a, a) == zero);
        // Masking then unmasking recovers the payload.
        CHECK(xor_bytes(xor_bytes(a, b), b) == a);
    }
    CHECK_THROWS_AS(xor_bytes(Bytes(3, 0), Bytes(4, 0)), WbError);
}

TEST_CASE("authenticated encryption round-trips and fails closed") {
    auto s = suite();
    Rng rng(11);
    Bytes key = rng.bytes(32);
    Bytes body = rng.bytes(57);
    Bytes ct = sym_encrypt(key, body, s);
    CHECK(ct.size() == body.size() + kSymTagLen);
    CHECK(sym_decrypt(key, ct, s) == body);

    // Any single-byte corruption is rejected, in the body or in the tag.
    for (std::size_t pos : {std::size_t{0}, body.size() / 2, body.size(), ct.size() - 1}) {
        Bytes bad = ct;
        bad[pos] ^= 0x01;
        CHECK_THROWS_AS(sym_decrypt(key, bad, s), WbError);
    }
    Bytes other_key = rng.bytes(32);
    CHECK_THROWS_AS(sym_decrypt(other_key, ct, s), WbError);
    CHECK_THROWS_AS(sym_decrypt(key, Bytes(kSymTagLen - 1, 0), s), WbError);

    // Empty body is legal; ciphertext is just the tag.
    Bytes empty_ct = sym_encrypt(key, {}, s);
    CHECK(empty_ct.size() == kSymTagLen);
    CHECK(sym_decrypt(key, empty_ct, s).empty());
}

TEST_CASE("fuzzy extractor reproduces the key exactly up to the threshold") {
    auto s = suite();
    Rng rng(23);
    const std::size_t n_bytes = s.fuzzy_bits / 8;

    for (int trial = 0; trial < 10; ++trial) {
        Bytes reading = rng.bytes(n_bytes);
        FuzzyPair fp = fuzzy_gen(reading, s, rng);
        CHECK(fp.tau.size() == n_bytes + 8);
        CHECK(fp.sigma.size() == s.digest_len);

        // Exact reading reproduces sigma.
        CHECK(fuzzy_rep(reading, fp.tau, s) == fp.sigma);

        // Up to t flipped bits still reproduce sigma.
        Bytes noisy = reading;
        std::vector<std::size_t> order(s.fuzzy_bits);
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[rng.below(i)]);
        for (std::size_t f = 0; f < s.fuzzy_t; ++f)
            noisy[order[f] / 8] ^= static_cast<std::uint8_t>(0x80u >> (order[f] % 8));
        CHECK(fuzzy_rep(noisy, fp.tau, s) == fp.sigma);

        // One flip past the threshold is rejected.
        noisy[order[s.fuzzy_t] / 8] ^= static_cast<std::uint8_t>(0x80u >> (order[s.fuzzy_t] % 8));
        CHECK_THROWS_AS(fuzzy_rep(noisy, fp.tau, s), WbError);

        // A completely unrelated reading is rejected.
        Bytes flipped = reading;
        for (auto& b : flipped) b = static_cast<std::uint8_t>(~b);
        CHECK_THROWS_AS(fuzzy_rep(flipped, fp.tau, s), WbError);
    }

    Bytes reading = rng.bytes(n_bytes);
    FuzzyPair fp = fuzzy_gen(reading, s, rng);
    Bytes short_tau(fp.tau.begin(), fp.tau.end() - 1);
    CHECK_THROWS_AS(fuzzy_rep(reading, short_tau, s), WbError);
    CHECK_THROWS_AS(fuzzy_gen(Bytes(n_bytes - 1, 0), s, rng), WbError);
}

TEST_CASE("physical function is device-bound and noise-controlled") {
    auto s = suite();
    Rng rng(31);
    PufDevice dev{rng.bytes(32)};
    PufDevice other{rng.bytes(32)};
    Bytes challenge = rng.bytes(16);
    Bytes r1 = dev.response(challenge, s);
    CHECK(r1.size() == s.digest_len);
    CHECK(r1 == dev.response(challenge, s));
    CHECK(r1 != other.response(challenge, s));

    Rng noise_rng(5);
    SuiteParams quiet = s;
    quiet.puf_noise_rate = 0.0;
    CHECK(dev.noisy_response(challenge, quiet, noise_rng) == r1);

    SuiteParams loud = s;
    loud.puf_noise_rate = 0.5;
    Bytes noisy = dev.noisy_response(challenge, loud, noise_rng);
    CHECK(noisy != r1);
    CHECK(noisy.size() == r1.size());
}

TEST_CASE("prime field arithmetic satisfies the usual identities") {
    auto s = suite();
    const std::uint64_t p = s.modulus;
    Rng rng(41);
    for (int i = 0; i < 50; ++i) {
        std::uint64_t a = rng.below(p), b = rng.below(p), c = rng.below(p);
        CHECK(add_mod(a, b, s) == add_mod(b, a, s));
        CHECK(add_mod(a, sub_mod(p, a, s) % p, s) == 0);
        CHECK(mul_mod(a, b, s) == mul_mod(b, a, s));
        CHECK(mul_mod(a, add_mod(b, c, s), s) ==
              add_mod(mul_mod(a, b, s), mul_mod(a, c, s), s));
        CHECK(sub_mod(add_mod(a, b, s), b, s) == a);
    }
    CHECK(pow_mod(s.group_generator, 0, s) == 1);
    std::uint64_t x = 1 + rng.below(p - 1);
    // Fermat: x^(p-1) = 1 for prime p.
    CHECK(pow_mod(x, p - 1, s) == 1);
    std::uint64_t e1 = rng.below(1u << 20), e2 = rng.below(1u << 20);
    CHECK(pow_mod(x, e1 + e2, s) == mul_mod(pow_mod(x, e1, s), pow_mod(x, e2, s), s));
    // Commuting two-step exponentials agree (the unauthenticated-DH core).
    std::uint64_t ga = pow_mod(s.group_generator, e1, s);
    std::uint64_t gb = pow_mod(s.group_generator, e2, s);
    CHECK(pow_mod(ga, e2, s) == pow_mod(gb, e1, s));
}

TEST_CASE("scalar folding reduces below the modulus and is stable on canonical words") {
    auto s = suite();
    Rng rng(43);
    for (int i = 0; i < 20; ++i) {
        std::uint64_t v = rng.below(s.modulus);
        CHECK(to_scalar(u64_be(v), s) == v);
        Bytes wide = rng.bytes(32);
        CHECK(to_scalar(wide, s) < s.modulus);
    }
}

TEST_CASE("data point tags recompute from the same inputs only") {
    auto s = suite();
    Rng rng(47);
    std::uint64_t key = rng.below(s.modulus);
    Bytes d = rng.bytes(20);
    std::uint64_t t1 = tag_generate(key, d, 3, s);
    CHECK(t1 == tag_generate(key, d, 3, s));
    CHECK(t1 != tag_generate(key, d, 4, s));
    Bytes d2 = d;
    d2[0] ^= 1;
    CHECK(t1 != tag_generate(key, d2, 3, s));
    CHECK(t1 != tag_generate(add_mod(key, 1, s), d, 3, s));
    CHECK(t1 < s.modulus);
}

TEST_CASE("time-step counter handles boundaries and rejects bad inputs") {
    CHECK(totp_counter(1000, 1000, 30) == 0);
    CHECK(totp_counter(1029, 1000, 30) == 0);
    CHECK(totp_counter(1030, 1000, 30) == 1);
    CHECK(totp_counter(1000 + 30 * 7, 1000, 30) == 7);
    CHECK_THROWS_AS(totp_counter(999, 1000, 30), WbError);
    CHECK_THROWS_AS(totp_counter(1000, 1000, 0), WbError);
}

TEST_CASE("entropy estimate separates constant from uniform samples") {
    Bytes flat(4096, 0xAA);
    CHECK(shannon_entropy(flat) == 0.0);
    Bytes ramp(256 * 16);
    for (std::size_t i = 0; i < ramp.size(); ++i) ramp[i] = static_cast<std::uint8_t>(i % 256);
    CHECK(shannon_entropy(ramp) == Catch::Approx(8.0));
    CHECK_THROWS_AS(shannon_entropy(Bytes{}), WbError);

    auto s = suite();
    CHECK(entropy_flagged(flat, s));
    CHECK_FALSE(entropy_flagged(ramp, s));
}

TEST_CASE("seeded rng streams are deterministic and label-separated") {
    Rng a(99), b(99), c(100);
    CHECK(a.bytes(16) == b.bytes(16));
    CHECK(a.bytes(16) != c.bytes(16));
    Rng base(7);
    Rng d1 = base.derive("left");
    Rng d2 = base.derive("right");
    CHECK(d1.bytes(8) != d2.bytes(8));
    // below() stays in range with rejection sampling.
    Rng r(13);
    for (int i = 0; i < 1000; ++i) CHECK(r.below(10) < 10);
}
