// Byte-string helpers shared by every module: hex codecs, xor, Hamming
// distance, big-endian integer packing, and the deterministic RNG used for
// all seeded experiments.
#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace wb {

using Bytes = std::vector<std::uint8_t>;

class WbError : public std::runtime_error {
public:
    WbError(std::string code, const std::string& what)
        : std::runtime_error(code + ": " + what), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

private:
    std::string code_;
};

[[noreturn]] inline void fail(const std::string& code, const std::string& what) {
    throw WbError(code, what);
}

std::string to_hex(const Bytes& b);
Bytes from_hex(const std::string& s);

inline Bytes xor_bytes(const Bytes& a, const Bytes& b) {
    if (a.size() != b.size())
        fail("xor-length-mismatch",
             "xor operands of " + std::to_string(a.size()) + " and " +
                 std::to_string(b.size()) + " bytes");
    Bytes out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] ^ b[i];
    return out;
}

std::size_t hamming_distance(const Bytes& a, const Bytes& b);

Bytes u64_be(std::uint64_t v);
std::uint64_t be_u64(const Bytes& b);  // reads the trailing 8 bytes (zero-padded fields)

Bytes concat(const std::vector<Bytes>& parts);

// Deterministic seeded RNG. A single root seed fans out to independent
// sub-streams via derive(), so per-protocol / per-trial draws never alias.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix(seed)) {}

    std::uint64_t next_u64() { return engine_(); }

    std::uint64_t below(std::uint64_t bound) {
        if (bound == 0) fail("rng-empty-range", "below(0)");
        // unbiased rejection sampling
        std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t v;
        do { v = next_u64(); } while (v >= limit);
        return v % bound;
    }

    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    Bytes bytes(std::size_t n) {
        Bytes out(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (i % 8 == 0) buffer_ = next_u64();
            out[i] = static_cast<std::uint8_t>(buffer_ >> ((i % 8) * 8));
        }
        return out;
    }

    // Independent child stream; label keeps sibling streams apart.
    Rng derive(std::uint64_t label) {
        return Rng(splitmix(engine_() ^ (0x9e3779b97f4a7c15ULL * (label + 1))));
    }

    Rng derive(const std::string& label) { return derive(fnv1a(label)); }

private:
    static std::uint64_t fnv1a(const std::string& s) {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        return h;
    }

    static std::uint64_t splitmix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }
    std::mt19937_64 engine_;
    std::uint64_t buffer_ = 0;
};

}  // namespace wb
