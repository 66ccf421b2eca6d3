#include "wb/bytes.hpp"

namespace wb {

static const char* kHexDigits = "0123456789abcdef";

std::string to_hex(const Bytes& b) {
    std::string out;
    out.reserve(b.size() * 2);
    for (std::uint8_t v : b) {
        out.push_back(kHexDigits[v >> 4]);
        out.push_back(kHexDigits[v & 0xf]);
    }
    return out;
}

static int hex_val(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

Bytes from_hex(const std::string& s) {
    if (s.size() % 2 != 0) fail("hex-odd-length", "hex string of length " + std::to_string(s.size()));
    Bytes out(s.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        int hi = hex_val(s[2 * i]), lo = hex_val(s[2 * i + 1]);
        if (hi < 0 || lo < 0) fail("hex-bad-digit", "at offset " + std::to_string(2 * i));
        out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
    }
    return out;
}

std::size_t hamming_distance(const Bytes& a, const Bytes& b) {
    if (a.size() != b.size()) fail("hamming-length-mismatch", "operand sizes differ");
    std::size_t d = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        d += static_cast<std::size_t>(__builtin_popcount(a[i] ^ b[i]));
    return d;
}

Bytes u64_be(std::uint64_t v) {
    Bytes out(8);
    for (int i = 7; i >= 0; --i) {
        out[i] = static_cast<std::uint8_t>(v & 0xff);
        v >>= 8;
    }
    return out;
}

std::uint64_t be_u64(const Bytes& b) {
    if (b.size() < 8) fail("be-u64-short", "need at least 8 bytes");
    std::uint64_t v = 0;
    for (std::size_t i = b.size() - 8; i < b.size(); ++i) v = (v << 8) | b[i];
    return v;
}

Bytes concat(const std::vector<Bytes>& parts) {
    std::size_t total = 0;
    for (const auto& p : parts) total += p.size();
    Bytes out;
    out.reserve(total);
    for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
}

}  // namespace wb
