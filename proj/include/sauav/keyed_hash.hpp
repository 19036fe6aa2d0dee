#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include "sauav/rng.hpp"

namespace sauav::crypto {

inline constexpr std::size_t kCodeWordBytes = 32;

/// Fixed-width code word: hash outputs and the provisioned codes 1/2/3.
using CodeWord = std::array<std::uint8_t, kCodeWordBytes>;

inline CodeWord sha3_256(std::span<const std::uint8_t> data) {
    CodeWord out{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha3_256(), nullptr) != 1 ||
        len != kCodeWordBytes) {
        throw std::runtime_error("SHA3-256 digest failed");
    }
    return out;
}

/// Keyed hash H_k(m) = SHA3-256(k || m). With SHA-3 the key-prefix
/// construction is a PRF, so independent keys give independent functions.
class KeyedHash {
public:
    KeyedHash() = default;
    explicit KeyedHash(const CodeWord& key) : key_(key) {}

    const CodeWord& key() const { return key_; }

    CodeWord operator()(std::span<const std::uint8_t> msg) const {
        std::vector<std::uint8_t> buf;
        buf.reserve(key_.size() + msg.size());
        buf.insert(buf.end(), key_.begin(), key_.end());
        buf.insert(buf.end(), msg.begin(), msg.end());
        return sha3_256(buf);
    }

    CodeWord operator()(const CodeWord& word) const {
        return (*this)(std::span<const std::uint8_t>(word.data(), word.size()));
    }

private:
    CodeWord key_{};
};

inline CodeWord random_code_word(Rng& rng) {
    CodeWord w{};
    for (std::size_t i = 0; i < w.size(); i += 8) {
        const std::uint64_t x = rng.next_u64();
        std::memcpy(w.data() + i, &x, 8);
    }
    return w;
}

inline std::string hex(std::span<const std::uint8_t> data) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string s;
    s.reserve(data.size() * 2);
    for (std::uint8_t b : data) {
        s.push_back(digits[b >> 4]);
        s.push_back(digits[b & 0xF]);
    }
    return s;
}

inline std::string hex(const CodeWord& w) {
    return hex(std::span<const std::uint8_t>(w.data(), w.size()));
}

} // namespace sauav::crypto
