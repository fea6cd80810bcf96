#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>
#include <vector>

namespace chainlab {

using Hash256 = std::array<std::uint8_t, 32>;

Hash256 sha256(const void* data, std::size_t len);
Hash256 sha256(std::string_view s);

std::string to_hex(const Hash256& h);
bool from_hex(std::string_view hex, Hash256& out);

inline Hash256 hash_xor(const Hash256& a, const Hash256& b) {
    Hash256 r;
    for (std::size_t i = 0; i < 32; ++i)
        r[i] = static_cast<std::uint8_t>(a[i] ^ b[i]);
    return r;
}

inline bool is_zero(const Hash256& h) {
    for (auto b : h)
        if (b)
            return false;
    return true;
}

constexpr Hash256 null_hash() { return Hash256{}; }

// Incremental builder for hashing heterogeneous records.
class HashWriter {
public:
    HashWriter& u8(std::uint8_t v) {
        buf_.push_back(v);
        return *this;
    }
    HashWriter& u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i)
            buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
        return *this;
    }
    HashWriter& u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i)
            buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
        return *this;
    }
    HashWriter& i64(std::int64_t v) { return u64(static_cast<std::uint64_t>(v)); }
    HashWriter& f64(double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, 8);
        return u64(bits);
    }
    HashWriter& str(std::string_view s) {
        u64(s.size());
        buf_.insert(buf_.end(), s.begin(), s.end());
        return *this;
    }
    HashWriter& bytes(const Hash256& h) {
        buf_.insert(buf_.end(), h.begin(), h.end());
        return *this;
    }
    Hash256 digest() const { return sha256(buf_.data(), buf_.size()); }

private:
    std::vector<std::uint8_t> buf_;
};

} // namespace chainlab
