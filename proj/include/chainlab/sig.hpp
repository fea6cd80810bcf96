#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <string>

#include "chainlab/errors.hpp"
#include "chainlab/hash.hpp"

namespace chainlab {

// 256-bit unsigned integer, little-endian 64-bit limbs. Just enough
// arithmetic for the algebraic signature model: compare and subtract.
struct U256 {
    std::array<std::uint64_t, 4> limb{0, 0, 0, 0};

    static U256 from_u64(std::uint64_t v) {
        U256 r;
        r.limb[0] = v;
        return r;
    }
    static U256 from_limbs(std::uint64_t l0, std::uint64_t l1, std::uint64_t l2, std::uint64_t l3) {
        U256 r;
        r.limb = {l0, l1, l2, l3};
        return r;
    }

    bool is_zero() const { return limb[0] == 0 && limb[1] == 0 && limb[2] == 0 && limb[3] == 0; }

    friend bool operator==(const U256& a, const U256& b) = default;
    friend std::strong_ordering operator<=>(const U256& a, const U256& b) {
        for (int i = 3; i >= 0; --i) {
            if (a.limb[i] != b.limb[i])
                return a.limb[i] <=> b.limb[i];
        }
        return std::strong_ordering::equal;
    }

    // a - b, assuming a >= b.
    friend U256 operator-(const U256& a, const U256& b) {
        U256 r;
        std::uint64_t borrow = 0;
        for (int i = 0; i < 4; ++i) {
            std::uint64_t d = a.limb[i] - b.limb[i];
            std::uint64_t borrow2 = (a.limb[i] < b.limb[i]) ? 1u : 0u;
            std::uint64_t d2 = d - borrow;
            if (d < borrow)
                borrow2 = 1;
            r.limb[i] = d2;
            borrow = borrow2;
        }
        return r;
    }

    std::string hex() const;
};

// Order of the signing group: the secp256k1 curve order, a 256-bit prime.
// Signatures are pairs (r, s) of nonzero residues mod this constant.
extern const U256 kGroupOrder;
extern const U256 kGroupOrderHalf; // (q - 1) / 2

struct Signature {
    U256 r;
    U256 s;
    std::uint64_t key_id = 0;

    friend bool operator==(const Signature&, const Signature&) = default;
};

// Canonical low-s form: s <= (q-1)/2, so (r, s) and (r, q-s) collapse to one
// value and malleated copies of a transaction hash identically.
struct NormalizedSignature {
    U256 r;
    U256 s;
    std::uint64_t key_id = 0;

    friend bool operator==(const NormalizedSignature&, const NormalizedSignature&) = default;
};

NormalizedSignature normalize_signature(const U256& r, const U256& s, std::uint64_t key_id = 0);
inline NormalizedSignature normalize_signature(const Signature& sig) {
    return normalize_signature(sig.r, sig.s, sig.key_id);
}

} // namespace chainlab
