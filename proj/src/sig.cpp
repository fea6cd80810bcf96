#include "chainlab/sig.hpp"

namespace chainlab {

// secp256k1 group order
// 0xFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFEBAAEDCE6AF48A03BBFD25E8CD0364141
const U256 kGroupOrder = U256::from_limbs(0xBFD25E8CD0364141ULL, 0xBAAEDCE6AF48A03BULL,
                                          0xFFFFFFFFFFFFFFFEULL, 0xFFFFFFFFFFFFFFFFULL);

// (q - 1) / 2
const U256 kGroupOrderHalf = U256::from_limbs(0xDFE92F46681B20A0ULL, 0x5D576E7357A4501DULL,
                                              0xFFFFFFFFFFFFFFFFULL, 0x7FFFFFFFFFFFFFFFULL);

std::string U256::hex() const {
    static const char* digits = "0123456789abcdef";
    std::string s;
    s.reserve(64);
    for (int i = 3; i >= 0; --i) {
        for (int nib = 15; nib >= 0; --nib)
            s.push_back(digits[(limb[i] >> (4 * nib)) & 0xf]);
    }
    return s;
}

NormalizedSignature normalize_signature(const U256& r, const U256& s, std::uint64_t key_id) {
    if (r.is_zero() || s.is_zero() || r >= kGroupOrder || s >= kGroupOrder)
        throw OutOfRangeError("normalize_signature: r and s must lie in (0, q)");
    NormalizedSignature out;
    out.r = r;
    out.s = (s > kGroupOrderHalf) ? kGroupOrder - s : s;
    out.key_id = key_id;
    return out;
}

} // namespace chainlab
