#include "totcensus/classifier.hpp"

#include <algorithm>
#include <stdexcept>

#include "totcensus/prime_engine.hpp"

namespace totcensus {

namespace {

// q^e by repeated multiplication; inputs here always fit because q^e
// divides or slightly exceeds an in-range m, but check anyway.
uint64_t pow_u64(uint64_t q, uint32_t e, const char* ctx) {
    uint64_t r = 1;
    for (uint32_t i = 0; i < e; ++i) r = mul_or_throw(r, q, ctx);
    return r;
}

void verify_preimage(uint64_t n, uint64_t m) {
    if (euler_phi(n) != m)
        throw std::logic_error("classifier: preimage verification failed");
}

} // namespace

ClassificationRecord classify_2mod4(uint64_t m) {
    if (m % 4 != 2)
        throw std::domain_error("classify_2mod4: m must be = 2 (mod 4)");
    if (m >= (uint64_t{1} << 63))
        throw std::domain_error("classify_2mod4: m too large, preimage 2m+2 would overflow");

    ClassificationRecord rec;
    rec.m = m;

    if (m == 2) {
        // 4 = 2^2 sneaks in as the unique even-prime-power preimage
        rec.multiplicity = 3;
        rec.preimage = {3, 4, 6};
        rec.prime_certificate = 3;
        rec.exceptional = true;
        for (uint64_t n : rec.preimage) verify_preimage(n, m);
        return rec;
    }

    // prime branch: n = 1 solutions p, 2p with p = m + 1
    if (is_prime(m + 1)) {
        rec.prime_certificate = m + 1;
        rec.preimage.push_back(m + 1);
        rec.preimage.push_back(2 * (m + 1));
    }

    // power branch: q^e, 2*q^e with q an odd prime divisor of r = m/2 and
    // q^(e-1) * (q-1) == m, e = v_q(m) + 1
    uint64_t r = m / 2;
    for (const auto& [q, v] : factorize(r).factors) {
        // r is odd, so every q here is odd
        uint64_t qv = pow_u64(q, v, "classify_2mod4");
        if (m / qv == q - 1 && m % qv == 0) {
            if (rec.power_certificate)
                throw std::logic_error("classify_2mod4: second power witness, impossible");
            rec.power_certificate = {q, v + 1};
            uint64_t qe = mul_or_throw(qv, q, "classify_2mod4");
            rec.preimage.push_back(qe);
            rec.preimage.push_back(mul_or_throw(2, qe, "classify_2mod4"));
        }
    }

    std::sort(rec.preimage.begin(), rec.preimage.end());
    rec.multiplicity = static_cast<uint32_t>(rec.preimage.size());
    for (uint64_t n : rec.preimage) verify_preimage(n, m);
    return rec;
}

std::optional<std::pair<uint64_t, uint32_t>> has_prime_power_preimage(uint64_t m,
                                                                      uint32_t min_exponent) {
    if (min_exponent < 2)
        throw std::domain_error("has_prime_power_preimage: min_exponent must be >= 2");
    if (m < 1) throw std::domain_error("has_prime_power_preimage: m must be >= 1");

    std::optional<std::pair<uint64_t, uint32_t>> best;
    for (const auto& [q, v] : factorize(m).factors) {
        if (q == 2) continue;
        // candidate exponent is forced: e - 1 = v_q(m)
        uint32_t e = v + 1;
        if (e < min_exponent) continue;
        uint64_t qv = pow_u64(q, v, "has_prime_power_preimage");
        if (m / qv == q - 1 && m % qv == 0) {
            if (!best || q > best->first) best = {q, e};
        }
    }
    return best;
}

std::pair<uint64_t, uint64_t> carmichael_lift_witness(uint64_t m2r, uint32_t k) {
    if (k < 1) throw std::domain_error("carmichael_lift_witness: k must be >= 1");
    ClassificationRecord rec = classify_2mod4(m2r);
    if (rec.multiplicity != 4)
        throw std::domain_error("carmichael_lift_witness: m must have multiplicity 4");

    if (k >= 63)
        throw std::domain_error("carmichael_lift_witness: 2^k out of range");
    uint64_t two_k = uint64_t{1} << k;
    uint64_t target, a, b;
    uint64_t p = *rec.prime_certificate;
    auto [q, e] = *rec.power_certificate;
    if (!checked_mul(two_k, m2r / 2, target) || !checked_mul(two_k, p, a) ||
        !checked_mul(two_k, pow_u64(q, e, "carmichael_lift_witness"), b))
        throw std::domain_error("carmichael_lift_witness: lifted preimage exceeds 64 bits");

    // phi(2^k * p) = 2^(k-1) * (p-1) = 2^(k-1) * m = target, same for q^e
    if (euler_phi(a) != target || euler_phi(b) != target || a == b)
        throw std::logic_error("carmichael_lift_witness: verification failed");
    return {a, b};
}

} // namespace totcensus
