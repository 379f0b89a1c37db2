// classifier.hpp
// Constant-size classification of totient candidates m = 2 (mod 4).
//
// For such m (m != 2) the preimage of phi can only contain numbers of the
// shape p^n or 2*p^n with p an odd prime: two distinct odd primes in n would
// force phi(n) = 0 (mod 4). That leaves exactly two possible solution
// families, so A(m) ∈ {0, 2, 4}:
//   prime branch:  m + 1 prime        -> {m+1, 2m+2}  in the preimage
//   power branch:  m = q^(e-1)*(q-1),
//                  q odd prime, e > 1 -> {q^e, 2*q^e} in the preimage
// m = 2 is the one exception: 4 = 2^2 is an even-prime-power preimage, so
// A(2) = 3 with phi^-1(2) = {3, 4, 6}; the record carries an explicit flag.

#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "totcensus/totient_core.hpp"

namespace totcensus {

struct ClassificationRecord {
    uint64_t m = 0;
    // 0, 2 or 4; 3 only for the exceptional m = 2
    uint32_t multiplicity = 0;
    // sorted, each n verified to satisfy euler_phi(n) == m
    std::vector<uint64_t> preimage;
    // the n = 1 solution: p = m + 1 when prime
    std::optional<uint64_t> prime_certificate;
    // the unique (q, e) with e >= 2, q odd prime, q^(e-1)*(q-1) == m
    std::optional<std::pair<uint64_t, uint32_t>> power_certificate;
    bool exceptional = false; // true only for m = 2
};

// Classifies m = 2 (mod 4). m not congruent to 2 mod 4, or m >= 2^63 (whose
// preimage member 2m+2 would not fit 64 bits), throws std::domain_error.
ClassificationRecord classify_2mod4(uint64_t m);

// A witness (p, e) with p odd prime, e >= min_exponent and
// p^(e-1)*(p-1) == m, choosing the largest p if several pass (they cannot,
// but the tie rule keeps the output deterministic by construction); empty
// if none. min_exponent >= 2 required.
std::optional<std::pair<uint64_t, uint32_t>> has_prime_power_preimage(uint64_t m,
                                                                      uint32_t min_exponent);

// For m in T4 (A(m) = 4) and k >= 1, two distinct verified preimages of
// 2^k * (m/2), built from the record's certificates as 2^k * (m+1) and
// 2^k * q^e. Violated preconditions (A(m) != 4, overflow) throw
// std::domain_error.
std::pair<uint64_t, uint64_t> carmichael_lift_witness(uint64_t m2r, uint32_t k);

} // namespace totcensus
