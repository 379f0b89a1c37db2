// totient_core.hpp
// Euler's phi: single-value evaluation, bulk sieving, the provable preimage
// search bound, and the exhaustive multiplicity oracle that validates every
// fast path in the library.

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "totcensus/common.hpp"

namespace totcensus {

struct PrimePower {
    uint64_t prime = 0;
    uint32_t exponent = 0;

    bool operator==(const PrimePower&) const = default;
};

// value = product of prime^exponent, primes strictly increasing.
struct Factorization {
    uint64_t value = 0;
    std::vector<PrimePower> factors;
};

// Full factorization by trial division: sieved primes up to 10^6, then an
// exact primality check on the cofactor, then odd-candidate fallback. This
// covers every desk-scale input in microseconds. n = 0 throws.
Factorization factorize(uint64_t n);

// phi(n) computed exactly as prod p^(e-1) * (p-1) over the factorization.
// n = 0 throws std::domain_error.
uint64_t euler_phi(uint64_t n);
uint64_t euler_phi(const Factorization& f);

// phi(n) for all 1 <= n <= limit by a linear (smallest-prime-factor driven)
// multiplicative sieve; index n holds phi(n), index 0 is unused. limit must
// leave phi values within 32 bits. An optional byte budget guards the
// allocation (0 = unlimited, resource_error beyond).
std::vector<uint32_t> phi_sieve(uint64_t limit, uint64_t memory_budget_bytes = 0);

// phi(n) for every n in [lo, hi), ascending, by a segmented multiplicative
// sieve: O(segment) memory for any range. Independent of the factorize()
// path above, which lets the two cross-check each other in tests.
void for_each_phi(uint64_t lo, uint64_t hi,
                  const std::function<void(uint64_t n, uint64_t phi)>& fn);

// Smallest N of the primorial bound with: phi(n) <= x implies n <= N.
//
// Soundness: let J be maximal with phi(P_J) <= x, P_J the J-th primorial.
// For any n with phi(n) <= x, writing w = omega(n), each of the w distinct
// prime factors q_i of n satisfies q_i >= p_i (the i-th prime), so
// phi(n) >= prod (q_i - 1) >= prod (p_i - 1) = phi(P_w); hence w <= J.
// And phi(n)/n = prod (1 - 1/q_i) >= phi(P_w)/P_w >= phi(P_J)/P_J, so
// n <= phi(n) * P_J/phi(P_J) <= x * P_J/phi(P_J), rounded up.
uint64_t preimage_bound(uint64_t x);

// -------------------------------------------------------
// MultiplicityTable: A(m) (and optionally phi^-1(m)) for
// all m <= x, built by exhaustive sieving of [1, N].
// -------------------------------------------------------

// Counts stored as one byte per m; 0..254 literal, 255 = promoted to the
// overflow map, which then holds the full count. Saturation is always
// promoted, never clamped.
class MultiplicityCounts {
public:
    explicit MultiplicityCounts(uint64_t max_key) : bytes_(max_key + 1, 0) {}

    void increment(uint64_t m);
    uint64_t get(uint64_t m) const;
    uint64_t max_key() const { return bytes_.size() - 1; }

    const std::vector<uint8_t>& raw_bytes() const { return bytes_; }
    const std::unordered_map<uint64_t, uint64_t>& raw_overflow() const { return overflow_; }

private:
    friend class MultiplicityTable;
    std::vector<uint8_t> bytes_;
    std::unordered_map<uint64_t, uint64_t> overflow_;
};

class MultiplicityTable {
public:
    uint64_t x() const { return x_; }
    uint64_t search_bound() const { return search_bound_; }
    bool has_preimages() const { return has_preimages_; }

    // A(m). m > x throws std::out_of_range.
    uint64_t multiplicity(uint64_t m) const;

    // Sorted phi^-1(m); requires the table to have been built with
    // keep_preimages, otherwise std::logic_error.
    const std::vector<uint64_t>& preimages(uint64_t m) const;

    // Versioned little-endian binary cache (magic, x, search bound,
    // count width, payload) so expensive oracle runs persist between
    // CLI invocations.
    void save(std::ostream& out) const;
    void save_file(const std::string& path) const;
    static MultiplicityTable load(std::istream& in);
    static MultiplicityTable load_file(const std::string& path);

private:
    friend MultiplicityTable multiplicity_oracle(uint64_t, bool, uint64_t);

    MultiplicityTable(uint64_t x, uint64_t bound, bool keep)
        : x_(x), search_bound_(bound), has_preimages_(keep), counts_(x) {}

    uint64_t x_ = 0;
    uint64_t search_bound_ = 0;
    bool has_preimages_ = false;
    MultiplicityCounts counts_;
    std::vector<std::vector<uint64_t>> preimages_; // index m, present iff kept
};

// Exact A(m) for every m <= x: evaluates phi(n) for all n <= preimage_bound(x)
// and buckets. The bound makes the enumeration provably complete. Budget is
// bytes (0 = unlimited); overruns throw resource_error before any big
// allocation happens.
MultiplicityTable multiplicity_oracle(uint64_t x, bool keep_preimages,
                                      uint64_t memory_budget_bytes = 0);

} // namespace totcensus
