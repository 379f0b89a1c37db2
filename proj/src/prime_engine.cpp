#include "totcensus/prime_engine.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace totcensus {

namespace {

// Plain byte sieve for small limits; used for base primes only.
std::vector<uint64_t> simple_sieve(uint64_t limit) {
    std::vector<uint64_t> primes;
    if (limit < 2) return primes;
    std::vector<uint8_t> flags(limit + 1, 1);
    flags[0] = flags[1] = 0;
    for (uint64_t i = 2; i * i <= limit; ++i)
        if (flags[i])
            for (uint64_t j = i * i; j <= limit; j += i)
                flags[j] = 0;
    for (uint64_t i = 2; i <= limit; ++i)
        if (flags[i]) primes.push_back(i);
    return primes;
}

constexpr uint64_t word_of(uint64_t bit) { return bit >> 6; }
constexpr uint64_t mask_of(uint64_t bit) { return uint64_t{1} << (bit & 63); }

} // namespace

// -------------------------------------------------------
// sieve_odd_window
// -------------------------------------------------------

std::vector<uint64_t> sieve_odd_window(uint64_t lo, uint64_t hi,
                                       std::span<const uint64_t> base_primes) {
    if (lo % 2 == 0 || lo < 3) throw std::domain_error("sieve_odd_window: lo must be odd, >= 3");
    if (hi <= lo) return {};

    const uint64_t odd_count = (hi - lo + 1) / 2; // odds in [lo, hi)
    std::vector<uint64_t> bits((odd_count + 63) / 64, ~uint64_t{0});

    for (uint64_t p : base_primes) {
        if (p == 2) continue;
        if (p * p >= hi) break;
        // first odd multiple of p in [lo, hi), at least p*p
        uint64_t first = std::max(p * p, ((lo + p - 1) / p) * p);
        if (first % 2 == 0) first += p;
        for (uint64_t j = first; j < hi; j += 2 * p) {
            uint64_t k = (j - lo) / 2;
            bits[word_of(k)] &= ~mask_of(k);
        }
    }

    // mask tail bits beyond the window
    uint64_t used = odd_count & 63;
    if (used != 0) bits.back() &= (uint64_t{1} << used) - 1;
    return bits;
}

// -------------------------------------------------------
// PrimeTable
// -------------------------------------------------------

bool PrimeTable::contains(uint64_t n) const {
    if (n < 2 || n > limit_)
        throw std::out_of_range("PrimeTable::contains: query outside [2, limit]");
    if (n == 2) return true;
    if (n % 2 == 0) return false;
    uint64_t k = (n - 3) / 2;
    return (words_[word_of(k)] & mask_of(k)) != 0;
}

uint64_t PrimeTable::count_upto(uint64_t x) const {
    if (x > limit_)
        throw std::out_of_range("PrimeTable::count_upto: query beyond table limit");
    if (x < 2) return 0;
    if (x == 2) return 1;
    uint64_t bits = (x - 1) / 2; // number of odd values in [3, x]
    uint64_t full = bits / 64, rest = bits % 64;
    uint64_t c = 1; // the prime 2
    for (uint64_t w = 0; w < full; ++w) c += std::popcount(words_[w]);
    if (rest) c += std::popcount(words_[full] & ((uint64_t{1} << rest) - 1));
    return c;
}

void PrimeTable::for_each(const std::function<void(uint64_t)>& fn) const {
    fn(2);
    for (uint64_t w = 0; w < words_.size(); ++w) {
        uint64_t word = words_[w];
        while (word) {
            unsigned b = std::countr_zero(word);
            fn(2 * (64 * w + b) + 3);
            word &= word - 1;
        }
    }
}

std::vector<uint64_t> PrimeTable::to_vector() const {
    std::vector<uint64_t> v;
    v.reserve(count_);
    for_each([&](uint64_t p) { v.push_back(p); });
    return v;
}

PrimeTable sieve_primes(uint64_t limit, const SieveOptions& options) {
    if (limit < 2) throw std::domain_error("sieve_primes: limit must be >= 2");

    PrimeTable table;
    table.limit_ = limit;
    uint64_t odd_count = limit >= 3 ? (limit - 1) / 2 : 0;
    uint64_t bytes = ((odd_count + 63) / 64) * 8;
    if (options.memory_budget_bytes != 0 && bytes > options.memory_budget_bytes)
        throw resource_error("sieve_primes: table bits exceed memory budget");
    table.words_.assign((odd_count + 63) / 64, ~uint64_t{0});

    if (limit >= 3) {
        auto base = simple_sieve(isqrt(limit));
        // Segment-by-segment marking over the table's own bits keeps the
        // working set cache-resident; no extra per-segment allocation.
        const uint64_t seg_numbers = std::max<uint64_t>(options.segment_bytes * 16, 1 << 16);
        for (uint64_t lo = 3; lo <= limit; lo += seg_numbers) {
            uint64_t hi = std::min(limit, lo + seg_numbers - 1);
            for (uint64_t p : base) {
                if (p == 2) continue;
                if (p * p > hi) break;
                uint64_t first = std::max(p * p, ((lo + p - 1) / p) * p);
                if (first % 2 == 0) first += p;
                for (uint64_t j = first; j <= hi; j += 2 * p) {
                    uint64_t k = (j - 3) / 2;
                    table.words_[word_of(k)] &= ~mask_of(k);
                }
            }
        }
        // clear stray tail bits (odd positions beyond limit)
        uint64_t used = odd_count & 63;
        if (used != 0) table.words_.back() &= (uint64_t{1} << used) - 1;
        // 1 would map below 3; nothing to fix: smallest stored odd is 3.
    }

    uint64_t c = limit >= 2 ? 1 : 0;
    for (uint64_t w : table.words_) c += std::popcount(w);
    table.count_ = c;
    return table;
}

// -------------------------------------------------------
// is_prime: deterministic Miller-Rabin, exact for 64 bits
// -------------------------------------------------------

namespace {

uint64_t mulmod(uint64_t a, uint64_t b, uint64_t m) {
    return static_cast<uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

uint64_t powmod(uint64_t base, uint64_t exp, uint64_t m) {
    uint64_t r = 1 % m;
    base %= m;
    while (exp) {
        if (exp & 1) r = mulmod(r, base, m);
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    return r;
}

// strong probable prime test to base a; n odd, n > 2, d*2^s = n-1 with d odd
bool sprp(uint64_t n, uint64_t a, uint64_t d, int s) {
    uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) return true;
    for (int i = 1; i < s; ++i) {
        x = mulmod(x, x, n);
        if (x == n - 1) return true;
    }
    return false;
}

} // namespace

bool is_prime(uint64_t n) {
    if (n < 2) return false;
    for (uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n == p) return true;
        if (n % p == 0) return false;
    }
    uint64_t d = n - 1;
    int s = 0;
    while (d % 2 == 0) { d /= 2; ++s; }
    // This witness set is exact for every n < 3.3 * 10^24, hence for all of
    // uint64_t (Sorenson-Webster / Jaeschke bounds).
    for (uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull})
        if (!sprp(n, a, d, s)) return false;
    return true;
}

// -------------------------------------------------------
// Counting scans. One pass of odd-only windows over [3, x],
// plus the prime 2 handled explicitly.
// -------------------------------------------------------

namespace {

constexpr uint64_t kScanWindow = uint64_t{1} << 21; // odd numbers per window

// Visits every prime <= x, ascending.
template <class Fn>
void scan_primes(uint64_t x, Fn&& fn) {
    if (x < 2) return;
    fn(uint64_t{2});
    if (x < 3) return;
    auto base = simple_sieve(isqrt(x));
    for (uint64_t lo = 3; lo <= x; lo += 2 * kScanWindow) {
        uint64_t hi = std::min(x + 1, lo + 2 * kScanWindow);
        auto bits = sieve_odd_window(lo, hi, base);
        for (uint64_t w = 0; w < bits.size(); ++w) {
            uint64_t word = bits[w];
            while (word) {
                unsigned b = std::countr_zero(word);
                fn(lo + 2 * (64 * w + b));
                word &= word - 1;
            }
        }
    }
}

} // namespace

uint64_t prime_count(uint64_t x) {
    if (x < 2) return 0;
    uint64_t c = 1; // p = 2
    if (x >= 3) {
        auto base = simple_sieve(isqrt(x));
        for (uint64_t lo = 3; lo <= x; lo += 2 * kScanWindow) {
            uint64_t hi = std::min(x + 1, lo + 2 * kScanWindow);
            auto bits = sieve_odd_window(lo, hi, base);
            for (uint64_t w : bits) c += std::popcount(w);
        }
    }
    return c;
}

std::vector<uint64_t> prime_count_multi(std::span<const uint64_t> checkpoints) {
    for (size_t i = 1; i < checkpoints.size(); ++i)
        if (checkpoints[i] <= checkpoints[i - 1])
            throw std::domain_error("prime_count_multi: checkpoints must be strictly ascending");
    std::vector<uint64_t> out(checkpoints.size(), 0);
    if (checkpoints.empty()) return out;

    uint64_t pi = 0;
    size_t next = 0;
    scan_primes(checkpoints.back(), [&](uint64_t p) {
        while (next < checkpoints.size() && checkpoints[next] < p)
            out[next++] = pi;
        ++pi;
    });
    while (next < checkpoints.size()) out[next++] = pi;
    return out;
}

uint64_t prime_count_residue(uint64_t x, uint64_t modulus, uint64_t residue) {
    if (modulus == 0 || residue >= modulus)
        throw std::domain_error("prime_count_residue: need 0 <= residue < modulus");
    uint64_t c = 0;
    scan_primes(x, [&](uint64_t p) {
        if (p % modulus == residue) ++c;
    });
    return c;
}

uint64_t cousin_pairs(uint64_t x, uint64_t gap, std::vector<uint64_t>* pairs_out) {
    if (gap == 0 || gap % 2 != 0)
        throw std::domain_error("cousin_pairs: gap must be even and >= 2");
    uint64_t count = 0;
    std::deque<uint64_t> recent;
    scan_primes(x, [&](uint64_t p) {
        while (!recent.empty() && recent.front() + gap < p) recent.pop_front();
        if (!recent.empty() && recent.front() + gap == p) {
            ++count;
            if (pairs_out) pairs_out->push_back(recent.front());
        }
        recent.push_back(p);
    });
    return count;
}

// -------------------------------------------------------
// prime_power_totients
// -------------------------------------------------------

std::vector<PrimePowerTotient> prime_power_totients(uint64_t x, uint32_t min_exponent) {
    if (min_exponent < 2)
        throw std::domain_error("prime_power_totients: min_exponent must be >= 2");

    std::vector<PrimePowerTotient> out;
    if (x < 6) return out; // smallest candidate is phi(9) = 6

    // p contributes only if p^(min_exponent-1) * (p-1) <= x; since
    // (p-1)^min_exponent <= that value, every contributing p satisfies
    // p <= floor(x^(1/min_exponent)) + 1.
    uint64_t p_limit = nth_root_floor(x, min_exponent) + 1;
    auto primes = simple_sieve(p_limit);

    for (uint64_t p : primes) {
        if (p == 2) continue;
        // smallest value for this p: p^(min_exponent-1) * (p-1)
        uint64_t pw = 1;
        bool ok = true;
        for (uint32_t i = 0; i + 1 < min_exponent && ok; ++i)
            ok = checked_mul(pw, p, pw);
        uint64_t value = 0;
        if (!ok || !checked_mul(pw, p - 1, value) || value > x)
            break; // monotone in p: no later prime can contribute
        for (uint32_t i = min_exponent; value <= x; ++i) {
            out.push_back({p, i, value});
            if (!checked_mul(pw, p, pw) || !checked_mul(pw, p - 1, value))
                break; // next power would overflow; it certainly exceeds x
        }
    }
    return out;
}

} // namespace totcensus
