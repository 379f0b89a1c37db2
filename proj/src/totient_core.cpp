#include "totcensus/totient_core.hpp"

#include <algorithm>
#include <array>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "totcensus/prime_engine.hpp"

namespace totcensus {

namespace {

constexpr uint64_t kTrialTableLimit = 1'000'000;

// Primes up to 10^6, built once, shared by every factorize() call.
const std::vector<uint64_t>& trial_primes() {
    static const std::vector<uint64_t> primes = sieve_primes(kTrialTableLimit).to_vector();
    return primes;
}

} // namespace

// -------------------------------------------------------
// factorize / euler_phi
// -------------------------------------------------------

Factorization factorize(uint64_t n) {
    if (n == 0) throw std::domain_error("factorize: n must be >= 1");

    Factorization f;
    f.value = n;
    uint64_t rem = n;

    auto strip = [&](uint64_t p) {
        uint32_t e = 0;
        while (rem % p == 0) { rem /= p; ++e; }
        if (e) f.factors.push_back({p, e});
    };

    for (uint64_t p : trial_primes()) {
        if (p * p > rem) break;
        strip(p);
    }
    if (rem > 1 && !is_prime(rem)) {
        // Cofactor is composite with all prime factors above 10^6.
        // Odd-candidate fallback; re-test primality after every extraction
        // so the common "large prime times small leftover" shape exits fast.
        uint64_t d = kTrialTableLimit + 1;
        if (d % 2 == 0) ++d;
        while (d <= rem / d) {
            if (rem % d == 0) {
                strip(d);
                if (rem == 1 || is_prime(rem)) break;
            }
            d += 2;
        }
    }
    if (rem > 1) f.factors.push_back({rem, 1});
    return f;
}

uint64_t euler_phi(const Factorization& f) {
    uint64_t phi = 1;
    for (const auto& [p, e] : f.factors) {
        for (uint32_t i = 0; i + 1 < e; ++i) phi = mul_or_throw(phi, p, "euler_phi");
        phi = mul_or_throw(phi, p - 1, "euler_phi");
    }
    return phi;
}

uint64_t euler_phi(uint64_t n) {
    if (n == 0) throw std::domain_error("euler_phi: n must be >= 1");
    return euler_phi(factorize(n));
}

// -------------------------------------------------------
// phi_sieve: linear sieve, one multiplication per composite
// -------------------------------------------------------

std::vector<uint32_t> phi_sieve(uint64_t limit, uint64_t memory_budget_bytes) {
    if (limit < 1) throw std::domain_error("phi_sieve: limit must be >= 1");
    if (limit > std::numeric_limits<uint32_t>::max() - 1)
        throw resource_error("phi_sieve: limit exceeds 32-bit phi storage; use for_each_phi");
    uint64_t estimate = (limit + 1) * sizeof(uint32_t) * 2; // phi array + primes list headroom
    if (memory_budget_bytes != 0 && estimate > memory_budget_bytes)
        throw resource_error("phi_sieve: estimated memory exceeds budget");

    std::vector<uint32_t> phi(limit + 1, 0);
    std::vector<uint32_t> primes;
    phi[1] = 1;
    for (uint64_t i = 2; i <= limit; ++i) {
        if (phi[i] == 0) { // i is prime
            phi[i] = static_cast<uint32_t>(i - 1);
            primes.push_back(static_cast<uint32_t>(i));
        }
        for (uint32_t p : primes) {
            uint64_t ip = i * p;
            if (ip > limit) break;
            if (i % p == 0) {
                phi[ip] = phi[i] * p;
                break;
            }
            phi[ip] = phi[i] * (p - 1);
        }
    }
    return phi;
}

// -------------------------------------------------------
// for_each_phi: segmented multiplicative sieve
// -------------------------------------------------------

void for_each_phi(uint64_t lo, uint64_t hi,
                  const std::function<void(uint64_t, uint64_t)>& fn) {
    if (lo < 1) throw std::domain_error("for_each_phi: range starts at 1");
    if (hi <= lo) return;

    const uint64_t seg = uint64_t{1} << 20;
    auto base = sieve_primes(std::max<uint64_t>(2, isqrt(hi - 1))).to_vector();

    std::vector<uint64_t> phi(seg), rem(seg);
    for (uint64_t s = lo; s < hi; s += seg) {
        uint64_t e = std::min(hi, s + seg);
        uint64_t len = e - s;
        for (uint64_t i = 0; i < len; ++i) { phi[i] = 1; rem[i] = s + i; }
        for (uint64_t p : base) {
            if (p * p >= e) break;
            for (uint64_t j = ((s + p - 1) / p) * p; j < e; j += p) {
                uint64_t& r = rem[j - s];
                uint64_t contrib = p - 1;
                r /= p;
                while (r % p == 0) { r /= p; contrib *= p; }
                phi[j - s] *= contrib;
            }
        }
        for (uint64_t i = 0; i < len; ++i) {
            // leftover cofactor is a single prime > sqrt
            uint64_t v = rem[i] > 1 ? phi[i] * (rem[i] - 1) : phi[i];
            fn(s + i, v);
        }
    }
}

// -------------------------------------------------------
// preimage_bound
// -------------------------------------------------------

uint64_t preimage_bound(uint64_t x) {
    if (x < 1) throw std::domain_error("preimage_bound: x must be >= 1");

    // grow the primorial while phi(P_J) <= x; both products stay in 64 bits
    // because phi(P_J) <= x <= 2^64 bounds P_J well before overflow
    uint64_t prim = 2, phi_prim = 1; // P_1 = 2
    auto primes = sieve_primes(200).to_vector(); // ample: phi(P_15) > 10^17
    for (size_t j = 1; j < primes.size(); ++j) {
        uint64_t p = primes[j];
        uint64_t prim_next, phi_next;
        if (!checked_mul(prim, p, prim_next) || !checked_mul(phi_prim, p - 1, phi_next))
            break;
        if (phi_next > x) break;
        prim = prim_next;
        phi_prim = phi_next;
    }
    unsigned __int128 num = static_cast<unsigned __int128>(x) * prim;
    unsigned __int128 n = num / phi_prim;
    if (num % phi_prim != 0) ++n;
    if (n > std::numeric_limits<uint64_t>::max())
        throw std::domain_error("preimage_bound: bound exceeds 64 bits for this x");
    return static_cast<uint64_t>(n);
}

// -------------------------------------------------------
// MultiplicityCounts / MultiplicityTable
// -------------------------------------------------------

void MultiplicityCounts::increment(uint64_t m) {
    uint8_t& b = bytes_[m];
    if (b < 254) {
        ++b;
    } else if (b == 254) {
        b = 255;
        overflow_[m] = 255;
    } else {
        ++overflow_[m];
    }
}

uint64_t MultiplicityCounts::get(uint64_t m) const {
    uint8_t b = bytes_[m];
    if (b != 255) return b;
    return overflow_.at(m);
}

uint64_t MultiplicityTable::multiplicity(uint64_t m) const {
    if (m > x_) throw std::out_of_range("MultiplicityTable::multiplicity: m beyond table");
    return counts_.get(m);
}

const std::vector<uint64_t>& MultiplicityTable::preimages(uint64_t m) const {
    if (!has_preimages_)
        throw std::logic_error("MultiplicityTable::preimages: table built without preimages");
    if (m > x_) throw std::out_of_range("MultiplicityTable::preimages: m beyond table");
    return preimages_[m];
}

MultiplicityTable multiplicity_oracle(uint64_t x, bool keep_preimages,
                                      uint64_t memory_budget_bytes) {
    if (x < 1) throw std::domain_error("multiplicity_oracle: x must be >= 1");
    uint64_t bound = preimage_bound(x);

    if (memory_budget_bytes != 0) {
        // counts byte per m, plus preimage storage when kept: every n <= bound
        // lands in exactly one bucket (8 bytes) and each m carries vector
        // bookkeeping (~24 bytes).
        uint64_t estimate = x + 1;
        if (keep_preimages) estimate += bound * 8 + (x + 1) * 24;
        if (estimate > memory_budget_bytes)
            throw resource_error("multiplicity_oracle: estimated memory exceeds budget");
    }

    MultiplicityTable table(x, bound, keep_preimages);
    if (keep_preimages) table.preimages_.resize(x + 1);

    for_each_phi(1, bound + 1, [&](uint64_t n, uint64_t phi) {
        if (phi <= x) {
            table.counts_.increment(phi);
            if (keep_preimages) table.preimages_[phi].push_back(n);
        }
    });
    return table;
}

// -------------------------------------------------------
// binary cache format
// -------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'T', 'C', 'M', 'U', 'L', 'T', '0', '1'};

template <class T>
void put(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <class T>
T take(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!in) throw std::runtime_error("MultiplicityTable::load: truncated stream");
    return v;
}

} // namespace

void MultiplicityTable::save(std::ostream& out) const {
    out.write(kMagic, sizeof(kMagic));
    put<uint64_t>(out, x_);
    put<uint64_t>(out, search_bound_);
    put<uint32_t>(out, 1); // count width: one byte + overflow map
    put<uint8_t>(out, has_preimages_ ? 1 : 0);
    out.write(reinterpret_cast<const char*>(counts_.bytes_.data()),
              static_cast<std::streamsize>(counts_.bytes_.size()));
    put<uint64_t>(out, counts_.overflow_.size());
    std::vector<std::pair<uint64_t, uint64_t>> entries(counts_.overflow_.begin(),
                                                       counts_.overflow_.end());
    std::sort(entries.begin(), entries.end());
    for (auto [m, c] : entries) { put<uint64_t>(out, m); put<uint64_t>(out, c); }
    if (has_preimages_) {
        for (const auto& list : preimages_) {
            put<uint64_t>(out, list.size());
            for (uint64_t n : list) put<uint64_t>(out, n);
        }
    }
    if (!out) throw std::runtime_error("MultiplicityTable::save: write failed");
}

MultiplicityTable MultiplicityTable::load(std::istream& in) {
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error("MultiplicityTable::load: bad magic");
    uint64_t x = take<uint64_t>(in);
    uint64_t bound = take<uint64_t>(in);
    uint32_t width = take<uint32_t>(in);
    if (width != 1)
        throw std::runtime_error("MultiplicityTable::load: unsupported count width");
    bool keep = take<uint8_t>(in) != 0;

    MultiplicityTable table(x, bound, keep);
    in.read(reinterpret_cast<char*>(table.counts_.bytes_.data()),
            static_cast<std::streamsize>(x + 1));
    if (!in) throw std::runtime_error("MultiplicityTable::load: truncated counts");
    uint64_t n_overflow = take<uint64_t>(in);
    for (uint64_t i = 0; i < n_overflow; ++i) {
        uint64_t m = take<uint64_t>(in);
        table.counts_.overflow_[m] = take<uint64_t>(in);
    }
    if (keep) {
        table.preimages_.resize(x + 1);
        for (uint64_t m = 0; m <= x; ++m) {
            uint64_t len = take<uint64_t>(in);
            table.preimages_[m].resize(len);
            for (uint64_t i = 0; i < len; ++i) table.preimages_[m][i] = take<uint64_t>(in);
        }
    }
    return table;
}

void MultiplicityTable::save_file(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("MultiplicityTable::save_file: cannot open " + path);
    save(out);
}

MultiplicityTable MultiplicityTable::load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("MultiplicityTable::load_file: cannot open " + path);
    return load(in);
}

} // namespace totcensus
