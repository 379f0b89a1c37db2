#include "totcensus/census.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <set>
#include <stdexcept>
#include <thread>

#include "totcensus/classifier.hpp"
#include "totcensus/prime_engine.hpp"
#include "totcensus/totient_core.hpp"

namespace totcensus {

namespace {

void validate_checkpoints(std::span<const uint64_t> checkpoints) {
    for (size_t i = 0; i < checkpoints.size(); ++i) {
        if (checkpoints[i] < 2)
            throw std::domain_error("census: checkpoints must be >= 2");
        if (checkpoints[i] > (uint64_t{1} << 40))
            throw std::domain_error("census: checkpoints above 2^40 are unsupported");
        if (i > 0 && checkpoints[i] <= checkpoints[i - 1])
            throw std::domain_error("census: checkpoints must be strictly ascending");
    }
}

// Distinct prime-power-branch values <= x in the 2 (mod 4) class:
// phi(q^e) with q odd, e >= 2. These mark the power branch for whole
// blocks at once.
std::vector<uint64_t> power_branch_values(uint64_t x) {
    std::vector<uint64_t> vals;
    for (const auto& ppt : prime_power_totients(x, 2))
        if (ppt.value % 4 == 2) vals.push_back(ppt.value);
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    return vals;
}

// bit u <-> m = 4u + 2 is a totient (A(m) > 0; includes m = 2). Built the
// same way the census blocks classify: prime branch by window sieve, power
// branch from the enumerated phi(q^e) values.
std::vector<uint64_t> totient_flags_2mod4(uint64_t x) {
    const uint64_t u_total = (x - 2) / 4 + 1;
    std::vector<uint64_t> flags((u_total + 63) / 64, 0);
    auto base = sieve_primes(std::max<uint64_t>(isqrt(4 * u_total) + 1, 3)).to_vector();

    const uint64_t step = uint64_t{1} << 16;
    for (uint64_t ulo = 0; ulo < u_total; ulo += step) {
        uint64_t uhi = std::min(u_total, ulo + step);
        auto bits = sieve_odd_window(4 * ulo + 3, 4 * uhi, base);
        for (uint64_t u = ulo; u < uhi; ++u) {
            uint64_t k = 2 * (u - ulo);
            if ((bits[k >> 6] >> (k & 63)) & 1) flags[u >> 6] |= uint64_t{1} << (u & 63);
        }
    }
    for (uint64_t v : power_branch_values(x))
        flags[((v - 2) / 4) >> 6] |= uint64_t{1} << (((v - 2) / 4) & 63);
    return flags;
}

struct BlockCounts {
    uint64_t t0 = 0, t2_prime = 0, t2_power = 0, t4 = 0;
};

// Counts for the block of u in [ulo, uhi), m = 4u + 2. u = 0 (m = 2) is
// skipped; the caller accounts for it in the footnote field.
BlockCounts scan_block(uint64_t ulo, uint64_t uhi,
                       std::span<const uint64_t> base_primes,
                       std::span<const uint64_t> power_vals) {
    // prime branch: m + 1 = 4u + 3; window of odd numbers [4*ulo+3, 4*uhi)
    // has m + 1 at bit 2*(u - ulo)
    uint64_t lo = 4 * ulo + 3;
    auto bits = sieve_odd_window(lo, 4 * uhi, base_primes);

    // power branch: mark block-local flags from the shared sorted list
    std::vector<uint8_t> power(uhi - ulo, 0);
    auto it = std::lower_bound(power_vals.begin(), power_vals.end(), 4 * ulo + 2);
    for (; it != power_vals.end() && *it < 4 * uhi + 2; ++it)
        power[(*it - 2) / 4 - ulo] = 1;

    BlockCounts out;
    for (uint64_t u = ulo; u < uhi; ++u) {
        if (u == 0) continue; // m = 2, the multiplicity-3 exception
        uint64_t k = 2 * (u - ulo);
        bool prime_branch = (bits[k >> 6] >> (k & 63)) & 1;
        bool power_branch = power[u - ulo];
        if (prime_branch && power_branch) ++out.t4;
        else if (prime_branch) ++out.t2_prime;
        else if (power_branch) ++out.t2_power;
        else ++out.t0;
    }
    return out;
}

} // namespace

std::vector<CensusRow> totient_census(std::span<const uint64_t> checkpoints,
                                      const CensusOptions& options) {
    validate_checkpoints(checkpoints);
    std::vector<CensusRow> rows;
    if (checkpoints.empty()) return rows;

    const uint64_t max_x = checkpoints.back();
    const uint64_t u_total = (max_x - 2) / 4 + 1; // m = 4u+2 <= max_x

    // u-counts at which rows are emitted; duplicates possible when two
    // checkpoints straddle no m value
    std::vector<uint64_t> cuts;
    cuts.reserve(checkpoints.size());
    for (uint64_t x : checkpoints) cuts.push_back((x - 2) / 4 + 1);

    // block plan: cut at every checkpoint boundary and every block_values
    const uint64_t step = std::max<uint64_t>(options.block_values, 1024);
    std::vector<std::pair<uint64_t, uint64_t>> blocks;
    {
        uint64_t pos = 0;
        size_t ci = 0;
        while (pos < u_total) {
            while (ci < cuts.size() && cuts[ci] == pos) ++ci;
            uint64_t next = std::min(pos + step, u_total);
            if (ci < cuts.size()) next = std::min(next, cuts[ci]);
            blocks.emplace_back(pos, next);
            pos = next;
        }
    }

    std::vector<BlockCounts> results(blocks.size());
    unsigned threads = options.threads ? options.threads : std::thread::hardware_concurrency();
    threads = std::max(1u, std::min<unsigned>(threads, blocks.size()));

    if (options.memory_budget_bytes != 0) {
        // base primes + per-block results + one window bitmap per worker
        uint64_t estimate = isqrt(4 * u_total) + 1 +
                            blocks.size() * sizeof(BlockCounts) +
                            uint64_t{threads} * step +
                            isqrt(2 * max_x) * sizeof(uint64_t) * 4;
        if (estimate > options.memory_budget_bytes)
            throw resource_error("totient_census: estimated memory exceeds budget");
    }

    auto base_primes = sieve_primes(std::max<uint64_t>(isqrt(4 * u_total) + 1, 3)).to_vector();
    auto power_vals = power_branch_values(max_x);
    if (threads == 1) {
        for (size_t b = 0; b < blocks.size(); ++b)
            results[b] = scan_block(blocks[b].first, blocks[b].second, base_primes, power_vals);
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                for (size_t b = next.fetch_add(1); b < blocks.size(); b = next.fetch_add(1))
                    results[b] = scan_block(blocks[b].first, blocks[b].second,
                                            base_primes, power_vals);
            });
        for (auto& th : pool) th.join();
    }

    auto pis = prime_count_multi(checkpoints);

    // merge block counts in order, emitting a row at each checkpoint cut
    BlockCounts acc;
    size_t ci = 0;
    uint64_t covered = 0;
    auto emit_rows_at = [&](uint64_t boundary) {
        while (ci < cuts.size() && cuts[ci] == boundary) {
            CensusRow row;
            row.x = checkpoints[ci];
            row.pi = pis[ci];
            row.t0 = acc.t0;
            row.t2 = acc.t2_prime + acc.t2_power;
            row.t4 = acc.t4;
            row.t2_prime = acc.t2_prime;
            row.t2_power = acc.t2_power;
            row.m2_excluded = true; // every checkpoint is >= 2
            rows.push_back(row);
            ++ci;
        }
    };
    emit_rows_at(0);
    for (size_t b = 0; b < blocks.size(); ++b) {
        acc.t0 += results[b].t0;
        acc.t2_prime += results[b].t2_prime;
        acc.t2_power += results[b].t2_power;
        acc.t4 += results[b].t4;
        covered = blocks[b].second;
        emit_rows_at(covered);
    }
    return rows;
}

// -------------------------------------------------------
// rt_census
// -------------------------------------------------------

RtRow rt_census(uint64_t x, uint32_t t) {
    if (x < 2) throw std::domain_error("rt_census: x must be >= 2");
    if (t < 1) throw std::domain_error("rt_census: t must be >= 1");

    RtRow row;
    row.x = x;
    row.t = t;
    for (const auto& ppt : prime_power_totients(x, t + 1))
        row.values.push_back(ppt.value);
    std::sort(row.values.begin(), row.values.end());
    row.values.erase(std::unique(row.values.begin(), row.values.end()), row.values.end());
    row.rt = row.values.size();
    row.rt_over_root = static_cast<double>(row.rt) /
                       std::pow(static_cast<double>(x), 1.0 / t);
    row.rt_over_pi_root = {row.rt, prime_count(nth_root_floor(x, t))};
    return row;
}

// -------------------------------------------------------
// vkl_census
// -------------------------------------------------------

VklRow vkl_census(uint64_t x, uint64_t k, uint32_t l, uint64_t memory_budget_bytes) {
    if (k < 1) throw std::domain_error("vkl_census: k must be >= 1");
    if (l < 2) throw std::domain_error("vkl_census: l must be >= 2");

    auto oracle = multiplicity_oracle(x, false, memory_budget_bytes);
    VklRow row;
    row.x = x;
    row.k = k;
    row.l = l;
    for (uint64_t m = 1; m <= x; ++m) {
        if (oracle.multiplicity(m) != k) continue;
        ++row.vk;
        if (has_prime_power_preimage(m, l)) ++row.vkl;
    }
    row.ratio = {row.vkl, row.vk};
    return row;
}

// -------------------------------------------------------
// pair_census
// -------------------------------------------------------

PairCensusRow pair_census(uint64_t x, uint64_t gap) {
    if (gap == 0 || gap % 2 != 0)
        throw std::domain_error("pair_census: gap must be even");
    if (gap % 4 != 0)
        throw std::domain_error(
            "pair_census: gap must be divisible by 4 so 2r+gap stays 2 (mod 4)");
    if (x < gap + 2) throw std::domain_error("pair_census: x must be >= gap + 2");

    PairCensusRow row;
    row.x = x;
    row.gap = gap;

    // totient flags for m = 4u+2 <= x, sieve-backed classification
    const uint64_t u_total = (x - 2) / 4 + 1;
    auto flags = totient_flags_2mod4(x);
    auto is_totient = [&](uint64_t u) { return (flags[u >> 6] >> (u & 63)) & 1; };

    // C: both 2r and 2r+gap totients, r odd (automatic for m = 2 mod 4)
    const uint64_t ugap = gap / 4;
    for (uint64_t u = 0; u + ugap < u_total; ++u)
        if (is_totient(u) && is_totient(u + ugap)) row.c_members.push_back(4 * u + 2);

    // C1: cousin-style prime pairs p, p+gap <= x+1, member 2r = p-1
    std::vector<uint64_t> lower_primes;
    cousin_pairs(x + 1, gap, &lower_primes);
    for (uint64_t p : lower_primes) row.c1_members.push_back(p - 1);

    // C2: even 2r <= x-gap with an odd-prime-power preimage of 2r or 2r+gap;
    // enumerate the value side, which is tiny
    {
        std::set<uint64_t> members;
        for (const auto& ppt : prime_power_totients(x, 2)) {
            if (ppt.value <= x - gap) members.insert(ppt.value);
            if (ppt.value >= gap + 2 && ppt.value - gap <= x - gap)
                members.insert(ppt.value - gap);
        }
        row.c2_members.assign(members.begin(), members.end());
    }

    row.c = row.c_members.size();
    row.c1 = row.c1_members.size();
    row.c2 = row.c2_members.size();
    row.c_over_sqrt = static_cast<double>(row.c) / std::sqrt(static_cast<double>(x));

    // the covering C <= C1 u C2 is a theorem; a violation is a bug
    for (uint64_t m : row.c_members) {
        bool in_c1 = std::binary_search(row.c1_members.begin(), row.c1_members.end(), m);
        bool in_c2 = std::binary_search(row.c2_members.begin(), row.c2_members.end(), m);
        if (!in_c1 && !in_c2)
            throw std::logic_error("pair_census: C member outside C1 u C2");
    }
    return row;
}

// -------------------------------------------------------
// ratio_report
// -------------------------------------------------------

std::vector<RatioReportRow> ratio_report(std::span<const uint64_t> checkpoints,
                                         const CensusOptions& options) {
    auto census = totient_census(checkpoints, options);
    std::vector<RatioReportRow> rows;
    rows.reserve(census.size());
    for (const auto& c : census) {
        RatioReportRow r;
        r.x = c.x;
        r.pi = c.pi;
        r.t2 = c.t2;
        r.t4 = c.t4;
        r.t2_prime = c.t2_prime;
        r.t2_power = c.t2_power;
        r.pi_4_3 = prime_count_residue(c.x, 4, 3);
        r.t2_over_pi = c.t2_over_pi();
        uint64_t num = 2 * c.t2 > c.pi ? 2 * c.t2 - c.pi : c.pi - 2 * c.t2;
        r.dist_half = {num, 2 * c.pi};
        r.t4_over_t2 = c.t4_over_t2();
        r.t4_over_sqrt = static_cast<double>(c.t4) / std::sqrt(static_cast<double>(c.x));
        r.pi43_over_pi = {r.pi_4_3, c.pi};
        rows.push_back(r);
    }
    return rows;
}

// -------------------------------------------------------
// emission
// -------------------------------------------------------

namespace {

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

} // namespace

std::string census_csv(std::span<const CensusRow> rows) {
    std::string out = "x,pi,t0,t2,t4,t2_over_pi,t4_over_t2\n";
    for (const auto& r : rows) {
        out += std::to_string(r.x) + ',' + std::to_string(r.pi) + ',' +
               std::to_string(r.t0) + ',' + std::to_string(r.t2) + ',' +
               std::to_string(r.t4) + ',' +
               ratio_decimal_truncated(r.t2_over_pi()) + ',' +
               ratio_decimal_truncated(r.t4_over_t2()) + '\n';
    }
    return out;
}

std::string report_csv(std::span<const RatioReportRow> rows) {
    std::string out =
        "x,pi,t2,t4,t2_prime,t2_power,pi_4_3,t2_over_pi,dist_half,"
        "t4_over_t2,t4_over_sqrt,pi43_over_pi\n";
    for (const auto& r : rows) {
        out += std::to_string(r.x) + ',' + std::to_string(r.pi) + ',' +
               std::to_string(r.t2) + ',' + std::to_string(r.t4) + ',' +
               std::to_string(r.t2_prime) + ',' + std::to_string(r.t2_power) + ',' +
               std::to_string(r.pi_4_3) + ',' +
               ratio_decimal_truncated(r.t2_over_pi) + ',' +
               ratio_decimal_truncated(r.dist_half) + ',' +
               ratio_decimal_truncated(r.t4_over_t2) + ',' +
               fixed6(r.t4_over_sqrt) + ',' +
               ratio_decimal_truncated(r.pi43_over_pi) + '\n';
    }
    return out;
}

std::string report_plot_data(std::span<const RatioReportRow> rows) {
    std::string out = "# x t2_over_pi\n";
    for (const auto& r : rows)
        out += std::to_string(r.x) + ' ' + ratio_decimal_truncated(r.t2_over_pi) + '\n';
    return out;
}

} // namespace totcensus
