// census.hpp
// Range-scale counting over the totient candidates m = 2 (mod 4): the
// multiplicity census (T0/T2/T4 per checkpoint), the odd-prime-power
// totient census R_t, the multiplicity-k census V_k / V_k^l, consecutive
// pair counts C = C1 u C2, and the convergence report.
//
// The census scan is data-parallel over disjoint blocks of the value range;
// per-block counts merge by addition, and checkpoint boundaries align to
// block edges, so output is byte-identical for any worker count.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "totcensus/common.hpp"

namespace totcensus {

struct CensusOptions {
    unsigned threads = 0; // 0 = hardware concurrency
    // m-values per scan block (each block covers 4x this integer span)
    uint64_t block_values = uint64_t{1} << 16;
    // 0 = unlimited; checked against the scan's allocations up front
    uint64_t memory_budget_bytes = 0;
};

struct CensusRow {
    uint64_t x = 0;
    uint64_t pi = 0;
    uint64_t t0 = 0;
    uint64_t t2 = 0;
    uint64_t t4 = 0;
    // split of t2 by which branch fired: prime (m+1 prime) vs power (q^e)
    uint64_t t2_prime = 0;
    uint64_t t2_power = 0;
    // footnote: m = 2 (multiplicity 3) exists below every x >= 2 and is
    // excluded from t2/t4 above
    bool m2_excluded = false;

    Ratio t2_over_pi() const { return {t2, pi}; }
    Ratio t4_over_t2() const { return {t4, t2}; }
};

// One streaming pass over m = 2 (mod 4), m <= max(checkpoints), classifying
// every value by the two preimage branches (m+1 prime / odd-prime-power)
// and accumulating counts per checkpoint. pi comes from the prime engine.
// Checkpoints must be strictly ascending, each >= 2.
std::vector<CensusRow> totient_census(std::span<const uint64_t> checkpoints,
                                      const CensusOptions& options = {});

struct RtRow {
    uint64_t x = 0;
    uint32_t t = 0;
    uint64_t rt = 0;                     // distinct totient values
    double rt_over_root = 0.0;           // rt / x^(1/t)
    Ratio rt_over_pi_root;                // rt / pi(floor(x^(1/t)))
    std::vector<uint64_t> values;        // the deduplicated set, ascending
};

// R_t(x): distinct values phi(p^i) <= x with p odd prime, i >= t+1.
RtRow rt_census(uint64_t x, uint32_t t);

struct VklRow {
    uint64_t x = 0;
    uint64_t k = 0;
    uint32_t l = 0;
    uint64_t vkl = 0; // |V_k^l(x)|
    uint64_t vk = 0;  // |V_k(x)|
    Ratio ratio;      // vkl / vk
};

// V_k(x) = #{m <= x : A(m) = k} via the exhaustive oracle;
// V_k^l(x) = those members with an odd-prime-power preimage of exponent
// >= l (classifier witness). l >= 2, k >= 1.
VklRow vkl_census(uint64_t x, uint64_t k, uint32_t l, uint64_t memory_budget_bytes = 0);

struct PairCensusRow {
    uint64_t x = 0;
    uint64_t gap = 4;
    uint64_t c = 0;  // |C(x)|
    uint64_t c1 = 0; // |C1(x)|
    uint64_t c2 = 0; // |C2(x)|
    double c_over_sqrt = 0.0;
    std::vector<uint64_t> c_members;
    std::vector<uint64_t> c1_members;
    std::vector<uint64_t> c2_members;
};

// C(x): 2r <= x-gap, r odd, with 2r and 2r+gap both totients (m = 2 counts).
// C1(x): 2r with 2r+1 and 2r+gap+1 both prime <= x+1 (r unrestricted).
// C2(x): even 2r <= x-gap with an odd-prime-power preimage (exponent >= 2)
// of 2r or 2r+gap. The covering C <= C1 u C2 is checked set-wise before
// returning. gap must be divisible by 4 so that both ends of a pair stay
// = 2 (mod 4); x >= gap + 2.
PairCensusRow pair_census(uint64_t x, uint64_t gap = 4);

struct RatioReportRow {
    uint64_t x = 0;
    uint64_t pi = 0;
    uint64_t t2 = 0;
    uint64_t t4 = 0;
    uint64_t t2_prime = 0;
    uint64_t t2_power = 0;
    uint64_t pi_4_3 = 0;        // pi(x; 4, 3)
    Ratio t2_over_pi;
    Ratio dist_half;            // |t2/pi - 1/2| = |2*t2 - pi| / (2*pi)
    Ratio t4_over_t2;
    double t4_over_sqrt = 0.0;  // t4 / sqrt(x)
    Ratio pi43_over_pi;
};

// Per-checkpoint convergence data: t2/pi and its distance from 1/2, t4/t2,
// t4/sqrt(x), pi(x;4,3)/pi(x), and the t2 split into the prime-preimage and
// prime-power-preimage parts.
std::vector<RatioReportRow> ratio_report(std::span<const uint64_t> checkpoints,
                                         const CensusOptions& options = {});

// -------------------------------------------------------
// emission — CSV schema is part of the external interface
// -------------------------------------------------------

// header "x,pi,t0,t2,t4,t2_over_pi,t4_over_t2", exact integers,
// 6-decimal truncated ratios
std::string census_csv(std::span<const CensusRow> rows);

std::string report_csv(std::span<const RatioReportRow> rows);

// gnuplot-ready two-column data: x and t2/pi
std::string report_plot_data(std::span<const RatioReportRow> rows);

} // namespace totcensus
