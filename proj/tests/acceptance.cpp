// acceptance.cpp
// End-to-end acceptance suite. Each criterion prints exactly one line:
//   [PASS] <n>. <name> (<seconds>s) <detail>
// or
//   [FAIL] <n>. <name> (<seconds>s) <detail>
// Exit status is the number of failed criteria.
//
// The slow 10^8+2 checkpoint is verified separately: set
// TOTCENSUS_ACCEPT_LONG=1 to include it in criterion 1.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <string>
#include <vector>

#include "totcensus/census.hpp"
#include "totcensus/classifier.hpp"
#include "totcensus/prime_engine.hpp"
#include "totcensus/totient_core.hpp"

using namespace totcensus;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;

    void fail(const std::string& why) {
        ok = false;
        if (!detail.empty()) detail += "; ";
        detail += why;
    }
    void note(const std::string& what) {
        if (detail.empty()) detail = what;
    }
};

int g_failures = 0;

template <class Fn>
void criterion(int id, const char* name, Fn&& fn) {
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
        fn(o);
    } catch (const std::exception& e) {
        o.fail(std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] %d. %s (%.2fs)%s%s\n", o.ok ? "PASS" : "FAIL", id, name, secs,
                o.detail.empty() ? "" : " ", o.detail.c_str());
    if (!o.ok) ++g_failures;
}

struct TableRow {
    uint64_t x, pi, t2, t4;
};

constexpr TableRow kReference[] = {
    {1002, 168, 87, 5},
    {10002, 1229, 625, 8},
    {100002, 9592, 4831, 14},
    {1000002, 78498, 39400, 20},
};
constexpr TableRow kLong7{10000002, 664579, 332606, 34};
constexpr TableRow kLong8{100000002, 5761455, 2881495, 78};

bool rows_match(const CensusRow& got, const TableRow& want, Outcome& o) {
    if (got.pi != want.pi || got.t2 != want.t2 || got.t4 != want.t4) {
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "x=%llu got (pi=%llu,t2=%llu,t4=%llu) want (%llu,%llu,%llu)",
                      (unsigned long long)want.x, (unsigned long long)got.pi,
                      (unsigned long long)got.t2, (unsigned long long)got.t4,
                      (unsigned long long)want.pi, (unsigned long long)want.t2,
                      (unsigned long long)want.t4);
        o.fail(buf);
        return false;
    }
    return true;
}

// a/b < c/d over exact integers
bool ratio_less(uint64_t a, uint64_t b, uint64_t c, uint64_t d) {
    return static_cast<unsigned __int128>(a) * d < static_cast<unsigned __int128>(c) * b;
}

} // namespace

int main() {
    criterion(1, "reference table reproduction (exact)", [](Outcome& o) {
        auto t0 = std::chrono::steady_clock::now();
        std::vector<uint64_t> cps;
        for (const auto& r : kReference) cps.push_back(r.x);
        auto rows = totient_census(cps);
        for (size_t i = 0; i < rows.size(); ++i)
            if (!rows_match(rows[i], kReference[i], o)) return;
        double ci_secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (ci_secs >= 60.0) o.fail("base checkpoints exceeded the 60s budget");

        auto t1 = std::chrono::steady_clock::now();
        auto long_rows = totient_census(std::vector<uint64_t>{kLong7.x});
        if (!rows_match(long_rows[0], kLong7, o)) return;
        double long_secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t1).count();
        if (long_secs >= 600.0) o.fail("10^7+2 checkpoint exceeded the 600s budget");

        if (const char* env = std::getenv("TOTCENSUS_ACCEPT_LONG"); env && env[0] == '1') {
            auto big = totient_census(std::vector<uint64_t>{kLong8.x});
            if (!rows_match(big[0], kLong8, o)) return;
            o.note("including 10^8+2");
        } else {
            o.note("10^8+2 skipped (set TOTCENSUS_ACCEPT_LONG=1)");
        }
    });

    criterion(2, "ratio convergence digits (truncated display)", [](Outcome& o) {
        const char* expect[] = {"0.517857", "0.508543", "0.503648", "0.501923"};
        std::vector<uint64_t> cps;
        for (const auto& r : kReference) cps.push_back(r.x);
        auto rows = totient_census(cps);
        for (size_t i = 0; i < rows.size(); ++i) {
            auto got = ratio_decimal_truncated(rows[i].t2_over_pi());
            if (got != expect[i])
                o.fail("x=" + std::to_string(rows[i].x) + " got " + got + " want " + expect[i]);
        }
    });

    criterion(3, "oracle equivalence up to 10^5", [](Outcome& o) {
        auto t0 = std::chrono::steady_clock::now();
        const uint64_t limit = 100000;
        auto oracle = multiplicity_oracle(limit, true);
        uint64_t checked = 0;
        for (uint64_t m = 2; m <= limit; m += 4) {
            auto rec = classify_2mod4(m);
            if (rec.multiplicity != oracle.multiplicity(m)) {
                o.fail("multiplicity mismatch at m=" + std::to_string(m));
                return;
            }
            if (rec.preimage != oracle.preimages(m)) {
                o.fail("preimage mismatch at m=" + std::to_string(m));
                return;
            }
            ++checked;
        }
        auto m2 = classify_2mod4(2);
        if (m2.multiplicity != 3 || m2.preimage != std::vector<uint64_t>{3, 4, 6})
            o.fail("m=2 exception wrong");
        double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs >= 30.0) o.fail("exceeded the 30s budget");
        o.note(std::to_string(checked) + " values, zero mismatches");
    });

    criterion(4, "preimage structure suite up to 10^5", [](Outcome& o) {
        uint64_t violations = 0;
        for (uint64_t m = 6; m <= 100000; m += 4) {
            auto rec = classify_2mod4(m);
            bool good = rec.multiplicity == 0 || rec.multiplicity == 2 || rec.multiplicity == 4;
            if (rec.multiplicity == 2) {
                good = good && rec.preimage.size() == 2 &&
                       rec.preimage[0] % 2 == 1 && rec.preimage[1] == 2 * rec.preimage[0];
            }
            if (rec.multiplicity == 4) {
                good = good && is_prime(m + 1) && rec.power_certificate.has_value();
                if (good) {
                    auto [q, e] = *rec.power_certificate;
                    uint64_t qe = 1;
                    for (uint32_t j = 0; j < e; ++j) qe *= q;
                    good = e > 1 &&
                           std::set<uint64_t>(rec.preimage.begin(), rec.preimage.end()) ==
                               std::set<uint64_t>{m + 1, qe, 2 * m + 2, 2 * qe};
                }
            }
            // odd/double symmetry
            if (good) {
                std::set<uint64_t> members(rec.preimage.begin(), rec.preimage.end());
                for (uint64_t n : rec.preimage) {
                    if (n % 2 == 1) good = good && members.count(2 * n) == 1;
                    else good = good && members.count(n / 2) == 1;
                }
            }
            if (!good) {
                ++violations;
                if (violations == 1) o.fail("first violation at m=" + std::to_string(m));
            }
        }
        if (violations) o.fail(std::to_string(violations) + " violations");
        else o.note("zero violations");
    });

    criterion(5, "R_2 decay and brute-force agreement", [](Outcome& o) {
        auto r4 = rt_census(10000, 2);
        auto r6 = rt_census(1000000, 2);
        if (!(r6.rt_over_root < r4.rt_over_root))
            o.fail("|R_2(x)|/sqrt(x) did not shrink from 10^4 to 10^6");

        if (rt_census(1002, 2).rt != 7) o.fail("|R_2(1002)| != 7");

        // independent oracle: scan n <= 2x for odd prime powers p^i, i >= 3
        const uint64_t xmax = 10000;
        std::vector<uint64_t> brute;
        for (uint64_t n = 3; n <= 2 * xmax; n += 2) {
            auto f = factorize(n);
            if (f.factors.size() != 1 || f.factors[0].exponent < 3) continue;
            uint64_t phi = euler_phi(f);
            if (phi <= xmax) brute.push_back(phi);
        }
        std::sort(brute.begin(), brute.end());
        brute.erase(std::unique(brute.begin(), brute.end()), brute.end());

        for (uint64_t x = 2; x <= xmax; ++x) {
            auto got = rt_census(x, 2).values;
            auto end = std::upper_bound(brute.begin(), brute.end(), x);
            if (!std::equal(got.begin(), got.end(), brute.begin(), end)) {
                o.fail("brute-force mismatch at x=" + std::to_string(x));
                return;
            }
        }
        char buf[96];
        std::snprintf(buf, sizeof(buf), "ratios %.6f -> %.6f, all x <= 10^4 match",
                      r4.rt_over_root, r6.rt_over_root);
        o.note(buf);
    });

    criterion(6, "t4/t2 strictly decreasing (exact rationals)", [](Outcome& o) {
        std::vector<uint64_t> cps;
        for (const auto& r : kReference) cps.push_back(r.x);
        auto rows = totient_census(cps);
        for (size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].t4 != kReference[i].t4 || rows[i].t2 != kReference[i].t2) {
                o.fail("counts drifted from the reference");
                return;
            }
            if (i > 0 && !ratio_less(rows[i].t4, rows[i].t2, rows[i - 1].t4, rows[i - 1].t2))
                o.fail("not strictly decreasing at x=" + std::to_string(rows[i].x));
        }
        o.note("5/87 > 8/625 > 14/4831 > 20/39400");
    });

    criterion(7, "pair census: C(20) and the covering C in C1 u C2", [](Outcome& o) {
        auto row20 = pair_census(20, 4);
        if (row20.c_members != std::vector<uint64_t>{2, 6}) {
            o.fail("C(20, 4) != {2, 6}");
            return;
        }

        // the membership predicates do not depend on x, so checking every
        // member at the top bound covers every x below it; do a ladder anyway
        for (uint64_t x : {1000ull, 10000ull, 50000ull, 100000ull}) {
            auto row = pair_census(x, 4);
            for (uint64_t m : row.c_members) {
                bool in1 = std::binary_search(row.c1_members.begin(), row.c1_members.end(), m);
                bool in2 = std::binary_search(row.c2_members.begin(), row.c2_members.end(), m);
                if (!in1 && !in2) {
                    o.fail("2r=" + std::to_string(m) + " escapes C1 u C2 at x=" +
                           std::to_string(x));
                    return;
                }
            }
        }

        auto lo = pair_census(1000, 4);
        auto hi = pair_census(100000, 4);
        char buf[128];
        std::snprintf(buf, sizeof(buf), "|C|/sqrt(x): %.6f at 10^3 -> %.6f at 10^5",
                      lo.c_over_sqrt, hi.c_over_sqrt);
        if (!(hi.c_over_sqrt < lo.c_over_sqrt))
            o.fail(std::string("trend clause: ") + buf +
                   " (|C(x)| grows like the cousin-pair count ~ x/log^2 x, which"
                   " dominates sqrt(x) at any computable scale)");
        else
            o.note(buf);
    });

    criterion(8, "multiplicity lift witnesses for T4 up to 10^4", [](Outcome& o) {
        uint64_t members = 0, failures = 0;
        for (uint64_t m = 6; m <= 10000; m += 4) {
            if (classify_2mod4(m).multiplicity != 4) continue;
            ++members;
            for (uint32_t k = 1; k <= 5; ++k) {
                auto [a, b] = carmichael_lift_witness(m, k);
                uint64_t target = (uint64_t{1} << k) * (m / 2);
                if (a == b || euler_phi(a) != target || euler_phi(b) != target) ++failures;
            }
        }
        if (failures) o.fail(std::to_string(failures) + " bad witnesses");
        else o.note(std::to_string(members) + " T4 members x k=1..5, zero failures");
    });

    criterion(9, "deterministic census output across 1, 2, 8 threads", [](Outcome& o) {
        std::vector<uint64_t> cps{100002};
        std::string baseline;
        for (unsigned threads : {1u, 2u, 8u}) {
            CensusOptions opts;
            opts.threads = threads;
            auto csv = census_csv(totient_census(cps, opts));
            if (baseline.empty()) baseline = csv;
            else if (csv != baseline) {
                o.fail("csv differs at threads=" + std::to_string(threads));
                return;
            }
        }
        o.note("byte-identical CSV");
    });

    criterion(10, "preimage bound soundness for all x <= 10^4", [](Outcome& o) {
        uint64_t top = 2 * preimage_bound(10000);
        auto phi = phi_sieve(top);
        for (uint64_t x = 1; x <= 10000; ++x) {
            uint64_t n_bound = preimage_bound(x);
            for (uint64_t n = n_bound + 1; n <= 2 * n_bound; ++n) {
                if (phi[n] <= x) {
                    o.fail("phi(" + std::to_string(n) + ") <= " + std::to_string(x) +
                           " beyond the bound");
                    return;
                }
            }
        }
        o.note("no preimage in (N, 2N] for any x");
    });

    if (g_failures == 0) std::printf("acceptance: all criteria passed\n");
    else std::printf("acceptance: %d criteria FAILED\n", g_failures);
    return g_failures;
}
