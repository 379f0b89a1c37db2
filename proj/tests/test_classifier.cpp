#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "totcensus/classifier.hpp"
#include "totcensus/prime_engine.hpp"
#include "totcensus/totient_core.hpp"

using namespace totcensus;

TEST_CASE("classify m = 6: both branches fire") {
    auto rec = classify_2mod4(6);
    CHECK(rec.multiplicity == 4);
    CHECK(rec.preimage == std::vector<uint64_t>{7, 9, 14, 18});
    REQUIRE(rec.prime_certificate.has_value());
    CHECK(*rec.prime_certificate == 7);
    REQUIRE(rec.power_certificate.has_value());
    CHECK(*rec.power_certificate == std::pair<uint64_t, uint32_t>{3, 2});
    CHECK_FALSE(rec.exceptional);
}

TEST_CASE("classify m = 10: prime branch only") {
    auto rec = classify_2mod4(10);
    CHECK(rec.multiplicity == 2);
    CHECK(rec.preimage == std::vector<uint64_t>{11, 22});
    CHECK(rec.prime_certificate.has_value());
    CHECK_FALSE(rec.power_certificate.has_value());
}

TEST_CASE("classify m = 14: nontotient") {
    auto rec = classify_2mod4(14);
    CHECK(rec.multiplicity == 0);
    CHECK(rec.preimage.empty());
    CHECK_FALSE(rec.prime_certificate.has_value());
    CHECK_FALSE(rec.power_certificate.has_value());
}

TEST_CASE("classify m = 2: the exceptional value") {
    auto rec = classify_2mod4(2);
    CHECK(rec.multiplicity == 3);
    CHECK(rec.preimage == std::vector<uint64_t>{3, 4, 6});
    CHECK(rec.exceptional);
}

TEST_CASE("classify m = 54: power branch only") {
    auto rec = classify_2mod4(54); // 55 = 5*11 not prime; phi(81) = 54
    CHECK(rec.multiplicity == 2);
    CHECK(rec.preimage == std::vector<uint64_t>{81, 162});
    CHECK_FALSE(rec.prime_certificate.has_value());
    REQUIRE(rec.power_certificate.has_value());
    CHECK(*rec.power_certificate == std::pair<uint64_t, uint32_t>{3, 4});
}

TEST_CASE("classify rejects values outside the 2 mod 4 class") {
    CHECK_THROWS_AS(classify_2mod4(0), std::domain_error);
    CHECK_THROWS_AS(classify_2mod4(4), std::domain_error);
    CHECK_THROWS_AS(classify_2mod4(5), std::domain_error);
    CHECK_THROWS_AS(classify_2mod4(8), std::domain_error);
    CHECK_THROWS_AS(classify_2mod4(uint64_t{1} << 63), std::domain_error);
}

TEST_CASE("classified counts below 1002 match the reference table") {
    uint64_t t2 = 0, t4 = 0;
    for (uint64_t m = 6; m <= 1002; m += 4) {
        auto rec = classify_2mod4(m);
        if (rec.multiplicity == 2) ++t2;
        if (rec.multiplicity == 4) ++t4;
    }
    CHECK(t2 == 87);
    CHECK(t4 == 5);
}

TEST_CASE("oracle equivalence at unit scale") {
    const uint64_t limit = 10000;
    auto oracle = multiplicity_oracle(limit, true);
    for (uint64_t m = 2; m <= limit; m += 4) {
        auto rec = classify_2mod4(m);
        REQUIRE(rec.multiplicity == oracle.multiplicity(m));
        REQUIRE(rec.preimage == oracle.preimages(m));
    }
}

TEST_CASE("preimage shape invariants at unit scale") {
    for (uint64_t m = 6; m <= 20000; m += 4) {
        auto rec = classify_2mod4(m);
        REQUIRE((rec.multiplicity == 0 || rec.multiplicity == 2 || rec.multiplicity == 4));
        REQUIRE(rec.multiplicity == rec.preimage.size());

        if (rec.multiplicity == 2) {
            // exactly one certificate, preimage {p^n, 2p^n}
            CHECK(rec.prime_certificate.has_value() != rec.power_certificate.has_value());
            CHECK(rec.preimage[1] == 2 * rec.preimage[0]);
            CHECK(rec.preimage[0] % 2 == 1);
        }
        if (rec.multiplicity == 4) {
            REQUIRE(rec.prime_certificate.has_value());
            REQUIRE(rec.power_certificate.has_value());
            CHECK(is_prime(m + 1));
            auto [q, e] = *rec.power_certificate;
            CHECK(e > 1);
            uint64_t qe = 1;
            for (uint32_t j = 0; j < e; ++j) qe *= q;
            std::set<uint64_t> expect{m + 1, qe, 2 * m + 2, 2 * qe};
            CHECK(std::set<uint64_t>(rec.preimage.begin(), rec.preimage.end()) == expect);
        }
        // half-preimage symmetry: odd n in preimage <=> 2n in preimage
        std::set<uint64_t> members(rec.preimage.begin(), rec.preimage.end());
        for (uint64_t n : rec.preimage) {
            if (n % 2 == 1) CHECK(members.count(2 * n) == 1);
            else CHECK(members.count(n / 2) == 1);
        }
    }
}

TEST_CASE("has_prime_power_preimage witnesses") {
    CHECK(has_prime_power_preimage(18, 3) == std::pair<uint64_t, uint32_t>{3, 3});
    CHECK(has_prime_power_preimage(100, 3) == std::pair<uint64_t, uint32_t>{5, 3});
    CHECK_FALSE(has_prime_power_preimage(10, 2).has_value());
    CHECK(has_prime_power_preimage(6, 2) == std::pair<uint64_t, uint32_t>{3, 2});
    // exponent threshold filters: phi(9) = 6 has e = 2 only
    CHECK_FALSE(has_prime_power_preimage(6, 3).has_value());
    // m = 2 only has the even prime power 4; odd-q convention says empty
    CHECK_FALSE(has_prime_power_preimage(2, 2).has_value());
    CHECK_THROWS_AS(has_prime_power_preimage(6, 1), std::domain_error);
}

TEST_CASE("has_prime_power_preimage agrees with enumeration") {
    // every emitted value answers nonempty at its exponent
    for (const auto& e : prime_power_totients(50000, 2)) {
        auto w = has_prime_power_preimage(e.value, 2);
        REQUIRE(w.has_value());
        // the witness is unique, so it must be this (p, i)
        CHECK(*w == std::pair<uint64_t, uint32_t>{e.p, e.i});
    }
    // and values with no odd-prime-power preimage answer empty
    std::set<uint64_t> vals;
    for (const auto& e : prime_power_totients(2000, 2)) vals.insert(e.value);
    for (uint64_t m = 1; m <= 2000; ++m)
        CHECK(has_prime_power_preimage(m, 2).has_value() == (vals.count(m) == 1));
}

TEST_CASE("multiplicity-4 values sit inside R_2") {
    for (uint64_t m = 6; m <= 10000; m += 4)
        if (classify_2mod4(m).multiplicity == 4)
            CHECK(has_prime_power_preimage(m, 2).has_value());
}

TEST_CASE("carmichael_lift_witness examples") {
    CHECK(carmichael_lift_witness(6, 2) == std::pair<uint64_t, uint64_t>{28, 36});
    CHECK(euler_phi(28) == 12);
    CHECK(euler_phi(36) == 12);

    CHECK(carmichael_lift_witness(6, 1) == std::pair<uint64_t, uint64_t>{14, 18});

    CHECK(carmichael_lift_witness(18, 3) == std::pair<uint64_t, uint64_t>{152, 216});
    CHECK(euler_phi(152) == 72);
    CHECK(euler_phi(216) == 72);
}

TEST_CASE("carmichael_lift_witness rejects non-T4 input and overflow") {
    CHECK_THROWS_AS(carmichael_lift_witness(10, 1), std::domain_error); // A(10) = 2
    CHECK_THROWS_AS(carmichael_lift_witness(14, 1), std::domain_error); // A(14) = 0
    CHECK_THROWS_AS(carmichael_lift_witness(2, 1), std::domain_error);  // A(2) = 3
    CHECK_THROWS_AS(carmichael_lift_witness(6, 0), std::domain_error);
    CHECK_THROWS_AS(carmichael_lift_witness(6, 62), std::domain_error); // 4*2^62 overflows
}

TEST_CASE("lift witnesses verify across k") {
    for (uint64_t m = 6; m <= 3000; m += 4) {
        if (classify_2mod4(m).multiplicity != 4) continue;
        for (uint32_t k = 1; k <= 5; ++k) {
            auto [a, b] = carmichael_lift_witness(m, k);
            uint64_t target = (uint64_t{1} << k) * (m / 2);
            CHECK(a != b);
            CHECK(euler_phi(a) == target);
            CHECK(euler_phi(b) == target);
        }
    }
}
