// common.hpp
// Shared plumbing: error types, checked 64-bit arithmetic, integer roots,
// and exact rational display.
//
// Error conventions used across the library:
//   std::domain_error  — argument outside an operation's documented domain
//   std::out_of_range  — query outside a table's constructed range
//   resource_error     — a configured memory/time budget would be exceeded

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace totcensus {

class resource_error : public std::runtime_error {
public:
    explicit resource_error(const std::string& what) : std::runtime_error(what) {}
};

// -------------------------------------------------------
// Checked arithmetic. All power/product chains near the
// 64-bit boundary go through these — overflow must fail
// loudly, never wrap.
// -------------------------------------------------------

inline bool checked_mul(uint64_t a, uint64_t b, uint64_t& out) {
    return !__builtin_mul_overflow(a, b, &out);
}

inline bool checked_add(uint64_t a, uint64_t b, uint64_t& out) {
    return !__builtin_add_overflow(a, b, &out);
}

// a*b, throws std::overflow_error on wrap
inline uint64_t mul_or_throw(uint64_t a, uint64_t b, const char* ctx) {
    uint64_t r;
    if (!checked_mul(a, b, r))
        throw std::overflow_error(std::string(ctx) + ": 64-bit overflow");
    return r;
}

// floor(sqrt(n)), exact for the full 64-bit range
inline uint64_t isqrt(uint64_t n) {
    if (n == 0) return 0;
    uint64_t r = static_cast<uint64_t>(std::sqrt(static_cast<double>(n)));
    while (r > 0 && (r > std::numeric_limits<uint32_t>::max() || r * r > n)) --r;
    while ((r + 1) <= std::numeric_limits<uint32_t>::max() && (r + 1) * (r + 1) <= n) ++r;
    return r;
}

// floor(x^(1/t)), exact. t >= 1.
inline uint64_t nth_root_floor(uint64_t x, unsigned t) {
    if (t == 0) throw std::domain_error("nth_root_floor: t must be >= 1");
    if (t == 1 || x < 2) return x;
    if (t == 2) return isqrt(x);
    if (t >= 64) return 1;
    uint64_t r = static_cast<uint64_t>(std::pow(static_cast<double>(x), 1.0 / t));
    // pow() seeds within +-1 of the true root; correct by exact comparison
    auto pow_le = [&](uint64_t base) {
        uint64_t acc = 1;
        for (unsigned i = 0; i < t; ++i)
            if (!checked_mul(acc, base, acc)) return false;
        return acc <= x;
    };
    while (r > 1 && !pow_le(r)) --r;
    while (pow_le(r + 1)) ++r;
    return r;
}

// -------------------------------------------------------
// Exact rational for report columns. Ratios are always
// recomputed from integer counts; display truncates
// (never rounds), matching the reference tables.
// -------------------------------------------------------

struct Ratio {
    uint64_t num = 0;
    uint64_t den = 0;
};

// "0.517857" style: `digits` decimals, truncated toward zero.
// den == 0 prints "nan" (only reachable for degenerate inputs like t2 = 0).
inline std::string ratio_decimal_truncated(const Ratio& r, int digits = 6) {
    if (r.den == 0) return "nan";
    std::string s = std::to_string(r.num / r.den);
    if (digits <= 0) return s;
    s += '.';
    unsigned __int128 rem = r.num % r.den;
    for (int i = 0; i < digits; ++i) {
        rem *= 10;
        s += static_cast<char>('0' + static_cast<int>(rem / r.den));
        rem %= r.den;
    }
    return s;
}

} // namespace totcensus
