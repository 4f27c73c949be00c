#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

namespace bvd {

/// Exact nonnegative path/step counts. Counts grow multiplicatively with
/// telescoping, so everything that counts paths is arbitrary precision.
using BigCount = mpz_class;

/// Exact rational frequencies and thresholds.
using Rational = mpq_class;

inline Rational make_rational(const BigCount& num, const BigCount& den) {
    Rational r(num, den);
    r.canonicalize();
    return r;
}

inline Rational make_rational(long num, long den) {
    Rational r(num, den);
    r.canonicalize();
    return r;
}

/// "p/q" rendering used by trace and report writers.
inline std::string rational_string(const Rational& r) {
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

inline double rational_double(const Rational& r) { return r.get_d(); }

/// Checked uint64 conversion for counts that must index machine arrays.
bool fits_u64(const BigCount& v);
std::uint64_t to_u64(const BigCount& v);

}  // namespace bvd
