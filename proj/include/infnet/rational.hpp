#ifndef INFNET_RATIONAL_HPP
#define INFNET_RATIONAL_HPP

#include <gmpxx.h>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace infnet {

/// Exact rational scalar used by the count/k algebra.  The update rules are
/// rational multiplications, so runs of any length stay exactly representable;
/// the floating-point side of the library never touches this type.
using Rational = mpq_class;

inline double to_double(const Rational& q) { return q.get_d(); }
inline double to_double(double x) { return x; }

/// Natural log of a positive rational, stable far outside double range.
/// Splits numerator and denominator into mantissa and binary exponent and
/// cancels the exponents in integer arithmetic first.
inline double log_rational(const Rational& q) {
    if (sgn(q) <= 0) {
        throw std::domain_error("log_rational: argument must be positive");
    }
    signed long num_exp = 0;
    signed long den_exp = 0;
    const double num_mant = mpz_get_d_2exp(&num_exp, q.get_num().get_mpz_t());
    const double den_mant = mpz_get_d_2exp(&den_exp, q.get_den().get_mpz_t());
    return std::log(num_mant / den_mant) +
           static_cast<double>(num_exp - den_exp) * std::numbers::ln2;
}

/// Parses "p", "p/q", or a decimal-free integer ratio in base 10.
inline Rational parse_rational(const std::string& text) {
    Rational q;
    try {
        q = Rational(text);
    } catch (const std::invalid_argument&) {
        throw std::invalid_argument("not a rational literal: '" + text + "'");
    }
    if (q.get_den() == 0) {
        throw std::invalid_argument("rational literal with zero denominator: '" + text + "'");
    }
    q.canonicalize();
    return q;
}

} // namespace infnet

#endif // INFNET_RATIONAL_HPP
