#ifndef INFNET_QUANTIFY_HPP
#define INFNET_QUANTIFY_HPP

#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "infnet/rational.hpp"

namespace infnet {

/// Observer side in the 1+1 configuration.
enum class Side { p, q };

inline char side_char(Side s) { return s == Side::p ? 'P' : 'Q'; }

inline Side opposite(Side s) { return s == Side::p ? Side::q : Side::p; }

/// Length of an atomic particle-chain subinterval bounded by events with
/// distinct valuations, in rest-frame time units.
inline constexpr double atomic_interval_length = 0.5;

/// A differential particle-chain interval as quantified by the two observers.
/// dp and dq are the projected lengths on the P- and Q-side chains; when the
/// interval is built from counts, n_p and n_q subintervals of length k and 1/k
/// make them up.  Scale is fixed: chain length equals rest-frame time.
template <class S>
struct Interval {
    S dp;
    S dq;
    long n_p = 0;
    long n_q = 0;
    S k = S(1);
};

template <class S>
Interval<S> interval_from_counts(long n_p, long n_q, const S& k) {
    if (n_p < 0 || n_q < 0) {
        throw std::domain_error("interval_from_counts: counts must be non-negative");
    }
    if (!(k > S(0))) {
        throw std::domain_error("interval_from_counts: k must be positive");
    }
    return Interval<S>{S(n_p) * k, S(n_q) / k, n_p, n_q, k};
}

template <class S>
Interval<S> interval_from_lengths(const S& dp, const S& dq) {
    if (dp < S(0) || dq < S(0)) {
        throw std::domain_error("interval_from_lengths: lengths must be non-negative");
    }
    return Interval<S>{dp, dq, 0, 0, S(1)};
}

/// The invariant interval measure squared: dp*dq.  Independent of k when the
/// interval came from counts, since the k factors cancel.
template <class S>
S proper_time_squared(const Interval<S>& i) {
    return i.dp * i.dq;
}

/// Symmetric/antisymmetric decomposition of an interval into coordinate
/// increments.  dtau_sq is kept squared so the rational mode stays exact.
template <class S>
struct SpacetimeIncrement {
    S dt;
    S dx;
    S dtau_sq;
};

template <class S>
SpacetimeIncrement<S> to_spacetime(const Interval<S>& i) {
    return SpacetimeIncrement<S>{(i.dp + i.dq) / S(2), (i.dp - i.dq) / S(2), i.dp * i.dq};
}

inline double proper_time(const SpacetimeIncrement<double>& s) { return std::sqrt(s.dtau_sq); }

/// v = (k - 1/k)/(k + 1/k), as the algebraic ratio (k^2 - 1)/(k^2 + 1).
/// Exact for rational k.
template <class S>
S velocity_from_k(const S& k) {
    if (!(k > S(0))) {
        throw std::domain_error("velocity_from_k: k must be positive");
    }
    const S k2 = k * k;
    return (k2 - S(1)) / (k2 + S(1));
}

/// Float overload routed through rapidity so extreme k cannot overflow.
inline double velocity_from_k(double k) {
    if (!(k > 0.0)) {
        throw std::domain_error("velocity_from_k: k must be positive");
    }
    return std::tanh(std::log(k));
}

inline double k_from_velocity(double v) {
    if (!(v > -1.0 && v < 1.0)) {
        throw std::domain_error("k_from_velocity: |v| must be < 1");
    }
    return std::sqrt((1.0 + v) / (1.0 - v));
}

inline double rapidity_from_k(double k) {
    if (!(k > 0.0)) {
        throw std::domain_error("rapidity_from_k: k must be positive");
    }
    return std::log(k);
}

inline double rapidity_from_k(const Rational& k) { return log_rational(k); }

inline double k_from_rapidity(double phi) { return std::exp(phi); }

/// Localization consistency: dp*dq == (n/2)^2 for n nonzero-length atomic
/// subintervals.  Exact in the rational overload.
inline bool consistency_holds(const Rational& dp, const Rational& dq, long n) {
    if (n < 0) {
        throw std::domain_error("consistency_holds: n must be non-negative");
    }
    const Rational half_n = Rational(n) / 2;
    return dp * dq == half_n * half_n;
}

inline bool consistency_holds(double dp, double dq, long n, double rel_tol = 1e-12) {
    if (n < 0) {
        throw std::domain_error("consistency_holds: n must be non-negative");
    }
    const double target = (n / 2.0) * (n / 2.0);
    const double scale = std::max(std::abs(target), 1.0);
    return std::abs(dp * dq - target) <= rel_tol * scale;
}

} // namespace infnet

#endif // INFNET_QUANTIFY_HPP
