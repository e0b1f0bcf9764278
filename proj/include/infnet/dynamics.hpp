#ifndef INFNET_DYNAMICS_HPP
#define INFNET_DYNAMICS_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "infnet/quantify.hpp"
#include "infnet/rates.hpp"
#include "infnet/rational.hpp"
#include "infnet/trajectory.hpp"

namespace infnet {

// --- reception algebra -------------------------------------------------------

/// Length of the projection of the final (reception-bounded) subinterval onto
/// the approaching observer: (n + 1/2)/n * k for n prior emissions.
template <class S>
S reception_projection_length(const S& k, long n) {
    if (n < 1) {
        throw std::domain_error("reception_projection_length: degenerate interval (n < 1)");
    }
    if (!(k > S(0))) {
        throw std::domain_error("reception_projection_length: k must be positive");
    }
    return S(2 * n + 1) / S(2 * n) * k;
}

/// Velocity after a Q-side reception following n emissions, from the interval
/// decomposition directly.  Equals velocity_from_k(k*(n+1)/n); keeping the
/// long form lets tests pit the two routes against each other.
template <class S>
S post_reception_velocity(const S& k, long n) {
    if (n < 1) {
        throw std::domain_error("post_reception_velocity: degenerate interval (n < 1)");
    }
    if (!(k > S(0))) {
        throw std::domain_error("post_reception_velocity: k must be positive");
    }
    const S grown = S(n + 1) / S(n) * k;
    const S shrunk = S(n) / S(n + 1) / k;
    return (grown - shrunk) / (grown + shrunk);
}

/// Particle state between receptions.  `emissions` is the count of influencing
/// events since the particle was last localized; the first interval of a run
/// is anchored at the initial state.
template <class S>
struct ParticleState {
    S k = S(1);
    long emissions = 0;
    S tau = S(0);
    S t = S(0);
    S x = S(0);
};

template <class S>
struct ReceptionOutcome {
    ParticleState<S> state;
    S dp;  // effective interval lengths accrued by this reception
    S dq;
};

/// Applies one reception: k is rescaled by (N+1)/N toward the sending side,
/// and the interval is accrued with the post-update k and effective counts
/// N_p = N_q = (N+1)/2, so that dtau = (N+1)/2 exactly.
template <class S>
ReceptionOutcome<S> apply_reception(ParticleState<S> s, Side side) {
    if (s.emissions < 1) {
        throw std::domain_error("reception on a degenerate interval (no emissions recorded)");
    }
    const long n = s.emissions;
    if (side == Side::q) {
        s.k = s.k * S(n + 1) / S(n);
    } else {
        s.k = s.k * S(n) / S(n + 1);
    }
    const S effective = S(n + 1) / S(2);
    const S dp = effective * s.k;
    const S dq = effective / s.k;
    s.tau += effective;
    s.t += (dp + dq) / S(2);
    s.x += (dp - dq) / S(2);
    s.emissions = 0;
    return ReceptionOutcome<S>{s, dp, dq};
}

template <class S>
ParticleState<S> receive_from_q(const ParticleState<S>& s) {
    return apply_reception(s, Side::q).state;
}

template <class S>
ParticleState<S> receive_from_p(const ParticleState<S>& s) {
    return apply_reception(s, Side::p).state;
}

// --- gap sampling --------------------------------------------------------------

enum class GapMode {
    deterministic,  // N' = round(1/total): the mean-value treatment exactly
    stochastic,     // binomial(round(2/total), 1/2): mean 1/total, concentrated
    geometric       // per-emission Bernoulli renewal; heavy spread (see README)
};

inline GapMode gap_mode_from_string(const std::string& text) {
    if (text == "deterministic") return GapMode::deterministic;
    if (text == "stochastic") return GapMode::stochastic;
    if (text == "geometric") return GapMode::geometric;
    throw std::invalid_argument("unknown gap_mode: '" + text + "'");
}

struct GapSample {
    long gap = 0;     // emissions in the inter-reception interval (N' = N + 1)
    Side side = Side::q;
};

/// Uniform double in [0,1) from the top 53 bits; bit-stable across platforms.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline long sample_gap_length(double total_rate, GapMode mode, std::mt19937_64& rng) {
    switch (mode) {
        case GapMode::deterministic:
            return std::llround(1.0 / total_rate);
        case GapMode::stochastic: {
            const long trials = std::llround(2.0 / total_rate);
            for (;;) {
                long gap = 0;
                long remaining = trials;
                while (remaining > 0) {
                    const int take = remaining < 64 ? static_cast<int>(remaining) : 64;
                    std::uint64_t bits = rng();
                    if (take < 64) bits &= (std::uint64_t{1} << take) - 1;
                    gap += __builtin_popcountll(bits);
                    remaining -= take;
                }
                if (gap >= 2) return gap;
            }
        }
        case GapMode::geometric: {
            const double log_q = std::log1p(-total_rate);
            for (;;) {
                const double u = uniform01(rng);
                const long gap = 1 + static_cast<long>(std::floor(std::log1p(-u) / log_q));
                if (gap >= 2) return gap;
            }
        }
    }
    throw std::logic_error("unreachable gap mode");
}

/// Draws the next inter-reception gap and the side the ending reception comes
/// from.  The side is Q with probability r_q/total independently of the gap.
inline GapSample sample_gap(const RateSpec& rates, GapMode mode, std::mt19937_64& rng) {
    validate_rates(rates);
    GapSample sample;
    sample.gap = sample_gap_length(rates.total(), mode, rng);
    if (rates.r_p == 0.0) {
        sample.side = Side::q;
    } else if (rates.r_q == 0.0) {
        sample.side = Side::p;
    } else {
        sample.side = uniform01(rng) < rates.r_q / rates.total() ? Side::q : Side::p;
    }
    return sample;
}

// --- simulation -----------------------------------------------------------------

enum class NumericMode { floating, exact };

inline NumericMode numeric_mode_from_string(const std::string& text) {
    if (text == "float" || text == "floating") return NumericMode::floating;
    if (text == "rational" || text == "exact") return NumericMode::exact;
    throw std::invalid_argument("unknown numeric mode: '" + text + "'");
}

struct InitialConditions {
    Rational k0 = 1;
    double t0 = 0.0;
    double x0 = 0.0;
};

struct SimulationOptions {
    std::uint64_t seed = 0;
    GapMode gap_mode = GapMode::deterministic;
    NumericMode numeric = NumericMode::floating;
    bool record_exact = false;           // keep per-reception exact records (exact mode)
    double unchanged_probability = 0.0;  // chance a reception leaves k unchanged
};

/// Exact per-reception record, exact mode only.
struct ExactReception {
    Side side = Side::q;
    long gap = 0;
    Rational k_before;
    Rational k_after;
    Rational dp;
    Rational dq;
};

struct DiscreteRun {
    std::vector<TrajectoryPoint> points;  // anchor sample plus one per k-changing reception
    std::vector<ExactReception> exact;    // filled when record_exact is set
    long collinearity_rejections = 0;
    long unchanged_receptions = 0;
};

/// Thrown when the rate field leaves its domain mid-run; carries the partial
/// trajectory accumulated so far.
struct SimulationTruncated : std::runtime_error {
    SimulationTruncated(const std::string& what, DiscreteRun partial_run)
        : std::runtime_error(what), partial(std::move(partial_run)) {}
    DiscreteRun partial;
};

namespace detail {

inline Side resample_side(const RateSpec& rates, std::mt19937_64& rng) {
    if (rates.r_p == 0.0) return Side::q;
    if (rates.r_q == 0.0) return Side::p;
    return uniform01(rng) < rates.r_q / rates.total() ? Side::q : Side::p;
}

// Float kinematics track rapidity as the primary variable so long runs cannot
// overflow k; coordinates follow via cosh/sinh.
struct FloatKinematics {
    double phi, tau, t, x;

    FloatKinematics(const InitialConditions& init)
        : phi(log_rational(init.k0)), tau(0.0), t(init.t0), x(init.x0) {}

    void apply(Side side, long gap, DiscreteRun&, bool) {
        const long n = gap - 1;
        phi += (side == Side::q ? 1.0 : -1.0) * std::log1p(1.0 / static_cast<double>(n));
        advance(gap);
    }

    void advance_unchanged(long gap) { advance(gap); }

    double t_coord() const { return t; }
    double x_coord() const { return x; }

    TrajectoryPoint point() const {
        TrajectoryPoint p;
        p.tau = tau;
        p.t = t;
        p.x = x;
        p.v = std::tanh(phi);
        p.k = std::exp(phi);
        p.rapidity = phi;
        return p;
    }

private:
    void advance(long gap) {
        const double effective = static_cast<double>(gap) * atomic_interval_length;
        tau += effective;
        t += effective * std::cosh(phi);
        x += effective * std::sinh(phi);
    }
};

struct ExactKinematics {
    ParticleState<Rational> st;

    ExactKinematics(const InitialConditions& init) {
        st.k = init.k0;
        st.t = Rational(init.t0);
        st.x = Rational(init.x0);
    }

    void apply(Side side, long gap, DiscreteRun& run, bool record) {
        st.emissions = gap - 1;
        const Rational k_before = st.k;
        const auto outcome = apply_reception(st, side);
        // Eq.-(5)-style consistency of the effective interval, zero tolerance
        if (!consistency_holds(outcome.dp, outcome.dq, gap)) {
            throw std::logic_error("exact consistency violated at a reception step");
        }
        if (record) {
            run.exact.push_back(
                ExactReception{side, gap, k_before, outcome.state.k, outcome.dp, outcome.dq});
        }
        st = outcome.state;
    }

    void advance_unchanged(long gap) {
        const Rational effective = Rational(gap) / 2;
        st.tau += effective;
        st.t += effective * (st.k + 1 / st.k) / 2;
        st.x += effective * (st.k - 1 / st.k) / 2;
    }

    double t_coord() const { return to_double(st.t); }
    double x_coord() const { return to_double(st.x); }

    TrajectoryPoint point() const {
        TrajectoryPoint p;
        p.tau = to_double(st.tau);
        p.t = to_double(st.t);
        p.x = to_double(st.x);
        p.rapidity = log_rational(st.k);
        p.v = std::tanh(p.rapidity);
        p.k = to_double(st.k);
        return p;
    }
};

template <class Kinematics>
DiscreteRun run_simulation(Kinematics kin, const RateField& field, long receptions,
                           const SimulationOptions& opt) {
    DiscreteRun run;
    std::mt19937_64 rng(opt.seed);
    run.points.push_back(kin.point());
    for (long i = 0; i < receptions; ++i) {
        const RateSpec rates = field.at(kin.t_coord(), kin.x_coord());
        GapSample sample;
        try {
            sample = sample_gap(rates, opt.gap_mode, rng);
        } catch (const std::domain_error& e) {
            if (i == 0) throw;  // bad rates up front are a caller error
            throw SimulationTruncated(
                "rate field left its domain at reception " + std::to_string(i) + ": " +
                    e.what(),
                std::move(run));
        }
        // Collinearity admissibility: the emission immediately before a
        // reception cannot point to the side the influence comes from.
        // Emission sides are modeled as fair coin flips; the joint resample
        // leaves the side distribution untouched.
        Side last_emission = uniform01(rng) < 0.5 ? Side::p : Side::q;
        while (last_emission == sample.side) {
            ++run.collinearity_rejections;
            sample.side = resample_side(rates, rng);
            last_emission = uniform01(rng) < 0.5 ? Side::p : Side::q;
        }
        if (opt.unchanged_probability > 0.0 &&
            uniform01(rng) < opt.unchanged_probability) {
            kin.advance_unchanged(sample.gap);
            ++run.unchanged_receptions;
            continue;
        }
        kin.apply(sample.side, sample.gap, run, opt.record_exact);
        TrajectoryPoint p = kin.point();
        p.side = sample.side;
        p.gap = sample.gap;
        run.points.push_back(p);
    }
    return run;
}

} // namespace detail

/// Runs the seeded discrete-event simulation of an influenced particle:
/// repeatedly samples an inter-reception gap and side, applies the reception
/// update, and records one trajectory point per k-changing reception (plus
/// the anchor sample at the start).  Deterministic given the seed.
inline DiscreteRun simulate(const InitialConditions& initial, const RateField& field,
                            long receptions, const SimulationOptions& opt) {
    if (receptions < 0) {
        throw std::invalid_argument("simulate: reception count must be non-negative");
    }
    if (!(initial.k0 > 0)) {
        throw std::domain_error("simulate: initial k must be positive");
    }
    if (opt.unchanged_probability < 0.0 || opt.unchanged_probability > 1.0) {
        throw std::domain_error("simulate: unchanged_probability must lie in [0, 1]");
    }
    if (opt.numeric == NumericMode::exact) {
        return detail::run_simulation(detail::ExactKinematics(initial), field, receptions, opt);
    }
    return detail::run_simulation(detail::FloatKinematics(initial), field, receptions, opt);
}

inline DiscreteRun simulate(const InitialConditions& initial, const RateSpec& rates,
                            long receptions, const SimulationOptions& opt) {
    validate_rates(rates);
    return simulate(initial, RateField::constant(rates.r_p, rates.r_q), receptions, opt);
}

} // namespace infnet

#endif // INFNET_DYNAMICS_HPP
