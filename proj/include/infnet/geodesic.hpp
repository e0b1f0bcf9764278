#ifndef INFNET_GEODESIC_HPP
#define INFNET_GEODESIC_HPP

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "infnet/rates.hpp"
#include "infnet/trajectory.hpp"

namespace infnet {

// --- mean increments between receptions --------------------------------------

struct ObserverIncrements {
    double dp = 0.0;
    double dq = 0.0;
};

/// Mean projected increments for one inter-reception interval, averaged over
/// the gap length and the ending side.
inline ObserverIncrements mean_increments(double r_p, double r_q, double k) {
    validate_rates(RateSpec{r_p, r_q});
    if (!(k > 0.0)) {
        throw std::domain_error("mean_increments: k must be positive");
    }
    const double total = r_p + r_q;
    const double denom = 2.0 * total * (1.0 - total);
    return ObserverIncrements{(1.0 - 2.0 * r_p + r_p * total) / denom * k,
                              (1.0 - 2.0 * r_q + r_q * total) / denom / k};
}

struct BaseIncrements {
    double dtau = 0.0;
    double dt = 0.0;
    double dx = 0.0;
};

/// First-order coordinate increments of one inter-reception interval at the
/// initial rates: dtau = 1/(2*total0).
inline BaseIncrements base_increments(double k, double total0) {
    if (!(k > 0.0)) {
        throw std::domain_error("base_increments: k must be positive");
    }
    if (!(total0 > 0.0) || total0 > max_total_rate) {
        throw std::domain_error("base_increments: total rate must lie in (0, 1/2]");
    }
    const double dtau = 1.0 / (2.0 * total0);
    return BaseIncrements{dtau, dtau / 2.0 * (k + 1.0 / k), dtau / 2.0 * (k - 1.0 / k)};
}

struct SecondIncrements {
    double ddt = 0.0;
    double ddx = 0.0;
};

/// Change of (dt, dx) from one inter-reception interval to the next, in the
/// continuity approximation where the current rates stand in for the initial
/// ones.  Average/half-difference form.
inline SecondIncrements second_increments(double k, double r_p, double r_q) {
    validate_rates(RateSpec{r_p, r_q});
    if (!(k > 0.0)) {
        throw std::domain_error("second_increments: k must be positive");
    }
    const double total = r_p + r_q;
    const double diff = r_q - r_p;
    const double sym = total / (8.0 * (1.0 - total));
    const double asym = diff / (4.0 * total) * (1.0 + total / (2.0 * (1.0 - total)));
    const double k_plus = k + 1.0 / k;
    const double k_minus = k - 1.0 / k;
    return SecondIncrements{sym * k_plus + asym * k_minus, sym * k_minus + asym * k_plus};
}

/// Same quantity without the continuity approximation: the current-interval
/// and initial-interval rates enter separately.
inline SecondIncrements second_increments_raw(double k, double r_p, double r_q,
                                              double total0) {
    validate_rates(RateSpec{r_p, r_q});
    if (!(k > 0.0)) {
        throw std::domain_error("second_increments_raw: k must be positive");
    }
    if (!(total0 > 0.0) || total0 > max_total_rate) {
        throw std::domain_error("second_increments_raw: total rate must lie in (0, 1/2]");
    }
    const double total = r_p + r_q;
    const double factor_p = 1.0 - 2.0 * r_p + r_p * total;
    const double factor_q = 1.0 - 2.0 * r_q + r_q * total;
    const double denom = total * (1.0 - total);
    return SecondIncrements{
        0.25 * ((factor_p * k + factor_q / k) / denom - (k + 1.0 / k) / total0),
        0.25 * ((factor_p * k - factor_q / k) / denom - (k - 1.0 / k) / total0)};
}

// --- rate potentials and the geodesic-form right-hand side -------------------

/// The two worldline-rate coefficients of the geodesic-form equations:
/// `symmetric` multiplies the like velocity component, `cross` the swapped
/// one.  They are the total derivatives of the two rate potentials.
struct GeodesicCoefficients {
    double symmetric = 0.0;
    double cross = 0.0;
};

inline GeodesicCoefficients rate_potential_derivatives(double total, double diff,
                                                       double dtau) {
    if (total == 0.0) return GeodesicCoefficients{0.0, 0.0};  // free particle
    if (!(total > 0.0) || total > max_total_rate) {
        throw std::domain_error("rate_potential_derivatives: total rate out of (0, 1/2]");
    }
    if (!(dtau > 0.0)) {
        throw std::domain_error("rate_potential_derivatives: dtau must be positive");
    }
    return GeodesicCoefficients{
        total * total / (2.0 * (1.0 - total) * dtau),
        diff / dtau * (1.0 + total / (2.0 * (1.0 - total)))};
}

/// dtau defaults to the inter-reception quantum 1/(2*total).
inline GeodesicCoefficients rate_potential_derivatives(double total, double diff) {
    if (total == 0.0) return GeodesicCoefficients{0.0, 0.0};
    return rate_potential_derivatives(total, diff, 1.0 / (2.0 * total));
}

/// Leading-order truncation: only the cross coefficient diff/dtau = 2*total*diff
/// survives.  This is the form whose constant-rate solution is exactly the
/// special-relativistic hyperbola.
inline GeodesicCoefficients rate_potential_derivatives_first_order(double total,
                                                                   double diff) {
    if (total < 0.0 || total > max_total_rate) {
        throw std::domain_error("rate_potential_derivatives_first_order: rate out of range");
    }
    return GeodesicCoefficients{0.0, 2.0 * total * diff};
}

enum class PotentialForm { full, first_order };

inline PotentialForm potential_form_from_string(const std::string& text) {
    if (text == "full") return PotentialForm::full;
    if (text == "first_order" || text == "first-order") return PotentialForm::first_order;
    throw std::invalid_argument("unknown potential_form: '" + text + "'");
}

struct SecondDerivatives {
    double d2t = 0.0;
    double d2x = 0.0;
};

/// Geodesic-form right-hand side: d2t = sym*ut + cross*ux and d2x with the
/// velocity components swapped.
inline SecondDerivatives geodesic_rhs(double ut, double ux,
                                      const GeodesicCoefficients& c) {
    return SecondDerivatives{c.symmetric * ut + c.cross * ux,
                             c.symmetric * ux + c.cross * ut};
}

inline double velocity_norm_residual(double ut, double ux) {
    return ut * ut - ux * ux - 1.0;
}

// --- Christoffel-symbol analogues ---------------------------------------------

/// Partials of the two rate potentials; `total_*` for the sum-rate potential,
/// `diff_*` for the difference-rate potential.
template <class S>
struct PotentialGradients {
    S total_t{};
    S total_x{};
    S diff_t{};
    S diff_x{};
};

template <class S>
struct ChristoffelSymbols {
    S t_tt{};
    S t_tx{};
    S t_xx{};
    S x_tt{};
    S x_tx{};
    S x_xx{};
};

/// Sign convention: Gamma is minus the coefficient appearing on the expanded
/// right-hand side, so the standard form d2x^a + Gamma^a_bc u^b u^c = 0 holds.
template <class S>
ChristoffelSymbols<S> christoffels(const PotentialGradients<S>& g) {
    return ChristoffelSymbols<S>{
        -g.total_t,
        -(g.total_x + g.diff_t) / S(2),
        -g.diff_x,
        -g.diff_t,
        -(g.total_t + g.diff_x) / S(2),
        -g.total_x};
}

/// The two linear relations the construction imposes on the symbols; both
/// vanish identically.
template <class S>
std::pair<S, S> coordinate_condition_residuals(const ChristoffelSymbols<S>& c) {
    return {S(2) * c.t_tx - c.x_tt - c.x_xx, S(2) * c.x_tx - c.t_tt - c.t_xx};
}

// --- finite differences ---------------------------------------------------------

/// Central-difference gradient of a scalar field of (t, x).
template <class F>
std::pair<double, double> central_gradient(F&& f, double t, double x, double h = 1e-5) {
    if (!(h > 0.0)) {
        throw std::domain_error("central_gradient: step must be positive");
    }
    return {(f(t + h, x) - f(t - h, x)) / (2.0 * h),
            (f(t, x + h) - f(t, x - h)) / (2.0 * h)};
}

template <class FTotal, class FDiff>
PotentialGradients<double> numeric_potential_gradients(FTotal&& total_potential,
                                                       FDiff&& diff_potential, double t,
                                                       double x, double h = 1e-5) {
    const auto [tt, tx] = central_gradient(total_potential, t, x, h);
    const auto [dt_, dx_] = central_gradient(diff_potential, t, x, h);
    return PotentialGradients<double>{tt, tx, dt_, dx_};
}

// --- worldline integration ------------------------------------------------------

struct WorldlineStart {
    double t0 = 0.0;
    double x0 = 0.0;
    double rapidity0 = 0.0;
};

struct IntegrationOptions {
    double step = 0.0;
    PotentialForm form = PotentialForm::full;
    bool renormalize = true;
};

struct ContinuumRun {
    std::vector<TrajectoryPoint> points;
    bool truncated = false;
    std::string diagnostic;
    double max_norm_drift = 0.0;  // worst |ut^2 - ux^2 - 1| seen before renormalizing
};

namespace detail {

struct FieldDomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline GeodesicCoefficients coefficients_at(const RateField& field, double t, double x,
                                            PotentialForm form) {
    const RateSpec rates = field.at(t, x);
    if (!rates_in_field_domain(rates)) {
        throw FieldDomainError("rate field out of domain at t=" + format_double(t) +
                               ", x=" + format_double(x));
    }
    if (form == PotentialForm::first_order) {
        return rate_potential_derivatives_first_order(rates.total(), rates.difference());
    }
    return rate_potential_derivatives(rates.total(), rates.difference());
}

} // namespace detail

/// Fixed-step classic 4th-order integration of the geodesic-form equations,
/// with the coefficients evaluated from the rate field at each stage point and
/// the velocity projected back onto the unit hyperboloid after each step.
/// A field-domain violation mid-run truncates the trajectory and reports a
/// diagnostic instead of throwing.
inline ContinuumRun integrate(const RateField& field, const WorldlineStart& start,
                              double tau_span, const IntegrationOptions& opt) {
    if (!(opt.step > 0.0)) {
        throw std::domain_error("integrate: step must be positive");
    }
    if (!(tau_span >= 0.0)) {
        throw std::domain_error("integrate: tau_span must be non-negative");
    }
    const long steps = std::lround(tau_span / opt.step);

    ContinuumRun run;
    std::array<double, 4> state = {start.t0, start.x0, std::cosh(start.rapidity0),
                                   std::sinh(start.rapidity0)};
    double phi = start.rapidity0;

    auto emit = [&](double tau) {
        TrajectoryPoint p;
        p.tau = tau;
        p.t = state[0];
        p.x = state[1];
        p.rapidity = phi;
        p.v = std::tanh(phi);
        p.k = std::exp(phi);
        run.points.push_back(p);
    };
    emit(0.0);

    auto derivative = [&](const std::array<double, 4>& s) {
        const auto coeff = detail::coefficients_at(field, s[0], s[1], opt.form);
        const auto acc = geodesic_rhs(s[2], s[3], coeff);
        return std::array<double, 4>{s[2], s[3], acc.d2t, acc.d2x};
    };

    for (long i = 0; i < steps; ++i) {
        const double h = opt.step;
        std::array<double, 4> k1, k2, k3, k4, mid;
        try {
            k1 = derivative(state);
            for (int j = 0; j < 4; ++j) mid[j] = state[j] + 0.5 * h * k1[j];
            k2 = derivative(mid);
            for (int j = 0; j < 4; ++j) mid[j] = state[j] + 0.5 * h * k2[j];
            k3 = derivative(mid);
            for (int j = 0; j < 4; ++j) mid[j] = state[j] + h * k3[j];
            k4 = derivative(mid);
        } catch (const detail::FieldDomainError& e) {
            run.truncated = true;
            run.diagnostic = std::string(e.what()) + " (trajectory truncated after " +
                             std::to_string(i) + " steps)";
            return run;
        }
        for (int j = 0; j < 4; ++j) {
            state[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        run.max_norm_drift =
            std::max(run.max_norm_drift, std::abs(velocity_norm_residual(state[2], state[3])));
        const double ratio = state[3] / state[2];
        if (!(state[2] > 0.0) || !(ratio > -1.0 && ratio < 1.0)) {
            run.truncated = true;
            run.diagnostic = "velocity left the renormalizable range after " +
                             std::to_string(i + 1) + " steps";
            return run;
        }
        phi = std::atanh(ratio);
        if (opt.renormalize) {
            state[2] = std::cosh(phi);
            state[3] = std::sinh(phi);
        }
        emit(static_cast<double>(i + 1) * opt.step);
    }
    return run;
}

// --- constant-rate analytic solution ---------------------------------------------

/// Proper acceleration of a particle influenced at a small constant rate from
/// the Q side only: rate / dtau with dtau = 1/(2*rate).
inline double constant_rate_acceleration(double r_q) {
    if (!(r_q > 0.0)) {
        throw std::domain_error("constant_rate_acceleration: rate must be positive");
    }
    return 2.0 * r_q * r_q;
}

/// Constant-acceleration worldline t = C1 sinh(a tau + phi0) + C2,
/// x = C1 cosh(a tau + phi0) + C3.
struct HyperbolicSolution {
    double accel = 0.0;
    double phi0 = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
    double c3 = 0.0;

    std::pair<double, double> operator()(double tau) const {
        const double ph = accel * tau + phi0;
        return {c1 * std::sinh(ph) + c2, c1 * std::cosh(ph) + c3};
    }

    double rapidity(double tau) const { return accel * tau + phi0; }

    /// Unit-normalized worldline (C1 = 1/a) anchored at (t0, x0).
    static HyperbolicSolution from_constant_rate(double r_q, double phi0, double t0,
                                                 double x0) {
        const double a = constant_rate_acceleration(r_q);
        const double c1 = 1.0 / a;
        return HyperbolicSolution{a, phi0, c1, t0 - c1 * std::sinh(phi0),
                                  x0 - c1 * std::cosh(phi0)};
    }
};

// --- proper-time extremum check ---------------------------------------------------

struct ExtremumResult {
    std::vector<long> argmax;
    long max_value = 0;
    bool second_difference_negative = false;
};

/// Brute-force maximization of n_p * (n_total - n_p) over the integer split of
/// one inter-reception interval.  The even split maximizes the proper time.
inline ExtremumResult proper_time_extremum(long n_total) {
    if (n_total < 2) {
        throw std::domain_error("proper_time_extremum: need at least two events");
    }
    ExtremumResult result;
    long best = -1;
    for (long n_p = 0; n_p <= n_total; ++n_p) {
        const long value = n_p * (n_total - n_p);
        if (value > best) {
            best = value;
            result.argmax.assign(1, n_p);
        } else if (value == best) {
            result.argmax.push_back(n_p);
        }
    }
    result.max_value = best;
    result.second_difference_negative = true;
    for (long n_p = 1; n_p < n_total; ++n_p) {
        const long second_difference = (n_p - 1) * (n_total - n_p + 1) -
                                       2 * n_p * (n_total - n_p) +
                                       (n_p + 1) * (n_total - n_p - 1);
        if (second_difference >= 0) result.second_difference_negative = false;
    }
    return result;
}

} // namespace infnet

#endif // INFNET_GEODESIC_HPP
