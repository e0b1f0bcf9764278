#ifndef INFNET_RATES_HPP
#define INFNET_RATES_HPP

#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>

namespace infnet {

/// Upper bound for the total reception rate.  Keeps every inter-reception gap
/// at two events or more, so the update rules never divide by zero and the
/// (1 - total) denominators of the mean-increment formulas stay positive.
inline constexpr double max_total_rate = 0.5;

/// Per-emission reception rates from the two observer sides.
struct RateSpec {
    double r_p = 0.0;
    double r_q = 0.0;

    double total() const { return r_p + r_q; }      // drives the mean gap 1/total
    double difference() const { return r_q - r_p; } // drives the net boost
};

inline void validate_rates(const RateSpec& rates) {
    if (!(rates.r_p >= 0.0) || !(rates.r_q >= 0.0)) {
        throw std::domain_error("reception rates must be non-negative and finite");
    }
    const double total = rates.total();
    if (!(total > 0.0) || total > max_total_rate) {
        throw std::domain_error("total reception rate must lie in (0, 1/2]");
    }
}

/// True when rates are usable by the continuum layer, where a zero field is
/// the free particle rather than an error.
inline bool rates_in_field_domain(const RateSpec& rates) {
    if (!(rates.r_p >= 0.0) || !(rates.r_q >= 0.0)) return false;
    const double total = rates.total();
    return std::isfinite(total) && total <= max_total_rate;
}

/// Smooth reception-rate field over 1+1 spacetime.
class RateField {
public:
    using Fn = std::function<double(double t, double x)>;

    RateField(Fn r_p, Fn r_q) : r_p_(std::move(r_p)), r_q_(std::move(r_q)) {}

    RateSpec at(double t, double x) const { return RateSpec{r_p_(t, x), r_q_(t, x)}; }

    static RateField constant(double r_p, double r_q) {
        return RateField([r_p](double, double) { return r_p; },
                         [r_q](double, double) { return r_q; });
    }

    static RateField zero() { return constant(0.0, 0.0); }

    /// Affine rates r(t,x) = base + gt*t + gx*x, one gradient pair per side.
    static RateField linear(RateSpec base, double p_grad_t, double p_grad_x,
                            double q_grad_t, double q_grad_x) {
        return RateField(
            [=](double t, double x) { return base.r_p + p_grad_t * t + p_grad_x * x; },
            [=](double t, double x) { return base.r_q + q_grad_t * t + q_grad_x * x; });
    }

    /// Q-side rate with a Gaussian bump in x on top of constant base rates.
    static RateField gaussian_bump(RateSpec base, double amplitude, double center_x,
                                   double width) {
        if (!(width > 0.0)) {
            throw std::domain_error("gaussian_bump: width must be positive");
        }
        return RateField(
            [=](double, double) { return base.r_p; },
            [=](double, double x) {
                const double u = (x - center_x) / width;
                return base.r_q + amplitude * std::exp(-u * u);
            });
    }

private:
    Fn r_p_;
    Fn r_q_;
};

} // namespace infnet

#endif // INFNET_RATES_HPP
