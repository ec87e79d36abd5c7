#ifndef POSTSEL_DYNAMICS_HPP
#define POSTSEL_DYNAMICS_HPP

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>

namespace postsel {

using complex = std::complex<double>;

/// Physical inputs of the coupled-waveguide model.
struct ModelParams {
    double J = 1.3;     ///< hopping rate
    double Delta = 1.0; ///< detuning, same units as J
    double r = 0.5;     ///< squeeze magnitude of the two-mode vacuum
    double phi = 0.0;   ///< squeeze phase [rad]
};

/// Thrown when parameters violate the closed-form convergence region.
class InvalidParams : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct ValidityReport {
    double jhat = 0.0;
    double mu = 0.0;
    double delta = 0.0;
    double mu_tanh_r = 0.0;
    bool valid = false;
    std::string message;
};

/// Checks J, Delta, r against the convergence condition mu * tanh(r) < 1/2.
[[nodiscard]] inline ValidityReport validate(const ModelParams& p) {
    ValidityReport rep;
    std::ostringstream msg;
    const bool finite = std::isfinite(p.J) && std::isfinite(p.Delta) && std::isfinite(p.r) &&
                        std::isfinite(p.phi);
    if (!finite) {
        rep.message = "non-finite parameter";
        return rep;
    }
    if (p.J < 0.0) msg << "J must be >= 0 (got " << p.J << "); ";
    if (p.r < 0.0) msg << "r must be >= 0 (got " << p.r << "); ";
    rep.jhat = std::hypot(p.J, p.Delta);
    if (rep.jhat == 0.0) {
        msg << "J^2 + Delta^2 must be > 0; ";
    } else {
        rep.mu = p.J / rep.jhat;
        rep.delta = p.Delta / rep.jhat;
        rep.mu_tanh_r = rep.mu * std::tanh(p.r);
        if (!(rep.mu_tanh_r < 0.5)) {
            msg << "mu*tanh(r) = " << rep.mu_tanh_r << " violates mu*tanh(r) < 1/2; ";
        }
    }
    rep.message = msg.str();
    rep.valid = rep.message.empty();
    if (rep.valid) rep.message = "ok";
    return rep;
}

struct DynamicsOptions {
    double eps_t = 1e-9;     ///< boundary threshold on mu*|sin(Jhat t)|
    double eps_omega = 1e-6; ///< small_omega threshold on |omega|^2
};

/// Closed-form coefficients of the evolved state at one interaction time.
///
/// On the boundary (sin(Jhat t) ~ 0, or no hopping) omega diverges; the
/// struct then carries Omega = sigma = 0, omega = inf and `boundary = true`,
/// and consumers switch to the Fock-state limit.
struct DerivedCoeffs {
    ModelParams params;
    double jhat = 0.0;
    double mu = 0.0;
    double delta = 0.0;
    double varphi = 0.0;
    double tau_scaled = 0.0;  ///< Jhat * t as requested
    double tau_reduced = 0.0; ///< Jhat * t folded into [0, pi)
    complex Omega{};
    complex omega{};
    complex sigma{};
    double zeta = 0.0;       ///< may be +inf on the omega = 0 locus
    double Omega_abs = 0.0;  ///< |Omega| = zeta |omega|^2
    double omega_abs2 = 0.0; ///< |omega|^2
    double Theta = 1.0;
    double x1 = 0.0;
    double x2 = 0.0;
    bool boundary = false;
    bool small_omega = false;
};

/// Coefficients at scaled time Jhat*t. Throws InvalidParams outside validity.
[[nodiscard]] inline DerivedCoeffs derive_coeffs_scaled(const ModelParams& p, double jt,
                                                        const DynamicsOptions& opt = {}) {
    const ValidityReport rep = validate(p);
    if (!rep.valid) throw InvalidParams(rep.message);
    if (!std::isfinite(jt) || jt < 0.0) throw std::domain_error("interaction time must be >= 0");

    constexpr double pi = std::numbers::pi;
    DerivedCoeffs c;
    c.params = p;
    c.jhat = rep.jhat;
    c.mu = rep.mu;
    c.delta = rep.delta;
    c.tau_scaled = jt;
    // The state is exactly pi-periodic in Jhat t (exp(-i h pi / Jhat) = -1).
    c.tau_reduced = std::fmod(jt, pi);

    const double s = std::sin(c.tau_reduced);
    const double co = std::cos(c.tau_reduced);
    c.varphi = std::atan2(c.delta * s, co);

    const double tr = std::tanh(p.r);
    const double ms = c.mu * s;
    const double m2 = ms * ms;
    const double root = std::sqrt(1.0 - m2);

    if (ms < opt.eps_t) {
        c.boundary = true;
        c.Omega = 0.0;
        c.sigma = 0.0;
        c.omega = {std::numeric_limits<double>::infinity(), 0.0};
        c.omega_abs2 = std::numeric_limits<double>::infinity();
        c.zeta = 0.0;
        c.Theta = 1.0;
        c.x1 = c.x2 = std::numeric_limits<double>::infinity();
        return c;
    }

    const double phase = p.phi - c.varphi + pi / 2.0;
    c.Omega_abs = tr * ms * root;
    c.Omega = std::polar(c.Omega_abs, phase);
    const double om_mod = std::sqrt(tr) * (1.0 - 2.0 * m2) / (2.0 * std::sqrt(ms) * std::sqrt(root));
    c.omega = std::polar(1.0, phase / 2.0) * om_mod;
    c.sigma = std::polar(std::sqrt(tr * ms) * std::sqrt(root), (p.phi + c.varphi - pi / 2.0) / 2.0);

    c.omega_abs2 = om_mod * om_mod;
    const double den = (1.0 - 2.0 * m2) * (1.0 - 2.0 * m2);
    c.zeta = den > 0.0 ? 4.0 * m2 * (1.0 - m2) / den : std::numeric_limits<double>::infinity();
    c.Theta = 1.0 - 4.0 * c.Omega_abs * c.Omega_abs;
    c.x1 = -1.0 + 2.0 * c.omega_abs2 / (1.0 - 2.0 * c.Omega_abs);
    c.x2 = 1.0 + 2.0 * c.omega_abs2 / (1.0 + 2.0 * c.Omega_abs);
    c.small_omega = c.omega_abs2 < opt.eps_omega;
    return c;
}

/// Coefficients at physical time t (scaled internally by Jhat).
[[nodiscard]] inline DerivedCoeffs derive_coeffs(const ModelParams& p, double t,
                                                 const DynamicsOptions& opt = {}) {
    const ValidityReport rep = validate(p);
    if (!rep.valid) throw InvalidParams(rep.message);
    return derive_coeffs_scaled(p, rep.jhat * t, opt);
}

} // namespace postsel

#endif // POSTSEL_DYNAMICS_HPP
