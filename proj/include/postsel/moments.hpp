#ifndef POSTSEL_MOMENTS_HPP
#define POSTSEL_MOMENTS_HPP

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include "postsel/dynamics.hpp"
#include "postsel/observables.hpp"
#include "postsel/special_functions.hpp"

namespace postsel {

/// Closed forms are 0/0 here (odd n on the omega ~ 0 locus); use the oracle.
class DegenerateState : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void require_regular(int n, const DerivedCoeffs& c, const char* who) {
    if (c.boundary) {
        throw std::domain_error(std::string(who) + ": boundary coefficients, use the Fock limit");
    }
    if (c.small_omega && n % 2 == 1) {
        throw DegenerateState(std::string(who) + ": odd n with |omega|^2 below threshold");
    }
}

/// Taylor coefficient P_n(a1, a2; x1, x2)/n!.
inline double pcoef(int n, double a1, double a2, const DerivedCoeffs& c) {
    return special::product_poly_coeff(n, {a1, a2, c.x1, c.x2});
}

/// I_n^(0) / (2^n n!), finite for every n up to the series cap.
inline double norm_i0_scaled(int n, const DerivedCoeffs& c) {
    return pcoef(n, 0.5, 0.5, c) / std::sqrt(c.Theta);
}

/// I_n^(1) / (2^n n!).
inline double moment_i1_scaled(int n, const DerivedCoeffs& c) {
    // n P_{n-1} / n! = P_{n-1} / (n-1)!
    const double zm = 1.0 - 2.0 * c.Omega_abs;
    const double zp = 1.0 + 2.0 * c.Omega_abs;
    const double left = (pcoef(n, 1.5, 0.5, c) + pcoef(n - 1, 1.5, 0.5, c)) / zm;
    const double right = (pcoef(n, 0.5, 1.5, c) - pcoef(n - 1, 0.5, 1.5, c)) / zp;
    return 0.5 * (left + right) / std::sqrt(c.Theta);
}

/// I_n^(2) / (2^n n!).
inline double moment_i2_scaled(int n, const DerivedCoeffs& c) {
    const double zm = 1.0 - 2.0 * c.Omega_abs;
    const double zp = 1.0 + 2.0 * c.Omega_abs;
    const double a = 0.75 / (zm * zm) *
                     (pcoef(n, 2.5, 0.5, c) + 2.0 * pcoef(n - 1, 2.5, 0.5, c) + pcoef(n - 2, 2.5, 0.5, c));
    const double b = 0.5 / c.Theta * (pcoef(n, 1.5, 1.5, c) - pcoef(n - 2, 1.5, 1.5, c));
    const double d = 0.75 / (zp * zp) *
                     (pcoef(n, 0.5, 2.5, c) - 2.0 * pcoef(n - 1, 0.5, 2.5, c) + pcoef(n - 2, 0.5, 2.5, c));
    return (a + b + d) / std::sqrt(c.Theta);
}

/// Script-I_n / (2^n n!).
inline complex quad_integral_scaled(int n, const DerivedCoeffs& c) {
    // omega^2 zeta = Omega stays finite where zeta diverges.
    const complex w2 = c.omega * c.omega;
    const complex bracket =
        c.Omega * pcoef(n, 1.5, 1.5, c) - (w2 + c.Omega) * pcoef(n - 2, 1.5, 1.5, c);
    return 2.0 * bracket / std::pow(c.Theta, 1.5);
}

inline double two_pow_fact(int n) { return std::ldexp(special::factorial(n), n); }

} // namespace detail

/// Squared norm I_n^(0) of exp(Omega a^dag^2) H_n(omega a^dag)|0>.
[[nodiscard]] inline double norm_i0(int n, const DerivedCoeffs& c,
                                    int cap = special::default_degree_cap) {
    special::detail::check_degree(n, cap, "norm_i0");
    detail::require_regular(n, c, "norm_i0");
    return detail::two_pow_fact(n) * detail::norm_i0_scaled(n, c);
}

[[nodiscard]] inline double moment_i1(int n, const DerivedCoeffs& c,
                                      int cap = special::default_degree_cap) {
    special::detail::check_degree(n, cap, "moment_i1");
    detail::require_regular(n, c, "moment_i1");
    return detail::two_pow_fact(n) * detail::moment_i1_scaled(n, c);
}

[[nodiscard]] inline double moment_i2(int n, const DerivedCoeffs& c,
                                      int cap = special::default_degree_cap) {
    special::detail::check_degree(n, cap, "moment_i2");
    detail::require_regular(n, c, "moment_i2");
    return detail::two_pow_fact(n) * detail::moment_i2_scaled(n, c);
}

/// Script-I_n, the phase-space integral carrying <a^2>.
[[nodiscard]] inline complex quad_integral(int n, const DerivedCoeffs& c,
                                           int cap = special::default_degree_cap) {
    special::detail::check_degree(n, cap, "quad_integral");
    detail::require_regular(n, c, "quad_integral");
    return detail::two_pow_fact(n) * detail::quad_integral_scaled(n, c);
}

/// Normalized post-measurement state of mode A after detecting n photons in B.
struct PostState {
    int n = 0;
    DerivedCoeffs coeffs;
    double norm_i0 = 0.0; ///< I_n^(0); 0 on the boundary (Fock limit applies)

    [[nodiscard]] bool boundary() const { return coeffs.boundary; }
    [[nodiscard]] bool degenerate() const {
        return !coeffs.boundary && coeffs.small_omega && n % 2 == 1;
    }
};

[[nodiscard]] inline PostState make_post_state(int n, const DerivedCoeffs& c,
                                               int cap = special::default_degree_cap) {
    special::detail::check_degree(n, cap, "make_post_state");
    PostState s{n, c, 0.0};
    if (!c.boundary) s.norm_i0 = detail::two_pow_fact(n) * detail::norm_i0_scaled(n, c);
    return s;
}

/// Photon statistics; the boundary returns the Fock-state limit exactly.
[[nodiscard]] inline PhotonStats photon_stats(const PostState& s) {
    if (s.boundary()) {
        const double n = s.n;
        return make_photon_stats(n, n * n);
    }
    detail::require_regular(s.n, s.coeffs, "photon_stats");
    const double i0 = detail::norm_i0_scaled(s.n, s.coeffs);
    const double r1 = detail::moment_i1_scaled(s.n, s.coeffs) / i0;
    const double r2 = detail::moment_i2_scaled(s.n, s.coeffs) / i0;
    PhotonStats st = make_photon_stats(r1 - 1.0, r2 - 3.0 * r1 + 1.0);
    // variance through the factored form keeps one cancellation fewer
    st.variance = r2 - r1 * (r1 + 1.0);
    st.mandel_q.reset();
    if (st.mean_n > mandel_mean_floor) st.mandel_q = st.variance / st.mean_n - 1.0;
    return st;
}

/// <X_theta^2> of the normalized state; <X_theta> vanishes by parity.
[[nodiscard]] inline double quadrature_variance(const PostState& s, double theta) {
    if (s.boundary()) return s.n + 0.5;
    detail::require_regular(s.n, s.coeffs, "quadrature_variance");
    const double i0 = detail::norm_i0_scaled(s.n, s.coeffs);
    const complex a2 = detail::quad_integral_scaled(s.n, s.coeffs) / i0;
    const double a_adag = detail::moment_i1_scaled(s.n, s.coeffs) / i0;
    return quadrature_variance_from_moments(a2, a_adag, theta);
}

[[nodiscard]] inline SqueezeReport squeeze_report(const PostState& s) {
    if (s.boundary()) return squeeze_from_moments(0.0, s.n + 1.0);
    detail::require_regular(s.n, s.coeffs, "squeeze_report");
    const double i0 = detail::norm_i0_scaled(s.n, s.coeffs);
    const complex a2 = detail::quad_integral_scaled(s.n, s.coeffs) / i0;
    const double a_adag = detail::moment_i1_scaled(s.n, s.coeffs) / i0;
    return squeeze_from_moments(a2, a_adag);
}

/// Probability of detecting n photons in mode B.
[[nodiscard]] inline double projection_probability(int n, const DerivedCoeffs& c) {
    special::detail::check_degree(n, special::series_degree_cap, "projection_probability");
    const double ch = std::cosh(c.params.r);
    if (c.boundary) {
        return std::pow(std::tanh(c.params.r), 2 * n) / (ch * ch);
    }
    // |sigma|^{2n}/(n! cosh^2 r) * I_n^(0) = (2|sigma|^2)^n I_n^(0)/(2^n n!) / cosh^2 r
    const double s2 = std::norm(c.sigma);
    return std::pow(2.0 * s2, n) * detail::norm_i0_scaled(n, c) / (ch * ch);
}

/// Residuals of the probability sum rule by both routes.
struct UnitarityResult {
    double closed_form = 0.0; ///< |1/(cosh^2 r sqrt(D+ D-)) - 1| at tau = |sigma|^2
    double partial_sum = 0.0; ///< |sum_{n<=N*} p_n - 1|
    int terms = 0;            ///< N* + 1
};

/// Smallest N with |sigma|^{2N}/(1 - |sigma|^2) < 1e-13 cosh^2 r.
[[nodiscard]] inline int unitarity_cutoff(const DerivedCoeffs& c) {
    const double s2 = c.boundary ? std::pow(std::tanh(c.params.r), 2) : std::norm(c.sigma);
    if (s2 <= 0.0) return 0;
    const double ch2 = std::pow(std::cosh(c.params.r), 2);
    int n = 0;
    while (n < special::series_degree_cap && std::pow(s2, n) / (1.0 - s2) >= 1e-13 * ch2) ++n;
    return n;
}

[[nodiscard]] inline UnitarityResult unitarity_residual(const DerivedCoeffs& c) {
    UnitarityResult res;
    const double ch2 = std::pow(std::cosh(c.params.r), 2);
    if (c.boundary) {
        res.closed_form = 0.0;
    } else {
        const double tau = std::norm(c.sigma);
        const double za = 2.0 * c.Omega_abs;
        const double w = 2.0 * c.omega_abs2;
        const double dp = 1.0 - za + 2.0 * tau * (1.0 - za - w);
        const double dm = 1.0 + za - 2.0 * tau * (1.0 + za + w);
        res.closed_form = std::fabs(1.0 / (ch2 * std::sqrt(dp * dm)) - 1.0);
    }
    // The envelope rule sets a floor; keep summing until terms are negligible.
    const int floor_n = unitarity_cutoff(c);
    special::CompensatedSum acc;
    int n = 0;
    int quiet = 0;
    for (; n <= special::series_degree_cap; ++n) {
        const double p = projection_probability(n, c);
        acc.add(p);
        quiet = p < 1e-17 ? quiet + 1 : 0;
        if (n >= floor_n && quiet >= 4) break;
    }
    res.terms = std::min(n, special::series_degree_cap) + 1;
    res.partial_sum = std::fabs(static_cast<double>(acc.value()) - 1.0);
    return res;
}

} // namespace postsel

#endif // POSTSEL_MOMENTS_HPP
