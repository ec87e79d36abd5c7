#ifndef POSTSEL_OBSERVABLES_HPP
#define POSTSEL_OBSERVABLES_HPP

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <stdexcept>

namespace postsel {

/// Photon-number statistics of a single-mode state.
struct PhotonStats {
    double mean_n = 0.0;
    double mean_n2 = 0.0;
    double variance = 0.0;
    /// Mandel Q; empty when mean_n vanishes (Q undefined there).
    std::optional<double> mandel_q;
};

inline constexpr double mandel_mean_floor = 1e-12;

[[nodiscard]] inline PhotonStats make_photon_stats(double mean_n, double mean_n2) {
    PhotonStats s;
    s.mean_n = mean_n;
    s.mean_n2 = mean_n2;
    s.variance = mean_n2 - mean_n * mean_n;
    if (mean_n > mandel_mean_floor) s.mandel_q = s.variance / mean_n - 1.0;
    return s;
}

/// Extremes of the quadrature variance V(theta) = <X_theta^2>.
struct SqueezeReport {
    double theta_min = 0.0; ///< in [0, pi)
    double v_min = 0.0;
    double theta_max = 0.0; ///< in [0, pi)
    double v_max = 0.0;
    bool squeezed = false;
    bool isotropic = false; ///< <a^2> = 0: V independent of theta
};

/// V(theta) from <a^2> and <a a^dagger> of a state with <a> = 0.
[[nodiscard]] inline double quadrature_variance_from_moments(std::complex<double> a2, double a_adag,
                                                             double theta) {
    const auto rot = a2 * std::polar(1.0, -2.0 * theta);
    return rot.real() + a_adag - 0.5;
}

/// Locates the extremes of V(theta) = Re(a2 e^{-2 i theta}) + <a a^dagger> - 1/2.
///
/// The stationary angles are theta = (atan(Im a2 / Re a2) + p pi)/2; the
/// branch p in {0, 1} with positive curvature is the minimum.
[[nodiscard]] inline SqueezeReport squeeze_from_moments(std::complex<double> a2, double a_adag) {
    constexpr double pi = std::numbers::pi;
    SqueezeReport rep;
    const double mod = std::abs(a2);
    if (mod == 0.0) {
        rep.isotropic = true;
        rep.v_min = rep.v_max = a_adag - 0.5;
        rep.squeezed = rep.v_min < 0.5;
        return rep;
    }
    const double base = a2.real() != 0.0 ? std::atan(a2.imag() / a2.real()) : pi / 2.0;
    double best = 0.0;
    for (int p = 0; p <= 1; ++p) {
        const double theta = 0.5 * (base + p * pi);
        // d^2 V / d theta^2 = -4 Re(a2 e^{-2 i theta})
        const double curvature = -4.0 * (a2 * std::polar(1.0, -2.0 * theta)).real();
        if (curvature > 0.0) best = theta;
    }
    auto wrap = [](double th) {
        th = std::fmod(th, pi);
        return th < 0.0 ? th + pi : th;
    };
    rep.theta_min = wrap(best);
    rep.theta_max = wrap(best + pi / 2.0);
    rep.v_min = a_adag - mod - 0.5;
    rep.v_max = a_adag + mod - 0.5;
    rep.squeezed = rep.v_min < 0.5;
    return rep;
}

} // namespace postsel

#endif // POSTSEL_OBSERVABLES_HPP
