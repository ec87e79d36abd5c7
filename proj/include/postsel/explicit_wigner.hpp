#ifndef POSTSEL_EXPLICIT_WIGNER_HPP
#define POSTSEL_EXPLICIT_WIGNER_HPP

// Hand-expanded W_0..W_3 written directly in |alpha|^2, <omega,alpha>_p and
// zeta. Shares nothing with the Laguerre-sum evaluator except the inputs,
// so it serves as a regression reference for it.

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "postsel/dynamics.hpp"

namespace postsel {

[[nodiscard]] inline double explicit_wigner(int n, const DerivedCoeffs& c, complex alpha) {
    if (n < 0 || n > 3) throw std::domain_error("explicit_wigner: n must be in 0..3");
    if (c.boundary || c.small_omega) throw std::domain_error("explicit_wigner: needs regular coefficients");
    const complex om = c.omega;
    const double z = c.Omega_abs / c.omega_abs2;
    const double w2 = c.omega_abs2;
    const double w4 = w2 * w2;
    const double th = 1.0 - 4.0 * z * z * w4;
    // <omega, alpha>_p = omega*^p alpha^p + c.c.
    auto ip = [&](int p) { return 2.0 * std::pow(std::conj(om) * alpha, p).real(); };
    const double A = std::norm(alpha);
    const double g = 2.0 / (std::numbers::pi * std::sqrt(th)) *
                     std::exp(-2.0 * (1.0 + 4.0 * z * z * w4) / th * A + 4.0 * z * ip(2) / th);

    if (n == 0) return g * std::sqrt(th);
    if (n == 1) {
        const double i1 = 4.0 * w2 / std::pow(th, 1.5);
        return -4.0 * w2 / i1 * g * ((1.0 + 4.0 * A) / th - 8.0 * (A - z * ip(2)) / (th * th));
    }
    if (n == 2) {
        const double i2 = 4.0 / std::sqrt(th) *
                          (1.0 - 4.0 * w4 / th - 8.0 * z * w4 / th + 12.0 * w4 / (th * th));
        const double i2p = ip(2);
        const double i4p = ip(4);
        const double br =
            4.0 - 16.0 / th * ((1.0 + 2.0 * z) * w4 - 2.0 * i2p) +
            16.0 / (th * th) *
                ((3.0 + 32.0 * A + 16.0 * z * A - 8.0 * z * i2p + 16.0 * A * A) * w4 - 4.0 * i2p) -
            256.0 / std::pow(th, 3) *
                ((3.0 * A + 6.0 * A * A - 3.0 * z * i2p - 4.0 * z * A * i2p) * w4 + i4p) +
            256.0 / std::pow(th, 4) * (2.0 * (3.0 * A * A - 4.0 * z * A * i2p) * w4 + i4p);
        return g / i2 * br;
    }
    const double i3 = 48.0 * w2 / std::pow(th, 1.5) *
                      (3.0 - 12.0 * w4 / th - 24.0 * z * w4 / th + 20.0 * w4 / (th * th));
    const double p2 = ip(2);
    const double p4 = ip(4);
    const double p6 = ip(6);
    const double A2 = A * A;
    const double A3 = A2 * A;
    const double t[6] = {
        3.0 * (1.0 + 4.0 * A),
        -12.0 * (1.0 + 2.0 * z + 4.0 * (1.0 + 2.0 * z) * A) * w4 - 8.0 * (3.0 * A - (9.0 + 3.0 * z + 4.0 * A) * p2),
        4.0 * (5.0 + 12.0 * (9.0 + 8.0 * z) * A - 16.0 * (3.0 + 2.0 * A) * z * p2 + 48.0 * (3.0 + 2.0 * z) * A2 +
               64.0 / 3.0 * A3) * w4 -
            32.0 * (3.0 + 8.0 * A) * p2 + 64.0 * (1.0 + z) * p4,
        -32.0 * (15.0 * A + 24.0 * (3.0 + z) * A2 + 32.0 * A3 - (15.0 + 56.0 * A + 16.0 * A2) * z * p2) * w4 +
            256.0 * A * p2 - 128.0 * (3.0 + z + 2.0 * A) * p4,
        640.0 * (3.0 * A2 - 4.0 * z * A * p2 + 4.0 * A3 - 4.0 * z * A2 * p2) * w4 + 64.0 * (5.0 + 12.0 * A) * p4 -
            512.0 / 3.0 * z * p6,
        -512.0 * (10.0 / 3.0 * A3 - 5.0 * z * A2 * p2) * w4 - 512.0 * (A * p4 - z * p6 / 3.0),
    };
    double sum = 0.0;
    double thp = th;
    for (double tj : t) {
        sum += tj / thp;
        thp *= th;
    }
    return -48.0 * w2 / i3 * g * sum;
}

} // namespace postsel

#endif // POSTSEL_EXPLICIT_WIGNER_HPP
