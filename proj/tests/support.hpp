#ifndef POSTSEL_TESTS_SUPPORT_HPP
#define POSTSEL_TESTS_SUPPORT_HPP

// Test-only reference routes. Nothing here calls the library's recurrences
// or closed forms.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "postsel/dynamics.hpp"
#include "postsel/fock_oracle.hpp"

namespace testing_support {

using complex = std::complex<double>;

inline double fact(int n) { return std::tgamma(n + 1.0); }

/// Coefficients h_k of H_n(x) = sum_k h_k x^k from the explicit sum
/// H_n(x) = n! sum_m (-1)^m (2x)^{n-2m} / (m! (n-2m)!).
inline std::vector<double> hermite_coefficients(int n) {
    std::vector<double> h(n + 1, 0.0);
    for (int m = 0; 2 * m <= n; ++m) {
        const int k = n - 2 * m;
        h[k] = (m % 2 ? -1.0 : 1.0) * fact(n) / (fact(m) * fact(k)) * std::pow(2.0, k);
    }
    return h;
}

inline complex hermite_explicit(int n, complex z) {
    const auto h = hermite_coefficients(n);
    complex s = 0.0;
    complex p = 1.0;
    for (int k = 0; k <= n; ++k) {
        s += h[k] * p;
        p *= z;
    }
    return s;
}

/// L_n^{(a)}(x) = sum_k (-1)^k binom(n+a, n-k) x^k / k!, binomial via gamma.
inline double laguerre_explicit(int n, double a, double x) {
    double s = 0.0;
    for (int k = 0; k <= n; ++k) {
        const double binom = std::tgamma(n + a + 1.0) / (std::tgamma(k + a + 1.0) * fact(n - k));
        s += (k % 2 ? -1.0 : 1.0) * binom * std::pow(x, k) / fact(k);
    }
    return s;
}

/// Fock amplitudes of exp(Omega a^dag^2) H_n(omega a^dag)|0> (unnormalized), levels < size.
inline std::vector<complex> closed_state_vector(int n, complex Omega, complex omega, int size) {
    const auto h = hermite_coefficients(n);
    std::vector<complex> v(size, 0.0);
    for (int k = 0; k <= n; ++k) {
        const complex ck = h[k] * std::pow(omega, k);
        for (int j = 0; k + 2 * j < size; ++j) {
            const int m = k + 2 * j;
            v[m] += ck * std::pow(Omega, j) / fact(j) * std::sqrt(fact(m));
        }
    }
    return v;
}

/// Int f(alpha) d^2 alpha over |alpha| < R: trapezoid in angle, Gauss-Legendre panels in radius.
template <class F>
double plane_integral(F&& f, double R, int n_theta = 256, double panel = 0.25) {
    static const double x[10] = {-0.9739065285171717, -0.8650633666889845, -0.6794095682990244,
                                 -0.4333953941292472, -0.1488743389816312, 0.1488743389816312,
                                 0.4333953941292472,  0.6794095682990244,  0.8650633666889845,
                                 0.9739065285171717};
    static const double w[10] = {0.0666713443086881, 0.1494513491505806, 0.2190863625159820,
                                 0.2692667193099963, 0.2955242247147529, 0.2955242247147529,
                                 0.2692667193099963, 0.2190863625159820, 0.1494513491505806,
                                 0.0666713443086881};
    const int panels = static_cast<int>(std::ceil(R / panel));
    const double h = R / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        for (int i = 0; i < 10; ++i) {
            const double r = h * (p + 0.5 + 0.5 * x[i]);
            double ring = 0.0;
            for (int j = 0; j < n_theta; ++j) {
                ring += f(std::polar(r, 2.0 * std::numbers::pi * j / n_theta));
            }
            total += 0.5 * h * w[i] * r * ring * 2.0 * std::numbers::pi / n_theta;
        }
    }
    return total;
}

/// Single-particle propagator exp(-i h jt/Jhat), h = [[Delta, J], [J, -Delta]]:
/// U c_j^dag U^dag = sum_i u[i][j] c_i^dag with c_0 = a, c_1 = b.
inline std::array<std::array<complex, 2>, 2> mode_matrix(const postsel::ModelParams& p, double jt) {
    const double jh = std::hypot(p.J, p.Delta);
    const double c = std::cos(jt);
    const double s = std::sin(jt);
    const complex i(0.0, 1.0);
    return {{{c - i * s * p.Delta / jh, -i * s * p.J / jh}, {-i * s * p.J / jh, c + i * s * p.Delta / jh}}};
}

/// Evolves amplitudes psi(n_a, n_b) by substituting the transformed creation
/// operators into a^dag^{n_a} b^dag^{n_b}|0> and expanding binomially.
inline Eigen::MatrixXcd symmetric_power_evolve(const Eigen::MatrixXcd& psi, const postsel::ModelParams& p,
                                               double jt) {
    const auto u = mode_matrix(p, jt);
    const int dim = static_cast<int>(psi.rows());
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
    auto binom = [](int n, int k) { return fact(n) / (fact(k) * fact(n - k)); };
    for (int na = 0; na < dim; ++na) {
        for (int nb = 0; na + nb < dim; ++nb) {
            const complex amp = psi(na, nb);
            if (amp == complex(0.0)) continue;
            const double norm = 1.0 / std::sqrt(fact(na) * fact(nb));
            // (u00 a + u10 b)^na (u01 a + u11 b)^nb
            for (int k = 0; k <= na; ++k) {
                const complex t1 = binom(na, k) * std::pow(u[0][0], k) * std::pow(u[1][0], na - k);
                for (int l = 0; l <= nb; ++l) {
                    const complex t2 = binom(nb, l) * std::pow(u[0][1], l) * std::pow(u[1][1], nb - l);
                    const int ma = k + l;
                    const int mb = na + nb - ma;
                    out(ma, mb) += amp * norm * t1 * t2 * std::sqrt(fact(ma) * fact(mb));
                }
            }
        }
    }
    return out;
}

/// Random parameter point with mu tanh r < 1/2, |omega|^2 well away from zero
/// and |Omega| below omega_cap.
struct Lattice {
    std::mt19937_64 rng{20240611};

    postsel::DerivedCoeffs draw(double r_max = 0.6, double omega_cap = 0.4) {
        std::uniform_real_distribution<double> ratio(0.1, 2.0);
        std::uniform_real_distribution<double> time(0.15, std::numbers::pi - 0.15);
        std::uniform_real_distribution<double> rr(0.1, r_max);
        std::uniform_real_distribution<double> ph(-std::numbers::pi, std::numbers::pi);
        while (true) {
            postsel::ModelParams p{ratio(rng), 1.0, rr(rng), ph(rng)};
            if (!postsel::validate(p).valid) continue;
            const auto c = postsel::derive_coeffs_scaled(p, time(rng));
            if (!c.boundary && c.omega_abs2 > 1e-3 && c.Omega_abs < omega_cap) return c;
        }
    }
};

} // namespace testing_support

#endif // POSTSEL_TESTS_SUPPORT_HPP
