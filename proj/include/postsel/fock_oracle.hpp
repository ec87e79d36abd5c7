#ifndef POSTSEL_FOCK_ORACLE_HPP
#define POSTSEL_FOCK_ORACLE_HPP

// Brute-force reference: the two-mode state is built and evolved directly in
// a truncated Fock basis, with no use of the closed-form coefficients.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "postsel/dynamics.hpp"
#include "postsel/observables.hpp"

namespace postsel::oracle {

/// Raised when the requested truncation cannot meet the tolerance.
class TruncationError : public std::runtime_error {
public:
    TruncationError(const std::string& what, int required)
        : std::runtime_error(what), required_n_max(required) {}
    int required_n_max;
};

/// Smallest Schmidt cutoff k with tanh(r)^{2(k+1)} < tol.
[[nodiscard]] inline int required_n_max(double r, double tol) {
    const double t2 = std::tanh(r) * std::tanh(r);
    if (t2 <= 0.0) return 0;
    const int k = static_cast<int>(std::ceil(std::log(tol) / std::log(t2))) - 1;
    return k < 0 ? 0 : k;
}

/// Default cutoff: ceil(ln tol / ln tanh^2 r) + 2n + 10.
[[nodiscard]] inline int default_n_max(double r, int n, double tol = 1e-14) {
    const double t2 = std::tanh(r) * std::tanh(r);
    const int base = t2 > 0.0 ? static_cast<int>(std::ceil(std::log(tol) / std::log(t2))) : 0;
    return base + 2 * n + 10;
}

/// Two-mode amplitudes psi(n_a, n_b), 0 <= n_a, n_b <= 2 n_max.
struct TwoModeState {
    int n_max = 0;
    Eigen::MatrixXcd amplitudes;
    double norm_defect = 0.0; ///< 1 - squared norm, from the discarded Schmidt tail

    [[nodiscard]] int dim() const { return 2 * n_max + 1; }
};

/// Two-mode squeezed vacuum truncated after the Schmidt pair (n_max, n_max).
[[nodiscard]] inline TwoModeState build_initial(const ModelParams& p, int n_max, double tol = 1e-12) {
    if (n_max < 0) throw std::domain_error("build_initial: n_max must be >= 0");
    const double tr = std::tanh(p.r);
    const double tail = std::pow(tr, 2.0 * (n_max + 1));
    if (tail >= tol) {
        const int need = required_n_max(p.r, tol);
        throw TruncationError("build_initial: n_max = " + std::to_string(n_max) +
                                  " leaves norm defect " + std::to_string(tail) + "; need n_max >= " +
                                  std::to_string(need),
                              need);
    }
    TwoModeState s;
    s.n_max = n_max;
    s.amplitudes = Eigen::MatrixXcd::Zero(s.dim(), s.dim());
    const std::complex<double> ratio = -std::polar(tr, p.phi);
    std::complex<double> a = 1.0 / std::cosh(p.r);
    for (int k = 0; k <= n_max; ++k) {
        s.amplitudes(k, k) = a;
        a *= ratio;
    }
    s.norm_defect = tail;
    return s;
}

/// exp(A) by scaling and squaring with a Taylor core.
[[nodiscard]] inline Eigen::MatrixXcd expm(const Eigen::MatrixXcd& a) {
    const double norm = a.cwiseAbs().colwise().sum().maxCoeff();
    int squarings = 0;
    if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
    const Eigen::MatrixXcd b = a / std::ldexp(1.0, squarings);
    const auto n = a.rows();
    Eigen::MatrixXcd result = Eigen::MatrixXcd::Identity(n, n);
    Eigen::MatrixXcd term = Eigen::MatrixXcd::Identity(n, n);
    for (int k = 1; k <= 30; ++k) {
        term = term * b / static_cast<double>(k);
        result += term;
        if (term.cwiseAbs().maxCoeff() < 1e-18) break;
    }
    for (int i = 0; i < squarings; ++i) result = result * result;
    return result;
}

/// Hamiltonian block of the sector with N = n_a + n_b, basis index k = n_a.
[[nodiscard]] inline Eigen::MatrixXd sector_hamiltonian(const ModelParams& p, int total) {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(total + 1, total + 1);
    for (int k = 0; k <= total; ++k) {
        h(k, k) = p.Delta * (2.0 * k - total);
        if (k < total) {
            const double v = p.J * std::sqrt((k + 1.0) * (total - k));
            h(k + 1, k) = v;
            h(k, k + 1) = v;
        }
    }
    return h;
}

/// Applies exp(-i H t) sector by sector; H conserves n_a + n_b.
[[nodiscard]] inline TwoModeState evolve(const TwoModeState& in, const ModelParams& p, double t) {
    TwoModeState out = in;
    out.amplitudes.setZero();
    const int dim = in.dim();
    for (int total = 0; total < dim; ++total) {
        Eigen::VectorXcd v(total + 1);
        bool any = false;
        for (int k = 0; k <= total; ++k) {
            v(k) = in.amplitudes(k, total - k);
            any = any || v(k) != std::complex<double>(0.0);
        }
        if (!any) continue;
        const Eigen::MatrixXcd gen = std::complex<double>(0.0, -t) * sector_hamiltonian(p, total).cast<std::complex<double>>();
        const Eigen::VectorXcd w = expm(gen) * v;
        for (int k = 0; k <= total; ++k) out.amplitudes(k, total - k) = w(k);
    }
    return out;
}

/// Evolves to scaled time Jhat t.
[[nodiscard]] inline TwoModeState evolve_scaled(const TwoModeState& in, const ModelParams& p, double jt) {
    return evolve(in, p, jt / std::hypot(p.J, p.Delta));
}

/// Single-mode amplitudes over Fock levels 0..size-1.
struct FockVector {
    std::vector<std::complex<double>> amplitudes;
    double probability = 0.0; ///< squared norm before normalization
    bool negligible = false;  ///< probability below 1e-14

    [[nodiscard]] int size() const { return static_cast<int>(amplitudes.size()); }
};

/// Unnormalized mode-A amplitudes conditioned on n photons in mode B.
[[nodiscard]] inline FockVector project_b(const TwoModeState& s, int n) {
    if (n < 0 || n >= s.dim()) {
        throw std::domain_error("project_b: outcome " + std::to_string(n) + " outside truncation");
    }
    FockVector v;
    v.amplitudes.resize(s.dim());
    double p = 0.0;
    for (int m = 0; m < s.dim(); ++m) {
        v.amplitudes[m] = s.amplitudes(m, n);
        p += std::norm(v.amplitudes[m]);
    }
    v.probability = p;
    v.negligible = p < 1e-14;
    return v;
}

[[nodiscard]] inline FockVector normalized(FockVector v) {
    if (v.probability <= 0.0) throw std::domain_error("normalized: zero vector");
    const double s = 1.0 / std::sqrt(v.probability);
    for (auto& a : v.amplitudes) a *= s;
    return v;
}

/// Fock state |n> on `size` levels.
[[nodiscard]] inline FockVector fock_state(int n, int size) {
    FockVector v;
    v.amplitudes.assign(size, 0.0);
    v.amplitudes.at(n) = 1.0;
    v.probability = 1.0;
    return v;
}

/// First and second ladder moments of a normalized vector.
struct LadderMoments {
    std::complex<double> a{};  ///< <a>
    std::complex<double> a2{}; ///< <a^2>
    double n = 0.0;            ///< <a^dag a>
    double n2 = 0.0;           ///< <(a^dag a)^2>
};

[[nodiscard]] inline LadderMoments ladder_moments(const FockVector& v) {
    LadderMoments m;
    const auto& c = v.amplitudes;
    for (int k = 0; k < v.size(); ++k) {
        const double pk = std::norm(c[k]);
        m.n += k * pk;
        m.n2 += static_cast<double>(k) * k * pk;
        if (k + 1 < v.size()) m.a += std::conj(c[k]) * c[k + 1] * std::sqrt(k + 1.0);
        if (k + 2 < v.size()) m.a2 += std::conj(c[k]) * c[k + 2] * std::sqrt((k + 1.0) * (k + 2.0));
    }
    return m;
}

[[nodiscard]] inline PhotonStats fock_observables(const FockVector& v) {
    const LadderMoments m = ladder_moments(v);
    return make_photon_stats(m.n, m.n2);
}

/// <X_theta> and <X_theta^2> for X_theta = (a e^{-i theta} + a^dag e^{i theta})/sqrt 2.
struct QuadratureMoments {
    double mean = 0.0;
    double second = 0.0;
};

[[nodiscard]] inline QuadratureMoments fock_quadrature(const FockVector& v, double theta) {
    const LadderMoments m = ladder_moments(v);
    QuadratureMoments q;
    q.mean = std::sqrt(2.0) * (m.a * std::polar(1.0, -theta)).real();
    q.second = quadrature_variance_from_moments(m.a2, m.n + 1.0, theta);
    return q;
}

[[nodiscard]] inline SqueezeReport fock_squeeze(const FockVector& v) {
    const LadderMoments m = ladder_moments(v);
    return squeeze_from_moments(m.a2, m.n + 1.0);
}

/// Wigner function of a normalized pure state from Fock matrix elements.
///
/// W = sum_{m,k} c_m c_k^* W_{mk} with
/// W_{k+d,k}(alpha) = (2/pi)(-1)^k sqrt(k!/(k+d)!) (2 alpha^*)^d e^{-2|alpha|^2} L_k^{(d)}(4|alpha|^2),
/// evaluated through normalized Laguerre recurrences to avoid factorials.
[[nodiscard]] inline double fock_wigner(const FockVector& v, std::complex<double> alpha) {
    const auto& c = v.amplitudes;
    int size = v.size();
    while (size > 0 && std::abs(c[size - 1]) < 1e-18) --size;
    if (size == 0) return 0.0;

    const double rho = std::abs(alpha);
    const double x = 4.0 * rho * rho;
    const std::complex<double> unit = rho > 0.0 ? std::conj(alpha) / rho : std::complex<double>(1.0);
    double total = 0.0;
    std::complex<double> phase = 1.0;
    for (int d = 0; d < size; ++d) {
        if (d > 0) {
            phase *= unit;
            if (rho == 0.0) break;
        }
        const double log_base = (d > 0 ? d * std::log(2.0 * rho) : 0.0) - 0.5 * x - 0.5 * std::lgamma(d + 1.0);
        const double base = 2.0 / std::numbers::pi * std::exp(log_base);
        std::complex<double> acc = 0.0;
        double prev = 0.0;
        double cur = 1.0;
        for (int k = 0; k + d < size; ++k) {
            if (k > 0) {
                const double next = ((2.0 * (k - 1) + 1.0 + d - x) * cur -
                                     std::sqrt((k - 1.0) * (k - 1.0 + d)) * prev) /
                                    std::sqrt(static_cast<double>(k) * (k + d));
                prev = cur;
                cur = next;
            }
            const double sign = (k % 2 == 0) ? 1.0 : -1.0;
            acc += c[k + d] * std::conj(c[k]) * (sign * cur);
        }
        const double contrib = base * (acc * phase).real();
        total += d == 0 ? contrib : 2.0 * contrib;
    }
    return total;
}

[[nodiscard]] inline std::complex<double> overlap(const FockVector& a, const FockVector& b) {
    std::complex<double> s = 0.0;
    const int n = std::min(a.size(), b.size());
    for (int k = 0; k < n; ++k) s += std::conj(a.amplitudes[k]) * b.amplitudes[k];
    return s;
}

} // namespace postsel::oracle

#endif // POSTSEL_FOCK_ORACLE_HPP
