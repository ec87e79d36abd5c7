#ifndef POSTSEL_WIGNER_HPP
#define POSTSEL_WIGNER_HPP

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <complex>
#include <istream>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "postsel/dynamics.hpp"
#include "postsel/fock_oracle.hpp"
#include "postsel/moments.hpp"
#include "postsel/quadrature.hpp"
#include "postsel/special_functions.hpp"

namespace postsel {

/// Gaussian envelope G(alpha) shared by every W_n at fixed coefficients.
[[nodiscard]] inline double gaussian_prefactor(const DerivedCoeffs& c, complex alpha) {
    if (!(c.Theta > 0.0)) throw std::domain_error("gaussian_prefactor: Theta <= 0");
    const double a2 = std::norm(alpha);
    // 4 zeta <omega, alpha>_2 = 8 Re(Omega^* alpha^2)
    const double cross = 8.0 * (std::conj(c.Omega) * alpha * alpha).real();
    const double expo = (-2.0 * (1.0 + 4.0 * c.Omega_abs * c.Omega_abs) * a2 + cross) / c.Theta;
    return 2.0 / (std::numbers::pi * std::sqrt(c.Theta)) * std::exp(expo);
}

/// Wigner function of |n> (boundary limit of the post-measurement state).
[[nodiscard]] inline double fock_number_wigner(int n, complex alpha) {
    const double x = 4.0 * std::norm(alpha);
    // L_n^{(0)} by recurrence
    double prev = 1.0;
    double cur = 1.0 - x;
    double ln = n == 0 ? 1.0 : cur;
    for (int k = 1; k < n; ++k) {
        const double next = ((2.0 * k + 1.0 - x) * cur - k * prev) / (k + 1.0);
        prev = cur;
        cur = next;
        ln = cur;
    }
    const double sign = n % 2 == 0 ? 1.0 : -1.0;
    return sign * 2.0 / std::numbers::pi * std::exp(-0.5 * x) * ln;
}

/// Closed-form W_n evaluator with the per-state constants hoisted.
///
/// Uses x1^l L_l^{(-1/2)}(y1/x1) with y1 = 8 Im(alpha omega^*)^2/(1-2|Omega|)^2
/// (and the x2 analogue), which equals the printed Laguerre arguments and
/// stays finite where x1 passes through zero.
class WignerEvaluator {
public:
    explicit WignerEvaluator(const PostState& s) : state_(s) {
        if (s.degenerate()) {
            throw DegenerateState("wigner: odd n with |omega|^2 below threshold");
        }
        if (!s.boundary()) {
            const auto& c = s.coeffs;
            const double coef = special::product_poly_coeff(s.n, {0.5, 0.5, c.x1, c.x2});
            // (-1)^n 2^n n! / I_n^(0) = (-1)^n sqrt(Theta) / coef
            scale_ = (s.n % 2 == 0 ? 1.0 : -1.0) * std::sqrt(c.Theta) / coef;
            m1_.resize(s.n + 1);
            m2_.resize(s.n + 1);
        }
    }

    [[nodiscard]] double operator()(complex alpha) const {
        if (state_.boundary()) return fock_number_wigner(state_.n, alpha);
        const auto& c = state_.coeffs;
        const complex proj = alpha * std::conj(c.omega);
        const double zm = 1.0 - 2.0 * c.Omega_abs;
        const double zp = 1.0 + 2.0 * c.Omega_abs;
        const double y1 = 8.0 * proj.imag() * proj.imag() / (zm * zm);
        const double y2 = 8.0 * proj.real() * proj.real() / (zp * zp);
        special::scaled_laguerre_half(state_.n, c.x1, y1, m1_.begin());
        special::scaled_laguerre_half(state_.n, c.x2, y2, m2_.begin());
        double sum = 0.0;
        for (int l = 0; l <= state_.n; ++l) sum += m1_[l] * m2_[state_.n - l];
        return scale_ * gaussian_prefactor(c, alpha) * sum;
    }

    [[nodiscard]] const PostState& state() const { return state_; }

private:
    PostState state_;
    double scale_ = 1.0;
    mutable std::vector<double> m1_;
    mutable std::vector<double> m2_;
};

[[nodiscard]] inline double wigner_eval(const PostState& s, complex alpha) {
    return WignerEvaluator(s)(alpha);
}

/// Rectangular phase-space bounds.
struct GridBounds {
    double re_min = -5.0;
    double re_max = 5.0;
    double im_min = -5.0;
    double im_max = 5.0;
};

/// Dense W samples, row-major with the imaginary axis outer.
struct WignerGrid {
    double re_min = 0.0;
    double re_max = 0.0;
    double im_min = 0.0;
    double im_max = 0.0;
    int nx = 0;
    int ny = 0;
    std::vector<double> values;
    std::string params_echo;

    [[nodiscard]] double re_at(int ix) const { return re_min + (re_max - re_min) * ix / (nx - 1); }
    [[nodiscard]] double im_at(int iy) const { return im_min + (im_max - im_min) * iy / (ny - 1); }
    [[nodiscard]] double at(int ix, int iy) const { return values[static_cast<std::size_t>(iy) * nx + ix]; }
};

template <class W>
[[nodiscard]] WignerGrid sample_grid(const W& w, const GridBounds& b, int nx, int ny) {
    if (nx < 2 || ny < 2) throw std::domain_error("wigner_grid: nx, ny must be >= 2");
    WignerGrid g{b.re_min, b.re_max, b.im_min, b.im_max, nx, ny, {}, {}};
    g.values.resize(static_cast<std::size_t>(nx) * ny);
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            g.values[static_cast<std::size_t>(iy) * nx + ix] = w(complex(g.re_at(ix), g.im_at(iy)));
        }
    }
    return g;
}

[[nodiscard]] inline std::string describe(const PostState& s) {
    std::ostringstream o;
    o.precision(17);
    const auto& p = s.coeffs.params;
    o << "n=" << s.n << " J=" << p.J << " Delta=" << p.Delta << " r=" << p.r << " phi=" << p.phi
      << " jt=" << s.coeffs.tau_scaled;
    return o.str();
}

[[nodiscard]] inline WignerGrid wigner_grid(const PostState& s, const GridBounds& b, int nx, int ny) {
    WignerGrid g = sample_grid(WignerEvaluator(s), b, nx, ny);
    g.params_echo = describe(s);
    return g;
}

/// Trapezoid-weighted Riemann sum of the grid values.
[[nodiscard]] inline double grid_integral(const WignerGrid& g) {
    const double hx = (g.re_max - g.re_min) / (g.nx - 1);
    const double hy = (g.im_max - g.im_min) / (g.ny - 1);
    double s = 0.0;
    for (int iy = 0; iy < g.ny; ++iy) {
        const double wy = (iy == 0 || iy == g.ny - 1) ? 0.5 : 1.0;
        for (int ix = 0; ix < g.nx; ++ix) {
            const double wx = (ix == 0 || ix == g.nx - 1) ? 0.5 : 1.0;
            s += wx * wy * g.at(ix, iy);
        }
    }
    return s * hx * hy;
}

namespace detail {

inline std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
    double v = 0.0;
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{}) throw std::runtime_error("grid csv: bad number '" + std::string(s) + "'");
    return v;
}

} // namespace detail

/// Grid CSV: a column-name header, a value header, then nx*ny rows `re,im,w`.
inline void write_grid_csv(std::ostream& os, const WignerGrid& g) {
    using detail::format_double;
    os << "# re_min re_max im_min im_max nx ny\n";
    os << "# " << format_double(g.re_min) << ' ' << format_double(g.re_max) << ' '
       << format_double(g.im_min) << ' ' << format_double(g.im_max) << ' ' << g.nx << ' ' << g.ny << '\n';
    for (int iy = 0; iy < g.ny; ++iy) {
        for (int ix = 0; ix < g.nx; ++ix) {
            os << format_double(g.re_at(ix)) << ',' << format_double(g.im_at(iy)) << ','
               << format_double(g.at(ix, iy)) << '\n';
        }
    }
}

[[nodiscard]] inline WignerGrid read_grid_csv(std::istream& is) {
    std::string line;
    WignerGrid g;
    bool have_meta = false;
    while (!have_meta && std::getline(is, line)) {
        if (line.rfind('#', 0) != 0) throw std::runtime_error("grid csv: missing header");
        std::istringstream hs(line.substr(1));
        std::vector<std::string> tok;
        for (std::string t; hs >> t;) tok.push_back(t);
        if (tok.size() == 6 && tok[0] != "re_min") {
            g.re_min = detail::parse_double(tok[0]);
            g.re_max = detail::parse_double(tok[1]);
            g.im_min = detail::parse_double(tok[2]);
            g.im_max = detail::parse_double(tok[3]);
            g.nx = std::stoi(tok[4]);
            g.ny = std::stoi(tok[5]);
            have_meta = true;
        }
    }
    if (!have_meta || g.nx < 2 || g.ny < 2) throw std::runtime_error("grid csv: bad header");
    g.values.reserve(static_cast<std::size_t>(g.nx) * g.ny);
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto last = line.rfind(',');
        if (last == std::string::npos) throw std::runtime_error("grid csv: bad row");
        g.values.push_back(detail::parse_double(std::string_view(line).substr(last + 1)));
    }
    if (g.values.size() != static_cast<std::size_t>(g.nx) * g.ny) {
        throw std::runtime_error("grid csv: expected " + std::to_string(g.nx * g.ny) + " rows");
    }
    return g;
}

/// Wigner negativity of one state.
///
/// delta_w = int|W| - 1 (twice the negative volume), the convention the
/// reference values use; negative_volume = (int|W| - 1)/2 is the volume of
/// the negative region itself.
struct NegativityResult {
    double delta_w = 0.0;
    double negative_volume = 0.0;
    double abs_integral = 0.0;
    double integral = 0.0; ///< int W, should be 1
    double est_error = 0.0;
    double truncation_radius = 0.0;
    std::size_t evaluations = 0;
    bool converged = false;
};

class QuadratureFailure : public std::runtime_error {
public:
    QuadratureFailure(const std::string& what, NegativityResult best)
        : std::runtime_error(what), best_estimate(best) {}
    NegativityResult best_estimate;
};

struct NegativityOptions {
    double tol = 1e-4;
    std::size_t max_panels = 400000;
    bool throw_on_failure = true;
};

/// Slowest Gaussian decay rate of G: exponent <= -lambda |alpha|^2.
[[nodiscard]] inline double envelope_rate(const DerivedCoeffs& c) {
    if (c.boundary) return 2.0;
    return 2.0 * (1.0 - 2.0 * c.Omega_abs) / (1.0 + 2.0 * c.Omega_abs);
}

/// Radius beyond which the |W| mass is below tol/10.
///
/// Starts at max(4, radius where G_peak e^{-lambda R^2} (1 + R/|omega|)^{2n}
/// < tol/10) and grows while the ring maximum of |W| times pi/lambda says
/// the tail could still exceed tol/10.
template <class W>
[[nodiscard]] double truncation_radius(const W& w, const DerivedCoeffs& c, int n, double tol) {
    const double lambda = envelope_rate(c);
    const double peak = 2.0 / (std::numbers::pi * std::sqrt(c.Theta));
    const double inv_om = c.boundary ? 1.0 : 1.0 / std::sqrt(std::max(c.omega_abs2, 1e-300));
    auto envelope = [&](double r) {
        return peak * std::exp(-lambda * r * r) * std::pow(1.0 + r * inv_om, 2.0 * n);
    };
    double radius = 4.0;
    while (radius < 40.0 && envelope(radius) >= tol / 10.0) radius += 0.25;
    radius = std::max(4.0, std::min(radius, 4.0 + 4.0 * std::sqrt((2.0 * n + 20.0) / lambda)));
    for (int guard = 0; guard < 200; ++guard) {
        double ring = 0.0;
        constexpr int samples = 256;
        for (int i = 0; i < samples; ++i) {
            ring = std::max(ring, std::fabs(w(std::polar(radius, 2.0 * std::numbers::pi * i / samples))));
        }
        if (ring * std::numbers::pi / lambda < tol / 10.0) break;
        radius += 0.25;
    }
    return radius;
}

template <class W>
[[nodiscard]] NegativityResult negativity_of(const W& w, const DerivedCoeffs& c, int n,
                                             const NegativityOptions& opt = {}) {
    if (!(opt.tol >= 1e-6)) throw std::domain_error("negativity: tol must be >= 1e-6");
    NegativityResult res;
    res.truncation_radius = truncation_radius(w, c, n, opt.tol);
    const double R = res.truncation_radius;
    quad::Options qo;
    qo.tol = 0.8 * opt.tol;
    qo.max_panels = opt.max_panels;
    const auto q = quad::integrate<2>(
        [&](double x, double y) {
            const double v = w(complex(x, y));
            return std::array<double, 2>{std::fabs(v), v};
        },
        {-R, R, -R, R}, qo);
    res.abs_integral = q.value[0];
    res.integral = q.value[1];
    res.delta_w = res.abs_integral - 1.0;
    res.negative_volume = 0.5 * res.delta_w;
    res.est_error = q.error + opt.tol / 10.0;
    res.evaluations = q.evaluations;
    res.converged = q.converged;
    if (!res.converged && opt.throw_on_failure) {
        throw QuadratureFailure("negativity: no convergence within panel budget", res);
    }
    return res;
}

[[nodiscard]] inline NegativityResult negativity(const PostState& s, double tol = 1e-4) {
    NegativityOptions opt;
    opt.tol = tol;
    return negativity_of(WignerEvaluator(s), s.coeffs, s.n, opt);
}

/// Adaptive int W d^2 alpha over the truncation box.
template <class W>
[[nodiscard]] double wigner_normalization_of(const W& w, const DerivedCoeffs& c, int n, double tol) {
    const double R = truncation_radius(w, c, n, tol);
    quad::Options qo;
    qo.tol = tol;
    const auto q = quad::integrate<1>(
        [&](double x, double y) { return std::array<double, 1>{w(complex(x, y))}; }, {-R, R, -R, R}, qo);
    return q.value[0];
}

/// sqrt(pi int (W_a - W_b)^2) over the truncation box, with the quadrature error of the integral.
template <class WA, class WB>
[[nodiscard]] std::pair<double, double> hs_phase_space(const WA& wa, const WB& wb, const DerivedCoeffs& c,
                                                       int n_top, double tol) {
    const double R = std::max(truncation_radius(wa, c, n_top, tol), truncation_radius(wb, c, n_top, tol));
    quad::Options qo;
    qo.tol = tol;
    const auto q = quad::integrate<1>(
        [&](double x, double y) {
            const double d = wa(complex(x, y)) - wb(complex(x, y));
            return std::array<double, 1>{d * d};
        },
        {-R, R, -R, R}, qo);
    return {std::sqrt(std::max(0.0, std::numbers::pi * q.value[0])), std::numbers::pi * q.error};
}

/// Hilbert-Schmidt distance between two post-measurement states.
struct HsResult {
    double distance = 0.0;             ///< overlap route
    double overlap_abs2 = 0.0;         ///< |<psi_a|psi_b>|^2
    double truncation_error = 0.0;     ///< discarded Schmidt weight of the oracle
    std::optional<double> phase_space; ///< pi int (W_a - W_b)^2, when requested
    double phase_space_error = 0.0;
};

struct HsOptions {
    double oracle_tol = 1e-14;
    int n_max = 0; ///< 0: default_n_max
    bool verify = false;
    double quad_tol = 1e-7;
};

/// d_HS = sqrt(2 - 2|<a|b>|^2) from oracle amplitudes; optional phase-space check.
[[nodiscard]] inline HsResult hs_distance(const PostState& a, const PostState& b, const HsOptions& opt = {}) {
    const auto& pa = a.coeffs.params;
    const auto& pb = b.coeffs.params;
    if (pa.J != pb.J || pa.Delta != pb.Delta || pa.r != pb.r || pa.phi != pb.phi ||
        a.coeffs.tau_scaled != b.coeffs.tau_scaled) {
        throw std::invalid_argument("hs_distance: states must share parameters and time");
    }
    const int nmax = opt.n_max > 0 ? opt.n_max : oracle::default_n_max(pa.r, std::max(a.n, b.n), opt.oracle_tol);
    const auto init = oracle::build_initial(pa, nmax, opt.oracle_tol);
    const auto evolved = oracle::evolve_scaled(init, pa, a.coeffs.tau_scaled);
    HsResult res;
    res.truncation_error = init.norm_defect;
    const auto va = oracle::normalized(oracle::project_b(evolved, a.n));
    const auto vb = oracle::normalized(oracle::project_b(evolved, b.n));
    res.overlap_abs2 = a.n == b.n ? 1.0 : std::min(1.0, std::norm(oracle::overlap(va, vb)));
    res.distance = std::sqrt(std::max(0.0, 2.0 - 2.0 * res.overlap_abs2));

    if (opt.verify) {
        std::optional<WignerEvaluator> ea;
        std::optional<WignerEvaluator> eb;
        if (!a.degenerate()) ea.emplace(a);
        if (!b.degenerate()) eb.emplace(b);
        auto wa = [&](complex al) { return ea ? (*ea)(al) : oracle::fock_wigner(va, al); };
        auto wb = [&](complex al) { return eb ? (*eb)(al) : oracle::fock_wigner(vb, al); };
        const auto [d, err] = hs_phase_space(wa, wb, a.coeffs, std::max(a.n, b.n), opt.quad_tol);
        res.phase_space = d;
        res.phase_space_error = err;
    }
    return res;
}

} // namespace postsel

#endif // POSTSEL_WIGNER_HPP
