#ifndef POSTSEL_VALIDATION_HPP
#define POSTSEL_VALIDATION_HPP

// Invariant battery behind `postsel validate`: every check compares two
// independent routes or an exact identity and reports pass/fail.

#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include "postsel/engine.hpp"
#include "postsel/explicit_wigner.hpp"

namespace postsel {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
    bool skipped = false;
};

struct ValidationOptions {
    double equivalence_tol = 1e-8;
    double unitarity_tol = 1e-10;
    double boundary_tol = 1e-9;
    double explicit_rel_tol = 1e-10;
    double hs_tol = 1e-6;
    EngineOptions engine;
};

namespace detail {

inline std::string fmt(const char* f, double a, double b = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

inline std::string at(double jt, int n = -1) {
    char buf[64];
    if (n < 0) std::snprintf(buf, sizeof buf, " jt=%.6g", jt);
    else std::snprintf(buf, sizeof buf, " jt=%.6g n=%d", jt, n);
    return buf;
}

// Fixed probe points, spread over the bulk of every state in the suite.
inline const std::array<complex, 8>& probes() {
    static const std::array<complex, 8> pts{complex(0.0, 0.0),  complex(0.31, -0.47), complex(-0.8, 0.2),
                                            complex(1.1, 0.9),  complex(-1.4, -0.6),  complex(0.05, 1.7),
                                            complex(2.2, -0.3), complex(-0.9, -2.1)};
    return pts;
}

} // namespace detail

/// Runs the battery for every t in `ts` and n in `ns`.
[[nodiscard]] inline std::vector<CheckResult> run_validation(const ModelParams& p, const std::vector<int>& ns,
                                                             const std::vector<double>& ts,
                                                             const ValidationOptions& vo = {}) {
    std::vector<CheckResult> out;
    const ValidityReport rep = validate(p);
    out.push_back({"parameters", rep.valid,
                   rep.message + detail::fmt(" (mu*tanh r = %.6g)", rep.mu_tanh_r)});
    if (!rep.valid) return out;

    int n_hint = 0;
    for (int n : ns) n_hint = std::max(n_hint, n + 1);
    EngineOptions eo = vo.engine;
    eo.oracle_only = false;
    eo.n_hint = std::max(eo.n_hint, n_hint);

    for (double jt : ts) {
        Engine eng(p, jt, eo);
        const DerivedCoeffs& c = eng.coeffs();

        const UnitarityResult u = unitarity_residual(c);
        out.push_back({"unitarity" + detail::at(jt),
                       u.partial_sum < vo.unitarity_tol && u.closed_form < vo.unitarity_tol,
                       detail::fmt("partial-sum residual %.3g, closed-form residual %.3g", u.partial_sum,
                                   u.closed_form)});

        if (!c.boundary && !c.small_omega) {
            double worst = 0.0;
            for (int n = 0; n <= 3; ++n) {
                const WignerEvaluator w(eng.post_state(n));
                for (const complex a : detail::probes()) {
                    const double ref = explicit_wigner(n, c, a);
                    const double rel = std::fabs(w(a) - ref) / std::max(std::fabs(ref), 1e-300);
                    if (std::fabs(ref) > 1e-12) worst = std::max(worst, rel);
                }
            }
            out.push_back({"explicit-forms n=0..3" + detail::at(jt), worst < vo.explicit_rel_tol,
                           detail::fmt("max relative deviation %.3g", worst)});
        }

        for (int n : ns) {
            const std::string where = detail::at(jt, n);
            oracle::FockVector v;
            try {
                v = eng.oracle_vector(n);
            } catch (const DegenerateState& e) {
                out.push_back({"outcome" + where, true, e.what(), true});
                continue;
            }

            bool parity_ok = true;
            for (int k = (n + 1) % 2; k < v.size(); k += 2) parity_ok = parity_ok && v.amplitudes[k] == complex(0.0);
            double odd_part = 0.0;
            const auto w = eng.wigner(n);
            for (const complex a : detail::probes()) {
                odd_part = std::max(odd_part, std::fabs(w.value(a) - w.value(-a)));
            }
            out.push_back({"parity" + where, parity_ok && odd_part <= 1e-13,
                           std::string(parity_ok ? "no" : "nonzero") + " opposite-parity amplitudes" +
                               detail::fmt(", max |W(a)-W(-a)| %.3g", odd_part)});

            const auto st = eng.stats(n);
            const PhotonStats so = oracle::fock_observables(v);
            double dev = std::max({std::fabs(st.value.mean_n - so.mean_n), std::fabs(st.value.mean_n2 - so.mean_n2),
                                   std::fabs(st.value.variance - so.variance)});
            if (st.value.mandel_q && so.mandel_q) dev = std::max(dev, std::fabs(*st.value.mandel_q - *so.mandel_q));
            for (int i = 0; i < 4; ++i) {
                const double th = i * std::numbers::pi / 4.0;
                dev = std::max(dev, std::fabs(eng.quadrature(n, th).value - oracle::fock_quadrature(v, th).second));
            }
            for (const complex a : detail::probes()) dev = std::max(dev, std::fabs(w.value(a) - oracle::fock_wigner(v, a)));
            const double prob = eng.probability(n).value;
            const double prob_o = oracle::project_b(eng.oracle_state(), n).probability;
            dev = std::max(dev, std::fabs(prob - prob_o));
            out.push_back({"oracle-equivalence" + where + " [" + std::string(to_string(st.source)) + "]",
                           dev < vo.equivalence_tol, detail::fmt("max abs deviation %.3g", dev)});

            if (c.boundary) {
                const PhotonStats b = photon_stats(eng.post_state(n));
                double bdev = std::max({std::fabs(b.mean_n - n), std::fabs(b.variance),
                                        std::fabs(quadrature_variance(eng.post_state(n), 0.7) - (n + 0.5))});
                const bool q_ok = n == 0 ? !b.mandel_q.has_value() : std::fabs(*b.mandel_q + 1.0) < vo.boundary_tol;
                out.push_back({"boundary-limit" + where, bdev < vo.boundary_tol && q_ok,
                               detail::fmt("max deviation from Fock limit %.3g", bdev)});
            }
        }

        std::vector<std::pair<int, int>> orth;
        for (std::size_t i = 0; i < ns.size() && orth.empty(); ++i) {
            for (std::size_t j = i + 1; j < ns.size() && orth.empty(); ++j) {
                if ((ns[i] + ns[j]) % 2 == 1) orth.emplace_back(ns[i], ns[j]);
            }
        }
        for (const auto& [na, nb] : orth) {
            try {
                const double d = eng.hs_distance(na, nb);
                const double self = eng.hs_distance(na, na);
                out.push_back({"hs-orthogonality" + detail::at(jt) + " pair=" + std::to_string(na) + "," +
                                   std::to_string(nb),
                               std::fabs(d - std::sqrt(2.0)) < vo.hs_tol && self < vo.hs_tol,
                               detail::fmt("d_HS - sqrt(2) = %.3g, d_HS(n,n) = %.3g", d - std::sqrt(2.0), self)});
            } catch (const DegenerateState& e) {
                out.push_back({"hs-orthogonality" + detail::at(jt), true, e.what(), true});
            }
        }
    }
    return out;
}

} // namespace postsel

#endif // POSTSEL_VALIDATION_HPP
