#ifndef POSTSEL_ENGINE_HPP
#define POSTSEL_ENGINE_HPP

// Routes each request to the closed forms, the Fock-state limit or the
// brute-force oracle, and records which one answered.

#include <algorithm>
#include <functional>
#include <memory>
#include <optional>
#include <string_view>

#include "postsel/dynamics.hpp"
#include "postsel/fock_oracle.hpp"
#include "postsel/moments.hpp"
#include "postsel/wigner.hpp"

namespace postsel {

enum class Source { closed_form, boundary_limit, oracle };

[[nodiscard]] constexpr std::string_view to_string(Source s) {
    switch (s) {
    case Source::closed_form: return "closed_form";
    case Source::boundary_limit: return "boundary_limit";
    case Source::oracle: return "oracle";
    }
    return "?";
}

template <class T>
struct Sourced {
    T value;
    Source source;
};

struct EngineOptions {
    bool oracle_only = false;
    int n_max = 0;         ///< Schmidt cutoff for the oracle; 0 picks default_n_max
    int n_hint = 8;        ///< largest outcome expected, sizes the default cutoff
    double oracle_tol = 1e-14;
    DynamicsOptions dynamics;
};

/// All quantities at one (params, Jhat t). The oracle state is built lazily, once.
class Engine {
public:
    Engine(const ModelParams& p, double jt, const EngineOptions& opt = {})
        : opt_(opt), coeffs_(derive_coeffs_scaled(p, jt, opt.dynamics)) {}

    [[nodiscard]] const DerivedCoeffs& coeffs() const { return coeffs_; }
    [[nodiscard]] const EngineOptions& options() const { return opt_; }

    [[nodiscard]] Source route(int n) const {
        if (opt_.oracle_only) return Source::oracle;
        if (coeffs_.boundary) return Source::boundary_limit;
        if (coeffs_.small_omega && n % 2 == 1) return Source::oracle;
        return Source::closed_form;
    }

    [[nodiscard]] PostState post_state(int n) const { return make_post_state(n, coeffs_); }

    [[nodiscard]] int n_max() const {
        if (opt_.n_max > 0) return opt_.n_max;
        return oracle::default_n_max(coeffs_.params.r, opt_.n_hint, opt_.oracle_tol);
    }

    [[nodiscard]] const oracle::TwoModeState& oracle_state() {
        if (!evolved_) {
            const auto init = oracle::build_initial(coeffs_.params, n_max(), opt_.oracle_tol);
            evolved_ = std::make_unique<oracle::TwoModeState>(
                oracle::evolve_scaled(init, coeffs_.params, coeffs_.tau_scaled));
        }
        return *evolved_;
    }

    /// Normalized mode-A vector for outcome n.
    [[nodiscard]] oracle::FockVector oracle_vector(int n) {
        auto v = oracle::project_b(oracle_state(), n);
        if (v.negligible) throw DegenerateState("oracle: outcome probability below 1e-14");
        return oracle::normalized(std::move(v));
    }

    [[nodiscard]] Sourced<double> probability(int n) {
        const Source s = route(n);
        if (s == Source::oracle) return {oracle::project_b(oracle_state(), n).probability, s};
        return {projection_probability(n, coeffs_), s};
    }

    [[nodiscard]] Sourced<PhotonStats> stats(int n) {
        const Source s = route(n);
        if (s == Source::oracle) return {oracle::fock_observables(oracle_vector(n)), s};
        return {photon_stats(post_state(n)), s};
    }

    [[nodiscard]] Sourced<SqueezeReport> squeeze(int n) {
        const Source s = route(n);
        if (s == Source::oracle) return {oracle::fock_squeeze(oracle_vector(n)), s};
        return {squeeze_report(post_state(n)), s};
    }

    [[nodiscard]] Sourced<double> quadrature(int n, double theta) {
        const Source s = route(n);
        if (s == Source::oracle) return {oracle::fock_quadrature(oracle_vector(n), theta).second, s};
        return {quadrature_variance(post_state(n), theta), s};
    }

    /// Point evaluator for W_n; copies what it needs, safe to keep.
    [[nodiscard]] Sourced<std::function<double(complex)>> wigner(int n) {
        const Source s = route(n);
        if (s == Source::oracle) {
            auto v = std::make_shared<const oracle::FockVector>(trimmed(oracle_vector(n)));
            return {[v](complex a) { return oracle::fock_wigner(*v, a); }, s};
        }
        auto ev = std::make_shared<const WignerEvaluator>(post_state(n));
        return {[ev](complex a) { return (*ev)(a); }, s};
    }

    [[nodiscard]] Sourced<WignerGrid> wigner_grid(int n, const GridBounds& b, int nx, int ny) {
        auto w = wigner(n);
        WignerGrid g = sample_grid(w.value, b, nx, ny);
        g.params_echo = describe(post_state(n)) + " source=" + std::string(to_string(w.source));
        return {std::move(g), w.source};
    }

    [[nodiscard]] Sourced<NegativityResult> negativity(int n, const NegativityOptions& nopt) {
        const Source s = route(n);
        if (s == Source::closed_form) return {negativity_of(WignerEvaluator(post_state(n)), coeffs_, n, nopt), s};
        if (s == Source::boundary_limit) {
            return {negativity_of([n](complex a) { return fock_number_wigner(n, a); }, coeffs_, n, nopt), s};
        }
        const auto v = trimmed(oracle_vector(n));
        return {negativity_of([&v](complex a) { return oracle::fock_wigner(v, a); }, coeffs_, n, nopt), s};
    }

    /// Overlap-route HS distance (always from oracle amplitudes).
    [[nodiscard]] double hs_distance(int na, int nb) {
        if (na == nb) return 0.0;
        const auto va = oracle_vector(na);
        const auto vb = oracle_vector(nb);
        const double o2 = std::min(1.0, std::norm(oracle::overlap(va, vb)));
        return std::sqrt(std::max(0.0, 2.0 - 2.0 * o2));
    }

private:
    // Drops the negligible tail so the Wigner sum stays short.
    static oracle::FockVector trimmed(oracle::FockVector v) {
        int size = v.size();
        while (size > 1 && std::abs(v.amplitudes[size - 1]) < 1e-17) --size;
        v.amplitudes.resize(size);
        return v;
    }

    EngineOptions opt_;
    DerivedCoeffs coeffs_;
    std::unique_ptr<oracle::TwoModeState> evolved_;
};

} // namespace postsel

#endif // POSTSEL_ENGINE_HPP
