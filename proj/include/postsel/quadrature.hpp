#ifndef POSTSEL_QUADRATURE_HPP
#define POSTSEL_QUADRATURE_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <queue>

namespace postsel::quad {

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on P_n.
template <std::size_t N>
struct GaussLegendre {
    std::array<double, N> nodes{};
    std::array<double, N> weights{};

    GaussLegendre() {
        for (std::size_t i = 0; i < N; ++i) {
            double x = std::cos(std::numbers::pi * (i + 0.75) / (N + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0;
                double p1 = x;
                for (std::size_t k = 2; k <= N; ++k) {
                    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = N * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::fabs(dx) < 1e-16) break;
            }
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
    }
};

struct Box {
    double x0 = 0.0;
    double x1 = 0.0;
    double y0 = 0.0;
    double y1 = 0.0;
};

template <std::size_t K>
struct Result {
    std::array<double, K> value{};
    double error = 0.0; ///< estimate for component 0
    std::size_t panels = 0;
    std::size_t evaluations = 0;
    bool converged = false;
};

struct Options {
    double tol = 1e-6;            ///< absolute target on component 0
    int initial_split = 8;        ///< initial uniform panels per axis
    std::size_t max_panels = 400000;
};

/// Globally adaptive tensor Gauss-Legendre cubature of a vector integrand.
///
/// Each panel is integrated once as a whole and once as four children; the
/// difference is its error estimate and the children sum is kept as the
/// value. The panel with the largest estimate is split until the summed
/// estimate drops below tol. `f(x, y)` returns std::array<double, K>; error
/// control uses component 0 only.
template <std::size_t K, class F>
[[nodiscard]] Result<K> integrate(F&& f, const Box& box, const Options& opt = {}) {
    static const GaussLegendre<8> gl;
    using Vec = std::array<double, K>;

    Result<K> out;
    auto rule = [&](const Box& b) {
        Vec acc{};
        const double hx = 0.5 * (b.x1 - b.x0);
        const double hy = 0.5 * (b.y1 - b.y0);
        const double cx = 0.5 * (b.x1 + b.x0);
        const double cy = 0.5 * (b.y1 + b.y0);
        for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
            for (std::size_t j = 0; j < gl.nodes.size(); ++j) {
                const Vec v = f(cx + hx * gl.nodes[i], cy + hy * gl.nodes[j]);
                const double w = gl.weights[i] * gl.weights[j] * hx * hy;
                for (std::size_t k = 0; k < K; ++k) acc[k] += w * v[k];
            }
        }
        out.evaluations += gl.nodes.size() * gl.nodes.size();
        return acc;
    };

    struct Panel {
        Box box;
        Vec coarse;
        Vec fine;
        std::array<Vec, 4> kids;
        double err;
        bool operator<(const Panel& o) const { return err < o.err; }
    };
    auto children = [](const Box& b) {
        const double mx = 0.5 * (b.x0 + b.x1);
        const double my = 0.5 * (b.y0 + b.y1);
        return std::array<Box, 4>{Box{b.x0, mx, b.y0, my}, Box{mx, b.x1, b.y0, my},
                                  Box{b.x0, mx, my, b.y1}, Box{mx, b.x1, my, b.y1}};
    };
    auto make_panel = [&](const Box& b, const Vec& coarse) {
        Panel p{b, coarse, {}, {}, 0.0};
        const auto boxes = children(b);
        for (std::size_t i = 0; i < boxes.size(); ++i) {
            p.kids[i] = rule(boxes[i]);
            for (std::size_t k = 0; k < K; ++k) p.fine[k] += p.kids[i][k];
        }
        p.err = std::fabs(p.fine[0] - p.coarse[0]);
        return p;
    };

    std::priority_queue<Panel> heap;
    double err_total = 0.0;
    const int m = opt.initial_split;
    const double dx = (box.x1 - box.x0) / m;
    const double dy = (box.y1 - box.y0) / m;
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            const Box b{box.x0 + i * dx, box.x0 + (i + 1) * dx, box.y0 + j * dy, box.y0 + (j + 1) * dy};
            Panel p = make_panel(b, rule(b));
            err_total += p.err;
            heap.push(std::move(p));
        }
    }

    while (err_total > opt.tol && heap.size() < opt.max_panels) {
        Panel worst = heap.top();
        heap.pop();
        err_total -= worst.err;
        const auto boxes = children(worst.box);
        for (std::size_t i = 0; i < boxes.size(); ++i) {
            Panel p = make_panel(boxes[i], worst.kids[i]);
            err_total += p.err;
            heap.push(std::move(p));
        }
    }

    // Re-sum from the panels; the running error total drifts.
    Vec fresh{};
    double fresh_err = 0.0;
    out.panels = heap.size();
    while (!heap.empty()) {
        const Panel& p = heap.top();
        for (std::size_t k = 0; k < K; ++k) fresh[k] += p.fine[k];
        fresh_err += p.err;
        heap.pop();
    }
    out.value = fresh;
    out.error = fresh_err;
    out.converged = fresh_err <= opt.tol;
    return out;
}

} // namespace postsel::quad

#endif // POSTSEL_QUADRATURE_HPP
