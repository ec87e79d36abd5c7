// Regenerates the data behind a Wigner panel: one grid file per outcome plus
// the negativity and squeezing of each state.
//
//   wigner_figure [J] [jt] [outdir]

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>

#include "postsel/engine.hpp"

int main(int argc, char** argv) {
    postsel::ModelParams p;
    p.J = argc > 1 ? std::atof(argv[1]) : 1.3;
    const double jt = argc > 2 ? std::atof(argv[2]) : std::numbers::pi / 2;
    const std::filesystem::path dir = argc > 3 ? argv[3] : "wigner_figure";
    std::filesystem::create_directories(dir);

    postsel::Engine eng(p, jt);
    std::printf("n  source          delta_W   v_min    v_max\n");
    for (int n = 5; n <= 8; ++n) {
        const auto g = eng.wigner_grid(n, {-3.5, 3.5, -3.5, 3.5}, 141, 141);
        std::ofstream f(dir / ("wigner_n" + std::to_string(n) + ".csv"));
        postsel::write_grid_csv(f, g.value);

        postsel::NegativityOptions opt;
        opt.tol = 1e-4;
        const auto neg = eng.negativity(n, opt).value;
        const auto sq = eng.squeeze(n).value;
        std::printf("%d  %-14s  %.4f    %.4f   %.4f\n", n, std::string(postsel::to_string(g.source)).c_str(),
                    neg.delta_w, sq.v_min, sq.v_max);
    }
}
