// postsel: post-selected two-mode squeezing, sweeps and validation from the command line.

#include <CLI11.hpp>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "parallel.hpp"
#include "postsel/config.hpp"
#include "postsel/engine.hpp"
#include "postsel/fock_json.hpp"
#include "postsel/validation.hpp"
#include "table.hpp"

namespace fs = std::filesystem;
using namespace postsel;
using cli::Cell;
using cli::Table;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_numeric = 1;
constexpr int exit_input = 2;

constexpr double verify_tol = 1e-8;

struct Outcome {
    Table table;
    bool numeric_failure = false;
    std::vector<std::string> messages;
};

EngineOptions engine_options(const RunConfig& c) {
    EngineOptions eo;
    eo.oracle_only = c.oracle_only;
    eo.n_max = c.n_max;
    eo.oracle_tol = c.oracle_tol;
    int hint = 0;
    for (int n : c.n_list) hint = std::max(hint, n);
    for (const auto& [a, b] : c.pairs) hint = std::max({hint, a, b});
    eo.n_hint = hint;
    return eo;
}

Cell src(Source s) { return std::string(to_string(s)); }

// Rows for (t index, n) pairs, computed per time point in parallel.
template <class RowFn>
std::vector<std::vector<std::vector<Cell>>> per_time(const RunConfig& c, RowFn&& fn) {
    const EngineOptions eo = engine_options(c);
    return cli::parallel_map<std::vector<std::vector<Cell>>>(c.t_grid.size(), [&](std::size_t i) {
        Engine eng(c.params, c.t_grid[i], eo);
        return fn(eng, i);
    });
}

void flatten_into(Table& t, std::vector<std::vector<std::vector<Cell>>>&& blocks) {
    for (auto& b : blocks) {
        for (auto& r : b) t.add(std::move(r));
    }
}

Outcome cmd_coeffs(const RunConfig& c) {
    Outcome out;
    out.table.columns = {"jt", "jt_reduced", "jhat", "mu", "delta", "varphi", "Omega_re", "Omega_im",
                         "Omega_abs", "omega_re", "omega_im", "omega_abs2", "sigma_re", "sigma_im",
                         "sigma_abs2", "zeta", "Theta", "x1", "x2", "boundary", "small_omega"};
    for (double jt : c.t_grid) {
        const DerivedCoeffs d = derive_coeffs_scaled(c.params, jt);
        auto finite = [](double v) { return std::isfinite(v) ? Cell(v) : Cell(std::monostate{}); };
        out.table.add({jt, d.tau_reduced, d.jhat, d.mu, d.delta, d.varphi, d.Omega.real(), d.Omega.imag(),
                       d.Omega_abs, finite(d.omega.real()), finite(d.omega.imag()), finite(d.omega_abs2),
                       d.sigma.real(), d.sigma.imag(), std::norm(d.sigma), finite(d.zeta), d.Theta, finite(d.x1),
                       finite(d.x2), d.boundary, d.small_omega});
    }
    return out;
}

std::vector<Cell> blank_row(double jt, int n, std::size_t width) {
    std::vector<Cell> row{jt, static_cast<long long>(n), std::string("negligible")};
    row.resize(width);
    return row;
}

Outcome cmd_stats(const RunConfig& c, bool mandel_only, const std::string& dump_dir) {
    Outcome out;
    if (mandel_only) out.table.columns = {"jt", "n", "source", "mean_n", "mandel_q"};
    else out.table.columns = {"jt", "n", "source", "probability", "mean_n", "mean_n2", "variance", "mandel_q"};
    if (c.verify) {
        for (const char* k : {"mean_n_oracle", "variance_oracle", "mandel_q_oracle", "max_abs_dev"}) {
            out.table.columns.emplace_back(k);
        }
    }
    const std::size_t width = out.table.columns.size();
    std::atomic<bool> failed{false};
    auto blocks = per_time(c, [&](Engine& eng, std::size_t ti) {
        std::vector<std::vector<Cell>> rows;
        const double jt = c.t_grid[ti];
        for (int n : c.n_list) {
            try {
                const auto st = eng.stats(n);
                std::vector<Cell> row{jt, static_cast<long long>(n), src(st.source)};
                if (mandel_only) {
                    row.insert(row.end(), {st.value.mean_n, cli::opt_cell(st.value.mandel_q)});
                } else {
                    row.insert(row.end(), {eng.probability(n).value, st.value.mean_n, st.value.mean_n2,
                                           st.value.variance, cli::opt_cell(st.value.mandel_q)});
                }
                if (c.verify || !dump_dir.empty()) {
                    const auto v = eng.oracle_vector(n);
                    if (!dump_dir.empty()) {
                        std::ofstream f(fs::path(dump_dir) /
                                        ("fock_n" + std::to_string(n) + "_t" + std::to_string(ti) + ".json"));
                        f << oracle::to_json(v).dump() << '\n';
                    }
                    if (c.verify) {
                        const PhotonStats o = oracle::fock_observables(v);
                        double dev = std::max({std::fabs(o.mean_n - st.value.mean_n),
                                               std::fabs(o.mean_n2 - st.value.mean_n2),
                                               std::fabs(o.variance - st.value.variance)});
                        if (o.mandel_q && st.value.mandel_q) dev = std::max(dev, std::fabs(*o.mandel_q - *st.value.mandel_q));
                        if (dev > verify_tol) failed = true;
                        row.insert(row.end(), {o.mean_n, o.variance, cli::opt_cell(o.mandel_q), dev});
                    }
                }
                rows.push_back(std::move(row));
            } catch (const DegenerateState&) {
                rows.push_back(blank_row(jt, n, width));
            }
        }
        return rows;
    });
    flatten_into(out.table, std::move(blocks));
    if (failed) {
        out.numeric_failure = true;
        out.messages.push_back("closed form and oracle disagree beyond 1e-8");
    }
    return out;
}

Outcome cmd_squeeze(const RunConfig& c) {
    Outcome out;
    out.table.columns = {"jt", "n", "source", "theta_min", "v_min", "theta_max", "v_max", "squeezed",
                         "isotropic", "v_min_4dp", "v_max_4dp"};
    if (c.verify) {
        for (const char* k : {"v_min_oracle", "v_max_oracle", "max_abs_dev"}) out.table.columns.emplace_back(k);
    }
    const std::size_t width = out.table.columns.size();
    std::atomic<bool> failed{false};
    auto blocks = per_time(c, [&](Engine& eng, std::size_t ti) {
        std::vector<std::vector<Cell>> rows;
        const double jt = c.t_grid[ti];
        for (int n : c.n_list) {
            try {
                const auto sq = eng.squeeze(n);
                const SqueezeReport& s = sq.value;
                std::vector<Cell> row{jt, static_cast<long long>(n), src(sq.source), s.theta_min, s.v_min,
                                      s.theta_max, s.v_max, s.squeezed, s.isotropic, cli::round4(s.v_min),
                                      cli::round4(s.v_max)};
                if (c.verify) {
                    const SqueezeReport o = oracle::fock_squeeze(eng.oracle_vector(n));
                    const double dev = std::max(std::fabs(o.v_min - s.v_min), std::fabs(o.v_max - s.v_max));
                    if (dev > verify_tol) failed = true;
                    row.insert(row.end(), {o.v_min, o.v_max, dev});
                }
                rows.push_back(std::move(row));
            } catch (const DegenerateState&) {
                rows.push_back(blank_row(jt, n, width));
            }
        }
        return rows;
    });
    flatten_into(out.table, std::move(blocks));
    if (failed) {
        out.numeric_failure = true;
        out.messages.push_back("closed form and oracle disagree beyond 1e-8");
    }
    return out;
}

std::vector<std::string> negativity_columns(bool verify) {
    std::vector<std::string> cols{"delta_w", "negative_volume", "abs_integral", "integral", "est_error",
                                  "truncation_radius", "converged", "delta_w_4dp"};
    if (verify) {
        cols.emplace_back("delta_w_oracle");
        cols.emplace_back("abs_dev");
    }
    return cols;
}

// Appends negativity cells; returns false on non-convergence or verify mismatch.
bool negativity_cells(const RunConfig& c, Engine& eng, int n, std::vector<Cell>& row, std::string& note) {
    NegativityOptions no;
    no.tol = c.tol;
    no.throw_on_failure = false;
    const auto r = eng.negativity(n, no);
    const NegativityResult& v = r.value;
    row.insert(row.end(), {v.delta_w, v.negative_volume, v.abs_integral, v.integral, v.est_error,
                           v.truncation_radius, v.converged, cli::round4(v.delta_w)});
    bool ok = v.converged;
    if (!ok) note = "quadrature did not converge";
    if (c.verify) {
        const auto fv = eng.oracle_vector(n);
        const NegativityResult o =
            negativity_of([&fv](complex a) { return oracle::fock_wigner(fv, a); }, eng.coeffs(), n, no);
        const double dev = std::fabs(o.delta_w - v.delta_w);
        row.insert(row.end(), {o.delta_w, dev});
        if (!o.converged || dev > 2.0 * c.tol) {
            ok = false;
            note = "closed-form and oracle negativity disagree";
        }
    }
    return ok;
}

Outcome cmd_negativity(const RunConfig& c) {
    Outcome out;
    out.table.columns = {"jt", "n", "source"};
    for (auto& k : negativity_columns(c.verify)) out.table.columns.push_back(k);
    const std::size_t width = out.table.columns.size();
    std::mutex mu;
    auto blocks = per_time(c, [&](Engine& eng, std::size_t ti) {
        std::vector<std::vector<Cell>> rows;
        const double jt = c.t_grid[ti];
        for (int n : c.n_list) {
            try {
                std::vector<Cell> row{jt, static_cast<long long>(n), src(eng.route(n))};
                std::string note;
                if (!negativity_cells(c, eng, n, row, note)) {
                    std::lock_guard lock(mu);
                    out.numeric_failure = true;
                    out.messages.push_back(note + " at jt=" + detail::format_double(jt) + " n=" + std::to_string(n));
                }
                rows.push_back(std::move(row));
            } catch (const DegenerateState&) {
                rows.push_back(blank_row(jt, n, width));
            }
        }
        return rows;
    });
    flatten_into(out.table, std::move(blocks));
    return out;
}

Outcome cmd_wigner(const RunConfig& c) {
    Outcome out;
    const fs::path dir = c.out.empty() ? fs::path("wigner_grids") : fs::path(c.out);
    fs::create_directories(dir);
    out.table.columns = {"jt", "n", "source", "file", "grid_integral", "min_w", "max_w"};
    if (c.negativity) {
        for (auto& k : negativity_columns(c.verify)) out.table.columns.push_back(k);
    }
    const std::size_t width = out.table.columns.size();
    std::mutex mu;
    auto blocks = per_time(c, [&](Engine& eng, std::size_t ti) {
        std::vector<std::vector<Cell>> rows;
        const double jt = c.t_grid[ti];
        for (int n : c.n_list) {
            try {
                const auto g = eng.wigner_grid(n, c.bounds, c.nx, c.ny);
                const std::string name = "wigner_n" + std::to_string(n) + "_t" + std::to_string(ti) + ".csv";
                {
                    std::ofstream f(dir / name);
                    write_grid_csv(f, g.value);
                    if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
                }
                const auto [lo, hi] = std::minmax_element(g.value.values.begin(), g.value.values.end());
                std::vector<Cell> row{jt, static_cast<long long>(n), src(g.source), (dir / name).string(),
                                      grid_integral(g.value), *lo, *hi};
                if (c.negativity) {
                    std::string note;
                    if (!negativity_cells(c, eng, n, row, note)) {
                        std::lock_guard lock(mu);
                        out.numeric_failure = true;
                        out.messages.push_back(note + " at jt=" + detail::format_double(jt) + " n=" + std::to_string(n));
                    }
                }
                rows.push_back(std::move(row));
            } catch (const DegenerateState&) {
                rows.push_back(blank_row(jt, n, width));
            }
        }
        return rows;
    });
    flatten_into(out.table, std::move(blocks));
    return out;
}

Outcome cmd_hs(const RunConfig& c) {
    Outcome out;
    out.table.columns = {"jt", "n_a", "n_b", "d_hs", "d_hs_4dp", "oracle_n_max"};
    if (c.verify) {
        for (const char* k : {"d_hs_phase_space", "phase_space_error", "abs_dev"}) out.table.columns.emplace_back(k);
    }
    std::mutex mu;
    auto blocks = per_time(c, [&](Engine& eng, std::size_t ti) {
        std::vector<std::vector<Cell>> rows;
        const double jt = c.t_grid[ti];
        for (const auto& [a, b] : c.pairs) {
            std::vector<Cell> row{jt, static_cast<long long>(a), static_cast<long long>(b)};
            try {
                const double d = eng.hs_distance(a, b);
                row.insert(row.end(), {d, cli::round4(d), static_cast<long long>(eng.n_max())});
                if (c.verify) {
                    const auto wa = eng.wigner(a).value;
                    const auto wb = eng.wigner(b).value;
                    const auto [dp, err] = hs_phase_space(wa, wb, eng.coeffs(), std::max(a, b), 1e-7);
                    const double dev = std::fabs(dp - d);
                    row.insert(row.end(), {dp, err, dev});
                    if (dev > 1e-4) {
                        std::lock_guard lock(mu);
                        out.numeric_failure = true;
                        out.messages.push_back("HS routes disagree at jt=" + detail::format_double(jt));
                    }
                }
            } catch (const DegenerateState&) {
                row.resize(out.table.columns.size());
            }
            rows.push_back(std::move(row));
        }
        return rows;
    });
    flatten_into(out.table, std::move(blocks));
    return out;
}

Outcome cmd_sweep(const RunConfig& base, bool j_given) {
    Outcome out;
    out.table.columns = {"J", "Delta", "jt", "n", "source", "probability", "mean_n", "variance", "mandel_q",
                         "theta_min", "v_min", "v_max", "squeezed"};
    if (base.negativity) {
        for (auto& k : negativity_columns(base.verify)) out.table.columns.push_back(k);
    }
    const std::vector<double> js = j_given ? std::vector<double>{base.params.J} : base.j_list;
    for (double j : js) {
        RunConfig c = base;
        c.params.J = j;
        const ValidityReport rep = validate(c.params);
        if (!rep.valid) throw InvalidParams("J = " + detail::format_double(j) + ": " + rep.message);
        const std::size_t width = out.table.columns.size();
        std::mutex mu;
        auto blocks = per_time(c, [&](Engine& eng, std::size_t ti) {
            std::vector<std::vector<Cell>> rows;
            const double jt = c.t_grid[ti];
            for (int n : c.n_list) {
                try {
                    const auto st = eng.stats(n);
                    const auto sq = eng.squeeze(n);
                    std::vector<Cell> row{j, c.params.Delta, jt, static_cast<long long>(n), src(st.source),
                                          eng.probability(n).value, st.value.mean_n, st.value.variance,
                                          cli::opt_cell(st.value.mandel_q), sq.value.theta_min, sq.value.v_min,
                                          sq.value.v_max, sq.value.squeezed};
                    if (c.negativity) {
                        std::string note;
                        if (!negativity_cells(c, eng, n, row, note)) {
                            std::lock_guard lock(mu);
                            out.numeric_failure = true;
                            out.messages.push_back(note);
                        }
                    }
                    rows.push_back(std::move(row));
                } catch (const DegenerateState&) {
                    std::vector<Cell> row{j, c.params.Delta, jt, static_cast<long long>(n), std::string("negligible")};
                    row.resize(width);
                    rows.push_back(std::move(row));
                }
            }
            return rows;
        });
        flatten_into(out.table, std::move(blocks));
    }
    return out;
}

Outcome cmd_validate(const RunConfig& c) {
    Outcome out;
    out.table.columns = {"status", "check", "detail"};
    ValidationOptions vo;
    vo.engine = engine_options(c);
    const auto checks = run_validation(c.params, c.n_list, c.t_grid, vo);
    int failed = 0;
    for (const auto& ch : checks) {
        const std::string status = ch.skipped ? "SKIP" : (ch.pass ? "PASS" : "FAIL");
        if (!ch.pass) ++failed;
        out.table.add({status, ch.name, ch.detail});
    }
    if (failed > 0) {
        out.numeric_failure = true;
        out.messages.push_back(std::to_string(failed) + " of " + std::to_string(checks.size()) + " checks failed");
    }
    return out;
}

void emit(const Outcome& o, const RunConfig& c, bool to_stdout) {
    if (to_stdout || c.out.empty()) {
        cli::write_table(std::cout, o.table, c.format);
        return;
    }
    std::ofstream f(c.out);
    if (!f) throw ConfigError("cannot open output file '" + c.out + "'");
    cli::write_table(f, o.table, c.format);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Post-selected two-mode squeezed states: coefficients, statistics, Wigner data, validation"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::map<std::string, std::string> flags;
    app.add_option("--config", config_path, "key=value config file ('#' comments); flags override it");
    auto flag_opt = [&](const std::string& name, const std::string& key, const std::string& help) {
        return app.add_option_function<std::string>(
            name, [&flags, key](const std::string& v) { flags[key] = v; }, help);
    };
    flag_opt("--j", "J", "hopping rate J");
    flag_opt("--delta", "Delta", "detuning Delta");
    flag_opt("--r", "r", "squeeze magnitude r");
    flag_opt("--phi", "phi", "squeeze phase [rad]; 'pi' expressions allowed");
    flag_opt("--n", "n", "outcomes, e.g. 5,6,7,8 or 5-8");
    flag_opt("--t-grid", "t_grid", "scaled times Jhat*t as start:stop:count, e.g. 0:pi:33");
    flag_opt("--tol", "tol", "quadrature tolerance (>= 1e-6, default 1e-4)");
    flag_opt("--nmax", "nmax",
             "oracle Schmidt cutoff; default ceil(ln tol/ln tanh^2 r) + 2 n + 10 with tol = oracle-tol");
    flag_opt("--oracle-tol", "oracle_tol", "oracle truncation tolerance (default 1e-14)");
    flag_opt("--format", "format", "csv or json");
    flag_opt("--out", "out", "output file (directory of grid files for `wigner`)");
    flag_opt("--preset", "preset", "n presets: reference (5-8) or low-n (0-3)");
    flag_opt("--pairs", "pairs", "HS pairs, e.g. 5:7,6:8,6:7");
    flag_opt("--j-list", "j_list", "hopping values for `sweep`, e.g. 0.2,1.3");
    flag_opt("--bounds", "bounds", "Wigner grid re_min:re_max:im_min:im_max");
    flag_opt("--nx", "nx", "Wigner grid points along Re(alpha)");
    flag_opt("--ny", "ny", "Wigner grid points along Im(alpha)");
    bool verify = false;
    bool oracle_only = false;
    bool negativity_flag = false;
    app.add_flag("--verify", verify, "also compute the independent route and compare");
    app.add_flag("--oracle-only", oracle_only, "answer everything from the truncated Fock oracle");
    app.add_flag("--negativity", negativity_flag, "`wigner`/`sweep`: append Wigner negativity columns");
    std::string dump_dir;

    auto* coeffs = app.add_subcommand("coeffs", "closed-form state coefficients per time");
    auto* stats = app.add_subcommand("stats", "photon statistics per (n, t)");
    stats->add_option("--dump-fock", dump_dir, "directory for oracle FockVector JSON dumps");
    auto* mandel = app.add_subcommand("mandel", "Mandel Q per (n, t)");
    auto* squeeze = app.add_subcommand("squeeze", "quadrature squeezing extremes per (n, t)");
    auto* wigner = app.add_subcommand("wigner", "Wigner grid files per (n, t)");
    auto* negativity = app.add_subcommand("negativity", "Wigner negativity per (n, t)");
    auto* hs = app.add_subcommand("hs", "Hilbert-Schmidt distances per pair and t");
    auto* validate_cmd = app.add_subcommand("validate", "run the invariant battery");
    auto* sweep = app.add_subcommand("sweep", "statistics and squeezing over J, t and n");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_input;
    }

    RunConfig cfg;
    try {
        if (!config_path.empty()) load_config_file(cfg, config_path);
        // presets first so an explicit --n still wins
        if (auto it = flags.find("preset"); it != flags.end()) apply_setting(cfg, it->first, it->second);
        for (const auto& [k, v] : flags) {
            if (k != "preset") apply_setting(cfg, k, v);
        }
        if (verify) cfg.verify = true;
        if (oracle_only) cfg.oracle_only = true;
        if (negativity_flag) cfg.negativity = true;
        finalize(cfg);
        if (!dump_dir.empty()) fs::create_directories(dump_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_input;
    }

    const ValidityReport rep = validate(cfg.params);
    if (!rep.valid && !sweep->parsed()) {
        std::cerr << "invalid parameters: " << rep.message << '\n';
        if (validate_cmd->parsed()) std::cout << "FAIL,parameters," << rep.message << '\n';
        return exit_input;
    }

    try {
        Outcome o;
        bool to_stdout = false;
        if (coeffs->parsed()) o = cmd_coeffs(cfg);
        else if (stats->parsed()) o = cmd_stats(cfg, false, dump_dir);
        else if (mandel->parsed()) o = cmd_stats(cfg, true, "");
        else if (squeeze->parsed()) o = cmd_squeeze(cfg);
        else if (negativity->parsed()) o = cmd_negativity(cfg);
        else if (hs->parsed()) o = cmd_hs(cfg);
        else if (validate_cmd->parsed()) o = cmd_validate(cfg);
        else if (sweep->parsed()) o = cmd_sweep(cfg, flags.count("J") > 0);
        else if (wigner->parsed()) {
            o = cmd_wigner(cfg);
            to_stdout = true;
        }
        emit(o, cfg, to_stdout);
        for (const auto& m : o.messages) std::cerr << "error: " << m << '\n';
        return o.numeric_failure ? exit_numeric : exit_ok;
    } catch (const oracle::TruncationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_input;
    } catch (const InvalidParams& e) {
        std::cerr << "invalid parameters: " << e.what() << '\n';
        return exit_input;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_input;
    } catch (const std::exception& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return exit_numeric;
    }
}
