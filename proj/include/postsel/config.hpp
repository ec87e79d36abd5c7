#ifndef POSTSEL_CONFIG_HPP
#define POSTSEL_CONFIG_HPP

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "postsel/dynamics.hpp"
#include "postsel/special_functions.hpp"
#include "postsel/wigner.hpp"

namespace postsel {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class OutputFormat { csv, json };

/// Everything a CLI run needs; defaults reproduce the reference setting.
struct RunConfig {
    ModelParams params;
    std::vector<int> n_list{5, 6, 7, 8};
    std::string t_grid_spec = "0:pi:33";
    std::vector<double> t_grid;
    std::vector<double> j_list{0.2, 1.3}; ///< hopping values visited by `sweep`
    std::vector<std::pair<int, int>> pairs{{5, 7}, {6, 8}, {6, 7}, {5, 5}};
    GridBounds bounds{-4.0, 4.0, -4.0, 4.0};
    int nx = 101;
    int ny = 101;
    double tol = 1e-4;         ///< quadrature tolerance
    double oracle_tol = 1e-14; ///< Schmidt-tail tolerance of the oracle
    int n_max = 0;             ///< oracle cutoff override; 0 = automatic
    OutputFormat format = OutputFormat::csv;
    std::string out;           ///< empty = stdout (directory for `wigner` grids)
    bool verify = false;
    bool oracle_only = false;
    bool negativity = false;   ///< `wigner`: append negativity summary
};

namespace cfg {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline double parse_number(std::string_view s) {
    const std::string t = trim(s);
    double v = 0.0;
    const char* first = t.data();
    if (!t.empty() && t.front() == '+') ++first;
    const auto res = std::from_chars(first, t.data() + t.size(), v);
    if (t.empty() || res.ec != std::errc{} || res.ptr != t.data() + t.size()) {
        throw ConfigError("not a number: '" + t + "'");
    }
    return v;
}

inline int parse_int(std::string_view s) {
    const std::string t = trim(s);
    int v = 0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || res.ec != std::errc{} || res.ptr != t.data() + t.size()) {
        throw ConfigError("not an integer: '" + t + "'");
    }
    return v;
}

/// Real number with optional pi factors: "0.25", "pi", "-pi/2", "3*pi/4", "2pi".
inline double parse_real(std::string_view s) {
    std::string t = trim(s);
    if (t.empty()) throw ConfigError("empty number");
    double sign = 1.0;
    if (t.front() == '-') {
        sign = -1.0;
        t.erase(0, 1);
    }
    const auto parts = split(t, '/');
    if (parts.size() > 2) throw ConfigError("bad expression: '" + std::string(s) + "'");
    double value = 1.0;
    for (const auto& f : split(parts[0], '*')) {
        if (f.size() >= 2 && f.compare(f.size() - 2, 2, "pi") == 0) {
            const std::string coef = f.substr(0, f.size() - 2);
            value *= (coef.empty() ? 1.0 : parse_number(coef)) * std::numbers::pi;
        } else {
            value *= parse_number(f);
        }
    }
    if (parts.size() == 2) {
        const double d = parse_number(parts[1]);
        if (d == 0.0) throw ConfigError("division by zero in '" + std::string(s) + "'");
        value /= d;
    }
    return sign * value;
}

/// "start:stop:count" (inclusive linspace) or a single value.
inline std::vector<double> parse_t_grid(std::string_view spec) {
    const auto parts = split(spec, ':');
    if (parts.size() == 1) return {parse_real(parts[0])};
    if (parts.size() != 3) throw ConfigError("t-grid must be start:stop:count, got '" + std::string(spec) + "'");
    const double a = parse_real(parts[0]);
    const double b = parse_real(parts[1]);
    const int count = parse_int(parts[2]);
    if (count < 1) throw ConfigError("t-grid count must be >= 1");
    if (count == 1) return {a};
    std::vector<double> out(count);
    for (int i = 0; i < count; ++i) out[i] = a + (b - a) * i / (count - 1);
    out.back() = b;
    return out;
}

/// "5,6,7,8", "5-8" or a mix such as "0-3,6".
inline std::vector<int> parse_n_list(std::string_view spec) {
    std::vector<int> out;
    for (const auto& item : split(spec, ',')) {
        const auto dash = item.find('-', 1);
        if (dash != std::string::npos) {
            const int a = parse_int(item.substr(0, dash));
            const int b = parse_int(item.substr(dash + 1));
            if (b < a) throw ConfigError("bad range '" + item + "'");
            for (int k = a; k <= b; ++k) out.push_back(k);
        } else {
            out.push_back(parse_int(item));
        }
    }
    return out;
}

inline std::vector<double> parse_real_list(std::string_view spec) {
    std::vector<double> out;
    for (const auto& item : split(spec, ',')) out.push_back(parse_real(item));
    return out;
}

/// "5:7,6:8"
inline std::vector<std::pair<int, int>> parse_pairs(std::string_view spec) {
    std::vector<std::pair<int, int>> out;
    for (const auto& item : split(spec, ',')) {
        const auto ab = split(item, ':');
        if (ab.size() != 2) throw ConfigError("pair must be a:b, got '" + item + "'");
        out.emplace_back(parse_int(ab[0]), parse_int(ab[1]));
    }
    return out;
}

/// "re_min:re_max:im_min:im_max"
inline GridBounds parse_bounds(std::string_view spec) {
    const auto p = split(spec, ':');
    if (p.size() != 4) throw ConfigError("bounds must be re_min:re_max:im_min:im_max");
    GridBounds b{parse_real(p[0]), parse_real(p[1]), parse_real(p[2]), parse_real(p[3])};
    if (!(b.re_min < b.re_max && b.im_min < b.im_max)) throw ConfigError("bounds must be increasing");
    return b;
}

inline bool parse_bool(std::string_view s) {
    std::string t = trim(s);
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char ch) { return std::tolower(ch); });
    if (t == "1" || t == "true" || t == "yes" || t == "on") return true;
    if (t == "0" || t == "false" || t == "no" || t == "off") return false;
    throw ConfigError("not a boolean: '" + t + "'");
}

inline std::string normalize_key(std::string_view k) {
    std::string t = trim(k);
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char ch) { return ch == '-' ? '_' : std::tolower(ch); });
    return t;
}

} // namespace cfg

/// Named n sets: "reference" (5..8) and "low-n" (0..3).
inline void apply_preset(RunConfig& c, std::string_view name) {
    const std::string key = cfg::normalize_key(name);
    if (key == "reference" || key == "default") {
        c.n_list = {5, 6, 7, 8};
    } else if (key == "low_n") {
        c.n_list = {0, 1, 2, 3};
        c.pairs = {{0, 2}, {1, 3}, {0, 1}, {2, 2}};
    } else {
        throw ConfigError("unknown preset '" + std::string(name) + "'");
    }
}

/// Applies one key=value setting. Keys are case-insensitive, '-' == '_'.
inline void apply_setting(RunConfig& c, std::string_view key, std::string_view value) {
    const std::string k = cfg::normalize_key(key);
    if (k == "j") c.params.J = cfg::parse_real(value);
    else if (k == "delta") c.params.Delta = cfg::parse_real(value);
    else if (k == "r") c.params.r = cfg::parse_real(value);
    else if (k == "phi") c.params.phi = cfg::parse_real(value);
    else if (k == "n") c.n_list = cfg::parse_n_list(value);
    else if (k == "t_grid") c.t_grid_spec = cfg::trim(value);
    else if (k == "j_list") c.j_list = cfg::parse_real_list(value);
    else if (k == "pairs") c.pairs = cfg::parse_pairs(value);
    else if (k == "bounds") c.bounds = cfg::parse_bounds(value);
    else if (k == "nx") c.nx = cfg::parse_int(value);
    else if (k == "ny") c.ny = cfg::parse_int(value);
    else if (k == "tol") c.tol = cfg::parse_real(value);
    else if (k == "oracle_tol") c.oracle_tol = cfg::parse_real(value);
    else if (k == "nmax" || k == "n_max") c.n_max = cfg::parse_int(value);
    else if (k == "format") {
        const std::string f = cfg::normalize_key(value);
        if (f == "csv") c.format = OutputFormat::csv;
        else if (f == "json") c.format = OutputFormat::json;
        else throw ConfigError("format must be csv or json");
    } else if (k == "out") c.out = cfg::trim(value);
    else if (k == "verify") c.verify = cfg::parse_bool(value);
    else if (k == "oracle_only") c.oracle_only = cfg::parse_bool(value);
    else if (k == "negativity") c.negativity = cfg::parse_bool(value);
    else if (k == "preset") apply_preset(c, value);
    else throw ConfigError("unknown key '" + std::string(key) + "'");
}

/// Flat key = value text; '#' starts a comment, blank lines ignored.
inline void load_config_text(RunConfig& c, std::string_view text, const std::string& origin = "config") {
    int line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = text.find('\n', start);
        std::string line(text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
        ++line_no;
        start = end == std::string_view::npos ? text.size() + 1 : end + 1;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = cfg::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected key = value");
        }
        try {
            apply_setting(c, line.substr(0, eq), line.substr(eq + 1));
        } catch (const ConfigError& e) {
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
}

inline void load_config_file(RunConfig& c, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    load_config_text(c, text, path);
}

/// Expands the time grid and checks ranges; throws ConfigError.
inline void finalize(RunConfig& c) {
    c.t_grid = cfg::parse_t_grid(c.t_grid_spec);
    if (c.t_grid.empty()) throw ConfigError("t-grid is empty");
    for (double t : c.t_grid) {
        if (!std::isfinite(t) || t < 0.0) throw ConfigError("t-grid values must be finite and >= 0");
    }
    if (c.n_list.empty()) throw ConfigError("n list is empty");
    for (int n : c.n_list) {
        if (n < 0 || n > special::default_degree_cap) {
            throw ConfigError("n = " + std::to_string(n) + " outside 0.." +
                              std::to_string(special::default_degree_cap));
        }
    }
    for (const auto& [a, b] : c.pairs) {
        if (a < 0 || b < 0 || a > special::default_degree_cap || b > special::default_degree_cap) {
            throw ConfigError("pair entries must be in 0.." + std::to_string(special::default_degree_cap));
        }
    }
    if (!(c.tol > 0.0) || !(c.oracle_tol > 0.0)) throw ConfigError("tolerances must be > 0");
    if (c.tol < 1e-6) throw ConfigError("tol must be >= 1e-6");
    if (c.oracle_tol >= 1.0) throw ConfigError("oracle_tol must be < 1");
    if (c.n_max < 0) throw ConfigError("nmax must be >= 0");
    if (c.nx < 2 || c.ny < 2) throw ConfigError("nx, ny must be >= 2");
    if (c.j_list.empty()) throw ConfigError("j_list is empty");
}

} // namespace postsel

#endif // POSTSEL_CONFIG_HPP
