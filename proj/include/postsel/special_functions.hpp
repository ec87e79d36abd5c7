#ifndef POSTSEL_SPECIAL_FUNCTIONS_HPP
#define POSTSEL_SPECIAL_FUNCTIONS_HPP

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace postsel::special {

/// Largest polynomial degree accepted by default. Hermite magnitudes grow
/// like n!, so requests beyond the cap are rejected instead of overflowing.
inline constexpr int default_degree_cap = 32;

/// Cap used by internal series that work with Taylor coefficients P_n/n!
/// (those stay bounded, only n! itself would overflow past 170).
inline constexpr int series_degree_cap = 170;

namespace detail {

inline void check_degree(int n, int cap, const char* who) {
    if (n < 0 || n > cap) {
        throw std::domain_error(std::string(who) + ": degree " + std::to_string(n) +
                                " outside [0, " + std::to_string(cap) + "]");
    }
}

} // namespace detail

/// Neumaier's variant of Kahan summation, accumulated in long double.
class CompensatedSum {
public:
    void add(long double x) {
        const long double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    [[nodiscard]] long double value() const { return sum_ + comp_; }

private:
    long double sum_ = 0.0L;
    long double comp_ = 0.0L;
};

/// Physicists' Hermite polynomial H_n(z) by the three-term recurrence.
template <class T>
[[nodiscard]] T hermite(int n, T z, int cap = default_degree_cap) {
    detail::check_degree(n, cap, "hermite");
    T prev{1};
    if (n == 0) return prev;
    T cur = T{2} * z;
    for (int k = 1; k < n; ++k) {
        T next = T{2} * z * cur - T(2.0 * k) * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

/// Associated Laguerre polynomial of order -1/2.
[[nodiscard]] inline double laguerre_half(int n, double x, int cap = default_degree_cap) {
    detail::check_degree(n, cap, "laguerre_half");
    constexpr double alpha = -0.5;
    double prev = 1.0;
    if (n == 0) return prev;
    double cur = 1.0 + alpha - x;
    for (int k = 1; k < n; ++k) {
        const double next = ((2.0 * k + 1.0 + alpha - x) * cur - (k + alpha) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

/// Scaled Laguerre values s^k L_k^{(-1/2)}(y/s) for k = 0..n, written into out.
///
/// The scaled form is a polynomial in (s, y) and stays finite when s -> 0,
/// which is what the Wigner closed form needs near x1 = 0.
template <class OutIt>
void scaled_laguerre_half(int n, double s, double y, OutIt out) {
    constexpr double alpha = -0.5;
    double prev = 1.0;
    *out++ = prev;
    if (n == 0) return;
    double cur = (1.0 + alpha) * s - y;
    *out++ = cur;
    for (int k = 1; k < n; ++k) {
        const double next =
            ((2.0 * k + 1.0 + alpha) * s * cur - y * cur - (k + alpha) * s * s * prev) / (k + 1.0);
        *out++ = next;
        prev = cur;
        cur = next;
    }
}

/// Rising factorial (a)_n.
[[nodiscard]] inline double pochhammer(double a, int n) {
    if (n < 0) throw std::domain_error("pochhammer: negative n");
    double p = 1.0;
    for (int k = 0; k < n; ++k) p *= a + k;
    return p;
}

/// Arguments of the bivariate product polynomial P_n(a1, a2; z1, z2).
struct ProductPolyArgs {
    double a1 = 0.5;
    double a2 = 0.5;
    double z1 = 0.0;
    double z2 = 0.0;
};

/// Taylor coefficient P_n/n! of (1 - z1 t)^{-a1} (1 - z2 t)^{-a2}.
///
/// Terms (a1)_k/k! * (a2)_{n-k}/(n-k)! * z1^k z2^{n-k} are built by ratio
/// updates so nothing overflows for n up to series_degree_cap. Returns 0 for
/// negative n so callers can write P_{n-1}, P_{n-2} without special cases.
[[nodiscard]] inline double product_poly_coeff(int n, const ProductPolyArgs& p,
                                               int cap = series_degree_cap) {
    if (n < 0) return 0.0;
    detail::check_degree(n, cap, "product_poly_coeff");
    // u_k = (a1)_k z1^k / k!, v_j = (a2)_j z2^j / j!
    std::array<long double, series_degree_cap + 1> u{};
    std::array<long double, series_degree_cap + 1> v{};
    u[0] = 1.0L;
    v[0] = 1.0L;
    for (int k = 1; k <= n; ++k) {
        u[k] = u[k - 1] * (static_cast<long double>(p.a1) + k - 1) * p.z1 / k;
        v[k] = v[k - 1] * (static_cast<long double>(p.a2) + k - 1) * p.z2 / k;
    }
    CompensatedSum acc;
    for (int k = 0; k <= n; ++k) acc.add(u[k] * v[n - k]);
    return static_cast<double>(acc.value());
}

/// P_n(a1, a2; z1, z2) = sum_k C(n,k) (a1)_k (a2)_{n-k} z1^k z2^{n-k}.
[[nodiscard]] inline double product_poly(int n, const ProductPolyArgs& p,
                                         int cap = default_degree_cap) {
    detail::check_degree(n, cap, "product_poly");
    long double fact = 1.0L;
    for (int k = 2; k <= n; ++k) fact *= k;
    return static_cast<double>(fact * product_poly_coeff(n, p, cap));
}

[[nodiscard]] inline double factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

} // namespace postsel::special

#endif // POSTSEL_SPECIAL_FUNCTIONS_HPP
