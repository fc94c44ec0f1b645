#include "psas/quadrature.hpp"

#include <cmath>

namespace psas {

namespace {

Complex simpson_recurse(const std::function<Complex(double)>& f, double a, double b,
                        Complex fa, Complex fm, Complex fb, Complex whole, double tol,
                        int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const Complex flm = f(lm);
    const Complex frm = f(rm);
    const Complex left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const Complex right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const Complex delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson_recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

Complex adaptive_simpson(const std::function<Complex(double)>& f, double a, double b,
                         double abs_tol, int max_depth) {
    if (a == b) return {};
    const Complex fa = f(a);
    const Complex fb = f(b);
    const double m = 0.5 * (a + b);
    const Complex fm = f(m);
    const Complex whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_recurse(f, a, b, fa, fm, fb, whole, std::max(abs_tol, 1e-300), max_depth);
}

namespace {

// Integral over [a, b] of the cubic interpolating four samples. Works in
// stencil-local coordinates: evaluating the quartic primitive at absolute
// grid positions cancels catastrophically on fine grids.
template <class T>
T cubic_segment(const double* x_abs, const T* f, double a_abs, double b_abs) {
    const double origin = x_abs[1];
    double x[4];
    for (int j = 0; j < 4; ++j) x[j] = x_abs[j] - origin;
    const double a = a_abs - origin;
    const double b = b_abs - origin;
    auto basis = [&](int i) {
        double xo[3];
        int m = 0;
        for (int j = 0; j < 4; ++j)
            if (j != i) xo[m++] = x[j];
        const double den = (x[i] - xo[0]) * (x[i] - xo[1]) * (x[i] - xo[2]);
        const double s1 = xo[0] + xo[1] + xo[2];
        const double s2 = xo[0] * xo[1] + xo[0] * xo[2] + xo[1] * xo[2];
        const double s3 = xo[0] * xo[1] * xo[2];
        auto prim = [&](double v) {
            return v * v * v * v / 4.0 - s1 * v * v * v / 3.0 + s2 * v * v / 2.0 - s3 * v;
        };
        return (prim(b) - prim(a)) / den;
    };
    return f[0] * basis(0) + f[1] * basis(1) + f[2] * basis(2) + f[3] * basis(3);
}

template <class T>
std::vector<T> cumulative_impl(std::span<const double> t, std::span<const T> f) {
    if (t.size() != f.size()) throw ConfigError("cumulative_integral: size mismatch");
    std::vector<T> out(t.size(), T{});
    if (t.size() < 2) return out;
    if (t.size() == 2) {
        out[1] = 0.5 * (t[1] - t[0]) * (f[0] + f[1]);
        return out;
    }
    if (t.size() == 3) {
        // quadratic through all three points, in local coordinates
        const double origin = t[1];
        const double x0 = t[0] - origin, x1 = 0.0, x2 = t[2] - origin;
        auto quad = [&](double a_abs, double b_abs) {
            const double a = a_abs - origin, b = b_abs - origin;
            auto basis = [&](double xi, double xj, double xk) {
                const double den = (xi - xj) * (xi - xk);
                auto prim = [&](double v) {
                    return v * v * v / 3.0 - 0.5 * (xj + xk) * v * v + xj * xk * v;
                };
                return (prim(b) - prim(a)) / den;
            };
            return f[0] * basis(x0, x1, x2) + f[1] * basis(x1, x0, x2) +
                   f[2] * basis(x2, x0, x1);
        };
        out[1] = quad(t[0], t[1]);
        out[2] = out[1] + quad(t[1], t[2]);
        return out;
    }
    const std::size_t n = t.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
        // four-point stencil starting at i-1, clamped to the grid
        const std::size_t lo = i == 0 ? 0 : (i + 2 >= n ? n - 4 : i - 1);
        out[i + 1] = out[i] + cubic_segment(&t[lo], &f[lo], t[i], t[i + 1]);
    }
    return out;
}

}  // namespace

std::vector<double> cumulative_integral(std::span<const double> t, std::span<const double> f) {
    return cumulative_impl(t, f);
}

std::vector<Complex> cumulative_integral(std::span<const double> t, std::span<const Complex> f) {
    return cumulative_impl(t, f);
}

}  // namespace psas
