#pragma once

#include <cmath>

namespace brbm {

namespace detail {

template <class F>
double simpson_step(const F& f, double a, double fa, double m, double fm, double b, double fb,
                    double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson_step(f, a, fa, lm, flm, m, fm, left, 0.5 * tol, depth - 1) +
           simpson_step(f, m, fm, rm, frm, b, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson quadrature of f over [a, b] to absolute tolerance `tol`.
///
/// The interval is pre-split into `panels` pieces so that narrow features
/// (sharp Gaussian kernels) are not missed by the first coarse estimate.
template <class F>
double adaptive_simpson(const F& f, double a, double b, double tol = 1e-10, int panels = 16,
                        int max_depth = 40) {
    if (b == a) return 0.0;
    const double h = (b - a) / panels;
    double sum = 0.0;
    for (int i = 0; i < panels; ++i) {
        const double lo = a + i * h;
        const double hi = (i + 1 == panels) ? b : lo + h;
        const double mid = 0.5 * (lo + hi);
        const double flo = f(lo), fmid = f(mid), fhi = f(hi);
        const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
        sum += detail::simpson_step(f, lo, flo, mid, fmid, hi, fhi, whole, tol / panels, max_depth);
    }
    return sum;
}

}  // namespace brbm
