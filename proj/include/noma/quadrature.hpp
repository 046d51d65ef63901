#pragma once

// Globally adaptive Gauss-Kronrod (7/15) integration over a list of
// breakpoints. The interval with the largest error estimate is bisected
// until the summed estimate falls below the absolute tolerance.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "noma/error.hpp"

namespace noma {

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    std::size_t intervals = 0;
};

namespace detail {

// Abscissae of the 15-point Kronrod rule on [-1, 1]; odd entries are the
// 7-point Gauss nodes.
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gauss_kronrod(F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (std::size_t j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double sum = f(center - dx) + f(center + dx);
        kronrod += kWgk[j] * sum;
        if (j % 2 == 1) gauss += kWg[j / 2] * sum;
    }
    return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace detail

/// Integrates `f` over [breaks.front(), breaks.back()], starting with one
/// panel per breakpoint gap. Throws ToleranceNotMet once `max_intervals`
/// panels exist without reaching `tolerance`.
template <class F>
QuadratureResult integrate(F&& f, std::span<const double> breaks, double tolerance,
                           std::size_t max_intervals = 20000) {
    std::vector<detail::Panel> heap;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        if (!(breaks[i + 1] > breaks[i])) continue;
        heap.push_back(detail::gauss_kronrod(f, breaks[i], breaks[i + 1]));
    }
    std::make_heap(heap.begin(), heap.end());

    auto totals = [&heap] {
        QuadratureResult r{0.0, 0.0, heap.size()};
        for (const detail::Panel& p : heap) {
            r.value += p.value;
            r.error += p.error;
        }
        return r;
    };

    QuadratureResult result = totals();
    double running_error = result.error;
    while (result.error > tolerance) {
        if (heap.size() >= max_intervals)
            throw ToleranceNotMet("quadrature error estimate " + std::to_string(result.error) +
                                      " above tolerance " + std::to_string(tolerance),
                                  result.error);
        std::pop_heap(heap.begin(), heap.end());
        const detail::Panel worst = heap.back();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b))
            throw ToleranceNotMet("quadrature panel collapsed below machine precision",
                                  result.error);
        const detail::Panel left = detail::gauss_kronrod(f, worst.a, mid);
        const detail::Panel right = detail::gauss_kronrod(f, mid, worst.b);
        heap.back() = left;
        std::push_heap(heap.begin(), heap.end());
        heap.push_back(right);
        std::push_heap(heap.begin(), heap.end());
        running_error += left.error + right.error - worst.error;

        // The running total drifts; confirm convergence with an exact resum.
        if (running_error <= tolerance) {
            result = totals();
            running_error = result.error;
        } else {
            result.error = running_error;
        }
    }
    result.intervals = heap.size();
    return result;
}

}  // namespace noma
