#pragma once

// Semi-analytic outage probabilities. Given the primary gain x, secondary
// gains are i.i.d. Exp(1), and the best user is in outage exactly when every
// user is, so the conditional outage is q(x)^M with q the failure
// probability of a single unordered user. The overall outage is then the
// one-dimensional integral of e^{-x} q(x)^M.

#include <algorithm>
#include <cmath>
#include <vector>

#include "noma/core.hpp"
#include "noma/quadrature.hpp"

namespace noma {

struct QuadratureSpec {
    double tolerance = 1e-10;          ///< absolute, covers truncation and rule error
    std::size_t max_intervals = 20000; ///< refinement limit

    /// Truncation point X with e^{-X} = tolerance / 2.
    double upper_limit() const { return -std::log(0.5 * tolerance); }
};

namespace detail {

/// CDF of the unit-mean exponential.
inline double exp_cdf(double x) { return -std::expm1(-x); }

}  // namespace detail

/// Probability that one secondary user misses the target rate given g2.
inline double per_user_fail_prob(SchemeId scheme, const SystemParams& p, double g2) {
    const double threshold = tau(p, g2);
    const double eps_s = p.epss();
    const double alpha_s = p.alphas();
    // Type II users fail at stage one when h2 < u.
    const double u = eps_s * (p.p0 * g2 + 1.0) / p.ps;

    switch (scheme) {
        case SchemeId::FsicPa:
            return threshold >= eps_s ? detail::exp_cdf(alpha_s) : 1.0;
        case SchemeId::HsicPa:
            return threshold >= eps_s ? detail::exp_cdf(alpha_s) : detail::exp_cdf(u);
        case SchemeId::HsicNpa: {
            const double boundary = threshold / p.ps;
            const double type1 = detail::exp_cdf(std::min(alpha_s, boundary));
            const double type2 = std::max(0.0, std::exp(-boundary) - std::exp(-u));
            return type1 + type2;
        }
    }
    return 1.0;
}

/// Points where some q(x) is not smooth, restricted to (0, upper).
inline std::vector<double> outage_breakpoints(const SystemParams& p, double upper) {
    const double eps0 = p.eps0();
    const double eps_s = p.epss();
    std::vector<double> pts{0.0, p.alpha0(), std::exp2(p.rs) * p.alpha0()};
    // HSIC-NPA: the stage-one failure interval closes where u = tau / ps,
    // which exists only when eps0 * eps_s < 1.
    if (eps0 * eps_s < 1.0) pts.push_back((1.0 + eps_s) / (p.p0 * (1.0 / eps0 - eps_s)));
    pts.push_back(upper);
    std::erase_if(pts, [upper](double x) { return !(x >= 0.0 && x <= upper); });
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

inline QuadratureResult outage_quadrature(SchemeId scheme, const SystemParams& p,
                                          const QuadratureSpec& spec = {}) {
    p.validate();
    const double upper = spec.upper_limit();
    const std::vector<double> breaks = outage_breakpoints(p, upper);
    const double users = static_cast<double>(p.m);
    auto integrand = [&](double x) {
        return std::exp(-x) * std::pow(per_user_fail_prob(scheme, p, x), users);
    };
    // Half the budget goes to truncation, half to the rule.
    return integrate(integrand, breaks, 0.5 * spec.tolerance, spec.max_intervals);
}

/// High-SNR limit of HSIC-NPA outage with ps = p0 -> infinity. The limiting
/// single-user failure probability is max(0, e^{-x/eps0} - e^{-eps_s x}).
inline double npa_floor(const SystemParams& p, const QuadratureSpec& spec = {}) {
    p.validate();
    if (floor_condition(p)) return 0.0;
    const double eps0 = p.eps0();
    const double eps_s = p.epss();
    const double users = static_cast<double>(p.m);
    auto integrand = [&](double x) {
        const double q = std::max(0.0, std::exp(-x / eps0) - std::exp(-eps_s * x));
        return std::exp(-x) * std::pow(q, users);
    };
    const double breaks[] = {0.0, spec.upper_limit()};
    return integrate(integrand, breaks, 0.5 * spec.tolerance, spec.max_intervals).value;
}

}  // namespace noma
