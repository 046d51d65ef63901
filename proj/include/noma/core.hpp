#pragma once

// Per-realization mathematics of the three uplink NOMA schemes: the primary
// user's interference threshold, secondary user classification, achievable
// rate branches and served-user selection. Everything here is a pure
// function of its arguments.

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "noma/error.hpp"

namespace noma {

/// Transmit powers are linear with the noise power normalized to one.
/// Target rates are in bits per channel use.
struct SystemParams {
    double p0 = 1.0;     ///< primary transmit power
    double ps = 1.0;     ///< maximum secondary transmit power
    double r0 = 1.0;     ///< primary target rate
    double rs = 1.0;     ///< secondary target rate
    std::size_t m = 1;   ///< number of secondary users

    double eps0() const { return std::exp2(r0) - 1.0; }
    double epss() const { return std::exp2(rs) - 1.0; }
    double alpha0() const { return eps0() / p0; }
    double alphas() const { return epss() / ps; }

    void validate() const {
        auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
        if (!positive(p0)) throw ConfigError("p0", "must be positive and finite");
        if (!positive(ps)) throw ConfigError("ps", "must be positive and finite");
        if (!positive(r0)) throw ConfigError("r0", "must be positive and finite");
        if (!positive(rs)) throw ConfigError("rs", "must be positive and finite");
        if (m < 1) throw ConfigError("m", "must be at least 1");
        if (!positive(alpha0()) || !positive(alphas()))
            throw ConfigError("", "derived thresholds are not positive and finite");
    }
};

/// Primary gain |g|^2 and the secondary gains |h_m|^2 in ascending order.
struct ChannelRealization {
    double g2 = 0.0;
    std::vector<double> h2;
};

enum class UserType { TypeI, TypeII };

/// SIC stage at which the served secondary user is decoded.
enum class SicStage { First, Second };

enum class SchemeId { HsicNpa, HsicPa, FsicPa };

inline constexpr std::array<SchemeId, 3> kAllSchemes = {SchemeId::HsicNpa, SchemeId::HsicPa,
                                                        SchemeId::FsicPa};

inline constexpr std::size_t index_of(SchemeId s) { return static_cast<std::size_t>(s); }

inline constexpr std::string_view to_string(SchemeId s) {
    switch (s) {
        case SchemeId::HsicNpa: return "HSIC-NPA";
        case SchemeId::HsicPa: return "HSIC-PA";
        case SchemeId::FsicPa: return "FSIC-PA";
    }
    return "?";
}

inline constexpr std::string_view to_string(UserType t) {
    return t == UserType::TypeI ? "TypeI" : "TypeII";
}

inline constexpr std::string_view to_string(SicStage s) {
    return s == SicStage::First ? "First" : "Second";
}

/// Achievable rate of one candidate user together with how it is reached.
struct UserRate {
    double rate = 0.0;
    SicStage stage = SicStage::Second;
    double beta = 1.0;
    UserType utype = UserType::TypeI;
};

struct SchemeDecision {
    std::size_t served_index = 0;  ///< zero-based index into ChannelRealization::h2
    SicStage stage = SicStage::Second;
    double beta = 1.0;
    double rate = 0.0;
    UserType utype = UserType::TypeI;
};

/// Largest secondary received power the primary tolerates while keeping its
/// OMA outage performance.
inline double tau(const SystemParams& p, double g2) {
    const double t = p.p0 * g2 / p.eps0() - 1.0;
    return t > 0.0 ? t : 0.0;
}

inline UserType classify_with_tau(const SystemParams& p, double threshold, double h2m) {
    return p.ps * h2m <= threshold ? UserType::TypeI : UserType::TypeII;
}

inline UserType classify(const SystemParams& p, double g2, double h2m) {
    return classify_with_tau(p, tau(p, g2), h2m);
}

/// Rate branch for one user when the threshold is already known.
inline UserRate rate_with_tau(SchemeId scheme, const SystemParams& p, double g2, double threshold,
                              double h2m) {
    const double rx = p.ps * h2m;
    if (rx <= threshold) return {std::log2(1.0 + rx), SicStage::Second, 1.0, UserType::TypeI};

    // Type II. Stage one treats the primary as noise at full power; stage two
    // scales the power down so the received level sits exactly at the threshold.
    const double first = std::log2(1.0 + rx / (p.p0 * g2 + 1.0));
    const double second = std::log2(1.0 + threshold);
    // Round the factor down until the scaled power does not exceed the threshold.
    double reduced = threshold / rx;
    while (reduced > 0.0 && reduced * p.ps * h2m > threshold) reduced = std::nextafter(reduced, 0.0);
    switch (scheme) {
        case SchemeId::HsicNpa: return {first, SicStage::First, 1.0, UserType::TypeII};
        case SchemeId::FsicPa: return {second, SicStage::Second, reduced, UserType::TypeII};
        case SchemeId::HsicPa:
            if (second >= first) return {second, SicStage::Second, reduced, UserType::TypeII};
            return {first, SicStage::First, 1.0, UserType::TypeII};
    }
    return {};
}

inline UserRate rate_for_user(SchemeId scheme, const SystemParams& p, double g2, double h2m) {
    return rate_with_tau(scheme, p, g2, tau(p, g2), h2m);
}

/// Serves the user with the largest achievable rate; ties go to the
/// strongest channel (largest index).
inline SchemeDecision select_served(SchemeId scheme, const SystemParams& p, double g2,
                                    std::span<const double> h2) {
    const double threshold = tau(p, g2);
    SchemeDecision best;
    bool any = false;
    for (std::size_t i = 0; i < h2.size(); ++i) {
        const UserRate r = rate_with_tau(scheme, p, g2, threshold, h2[i]);
        if (!any || r.rate >= best.rate) {
            best = {i, r.stage, r.beta, r.rate, r.utype};
            any = true;
        }
    }
    return best;
}

inline SchemeDecision select_served(SchemeId scheme, const SystemParams& p,
                                    const ChannelRealization& ch) {
    return select_served(scheme, p, ch.g2, ch.h2);
}

/// Number of type I users. The type I set is a prefix of the sorted gains,
/// so a count k identifies the event "exactly k users are type I".
inline std::size_t classify_partition(const SystemParams& p, const ChannelRealization& ch) {
    const double threshold = tau(p, ch.g2);
    std::size_t k = 0;
    for (double h : ch.h2) {
        if (classify_with_tau(p, threshold, h) == UserType::TypeI) ++k;
    }
    return k;
}

/// True when the rate targets satisfy eps0 * epss < 1, the only regime in
/// which HSIC-NPA outage has no error floor.
inline bool floor_condition(const SystemParams& p) { return p.eps0() * p.epss() < 1.0; }

}  // namespace noma
