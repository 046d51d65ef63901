#pragma once

// Monte Carlo engine. All three schemes are evaluated on the same channel
// draw in every trial, so per-trial comparisons between schemes are exact.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "noma/channel.hpp"
#include "noma/core.hpp"
#include "noma/error.hpp"

namespace noma {

struct TrialOutcome {
    std::array<SchemeDecision, 3> decision{};
    std::array<bool, 3> outage{};
    std::array<bool, 3> type2{};
    /// HSIC-PA beats HSIC-NPA on the user HSIC-PA serves; set only when that
    /// user is type II.
    std::optional<bool> better_hsic_pa;
    /// Same comparison for FSIC-PA; set only when its served user is type II.
    std::optional<bool> better_fsic_pa;
    /// HSIC-PA and FSIC-PA serve the same type II user.
    bool same_served_type2 = false;

    const SchemeDecision& operator[](SchemeId s) const { return decision[index_of(s)]; }
};

/// Evaluates one realization under every scheme.
inline TrialOutcome evaluate_trial(const SystemParams& params, const ChannelRealization& ch) {
    TrialOutcome out;
    for (SchemeId s : kAllSchemes) {
        const std::size_t i = index_of(s);
        out.decision[i] = select_served(s, params, ch);
        out.outage[i] = out.decision[i].rate < params.rs;
        out.type2[i] = out.decision[i].utype == UserType::TypeII;
    }

    // R_bar for a type II user is the stage-one rate HSIC-NPA would give it.
    auto beats_npa = [&](SchemeId s) {
        const SchemeDecision& d = out[s];
        const double npa = rate_for_user(SchemeId::HsicNpa, params, ch.g2, ch.h2[d.served_index]).rate;
        return npa < d.rate;
    };
    if (out.type2[index_of(SchemeId::HsicPa)]) out.better_hsic_pa = beats_npa(SchemeId::HsicPa);
    if (out.type2[index_of(SchemeId::FsicPa)]) out.better_fsic_pa = beats_npa(SchemeId::FsicPa);
    out.same_served_type2 = out.better_hsic_pa.has_value() && out.better_fsic_pa.has_value() &&
                            out[SchemeId::HsicPa].served_index == out[SchemeId::FsicPa].served_index;
    return out;
}

inline TrialOutcome run_trial(const SystemParams& params, SeedSpec seed) {
    return evaluate_trial(params, sample_realization(params, seed));
}

struct SchemeTally {
    std::uint64_t outage = 0;
    std::uint64_t type2 = 0;
    double rate_sum = 0.0;
    double rate_sq = 0.0;
    double beta_sum = 0.0;
    double beta_sq = 0.0;

    bool operator==(const SchemeTally&) const = default;
};

/// Streaming counters for every reported metric. Mergeable: merging two
/// accumulators equals accumulating the union of their trials.
struct MetricAccumulator {
    std::uint64_t trials = 0;
    std::array<SchemeTally, 3> scheme{};
    std::uint64_t better_hsic_pa = 0;  ///< numerator of P^better, denominator is HSIC-PA type2
    std::uint64_t better_fsic_pa = 0;  ///< numerator of P^better-hat, denominator is FSIC-PA type2
    std::uint64_t same_user_type2 = 0;
    std::uint64_t same_user_better_hsic_pa = 0;
    std::uint64_t same_user_better_fsic_pa = 0;

    const SchemeTally& operator[](SchemeId s) const { return scheme[index_of(s)]; }

    void add(const TrialOutcome& t) {
        ++trials;
        for (std::size_t i = 0; i < scheme.size(); ++i) {
            SchemeTally& s = scheme[i];
            const SchemeDecision& d = t.decision[i];
            s.outage += t.outage[i];
            s.type2 += t.type2[i];
            s.rate_sum += d.rate;
            s.rate_sq += d.rate * d.rate;
            s.beta_sum += d.beta;
            s.beta_sq += d.beta * d.beta;
        }
        better_hsic_pa += t.better_hsic_pa.value_or(false);
        better_fsic_pa += t.better_fsic_pa.value_or(false);
        if (t.same_served_type2) {
            ++same_user_type2;
            same_user_better_hsic_pa += *t.better_hsic_pa;
            same_user_better_fsic_pa += *t.better_fsic_pa;
        }
    }

    MetricAccumulator& merge(const MetricAccumulator& o) {
        trials += o.trials;
        for (std::size_t i = 0; i < scheme.size(); ++i) {
            scheme[i].outage += o.scheme[i].outage;
            scheme[i].type2 += o.scheme[i].type2;
            scheme[i].rate_sum += o.scheme[i].rate_sum;
            scheme[i].rate_sq += o.scheme[i].rate_sq;
            scheme[i].beta_sum += o.scheme[i].beta_sum;
            scheme[i].beta_sq += o.scheme[i].beta_sq;
        }
        better_hsic_pa += o.better_hsic_pa;
        better_fsic_pa += o.better_fsic_pa;
        same_user_type2 += o.same_user_type2;
        same_user_better_hsic_pa += o.same_user_better_hsic_pa;
        same_user_better_fsic_pa += o.same_user_better_fsic_pa;
        return *this;
    }

    bool operator==(const MetricAccumulator&) const = default;
};

/// Trials are grouped into fixed blocks that are summed sequentially and
/// merged in block order, which keeps floating-point sums independent of the
/// worker count.
inline constexpr std::uint64_t kBlockTrials = 4096;

inline MetricAccumulator accumulate_range(const SystemParams& params, std::uint64_t master_seed,
                                          std::uint64_t first, std::uint64_t last) {
    MetricAccumulator acc;
    ChannelRealization ch;
    for (std::uint64_t t = first; t < last; ++t) {
        sample_realization(params, {master_seed, t}, ch);
        acc.add(evaluate_trial(params, ch));
    }
    return acc;
}

inline MetricAccumulator run_batch(const SystemParams& params, std::uint64_t master_seed,
                                   std::uint64_t trials, unsigned workers = 1) {
    params.validate();
    if (trials < 1) throw ConfigError("trials", "must be at least 1");
    const std::uint64_t blocks = (trials + kBlockTrials - 1) / kBlockTrials;
    std::vector<MetricAccumulator> partial(blocks);

    std::atomic<std::uint64_t> next{0};
    auto work = [&] {
        for (std::uint64_t b = next++; b < blocks; b = next++) {
            const std::uint64_t first = b * kBlockTrials;
            partial[b] = accumulate_range(params, master_seed, first,
                                          std::min(trials, first + kBlockTrials));
        }
    };
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(blocks)));
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }

    MetricAccumulator total;
    for (const MetricAccumulator& p : partial) total.merge(p);
    return total;
}

enum class Metric { Outage, ErgodicRate, TypeIIProb, PBetter, PHatBetter, PHatWorse, MeanBeta };

inline constexpr std::array<Metric, 7> kAllMetrics = {
    Metric::Outage,  Metric::ErgodicRate, Metric::TypeIIProb, Metric::PBetter,
    Metric::PHatBetter, Metric::PHatWorse, Metric::MeanBeta};

inline constexpr std::string_view to_string(Metric m) {
    switch (m) {
        case Metric::Outage: return "outage";
        case Metric::ErgodicRate: return "ergodic_rate";
        case Metric::TypeIIProb: return "type2_prob";
        case Metric::PBetter: return "p_better";
        case Metric::PHatBetter: return "p_hat_better";
        case Metric::PHatWorse: return "p_hat_worse";
        case Metric::MeanBeta: return "mean_beta";
    }
    return "?";
}

/// The better/worse comparisons belong to one scheme each; other metrics
/// are reported for every scheme.
inline constexpr std::optional<SchemeId> owning_scheme(Metric m) {
    switch (m) {
        case Metric::PBetter: return SchemeId::HsicPa;
        case Metric::PHatBetter:
        case Metric::PHatWorse: return SchemeId::FsicPa;
        default: return std::nullopt;
    }
}

struct Estimate {
    double value = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::uint64_t n = 0;

    double half_width() const { return 0.5 * (ci_high - ci_low); }
};

inline constexpr double kZ95 = 1.959963984540054;

/// Wilson score interval at 95%.
inline Estimate proportion_estimate(std::uint64_t successes, std::uint64_t n) {
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(successes) / nn;
    const double z2 = kZ95 * kZ95;
    const double denom = 1.0 + z2 / nn;
    const double center = (p + z2 / (2.0 * nn)) / denom;
    const double half = kZ95 / denom * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
    return {p, std::clamp(center - half, 0.0, p), std::clamp(center + half, p, 1.0), n};
}

/// Normal interval for a sample mean from its running sums.
inline Estimate mean_estimate(double sum, double sum_sq, std::uint64_t n) {
    const double nn = static_cast<double>(n);
    const double mean = sum / nn;
    double var = n > 1 ? (sum_sq - nn * mean * mean) / (nn - 1.0) : 0.0;
    var = std::max(var, 0.0);
    const double half = kZ95 * std::sqrt(var / nn);
    return {mean, mean - half, mean + half, n};
}

inline Estimate estimate(const MetricAccumulator& acc, Metric metric,
                         SchemeId scheme = SchemeId::HsicPa) {
    if (acc.trials < 1) throw EmptyDenominator("accumulator holds no trials");
    if (auto owner = owning_scheme(metric)) scheme = *owner;
    const SchemeTally& s = acc[scheme];

    auto conditional = [&](std::uint64_t num) {
        if (s.type2 == 0)
            throw EmptyDenominator(std::string(to_string(metric)) +
                                   ": served user was never type II");
        return proportion_estimate(num, s.type2);
    };

    switch (metric) {
        case Metric::Outage: return proportion_estimate(s.outage, acc.trials);
        case Metric::ErgodicRate: return mean_estimate(s.rate_sum, s.rate_sq, acc.trials);
        case Metric::TypeIIProb: return proportion_estimate(s.type2, acc.trials);
        case Metric::MeanBeta: return mean_estimate(s.beta_sum, s.beta_sq, acc.trials);
        case Metric::PBetter: return conditional(acc.better_hsic_pa);
        case Metric::PHatBetter: return conditional(acc.better_fsic_pa);
        case Metric::PHatWorse: {
            const Estimate b = conditional(acc.better_fsic_pa);
            return {1.0 - b.value, 1.0 - b.ci_high, 1.0 - b.ci_low, b.n};
        }
    }
    return {};
}

}  // namespace noma
