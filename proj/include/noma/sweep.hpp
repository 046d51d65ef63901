#pragma once

// Experiment front end: key=value configuration, SNR sweeps, the five figure
// recipes, CSV output and the Monte Carlo versus quadrature gate.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "noma/core.hpp"
#include "noma/error.hpp"
#include "noma/oracle.hpp"
#include "noma/sim.hpp"

namespace noma {

struct SweepConfig {
    std::vector<SchemeId> schemes{kAllSchemes.begin(), kAllSchemes.end()};
    double snr_start = 0.0;
    double snr_stop = 0.0;
    double snr_step = 1.0;
    double ratio = 1.0;  ///< ps / p0
    double r0 = 0.0;
    double rs = 0.0;
    std::size_t m = 0;
    std::uint64_t trials = 1'000'000;
    std::uint64_t seed = 0;
    std::vector<Metric> metrics{kAllMetrics.begin(), kAllMetrics.end()};
    std::string out;
    unsigned workers = 1;
    std::string variant;

    std::vector<double> snr_grid() const {
        std::vector<double> grid;
        for (std::size_t i = 0;; ++i) {
            const double db = snr_start + static_cast<double>(i) * snr_step;
            if (db > snr_stop + 1e-9 * std::max(1.0, std::abs(snr_stop))) break;
            grid.push_back(db);
        }
        return grid;
    }

    /// Linear powers for one grid point; noise power is one.
    SystemParams params_at(double snr_db) const {
        const double p0 = std::pow(10.0, snr_db / 10.0);
        return {p0, ratio * p0, r0, rs, m};
    }

    void validate() const {
        if (schemes.empty()) throw ConfigError("schemes", "at least one scheme is required");
        if (metrics.empty()) throw ConfigError("metrics", "at least one metric is required");
        if (!(snr_step > 0.0) || !std::isfinite(snr_step))
            throw ConfigError("snr", "step must be positive");
        if (!std::isfinite(snr_start) || !std::isfinite(snr_stop) || snr_stop < snr_start)
            throw ConfigError("snr", "grid must satisfy start <= stop");
        if (!(ratio > 0.0) || !std::isfinite(ratio)) throw ConfigError("ratio", "must be positive");
        if (trials < 1) throw ConfigError("trials", "must be at least 1");
        if (workers < 1) throw ConfigError("workers", "must be at least 1");
        params_at(snr_start).validate();
    }
};

enum class Source { Mc, Oracle };

inline constexpr std::string_view to_string(Source s) { return s == Source::Mc ? "mc" : "oracle"; }

struct SweepRow {
    double snr_db = 0.0;
    SchemeId scheme = SchemeId::HsicPa;
    Metric metric = Metric::Outage;
    double value = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    Source source = Source::Mc;
    std::string variant;
    std::string notes;
};

namespace detail {

inline std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        parts.emplace_back(s.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

inline double parse_double(const std::string& key, std::string_view text) {
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || text.empty())
        throw ConfigError(key, "expected a number, got '" + std::string(text) + "'");
    return v;
}

/// Accepts plain numbers and simple fractions such as 1/3.
inline double parse_ratio(const std::string& key, std::string_view text) {
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) return parse_double(key, text);
    const double den = parse_double(key, text.substr(slash + 1));
    if (den == 0.0) throw ConfigError(key, "zero denominator");
    return parse_double(key, text.substr(0, slash)) / den;
}

inline std::uint64_t parse_uint(const std::string& key, std::string_view text) {
    std::uint64_t v = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec == std::errc() && ptr == end && !text.empty()) return v;
    // Allow 1e6 style counts when they are exact integers.
    const double d = parse_double(key, text);
    if (d < 0.0 || d != std::floor(d) || d > 1.8e19)
        throw ConfigError(key, "expected a non-negative integer, got '" + std::string(text) + "'");
    return static_cast<std::uint64_t>(d);
}

inline std::string format_double(double v) {
    if (std::isnan(v)) return "NaN";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

inline double parse_csv_double(std::string_view text) {
    if (text == "NaN") return std::numeric_limits<double>::quiet_NaN();
    return parse_double("csv", text);
}

}  // namespace detail

inline std::optional<SchemeId> scheme_from_string(std::string_view s) {
    for (SchemeId id : kAllSchemes) {
        if (to_string(id) == s) return id;
    }
    if (s == "hsic-npa" || s == "npa") return SchemeId::HsicNpa;
    if (s == "hsic-pa") return SchemeId::HsicPa;
    if (s == "fsic-pa") return SchemeId::FsicPa;
    return std::nullopt;
}

inline std::optional<Metric> metric_from_string(std::string_view s) {
    for (Metric m : kAllMetrics) {
        if (to_string(m) == s) return m;
    }
    return std::nullopt;
}

/// Overrides `cfg` with every key=value token in `text`. Tokens are
/// separated by whitespace or newlines; '#' starts a comment.
inline void apply_config_text(SweepConfig& cfg, std::string_view text,
                              std::map<std::string, bool>* seen = nullptr) {
    std::istringstream lines{std::string(text)};
    std::string line;
    while (std::getline(lines, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::istringstream tokens(line);
        std::string token;
        while (tokens >> token) {
            const auto eq = token.find('=');
            if (eq == std::string::npos || eq == 0)
                throw ConfigError(token, "expected key=value");
            const std::string key = token.substr(0, eq);
            const std::string value = token.substr(eq + 1);
            if (value.empty()) throw ConfigError(key, "empty value");

            if (key == "m") {
                cfg.m = detail::parse_uint(key, value);
            } else if (key == "r0") {
                cfg.r0 = detail::parse_double(key, value);
            } else if (key == "rs") {
                cfg.rs = detail::parse_double(key, value);
            } else if (key == "ratio") {
                cfg.ratio = detail::parse_ratio(key, value);
            } else if (key == "snr") {
                const auto parts = detail::split(value, ':');
                if (parts.size() != 3) throw ConfigError(key, "expected start:stop:step");
                cfg.snr_start = detail::parse_double(key, parts[0]);
                cfg.snr_stop = detail::parse_double(key, parts[1]);
                cfg.snr_step = detail::parse_double(key, parts[2]);
                if (seen) (*seen)["snr_start"] = (*seen)["snr_stop"] = true;
            } else if (key == "snr_start") {
                cfg.snr_start = detail::parse_double(key, value);
            } else if (key == "snr_stop") {
                cfg.snr_stop = detail::parse_double(key, value);
            } else if (key == "snr_step" || key == "step") {
                cfg.snr_step = detail::parse_double(key, value);
                if (!(cfg.snr_step > 0.0)) throw ConfigError(key, "step must be positive");
            } else if (key == "trials") {
                cfg.trials = detail::parse_uint(key, value);
            } else if (key == "seed") {
                cfg.seed = detail::parse_uint(key, value);
            } else if (key == "workers") {
                cfg.workers = static_cast<unsigned>(detail::parse_uint(key, value));
            } else if (key == "out") {
                cfg.out = value;
            } else if (key == "variant") {
                cfg.variant = value;
            } else if (key == "schemes") {
                cfg.schemes.clear();
                if (value != "all") {
                    for (const std::string& name : detail::split(value, ',')) {
                        const auto id = scheme_from_string(name);
                        if (!id) throw ConfigError(key, "unknown scheme '" + name + "'");
                        cfg.schemes.push_back(*id);
                    }
                } else {
                    cfg.schemes.assign(kAllSchemes.begin(), kAllSchemes.end());
                }
            } else if (key == "metrics") {
                cfg.metrics.clear();
                if (value != "all") {
                    for (const std::string& name : detail::split(value, ',')) {
                        const auto id = metric_from_string(name);
                        if (!id) throw ConfigError(key, "unknown metric '" + name + "'");
                        cfg.metrics.push_back(*id);
                    }
                } else {
                    cfg.metrics.assign(kAllMetrics.begin(), kAllMetrics.end());
                }
            } else {
                throw ConfigError(key, "unknown key");
            }
            if (seen) (*seen)[key] = true;
        }
    }
}

/// Parses and validates a configuration. m, r0, rs and the SNR grid are
/// required; everything else has a default.
inline SweepConfig parse_config(std::string_view text) {
    SweepConfig cfg;
    std::map<std::string, bool> seen;
    apply_config_text(cfg, text, &seen);
    for (const char* key : {"m", "r0", "rs", "snr_start", "snr_stop"}) {
        if (!seen.count(key)) {
            const std::string name = std::string_view(key).starts_with("snr") ? "snr" : key;
            throw ConfigError(name, "missing required key");
        }
    }
    cfg.validate();
    return cfg;
}

inline constexpr std::string_view kCsvHeader =
    "snr_db,scheme,metric,value,ci_low,ci_high,trials,seed,source,variant,notes";

inline std::string to_csv(const std::vector<SweepRow>& rows) {
    std::string out(kCsvHeader);
    out += '\n';
    for (const SweepRow& r : rows) {
        out += detail::format_double(r.snr_db);
        out += ',';
        out += to_string(r.scheme);
        out += ',';
        out += to_string(r.metric);
        out += ',';
        out += detail::format_double(r.value);
        out += ',';
        out += detail::format_double(r.ci_low);
        out += ',';
        out += detail::format_double(r.ci_high);
        out += ',';
        out += std::to_string(r.trials);
        out += ',';
        out += std::to_string(r.seed);
        out += ',';
        out += to_string(r.source);
        out += ',';
        out += r.variant;
        out += ',';
        out += r.notes;
        out += '\n';
    }
    return out;
}

inline std::vector<SweepRow> parse_csv(std::string_view text) {
    std::vector<SweepRow> rows;
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line) || detail::trim(line) != kCsvHeader)
        throw Error("csv: missing or unexpected header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = detail::split(line, ',');
        if (f.size() != 11) throw Error("csv: expected 11 fields in '" + line + "'");
        SweepRow r;
        r.snr_db = detail::parse_csv_double(f[0]);
        const auto scheme = scheme_from_string(f[1]);
        const auto metric = metric_from_string(f[2]);
        if (!scheme || !metric) throw Error("csv: unknown scheme or metric in '" + line + "'");
        r.scheme = *scheme;
        r.metric = *metric;
        r.value = detail::parse_csv_double(f[3]);
        r.ci_low = detail::parse_csv_double(f[4]);
        r.ci_high = detail::parse_csv_double(f[5]);
        r.trials = detail::parse_uint("trials", f[6]);
        r.seed = detail::parse_uint("seed", f[7]);
        if (f[8] != "mc" && f[8] != "oracle") throw Error("csv: unknown source '" + f[8] + "'");
        r.source = f[8] == "mc" ? Source::Mc : Source::Oracle;
        r.variant = f[9];
        r.notes = f[10];
        rows.push_back(std::move(r));
    }
    return rows;
}

inline bool wants_row(Metric metric, SchemeId scheme) {
    if (auto owner = owning_scheme(metric)) return *owner == scheme;
    return true;
}

/// Runs every grid point with the configured master seed, so all points
/// share one set of channel draws.
inline std::vector<SweepRow> run_sweep(const SweepConfig& cfg, bool with_oracle = true) {
    cfg.validate();
    std::vector<SweepRow> rows;
    for (double db : cfg.snr_grid()) {
        const SystemParams params = cfg.params_at(db);
        const MetricAccumulator acc = run_batch(params, cfg.seed, cfg.trials, cfg.workers);
        for (Metric metric : cfg.metrics) {
            for (SchemeId scheme : cfg.schemes) {
                if (!wants_row(metric, scheme)) continue;
                SweepRow row{db, scheme, metric, 0, 0, 0, cfg.trials, cfg.seed, Source::Mc,
                             cfg.variant, ""};
                try {
                    const Estimate e = estimate(acc, metric, scheme);
                    row.value = e.value;
                    row.ci_low = e.ci_low;
                    row.ci_high = e.ci_high;
                } catch (const EmptyDenominator&) {
                    row.value = row.ci_low = row.ci_high = std::numeric_limits<double>::quiet_NaN();
                    row.notes = "empty_denominator";
                }
                rows.push_back(row);

                if (with_oracle && metric == Metric::Outage) {
                    const double q = outage_quadrature(scheme, params).value;
                    rows.push_back({db, scheme, metric, q, q, q, 0, cfg.seed, Source::Oracle,
                                    cfg.variant, ""});
                }
            }
        }
    }
    return rows;
}

/// Quadrature outage rows only; no simulation.
inline std::vector<SweepRow> run_oracle(const SweepConfig& cfg) {
    cfg.validate();
    std::vector<SweepRow> rows;
    for (double db : cfg.snr_grid()) {
        const SystemParams params = cfg.params_at(db);
        for (SchemeId scheme : cfg.schemes) {
            const double q = outage_quadrature(scheme, params).value;
            rows.push_back({db, scheme, Metric::Outage, q, q, q, 0, cfg.seed, Source::Oracle,
                            cfg.variant, ""});
        }
    }
    return rows;
}

struct VerifyPoint {
    double snr_db;
    SchemeId scheme;
    double mc;
    double oracle;
    double std_error;
    bool pass;
};

/// Compares Monte Carlo outage with quadrature at every grid point; a point
/// passes when the gap is at most three binomial standard errors.
inline std::vector<VerifyPoint> verify_outage(const SweepConfig& cfg) {
    cfg.validate();
    std::vector<VerifyPoint> points;
    for (double db : cfg.snr_grid()) {
        const SystemParams params = cfg.params_at(db);
        const MetricAccumulator acc = run_batch(params, cfg.seed, cfg.trials, cfg.workers);
        for (SchemeId scheme : cfg.schemes) {
            const double mc = estimate(acc, Metric::Outage, scheme).value;
            const double q = outage_quadrature(scheme, params).value;
            const double se = std::sqrt(q * (1.0 - q) / static_cast<double>(acc.trials));
            points.push_back({db, scheme, mc, q, se, std::abs(mc - q) <= 3.0 * se + 1e-12});
        }
    }
    return points;
}

/// Parameterizations of the five figures. Captions fix M, the power
/// coupling and rs; r0 is 4 wherever a caption leaves it open.
inline std::vector<SweepConfig> figure_configs(std::string_view id) {
    SweepConfig base;
    base.m = 4;
    base.rs = 1.0;
    base.r0 = 4.0;
    base.ratio = 1.0;
    base.snr_start = 0.0;
    base.snr_stop = 60.0;
    base.snr_step = 5.0;
    base.variant = "r0=4";

    if (id == "fig1") {
        base.metrics = {Metric::Outage};
        base.snr_start = 20.0;
        SweepConfig low = base;
        low.r0 = 1.0;
        low.variant = "r0=1";
        return {low, base};
    }
    if (id == "fig2") {
        base.metrics = {Metric::ErgodicRate};
        base.ratio = 1.0 / 3.0;
        return {base};
    }
    if (id == "fig3") {
        base.metrics = {Metric::TypeIIProb};
        return {base};
    }
    if (id == "fig4") {
        base.metrics = {Metric::PBetter, Metric::PHatBetter, Metric::PHatWorse};
        base.schemes = {SchemeId::HsicPa, SchemeId::FsicPa};
        return {base};
    }
    if (id == "fig5") {
        base.metrics = {Metric::MeanBeta};
        base.schemes = {SchemeId::HsicPa, SchemeId::FsicPa};
        return {base};
    }
    throw ConfigError("figure", "unknown recipe '" + std::string(id) + "' (expected fig1..fig5)");
}

inline std::vector<SweepRow> figure(std::string_view id, std::uint64_t trials = 1'000'000,
                                    std::uint64_t seed = 0, unsigned workers = 1) {
    std::vector<SweepRow> rows;
    for (SweepConfig cfg : figure_configs(id)) {
        cfg.trials = trials;
        cfg.seed = seed;
        cfg.workers = workers;
        auto part = run_sweep(cfg);
        rows.insert(rows.end(), part.begin(), part.end());
    }
    return rows;
}

}  // namespace noma
