// Command line front end: SNR sweeps, figure recipes, quadrature-only
// outage and the Monte Carlo versus quadrature gate. Output is CSV.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "noma/sweep.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw noma::Error("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw noma::Error("cannot write '" + path + "'");
    out << text;
}

struct Overrides {
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    unsigned workers = 0;
    std::string out;
};

// Command line flags take precedence over the file.
noma::SweepConfig load_config(const std::string& path, const Overrides& o, const CLI::App& cmd) {
    noma::SweepConfig cfg = noma::parse_config(read_file(path));
    if (cmd.count("--trials")) cfg.trials = o.trials;
    if (cmd.count("--seed")) cfg.seed = o.seed;
    if (cmd.count("--workers")) cfg.workers = o.workers;
    if (const auto* out = cmd.get_option_no_throw("--out"); out && out->count()) cfg.out = o.out;
    cfg.validate();
    return cfg;
}

int report_verify(const std::vector<noma::VerifyPoint>& points) {
    int failures = 0;
    std::printf("%8s  %-8s  %14s  %14s  %12s  %s\n", "snr_db", "scheme", "mc", "oracle", "3*se",
                "result");
    for (const auto& p : points) {
        std::printf("%8.2f  %-8s  %14.6e  %14.6e  %12.4e  %s\n", p.snr_db,
                    std::string(noma::to_string(p.scheme)).c_str(), p.mc, p.oracle,
                    3.0 * p.std_error, p.pass ? "PASS" : "FAIL");
        failures += !p.pass;
    }
    std::printf("%d of %zu points outside 3 standard errors\n", failures, points.size());
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Uplink NOMA scheme simulator (HSIC-NPA, HSIC-PA, FSIC-PA)"};
    app.require_subcommand(1);

    Overrides o;
    std::string config_path;
    std::string recipe;
    bool verify_flag = false;

    auto add_run_flags = [&o](CLI::App* cmd) {
        cmd->add_option("--trials", o.trials, "Monte Carlo trials per SNR point")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--seed", o.seed, "Master seed");
        cmd->add_option("--workers", o.workers, "Worker threads")->check(CLI::PositiveNumber);
    };

    auto* sweep = app.add_subcommand("sweep", "Run an SNR sweep described by a config file");
    sweep->add_option("--config", config_path, "key=value config file")->required();
    add_run_flags(sweep);
    sweep->add_option("--out", o.out, "CSV output path (default stdout)");
    sweep->add_flag("--verify", verify_flag,
                    "Exit nonzero if any outage row misses its oracle by > 3 standard errors");

    auto* fig = app.add_subcommand("figure", "Run one of the built-in figure recipes");
    fig->add_option("recipe", recipe, "fig1..fig5")->required();
    add_run_flags(fig);
    fig->add_option("--out", o.out, "CSV output path (default stdout)");

    auto* oracle = app.add_subcommand("oracle", "Quadrature outage only, no simulation");
    oracle->add_option("--config", config_path, "key=value config file")->required();
    oracle->add_option("--out", o.out, "CSV output path (default stdout)");

    auto* verify = app.add_subcommand("verify", "Monte Carlo versus quadrature outage gate");
    verify->add_option("--config", config_path, "key=value config file")->required();
    add_run_flags(verify);

    CLI11_PARSE(app, argc, argv);

    try {
        if (sweep->parsed()) {
            const noma::SweepConfig cfg = load_config(config_path, o, *sweep);
            const auto rows = noma::run_sweep(cfg);
            write_output(cfg.out, noma::to_csv(rows));
            if (verify_flag) {
                int bad = 0;
                for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
                    const auto& mc = rows[i];
                    const auto& orc = rows[i + 1];
                    if (mc.metric != noma::Metric::Outage || mc.source != noma::Source::Mc ||
                        orc.source != noma::Source::Oracle)
                        continue;
                    const double se =
                        std::sqrt(orc.value * (1.0 - orc.value) / static_cast<double>(mc.trials));
                    if (std::abs(mc.value - orc.value) > 3.0 * se + 1e-12) {
                        std::fprintf(stderr, "verify: %s at %g dB: mc %.6e vs oracle %.6e\n",
                                     std::string(noma::to_string(mc.scheme)).c_str(), mc.snr_db,
                                     mc.value, orc.value);
                        ++bad;
                    }
                }
                return bad == 0 ? 0 : 1;
            }
        } else if (fig->parsed()) {
            const std::uint64_t trials = fig->count("--trials") ? o.trials : 1'000'000;
            const unsigned workers = fig->count("--workers") ? o.workers : 1;
            write_output(o.out, noma::to_csv(noma::figure(recipe, trials, o.seed, workers)));
        } else if (oracle->parsed()) {
            noma::SweepConfig cfg = noma::parse_config(read_file(config_path));
            if (oracle->count("--out")) cfg.out = o.out;
            write_output(cfg.out, noma::to_csv(noma::run_oracle(cfg)));
        } else if (verify->parsed()) {
            const noma::SweepConfig cfg = load_config(config_path, o, *verify);
            return report_verify(noma::verify_outage(cfg));
        }
    } catch (const noma::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
