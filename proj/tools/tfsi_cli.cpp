// Command-line front end: one subcommand per pipeline stage.
#include <CLI11.hpp>
#include <iostream>
#include <json.hpp>

#include "tfsi/csv.hpp"
#include "tfsi/error.hpp"
#include "tfsi/pipeline.hpp"

namespace {

int exit_code(tfsi::ErrorKind k) {
    switch (k) {
        case tfsi::ErrorKind::kConfig: return 2;
        case tfsi::ErrorKind::kMissingInput: return 3;
        case tfsi::ErrorKind::kParse: return 4;
        case tfsi::ErrorKind::kIo: return 5;
        case tfsi::ErrorKind::kNumeric:
        case tfsi::ErrorKind::kInvalidArgument: return 6;
        case tfsi::ErrorKind::kStage: return 7;
    }
    return 7;
}

int report(const std::string& stage, const char* kind, const std::string& message, int code) {
    nlohmann::json j;
    j["error"] = {{"stage", stage}, {"kind", kind}, {"message", message}, {"exit_code", code}};
    std::cerr << j.dump() << std::endl;
    return code;
}

struct Overrides {
    std::string config, out, neutral_mode, kernel, bandwidth, post_cli_date, spec, freq, dedup, standardization;
    std::optional<long long> seed;
    std::optional<double> tau;
    bool fixed_est = false;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Financial sentiment index pipeline"};
    app.require_subcommand(1, 1);
    app.fallthrough();
    Overrides o;
    app.add_option("--config", o.config, "Config file (key = value with [sections])");
    app.add_option("--out", o.out, "Output directory (default: out)");
    app.add_option("--seed", o.seed, "Seed for synth");
    app.add_option("--neutral-mode", o.neutral_mode, "zero or drop");
    app.add_option("--kernel", o.kernel, "HAC kernel: bartlett or qs");
    app.add_option("--bandwidth", o.bandwidth, "HAC bandwidth (Bartlett: lags), or auto");
    app.add_option("--tau", o.tau, "Threshold strategy cut-off");
    app.add_option("--post-cli-date", o.post_cli_date, "First day of the post-CLI sample (YYYY-MM-DD)");
    app.add_option("--dedup", o.dedup, "exact or near");
    app.add_option("--standardization", o.standardization, "population or sample");
    app.add_flag("--fixed-est", o.fixed_est, "Treat Eastern time as UTC-5 all year");

    const std::vector<std::pair<std::string, std::string>> stages{
        {"synth", "Generate a synthetic corpus, market data and shocks"},
        {"ingest", "Load, clean, filter and deduplicate the corpus"},
        {"cluster", "Build the keyword groups"},
        {"score", "Score matching tweets"},
        {"index", "Aggregate the sentiment index"},
        {"events", "Announcement windows, Fed share, shock panel"},
        {"regress", "Regression tables"},
        {"backtest", "Strategy statistics"},
        {"report", "Bundle tables and figure data"},
        {"all", "Run every stage after synth"},
    };
    std::map<std::string, CLI::App*> subs;
    for (const auto& [name, help] : stages) {
        auto* sub = app.add_subcommand(name, help);
        subs[name] = sub;
        if (name == "regress") sub->add_option("--spec", o.spec, "Run a single specification, e.g. table1.5");
        if (name == "index") sub->add_option("--freq", o.freq, "Only this calendar frequency: daily, weekly or monthly");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // --help exits 0; every other usage error maps to 1.
        return app.exit(e) == 0 ? 0 : 1;
    }

    std::string stage;
    for (const auto& [name, sub] : subs) {
        if (sub->parsed()) stage = name;
    }

    try {
        tfsi::pipeline::PipelineConfig cfg;
        if (!o.config.empty()) cfg = tfsi::pipeline::load_config(o.config);
        using tfsi::pipeline::set_option;
        if (!o.out.empty()) set_option(cfg, "paths", "out", o.out);
        if (o.seed) set_option(cfg, "synth", "seed", std::to_string(*o.seed));
        if (!o.neutral_mode.empty()) set_option(cfg, "sentiment", "neutral_mode", o.neutral_mode);
        if (!o.kernel.empty()) set_option(cfg, "econometrics", "kernel", o.kernel);
        if (!o.bandwidth.empty()) set_option(cfg, "econometrics", "bandwidth", o.bandwidth);
        if (o.tau) set_option(cfg, "backtest", "tau", tfsi::format_double(*o.tau));
        if (!o.post_cli_date.empty()) set_option(cfg, "backtest", "post_cli_date", o.post_cli_date);
        if (!o.dedup.empty()) set_option(cfg, "corpus", "dedup", o.dedup);
        if (!o.standardization.empty()) set_option(cfg, "index", "standardization", o.standardization);
        if (o.fixed_est) set_option(cfg, "corpus", "timezone", "fixed_est");
        if (!o.spec.empty()) set_option(cfg, "econometrics", "spec", o.spec);
        if (!o.freq.empty()) set_option(cfg, "index", "frequency", o.freq);
        tfsi::pipeline::run_stage(cfg, stage);
    } catch (const tfsi::Error& e) {
        return report(stage, tfsi::to_string(e.kind()), e.what(), exit_code(e.kind()));
    } catch (const std::exception& e) {
        return report(stage, "stage", e.what(), 7);
    }
    return 0;
}
