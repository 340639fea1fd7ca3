#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "commands.hpp"
#include "tdt/error.hpp"

using namespace tdt::app;

namespace {

std::size_t default_jobs() {
    if (const char* env = std::getenv("TDT_JOBS")) {
        try {
            return std::max<std::size_t>(1, std::stoul(env));
        } catch (const std::exception&) {
        }
    }
    return 1;
}

void add_io(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--in", cfg.input, "Input corpus (JSONL)");
    sub->add_option("-o,--out", cfg.output, "Output file (default: stdout)");
    sub->add_option("--max-tokens", cfg.max_tokens, "Per-document token limit")->check(CLI::PositiveNumber);
    sub->add_option("-j,--jobs", cfg.jobs, "Worker threads (env TDT_JOBS)")->check(CLI::PositiveNumber);
}

void add_pipeline(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--normalize", cfg.normalize, "auto | t | passthrough")
        ->check(CLI::IsMember({"auto", "t", "passthrough"}));
    sub->add_option("--nu", cfg.nu, "t degrees of freedom (> 2)");
    sub->add_option("--epsilon-var", cfg.epsilon_var, "Variance floor");
    sub->add_option("--oversample", cfg.oversample, "Smoothing grid points per token");
    sub->add_option_function<double>(
        "--bandwidth-override", [&cfg](double h) { cfg.bandwidth_override = h; }, "Fixed KDE bandwidth");
    sub->add_option("--omega0", cfg.omega0, "Morlet centre frequency");
    sub->add_option("--scales", cfg.scales, "Number of integer scales 1..N");
    sub->add_option("--truncation-radius", cfg.truncation_radius, "Wavelet support in units of scale");
    sub->add_option("--energy", cfg.energy, "frobenius | l1 | max_abs | mean_abs")
        ->check(CLI::IsMember({"frobenius", "l1", "max_abs", "mean_abs"}));
}

void add_svm(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--C", cfg.C, "SVM box constraint");
    sub->add_option("--gamma", cfg.gamma, "RBF width: 'scale' or a number");
    sub->add_option("--svm-tolerance", cfg.svm_tolerance, "SMO KKT tolerance");
    sub->add_option("--seed", cfg.seed, "Seed for all randomness");
}

void add_synth(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--n-docs", cfg.n_docs, "Documents per class");
    sub->add_option("--doc-length", cfg.doc_length, "Tokens per document");
    sub->add_option("--shift-magnitude", cfg.shift_magnitude, "Mean shift of the machine segment");
    sub->add_option("--shift-location", cfg.shift_location, "Shift position as a fraction of the document");
    sub->add_option("--noise-sigma", cfg.noise_sigma, "Noise standard deviation");
    sub->add_option("--span-fraction", cfg.span_fraction, "Inserted span length as a fraction");
}

} // namespace

int main(int argc, char** argv) {
    RunConfig cfg;
    cfg.jobs = default_jobs();

    // A config file supplies defaults; explicit flags override it.
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--config") {
            try {
                load_config_file(cfg, argv[i + 1]);
            } catch (const tdt::Error& e) {
                std::cerr << "error: " << e.what() << '\n';
                return e.exit_code();
            }
        }
    }

    CLI::App app{"Temporal discrepancy tomography: wavelet features for machine-text detection"};
    app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
    std::string config_path;
    app.add_option("--config", config_path, "JSON config file mirroring the flags");
    app.require_subcommand(1);

    std::map<CLI::App*, std::function<void(const RunConfig&)>> handlers;

    auto* synth = app.add_subcommand("synth", "Generate a seeded synthetic corpus");
    synth->add_option("-o,--out", cfg.output, "Output corpus (default: stdout)");
    synth->add_option("--kind", cfg.kind, "stationary | regime | insertion | regime-vs-human | insertion-vs-human");
    add_synth(synth, cfg);
    synth->add_option("--seed", cfg.seed, "Seed for all randomness");
    handlers[synth] = cmd_synth;

    auto* featurize = app.add_subcommand("featurize", "Compute band-energy features per document");
    add_io(featurize, cfg);
    add_pipeline(featurize, cfg);
    handlers[featurize] = cmd_featurize;

    auto* train = app.add_subcommand("train", "Fit the RBF SVM on train/dev records");
    add_io(train, cfg);
    add_pipeline(train, cfg);
    add_svm(train, cfg);
    train->add_option("--features", cfg.features, "Train from a feature CSV instead of a corpus");
    handlers[train] = cmd_train;

    auto* detect = app.add_subcommand("detect", "Score documents with a trained model");
    add_io(detect, cfg);
    add_pipeline(detect, cfg);
    detect->add_option("--model", cfg.model, "Model file")->required();
    handlers[detect] = cmd_detect;

    auto* eval = app.add_subcommand("eval", "Dev-fit / test-evaluate the SVM and the scalar baseline");
    add_io(eval, cfg);
    add_pipeline(eval, cfg);
    add_svm(eval, cfg);
    eval->add_option("--model", cfg.model, "Use this model instead of fitting on dev");
    eval->add_option("--json-out", cfg.json_output, "Also write a JSON report");
    eval->add_option("--dataset", cfg.dataset, "Dataset name for the CSV rows");
    eval->add_option("--fpr-target", cfg.fpr_target, "FPR for TPR@FPR");
    eval->add_option("--mi-k", cfg.mi_k, "Neighbours for the MI estimator");
    handlers[eval] = cmd_eval;

    auto* stat = app.add_subcommand("stationarity", "ADF and segment-shift analysis");
    add_io(stat, cfg);
    add_pipeline(stat, cfg);
    stat->add_option("--window", cfg.window, "Sliding window length");
    stat->add_option("--overlap", cfg.overlap, "Sliding window overlap");
    stat->add_option("--alpha", cfg.alpha, "ADF significance (0.01, 0.05, 0.10)");
    stat->add_option("--json-out", cfg.json_output, "Also write the aggregate JSON report");
    handlers[stat] = cmd_stationarity;

    auto* ablate = app.add_subcommand("ablate", "Scale-count x energy-metric grid");
    add_io(ablate, cfg);
    add_pipeline(ablate, cfg);
    add_svm(ablate, cfg);
    ablate->add_option("--fpr-target", cfg.fpr_target, "FPR for TPR@FPR");
    handlers[ablate] = cmd_ablate;

    auto* bench = app.add_subcommand("bench", "Per-document latency of scalar vs wavelet path");
    add_io(bench, cfg);
    add_pipeline(bench, cfg);
    add_svm(bench, cfg);
    add_synth(bench, cfg);
    bench->add_option("--bench-docs", cfg.bench_docs, "Documents to time (>= 100)");
    bench->add_option("--bench-repeats", cfg.bench_repeats, "Timed passes over the documents");
    bench->add_option("--bench-format", cfg.bench_format, "scored | z")->check(CLI::IsMember({"scored", "z"}));
    handlers[bench] = cmd_bench;

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return static_cast<int>(tdt::ErrorKind::Usage);
    }

    for (const auto& [sub, handler] : handlers) {
        if (!sub->parsed()) continue;
        cfg.subcommand = sub->get_name();
        try {
            handler(cfg);
            return 0;
        } catch (const tdt::Error& e) {
            std::cerr << "error: " << e.what() << '\n';
            return e.exit_code();
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << '\n';
            return static_cast<int>(tdt::ErrorKind::Data);
        }
    }
    return static_cast<int>(tdt::ErrorKind::Usage);
}
