#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "parallel.hpp"
#include "tdt/error.hpp"
#include "tdt/evalkit.hpp"
#include "tdt/rng.hpp"

namespace tdt::app {

using nlohmann::json;

namespace {

void emit(const RunConfig& cfg, const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw DataError("write failure on '" + path + "'");
    (void)cfg;
}

// Leading comment lines carried by every CSV artifact.
std::string csv_provenance(const RunConfig& cfg) {
    return std::string("# ") + kToolName + " " + kToolVersion + "\n# config: " + to_json(cfg).dump() + "\n";
}

json json_provenance(const RunConfig& cfg) {
    return {{"tool", {{"name", kToolName}, {"version", kToolVersion}}}, {"config", to_json(cfg)}};
}

Corpus load_input(const RunConfig& cfg) {
    if (cfg.input.empty()) throw UsageError("--in is required");
    return read_corpus(cfg.input, cfg.max_tokens);
}

std::vector<TdtFeatureVector> featurize_all(const Corpus& corpus, const PipelineConfig& pipeline, std::size_t jobs) {
    return parallel_map<TdtFeatureVector>(corpus.size(), jobs, [&](std::size_t i) {
        return featurize_document(corpus.records[i], pipeline);
    });
}

std::vector<Label> labels_of(const Corpus& corpus, const char* purpose) {
    std::vector<Label> out;
    for (const auto& r : corpus.records) {
        if (!r.label) throw DataError(std::string(purpose) + " needs labels; record '" + r.id + "' has none");
        out.push_back(*r.label);
    }
    return out;
}

std::vector<FeaturePoint> points_of(const std::vector<TdtFeatureVector>& fvs) {
    std::vector<FeaturePoint> out;
    out.reserve(fvs.size());
    for (const auto& f : fvs) out.push_back(to_point(f));
    return out;
}

struct DevTest {
    Corpus dev;
    Corpus test;
};

DevTest split_dev_test(const Corpus& corpus) {
    DevTest s{corpus.subset({Split::Train, Split::Dev}), corpus.subset({Split::Test})};
    if (s.dev.empty()) throw DataError("corpus has no train/dev records");
    if (s.test.empty()) throw DataError("corpus has no test records");
    return s;
}

std::string dataset_name(const RunConfig& cfg) {
    if (!cfg.dataset.empty()) return cfg.dataset;
    const auto slash = cfg.input.find_last_of('/');
    std::string base = slash == std::string::npos ? cfg.input : cfg.input.substr(slash + 1);
    const auto dot = base.find_last_of('.');
    return dot == std::string::npos ? base : base.substr(0, dot);
}

std::vector<double> scalar_scores(const Corpus& corpus, const PipelineConfig& pipeline) {
    std::vector<double> out;
    for (const auto& r : corpus.records) out.push_back(scalar_score(discrepancy_of(r, pipeline), ScalarMode::Mean));
    return out;
}

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(17);
    s << v;
    return s.str();
}

} // namespace

void cmd_synth(const RunConfig& cfg) {
    const SynthConfig sc = cfg.synth();
    Corpus corpus;
    if (cfg.kind == "stationary") corpus = gen_stationary(sc);
    else if (cfg.kind == "regime") corpus = gen_regime_shift(sc);
    else if (cfg.kind == "insertion") corpus = gen_localized_insertion(sc, cfg.span_fraction);
    else if (cfg.kind == "regime-vs-human") corpus = concat(gen_stationary(sc), gen_regime_shift(sc));
    else if (cfg.kind == "insertion-vs-human")
        corpus = concat(gen_stationary(sc), gen_localized_insertion(sc, cfg.span_fraction));
    else throw UsageError("unknown --kind '" + cfg.kind + "'");

    const std::string config = to_json(cfg).dump();
    std::ostringstream out;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        DocumentRecord rec = corpus.records[i];
        rec.meta["tool_version"] = kToolVersion;
        rec.meta["config"] = config;
        out << serialize_record(rec, corpus.splits[i]) << '\n';
    }
    emit(cfg, cfg.output, out.str());
}

void cmd_featurize(const RunConfig& cfg) {
    const Corpus corpus = load_input(cfg);
    const auto fvs = featurize_all(corpus, cfg.pipeline(), cfg.jobs);
    std::vector<FeatureRow> rows;
    for (std::size_t i = 0; i < corpus.size(); ++i) rows.push_back({corpus.records[i].id, fvs[i], corpus.records[i].label});
    std::ostringstream out;
    out << csv_provenance(cfg);
    write_feature_csv(out, rows);
    emit(cfg, cfg.output, out.str());
}

void cmd_train(const RunConfig& cfg) {
    std::vector<FeaturePoint> points;
    std::vector<Label> labels;
    if (!cfg.features.empty()) {
        std::ifstream in(cfg.features);
        if (!in) throw DataError("cannot open feature file '" + cfg.features + "'");
        for (const auto& row : read_feature_csv(in)) {
            if (!row.label) throw DataError("training needs labels; feature row '" + row.id + "' has none");
            points.push_back(to_point(row.features));
            labels.push_back(*row.label);
        }
    } else {
        const Corpus dev = load_input(cfg).subset({Split::Train, Split::Dev});
        if (dev.empty()) throw DataError("corpus has no train/dev records");
        labels = labels_of(dev, "training");
        points = points_of(featurize_all(dev, cfg.pipeline(), cfg.jobs));
    }
    const SvmModel model = fit_svm(points, labels, cfg.svm_params());
    json j = to_json(model);
    j.update(json_provenance(cfg));
    j["n_train"] = points.size();
    emit(cfg, cfg.output, j.dump(2) + "\n");
}

namespace {

SvmModel load_model(const std::string& path) {
    if (path.empty()) throw UsageError("--model is required");
    std::ifstream in(path);
    if (!in) throw DataError("cannot open model file '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw DataError("model file '" + path + "' is not valid JSON: " + e.what());
    }
    return svm_from_json(j);
}

} // namespace

void cmd_detect(const RunConfig& cfg) {
    const Corpus corpus = load_input(cfg);
    const SvmModel model = load_model(cfg.model);
    const auto fvs = featurize_all(corpus, cfg.pipeline(), cfg.jobs);
    std::ostringstream out;
    out << csv_provenance(cfg) << "id,decision,prediction,label\n";
    out.precision(17);
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const double d = decision_function(model, fvs[i]);
        out << corpus.records[i].id << ',' << d << ',' << (d > 0.0 ? 1 : 0) << ',';
        if (corpus.records[i].label) out << static_cast<int>(*corpus.records[i].label);
        out << '\n';
    }
    emit(cfg, cfg.output, out.str());
}

void cmd_eval(const RunConfig& cfg) {
    const Corpus corpus = load_input(cfg);
    const PipelineConfig pipeline = cfg.pipeline();
    const auto [dev, test] = split_dev_test(corpus);
    const auto dev_labels = labels_of(dev, "evaluation");
    const auto test_labels = labels_of(test, "evaluation");

    const auto test_points = points_of(featurize_all(test, pipeline, cfg.jobs));
    const SvmModel model = cfg.model.empty()
                               ? fit_svm(points_of(featurize_all(dev, pipeline, cfg.jobs)), dev_labels, cfg.svm_params())
                               : load_model(cfg.model);
    const EvalReport tdt = evaluate_svm_path(model, test_points, test_labels, cfg.fpr_target);

    const auto dev_scalar = scalar_scores(dev, pipeline);
    const auto test_scalar = scalar_scores(test, pipeline);
    const EvalReport scalar = evaluate_threshold_path(dev_scalar, dev_labels, test_scalar, test_labels, cfg.fpr_target);

    const MiEstimate mi_tdt = mi_knn(test_points, test_labels, cfg.mi_k);
    std::vector<FeaturePoint> scalar_points;
    for (double s : test_scalar) scalar_points.push_back({s});
    const MiEstimate mi_scalar = mi_knn(scalar_points, test_labels, cfg.mi_k);

    const std::string name = dataset_name(cfg);
    std::ostringstream out;
    out << csv_provenance(cfg) << "method,dataset,auroc,f1,tpr_at_fpr,fpr_target,n_pos,n_neg,mi_bits\n";
    auto row = [&](const char* method, const EvalReport& r, const MiEstimate& mi) {
        out << method << ',' << name << ',' << fmt(r.auroc) << ',' << fmt(r.f1) << ',' << fmt(r.tpr_at_fpr) << ','
            << fmt(r.fpr_target) << ',' << r.n_pos << ',' << r.n_neg << ',' << fmt(mi.bits) << '\n';
    };
    row("tdt-svm", tdt, mi_tdt);
    row("scalar-mean", scalar, mi_scalar);
    emit(cfg, cfg.output, out.str());

    if (!cfg.json_output.empty()) {
        auto mi_json = [](const MiEstimate& m) {
            return json{{"bits", m.bits}, {"raw_bits", m.raw_bits}, {"k", m.k}, {"n", m.n}};
        };
        json per_dim = json::array();
        for (std::size_t d = 0; d < 3; ++d) {
            std::vector<FeaturePoint> col;
            for (const auto& p : test_points) col.push_back({p[d]});
            per_dim.push_back(mi_json(mi_knn(col, test_labels, cfg.mi_k)));
        }
        json j = json_provenance(cfg);
        j["dataset"] = name;
        j["methods"] = {{"tdt-svm", to_json(tdt)}, {"scalar-mean", to_json(scalar)}};
        j["mutual_information"] = {{"tdt_joint", mi_json(mi_tdt)},
                                   {"tdt_per_dimension", per_dim},
                                   {"scalar_mean", mi_json(mi_scalar)}};
        emit(cfg, cfg.json_output, j.dump(2) + "\n");
    }
}

void cmd_stationarity(const RunConfig& cfg) {
    const Corpus corpus = load_input(cfg);
    const PipelineConfig pipeline = cfg.pipeline();
    const StationarityReport report = analyze_corpus(
        corpus, cfg.stationarity(), [&](const DocumentRecord& r) { return discrepancy_of(r, pipeline); });

    std::ostringstream csv;
    csv << csv_provenance(cfg);
    write_stationarity_csv(csv, report);
    emit(cfg, cfg.output, csv.str());

    if (!cfg.json_output.empty()) {
        json j = json_provenance(cfg);
        j["aggregate"] = to_json(report);
        emit(cfg, cfg.json_output, j.dump(2) + "\n");
    }
}

void cmd_ablate(const RunConfig& cfg) {
    const Corpus corpus = load_input(cfg);
    const auto [dev, test] = split_dev_test(corpus);
    const auto dev_labels = labels_of(dev, "ablation");
    const auto test_labels = labels_of(test, "ablation");

    std::ostringstream out;
    out << csv_provenance(cfg) << "scales,energy,auroc,f1,tpr_at_fpr\n";
    for (std::size_t scales : {4, 8, 12}) {
        for (EnergyMetric metric : {EnergyMetric::Frobenius, EnergyMetric::L1, EnergyMetric::MaxAbs, EnergyMetric::MeanAbs}) {
            RunConfig cell = cfg;
            cell.scales = scales;
            cell.energy = to_string(metric);
            const PipelineConfig pipeline = cell.pipeline();
            const SvmModel model =
                fit_svm(points_of(featurize_all(dev, pipeline, cfg.jobs)), dev_labels, cfg.svm_params());
            const auto test_points = points_of(featurize_all(test, pipeline, cfg.jobs));
            const EvalReport r = evaluate_svm_path(model, test_points, test_labels, cfg.fpr_target);
            out << scales << ',' << to_string(metric) << ',' << fmt(r.auroc) << ',' << fmt(r.f1) << ','
                << fmt(r.tpr_at_fpr) << '\n';
        }
    }
    emit(cfg, cfg.output, out.str());
}

namespace {

// Serialized benchmark documents: half human, half localized insertion.
std::vector<std::string> bench_lines(const RunConfig& cfg) {
    std::vector<std::string> lines;
    if (!cfg.input.empty()) {
        const Corpus corpus = load_input(cfg);
        for (std::size_t i = 0; i < corpus.size() && lines.size() < cfg.bench_docs; ++i) {
            lines.push_back(serialize_record(corpus.records[i], corpus.splits[i]));
        }
    } else {
        SynthConfig sc = cfg.synth();
        sc.n_docs = (cfg.bench_docs + 1) / 2;
        Corpus corpus = concat(gen_stationary(sc), gen_localized_insertion(sc, cfg.span_fraction));
        const double correction = cfg.nu / (cfg.nu - 2.0);
        Xoshiro256 rng(cfg.seed ^ 0xBE7C4ULL);
        for (std::size_t i = 0; i < corpus.size() && lines.size() < cfg.bench_docs; ++i) {
            DocumentRecord rec = corpus.records[i];
            if (cfg.bench_format == "scored") {
                // Scorer-shaped record whose t-normalization reproduces z.
                const auto& z = *rec.z;
                std::vector<double> lp(z.size());
                std::vector<LogprobStat> stats(z.size());
                for (std::size_t t = 0; t < z.size(); ++t) {
                    stats[t].mean = -4.0 * rng.uniform() - 0.5;
                    stats[t].variance = 0.5 + 2.0 * rng.uniform();
                    lp[t] = stats[t].mean + z[t] * std::sqrt(stats[t].variance * correction);
                    rec.tokens.push_back("tok" + std::to_string(rng.below(50000)));
                }
                rec.logprobs = std::move(lp);
                rec.sampled_logprob_stats = std::move(stats);
                rec.z.reset();
            } else if (cfg.bench_format != "z") {
                throw UsageError("--bench-format must be 'scored' or 'z'");
            }
            lines.push_back(serialize_record(rec, corpus.splits[i]));
        }
    }
    if (lines.size() < 100 || lines.size() < cfg.bench_docs) {
        throw DataError("bench needs at least 100 documents (got " + std::to_string(lines.size()) + ")");
    }
    return lines;
}

volatile std::size_t bench_sink = 0;

double median(std::vector<double> v) {
    std::ranges::sort(v);
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace

BenchReport run_bench(const RunConfig& cfg) {
    if (cfg.bench_repeats == 0) throw UsageError("--bench-repeats must be >= 1");
    const PipelineConfig pipeline = cfg.pipeline();
    const auto lines = bench_lines(cfg);

    // Untimed fitting of both detectors on the benchmark documents.
    Corpus corpus;
    for (std::size_t i = 0; i < lines.size(); ++i) corpus.add(parse_record(lines[i], i + 1));
    const auto labels = labels_of(corpus, "bench");
    const SvmModel model = fit_svm(points_of(featurize_all(corpus, pipeline, 1)), labels, cfg.svm_params());
    const ThresholdModel threshold = fit_threshold(scalar_scores(corpus, pipeline), labels);

    auto scalar_path = [&](const std::string& line) {
        const DocumentRecord rec = parse_record(line, 1);
        return threshold.is_machine(scalar_score(discrepancy_of(rec, pipeline), ScalarMode::Mean));
    };
    auto tdt_path = [&](const std::string& line) {
        const DocumentRecord rec = parse_record(line, 1);
        return decision_function(model, featurize_document(rec, pipeline)) > 0.0;
    };

    BenchReport report;
    report.n_docs = lines.size();
    report.doc_length = corpus.records.front().length();
    for (const auto& line : lines) {
        report.flagged_scalar += scalar_path(line);
        report.flagged_tdt += tdt_path(line);
    }

    using clock = std::chrono::steady_clock;
    std::vector<double> t_scalar, t_tdt;
    std::size_t sink = 0;
    for (std::size_t r = 0; r < cfg.bench_repeats; ++r) {
        for (const auto& line : lines) {
            const auto a = clock::now();
            sink += scalar_path(line);
            const auto b = clock::now();
            sink += tdt_path(line);
            const auto c = clock::now();
            t_scalar.push_back(std::chrono::duration<double, std::milli>(b - a).count());
            t_tdt.push_back(std::chrono::duration<double, std::milli>(c - b).count());
        }
    }
    bench_sink = sink;
    report.samples_per_path = t_scalar.size();
    report.scalar_median_ms = median(t_scalar);
    report.tdt_median_ms = median(t_tdt);
    report.overhead_pct = (report.tdt_median_ms - report.scalar_median_ms) / report.scalar_median_ms * 100.0;
    return report;
}

json to_json(const BenchReport& r) {
    return {{"n_docs", r.n_docs},
            {"doc_length", r.doc_length},
            {"samples_per_path", r.samples_per_path},
            {"flagged_scalar", r.flagged_scalar},
            {"flagged_tdt", r.flagged_tdt},
            {"timing",
             {{"scalar_median_ms", r.scalar_median_ms},
              {"tdt_median_ms", r.tdt_median_ms},
              {"overhead_pct", r.overhead_pct}}}};
}

void cmd_bench(const RunConfig& cfg) {
    const BenchReport report = run_bench(cfg);
    json j = json_provenance(cfg);
    j["bench"] = to_json(report);
    emit(cfg, cfg.output, j.dump(2) + "\n");
}

} // namespace tdt::app
