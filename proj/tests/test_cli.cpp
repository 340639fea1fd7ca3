#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <sys/wait.h>
#include <unistd.h>

#include "commands.hpp"
#include "parallel.hpp"
#include "run_config.hpp"
#include "tdt/error.hpp"
#include "tdt/ingest.hpp"

using namespace tdt;
using namespace tdt::app;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("tdt_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

int run_cli(const std::string& args) {
    const std::string cmd = std::string(TDT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::string> data_lines(const std::string& path) {
    std::ifstream in(path);
    std::vector<std::string> out;
    for (std::string line; std::getline(in, line);) {
        if (!line.empty() && line[0] != '#') out.push_back(line);
    }
    return out;
}

} // namespace

TEST_CASE("run config round trips through JSON") {
    RunConfig cfg;
    cfg.C = 3.5;
    cfg.gamma = "0.25";
    cfg.scales = 8;
    cfg.energy = "l1";
    cfg.seed = 123456789012345ULL;
    cfg.bandwidth_override = 2.0;
    RunConfig back;
    apply_json(back, to_json(cfg));
    CHECK(to_json(back) == to_json(cfg));
    CHECK(back.svm_params().gamma == 0.25);
    CHECK(back.pipeline().morlet.scales.size() == 8);
    CHECK(back.pipeline().energy == EnergyMetric::L1);

    CHECK_THROWS_AS(apply_json(back, nlohmann::json{{"no_such_knob", 1}}), UsageError);
    CHECK_THROWS_AS(apply_json(back, nlohmann::json{{"C", "high"}}), UsageError);
    CHECK(!to_json(cfg).contains("output"));
    CHECK(!to_json(cfg).contains("jobs"));
}

TEST_CASE("parallel_map keeps order and reports the first failure") {
    const auto sq = parallel_map<int>(100, 4, [](std::size_t i) { return static_cast<int>(i * i); });
    for (std::size_t i = 0; i < 100; ++i) CHECK(sq[i] == static_cast<int>(i * i));
    CHECK(parallel_map<int>(0, 4, [](std::size_t) { return 1; }).empty());
    try {
        parallel_map<int>(50, 8, [](std::size_t i) -> int {
            if (i == 7 || i == 31) throw std::runtime_error("fail " + std::to_string(i));
            return 0;
        });
        FAIL("expected an exception");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()) == "fail 7");
    }
}

TEST_CASE("library commands write files") {
    TempDir dir;
    RunConfig cfg;
    cfg.kind = "regime-vs-human";
    cfg.n_docs = 6;
    cfg.doc_length = 64;
    cfg.output = dir / "corpus.jsonl";
    cmd_synth(cfg);
    const Corpus c = read_corpus(cfg.output);
    CHECK(c.size() == 12);
    CHECK(c.records[0].meta.at("tool_version") == kToolVersion);
    CHECK(nlohmann::json::parse(c.records[0].meta.at("config"))["kind"] == "regime-vs-human");
}

TEST_CASE("exit codes") {
    TempDir dir;
    CHECK(run_cli("--version") == 0);
    CHECK(run_cli("") == 2);
    CHECK(run_cli("frobnicate") == 2);
    CHECK(run_cli("synth --n-docs notanumber") == 2);
    CHECK(run_cli("synth --kind bogus -o " + (dir / "x.jsonl")) == 2);
    CHECK(run_cli("featurize --in " + (dir / "missing.jsonl")) == 3);

    {
        std::ofstream bad(dir / "bad.jsonl");
        bad << R"({"id":"a","z":[1,2,3],"label":1})" << "\n" << "{broken\n";
    }
    CHECK(run_cli("featurize --in " + (dir / "bad.jsonl") + " -o " + (dir / "f.csv")) == 3);
    const std::string err_cmd = std::string(TDT_CLI_PATH) + " featurize --in " + (dir / "bad.jsonl") + " -o " +
                                (dir / "f.csv") + " 2>" + (dir / "err.txt");
    CHECK(std::system(err_cmd.c_str()) != 0);
    CHECK(slurp(dir / "err.txt").find("line 2") != std::string::npos);

    {
        std::ofstream cfg(dir / "cfg.json");
        cfg << R"({"unknown_key": 1})";
    }
    CHECK(run_cli("synth --config " + (dir / "cfg.json") + " -o " + (dir / "y.jsonl")) == 2);
}

TEST_CASE("end-to-end through the command line") {
    TempDir dir;
    const std::string corpus = dir / "corpus.jsonl";
    REQUIRE(run_cli("synth --kind regime-vs-human --n-docs 30 --doc-length 128 --seed 5 -o " + corpus) == 0);
    REQUIRE(run_cli("featurize --in " + corpus + " -o " + (dir / "features.csv") + " -j 3") == 0);
    const auto feats = data_lines(dir / "features.csv");
    CHECK(feats.size() == 61);
    CHECK(feats[0] == "id,morph,syn,disc,n_tokens,label");

    REQUIRE(run_cli("train --in " + corpus + " -o " + (dir / "model.json")) == 0);
    const auto model = nlohmann::json::parse(slurp(dir / "model.json"));
    CHECK(model.contains("support_vectors"));
    CHECK(model["n_train"] == 30); // train + dev splits only

    REQUIRE(run_cli("train --features " + (dir / "features.csv") + " -o " + (dir / "model2.json")) == 0);
    REQUIRE(run_cli("detect --in " + corpus + " --model " + (dir / "model.json") + " -o " + (dir / "detect.csv")) == 0);
    CHECK(data_lines(dir / "detect.csv").size() == 61);

    REQUIRE(run_cli("eval --in " + corpus + " -o " + (dir / "eval.csv") + "  --json-out " + (dir / "eval.json")) == 0);
    const auto eval = data_lines(dir / "eval.csv");
    REQUIRE(eval.size() == 3);
    CHECK(eval[1].rfind("tdt-svm,", 0) == 0);
    CHECK(eval[2].rfind("scalar-mean,", 0) == 0);
    const auto ej = nlohmann::json::parse(slurp(dir / "eval.json"));
    CHECK(ej["methods"]["tdt-svm"]["auroc"].get<double>() > 0.9);

    REQUIRE(run_cli("stationarity --in " + corpus + " -o " + (dir / "st.csv") + "  --json-out " + (dir / "st.json")) == 0);
    CHECK(data_lines(dir / "st.csv").size() == 61);
    CHECK(nlohmann::json::parse(slurp(dir / "st.json"))["aggregate"].contains("shift_ratio_pct"));

    REQUIRE(run_cli("ablate --in " + corpus + " -o " + (dir / "ablate.csv")) == 0);
    const auto ab = data_lines(dir / "ablate.csv");
    CHECK(ab.size() == 13);
    CHECK(std::count_if(ab.begin(), ab.end(), [](const std::string& l) { return l.rfind("12,frobenius,", 0) == 0; }) == 1);
}
