#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "lcl/bench.hpp"
#include "lcl/errors.hpp"

using namespace lcl;
namespace fs = std::filesystem;

namespace {

std::string filler_words(const std::string& tag, std::size_t n) {
    std::string s;
    for (std::size_t i = 0; i < n; ++i) {
        if (i) s += " ";
        s += tag + std::to_string(i);
    }
    return s;
}

// QA task whose answer sits in exactly one chunk-sized region of the document.
EvalTask evidence_task(const std::string& id, std::size_t doc_tokens, std::size_t evidence_at,
                       const std::string& key) {
    Tokenizer tok;
    EvalTask t;
    t.id = id;
    std::string doc = filler_words("pad", evidence_at);
    doc += " The pass key is " + key + ".";
    const std::size_t used = tok.count(doc);
    if (used < doc_tokens) doc += " " + filler_words("tail", doc_tokens - used);
    t.document = doc;
    t.question = "What is the pass key?";
    t.answers = {key};
    t.type = TaskType::Qa;
    t.metric = MetricKind::F1;
    return t;
}

Gateway make_stub_gateway(const std::string& cache_dir = {}) {
    GatewayConfig cfg;
    cfg.cache_dir = cache_dir;
    cfg.stub = StubModelSpec{StubModelKind::NeedleExtractor, 0, ""};
    return Gateway(cfg);
}

}  // namespace

TEST_CASE("score_prediction dispatches on the task metric") {
    EvalTask t;
    t.answers = {"b c d"};
    t.metric = MetricKind::F1;
    CHECK(score_prediction(t, "e b c") == doctest::Approx(2.0 / 3.0));
    t.metric = MetricKind::Em;
    CHECK(score_prediction(t, "b c d") == 1.0);
    t.metric = MetricKind::RougeGeo;
    CHECK(score_prediction(t, "b c d") == doctest::Approx(1.0));
    t.metric = MetricKind::Mc;
    t.choices = {"b c d", "x"};
    t.correct_choice = 0;
    CHECK(score_prediction(t, "b c d") == 1.0);
}

TEST_CASE("rag run finds single-evidence answers via retrieval") {
    Tokenizer tok;
    std::vector<EvalTask> tasks;
    for (int i = 0; i < 4; ++i) {
        tasks.push_back(evidence_task("t" + std::to_string(i), 400, 120 + 40 * i,
                                      std::to_string(100000 + i)));
    }
    auto gw = make_stub_gateway();

    RunConfig cfg;
    cfg.dataset_name = "synthetic";
    cfg.mode = EvalMode::Rag;
    cfg.retrieval.chunk_size_tokens = 50;
    cfg.retrieval.top_k = 40;  // retrieve everything: evidence guaranteed present
    auto row = run_eval(tasks, cfg, gw, tok);
    CHECK(row.score == doctest::Approx(100.0));
    CHECK(row.n_items == 4);
    CHECK(row.valid);
    CHECK(row.mode == "rag");
    CHECK(row.total_retrieved_tokens > 0);
}

TEST_CASE("full-context run with stub extractor scores perfectly on fitting docs") {
    Tokenizer tok;
    std::vector<EvalTask> tasks = {evidence_task("t0", 200, 60, "424242")};
    auto gw = make_stub_gateway();

    RunConfig cfg;
    cfg.dataset_name = "synthetic";
    cfg.mode = EvalMode::FullContext;
    cfg.window.window_tokens = 4096;
    auto row = run_eval(tasks, cfg, gw, tok);
    CHECK(row.score == doctest::Approx(100.0));
    CHECK(row.mode == "full");
}

TEST_CASE("fixed-answer stub matching all golds scores 100") {
    Tokenizer tok;
    GatewayConfig gcfg;
    gcfg.stub = StubModelSpec{StubModelKind::FixedAnswer, 0, "the one answer"};
    Gateway gw(gcfg);
    std::vector<EvalTask> tasks;
    for (int i = 0; i < 3; ++i) {
        EvalTask t;
        t.id = "t" + std::to_string(i);
        t.document = filler_words("doc", 50);
        t.question = "q?";
        t.answers = {"the one answer"};
        t.metric = MetricKind::Em;
        tasks.push_back(t);
    }
    RunConfig cfg;
    cfg.mode = EvalMode::FullContext;
    cfg.window.window_tokens = 1024;
    CHECK(run_eval(tasks, cfg, gw, tok).score == doctest::Approx(100.0));
}

TEST_CASE("sweep covers the 3x4 grid and is monotone in k") {
    Tokenizer tok;
    std::mt19937_64 rng(21);
    std::vector<EvalTask> tasks;
    for (int i = 0; i < 6; ++i) {
        std::uniform_int_distribution<std::size_t> at(0, 4000);
        tasks.push_back(evidence_task("t" + std::to_string(i), 4800, at(rng),
                                      std::to_string(200000 + i)));
    }
    auto gw = make_stub_gateway();
    RunConfig base;
    base.dataset_name = "sweep";

    const std::vector<std::size_t> sizes = {300, 600, 1200};
    const std::vector<std::size_t> ks = {5, 10, 20, 40};
    auto points = sweep(tasks, base, sizes, ks, gw, tok);
    REQUIRE(points.size() == 12);

    // x-axis values are k * chunk_size
    CHECK(points[0].retrieved_tokens == 1500);
    bool has_3000 = false, has_48000 = false;
    for (const auto& p : points) {
        CHECK(p.retrieved_tokens == p.chunk_size * p.top_k);
        if (p.retrieved_tokens == 3000) has_3000 = true;
        if (p.retrieved_tokens == 48000) has_48000 = true;
    }
    CHECK(has_3000);
    CHECK(has_48000);

    // nested top-k makes scores non-decreasing in k at fixed chunk size
    for (std::size_t s = 0; s < sizes.size(); ++s) {
        for (std::size_t k = 1; k < ks.size(); ++k) {
            CHECK(points[s * ks.size() + k].score >= points[s * ks.size() + k - 1].score - 1e-9);
        }
    }

    write_sweep_csv(points, "test_sweep.csv");
    write_sweep_svg(points, "test_sweep.svg");
    std::ifstream csv("test_sweep.csv");
    std::string line;
    std::size_t rows = 0;
    while (std::getline(csv, line)) ++rows;
    CHECK(rows == 13);
    std::remove("test_sweep.csv");
    std::remove("test_sweep.svg");
}

TEST_CASE("compare modes and report emission") {
    Tokenizer tok;
    std::vector<EvalTask> tasks = {evidence_task("a", 300, 100, "777777"),
                                   evidence_task("b", 300, 200, "888888")};
    auto gw = make_stub_gateway();

    RunConfig rag;
    rag.dataset_name = "cmp";
    rag.retrieval.chunk_size_tokens = 100;
    rag.retrieval.top_k = 10;
    RunConfig full;
    full.window.window_tokens = 2048;

    auto table = compare_modes(tasks, rag, full, gw, tok);
    REQUIRE(table.rows.size() == 2);
    CHECK(table.rows[0].mode == "rag");
    CHECK(table.rows[1].mode == "full");
    CHECK(table.rows[0].dataset == table.rows[1].dataset);
    CHECK_FALSE(table.template_versions.empty());

    write_results_csv(table, "test_results.csv");
    write_report_md(table, "test_report.md");

    // markdown round-trips the csv score values
    std::ifstream csv("test_results.csv");
    std::string line, all_md;
    std::getline(csv, line);  // header
    std::ifstream md("test_report.md");
    std::stringstream mdbuf;
    mdbuf << md.rdbuf();
    all_md = mdbuf.str();
    while (std::getline(csv, line)) {
        std::istringstream row(line);
        std::string field;
        std::getline(row, field, ',');  // dataset
        std::getline(row, field, ',');  // mode
        std::getline(row, field, ',');  // config (quoted)
        std::getline(row, field, ',');  // score
        CHECK(all_md.find(field) != std::string::npos);
    }
    std::remove("test_results.csv");
    std::remove("test_report.md");

    ResultTable empty;
    CHECK_THROWS_AS(write_results_csv(empty, "nope.csv"), ArgumentError);
    CHECK_THROWS_AS(write_report_md(empty, "nope.md"), ArgumentError);
}

TEST_CASE("warm cache reruns are byte-identical with zero network calls") {
    Tokenizer tok;
    const fs::path tmp = fs::temp_directory_path() / "lcl_bench_cache_test";
    fs::remove_all(tmp);
    std::vector<EvalTask> tasks = {evidence_task("a", 300, 100, "999999")};

    RunConfig cfg;
    cfg.dataset_name = "determinism";
    cfg.retrieval.chunk_size_tokens = 100;
    cfg.retrieval.top_k = 5;

    std::string csv1, csv2;
    for (int round = 0; round < 2; ++round) {
        auto gw = make_stub_gateway((tmp / "cache").string());
        ResultTable table;
        table.rows.push_back(run_eval(tasks, cfg, gw, tok));
        const std::string path = (tmp / ("results" + std::to_string(round) + ".csv")).string();
        write_results_csv(table, path);
        std::ifstream in(path);
        std::stringstream buf;
        buf << in.rdbuf();
        (round == 0 ? csv1 : csv2) = buf.str();
        CHECK(gw.network_calls() == 0);  // stub-backed runs never touch the network
        if (round == 1) CHECK(gw.cache_hits() > 0);
    }
    CHECK(csv1 == csv2);
    fs::remove_all(tmp);
}

TEST_CASE("mode parity when the document fits both paths") {
    Tokenizer tok;
    // 90-token doc: 1 chunk covers it, window holds it; both modes see the same tokens
    std::vector<EvalTask> tasks = {evidence_task("p", 90, 30, "313131")};
    auto gw = make_stub_gateway();

    RunConfig rag;
    rag.retrieval.chunk_size_tokens = 1200;
    rag.retrieval.top_k = 5;
    RunConfig full;
    full.window.window_tokens = 4096;

    auto table = compare_modes(tasks, rag, full, gw, tok);
    CHECK(table.rows[0].score == doctest::Approx(table.rows[1].score));
}

TEST_CASE("task jsonl io") {
    const std::string path = "test_tasks.jsonl";
    {
        std::ofstream out(path);
        out << R"({"id":"1","document":"doc text","question":"q?","answers":["a"],"task_type":"qa","metric":"f1"})"
            << "\n";
        out << R"({"id":"2","document":"doc","question":"q?","answers":[],"choices":["x","y"],"correct_choice":1,"task_type":"mc","metric":"mc"})"
            << "\n";
    }
    auto tasks = read_jsonl_tasks(path);
    REQUIRE(tasks.size() == 2);
    CHECK(tasks[0].metric == MetricKind::F1);
    CHECK(tasks[1].type == TaskType::Mc);
    CHECK(tasks[1].correct_choice == 1);
    std::remove(path.c_str());

    CHECK_THROWS_AS(read_jsonl_tasks("missing_tasks.jsonl"), ConfigError);
}
