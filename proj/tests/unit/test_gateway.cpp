#include <doctest.h>

#include <filesystem>
#include <random>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "lcl/errors.hpp"
#include "lcl/gateway.hpp"

using namespace lcl;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / ("lcl_test_" + std::to_string(std::random_device{}()))) {
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string words(std::size_t n) {
    std::string s;
    for (std::size_t i = 0; i < n; ++i) {
        if (i) s += " ";
        s += "w" + std::to_string(i);
    }
    return s;
}

}  // namespace

TEST_CASE("canonical request hash is stable") {
    ChatRequest a;
    a.messages = {{"system", "sys"}, {"user", "hello"}};
    ChatRequest b = a;
    CHECK(request_hash(a) == request_hash(b));
    CHECK(canonical_request_json(a).find(' ') == std::string::npos);

    b.messages[1].content = "hello!";
    CHECK(request_hash(a) != request_hash(b));

    ChatRequest c = a;
    c.temperature = 0.5;
    CHECK(request_hash(a) != request_hash(c));
}

TEST_CASE("fit_to_window basics") {
    Tokenizer tok;
    PromptParts parts{"instr here", words(10), "the question"};

    // everything fits: untouched
    auto fitted = fit_to_window(parts, WindowPolicy{100, TruncationStrategy::DropMiddle}, tok);
    CHECK(fitted.document == parts.document);
    CHECK(fitted.dropped_tokens == 0);

    // 20-token doc, 6-token doc budget after the marker: first 3 + marker + last 3
    PromptParts big{"instr here", words(20), "the question"};
    const std::size_t overhead = tok.count(big.instruction) + tok.count(big.question) +
                                 tok.count("[...]");
    auto mid = fit_to_window(big, WindowPolicy{overhead + 6, TruncationStrategy::DropMiddle}, tok);
    CHECK(mid.dropped_tokens == 14);
    CHECK(mid.document == "w0 w1 w2\n[...]\nw17 w18 w19");

    // drop-left keeps the suffix
    const std::size_t plain = tok.count(parts.instruction) + tok.count(parts.question);
    auto left = fit_to_window(parts, WindowPolicy{plain + 4, TruncationStrategy::DropLeft}, tok);
    CHECK(left.document == "w6 w7 w8 w9");
    CHECK(left.dropped_tokens == 6);

    CHECK_THROWS_AS(fit_to_window(parts, WindowPolicy{plain + 4, TruncationStrategy::Error}, tok),
                    WindowOverflowError);
    CHECK_THROWS_AS(fit_to_window(parts, WindowPolicy{2, TruncationStrategy::DropLeft}, tok),
                    WindowOverflowError);
}

TEST_CASE("fit_to_window never exceeds the window") {
    Tokenizer tok;
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<std::size_t> doc_len(0, 200), win(12, 120);
    for (int i = 0; i < 300; ++i) {
        PromptParts parts{"answer from the document", words(doc_len(rng)), "what is it?"};
        const WindowPolicy policy{win(rng),
                                  i % 2 ? TruncationStrategy::DropMiddle : TruncationStrategy::DropLeft};
        auto fitted = fit_to_window(parts, policy, tok);
        CHECK(tok.count(fitted.text) <= policy.window_tokens);
    }
}

TEST_CASE("prompt templates") {
    EvalTask qa;
    qa.id = "t1";
    qa.question = "who?";
    qa.type = TaskType::Qa;
    auto r1 = build_prompt(EvalMode::Rag, qa, "some context");
    auto r2 = build_prompt(EvalMode::Rag, qa, "some context");
    CHECK(canonical_request_json(r1) == canonical_request_json(r2));
    CHECK(r1.temperature == 0.0);

    EvalTask mc = qa;
    mc.type = TaskType::Mc;
    mc.choices = {"red", "green", "blue", "yellow"};
    auto rm = build_prompt(EvalMode::FullContext, mc, "ctx");
    const std::string& user = rm.messages[1].content;
    for (const char* c : {"A. red", "B. green", "C. blue", "D. yellow"}) {
        CHECK(user.find(c) != std::string::npos);
    }

    CHECK_THROWS_AS(build_prompt(EvalMode::Rag, qa, ""), ArgumentError);
    CHECK(prompt_template_version(TaskType::Summ) == "summ-v1");
}

TEST_CASE("stub models") {
    GatewayConfig cfg;
    cfg.stub = StubModelSpec{StubModelKind::NeedleExtractor, 0, ""};
    Gateway gw(cfg);

    ChatRequest req;
    req.messages = {{"user", "blah blah. The pass key is 385243. Remember it. more text"}};
    CHECK(gw.complete(req) == "385243");

    req.messages = {{"user",
                     "filler. The best thing to do in San Francisco is eat a sandwich and sit in "
                     "Dolores Park on a sunny day. filler"}};
    CHECK(gw.complete(req) == "eat a sandwich and sit in Dolores Park on a sunny day");

    req.messages = {{"user", "nothing to extract here"}};
    CHECK(gw.complete(req) == "");

    GatewayConfig fixed_cfg;
    fixed_cfg.stub = StubModelSpec{StubModelKind::FixedAnswer, 0, "always this"};
    Gateway fixed(fixed_cfg);
    CHECK(fixed.complete(req) == "always this");

    GatewayConfig echo_cfg;
    echo_cfg.stub = StubModelSpec{StubModelKind::EchoFirstK, 3, ""};
    Gateway echo(echo_cfg);
    req.messages = {{"user", "one two three four five"}};
    CHECK(echo.complete(req) == "one two three");
}

TEST_CASE("completion cache round trip") {
    TempDir tmp;
    GatewayConfig cfg;
    cfg.cache_dir = (tmp.path / "cache").string();
    cfg.stub = StubModelSpec{StubModelKind::FixedAnswer, 0, "cached answer"};

    ChatRequest req;
    req.messages = {{"user", "question text"}};

    Gateway gw(cfg);
    CHECK(gw.complete(req) == "cached answer");
    CHECK(gw.cache_hits() == 0);
    CHECK(gw.complete(req) == "cached answer");
    CHECK(gw.cache_hits() == 1);

    // a fresh gateway on the same cache dir needs no stub call either
    GatewayConfig cold = cfg;
    cold.stub = StubModelSpec{StubModelKind::FixedAnswer, 0, "different"};
    Gateway gw2(cold);
    CHECK(gw2.complete(req) == "cached answer");  // byte-identical from disk
    CHECK(gw2.cache_hits() == 1);

    // layout: cache/<first-2>/<hash>.json
    const std::string h = request_hash(req);
    CHECK(fs::exists(fs::path(cfg.cache_dir) / h.substr(0, 2) / (h + ".json")));
}

TEST_CASE("stub embeddings are deterministic unit vectors") {
    GatewayConfig cfg;
    Gateway gw(cfg);
    auto a = gw.embed({"some text", "other text"});
    auto b = gw.embed({"some text", "other text"});
    REQUIRE(a.size() == 2);
    CHECK(a[0].values == b[0].values);
    CHECK(a[1].values == b[1].values);
    double norm = 0;
    for (float x : a[0].values) norm += double(x) * x;
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(a[0].values != a[1].values);

    // bag-of-words stub: shared vocabulary raises cosine similarity
    auto sims = gw.embed({"the red cat sat on the mat",
                          "red cat on a mat",
                          "quantum flux capacitor array"});
    CHECK(dot(sims[0], sims[1]) > dot(sims[0], sims[2]));

    CHECK_THROWS_AS(gw.embed({}), ArgumentError);
}

TEST_CASE("http transport with retries and caching") {
    httplib::Server server;
    std::atomic<int> hits{0};
    server.Post("/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
        ++hits;
        auto j = nlohmann::json::parse(req.body);
        nlohmann::json out;
        out["choices"] = {{{"message", {{"role", "assistant"},
                                        {"content", "echo:" + j["messages"].back()["content"].get<std::string>()}}}}};
        res.set_content(out.dump(), "application/json");
    });
    const int port = server.bind_to_any_port("127.0.0.1");
    std::thread th([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    TempDir tmp;
    GatewayConfig cfg;
    cfg.cache_dir = (tmp.path / "cache").string();
    cfg.chat.base_url = "http://127.0.0.1:" + std::to_string(port);

    Gateway gw(cfg);
    ChatRequest req;
    req.messages = {{"user", "ping"}};
    CHECK(gw.complete(req) == "echo:ping");
    CHECK(gw.network_calls() == 1);
    CHECK(gw.complete(req) == "echo:ping");
    CHECK(gw.network_calls() == 1);  // warm cache, no second call
    CHECK(hits.load() == 1);

    server.stop();
    th.join();
}

TEST_CASE("transport error carries status") {
    httplib::Server server;
    server.Post("/chat/completions", [](const httplib::Request&, httplib::Response& res) {
        res.status = 400;
    });
    const int port = server.bind_to_any_port("127.0.0.1");
    std::thread th([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    GatewayConfig cfg;
    cfg.chat.base_url = "http://127.0.0.1:" + std::to_string(port);
    cfg.max_retries = 1;
    cfg.backoff_ms = 1;
    Gateway gw(cfg);
    ChatRequest req;
    req.messages = {{"user", "x"}};
    try {
        gw.complete(req);
        FAIL("expected TransportError");
    } catch (const TransportError& e) {
        CHECK(e.status() == 400);
    }
    server.stop();
    th.join();
}
