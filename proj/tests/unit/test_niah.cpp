#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "lcl/errors.hpp"
#include "lcl/niah.hpp"

using namespace lcl;

namespace {

// filler with regular sentence boundaries: "f0 f1 f2 s. f4 ..." (4 tokens per sentence)
std::vector<Document> make_filler(std::size_t tokens) {
    std::ostringstream text;
    std::size_t emitted = 0;
    std::size_t i = 0;
    while (emitted < tokens) {
        text << "filler" << i << " word" << i << " thing" << i << ". ";
        emitted += 4;
        ++i;
    }
    Tokenizer tok;
    return {Document{"filler", text.str(), tok.count(text.str())}};
}

}  // namespace

TEST_CASE("haystack token accounting and boundary depths") {
    Tokenizer tok;
    auto filler = make_filler(600);
    NiahCase c;
    c.needle = "The pass key is 385243. Remember it. 385243 is the pass key.";
    c.question = "What is the pass key?";
    c.expected_answer = "385243";
    c.context_len_tokens = 400;

    for (double depth : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        c.depth = depth;
        const std::string hay = build_haystack(filler, c, tok);
        CHECK(tok.count(hay) == 400);
        // the needle occurs exactly once
        std::size_t first = hay.find(c.needle);
        REQUIRE(first != std::string::npos);
        CHECK(hay.find(c.needle, first + 1) == std::string::npos);
    }

    c.depth = 0.0;
    CHECK(build_haystack(filler, c, tok).rfind(c.needle, 0) == 0);  // starts with needle
    c.depth = 1.0;
    const std::string hay = build_haystack(filler, c, tok);
    CHECK(hay.substr(hay.size() - c.needle.size()) == c.needle);

    c.context_len_tokens = 100'000;
    CHECK_THROWS_AS(build_haystack(filler, c, tok), DataError);
}

TEST_CASE("filler containing the needle is scrubbed") {
    Tokenizer tok;
    NiahCase c;
    c.needle = "The pass key is 385243.";
    c.expected_answer = "385243";
    c.context_len_tokens = 60;
    c.depth = 0.5;
    std::string poisoned = "some text here. The pass key is 385243. more words follow. ";
    for (int i = 0; i < 20; ++i) poisoned += "pad" + std::to_string(i) + " words go here. ";
    std::vector<Document> filler{Document{"p", poisoned, tok.count(poisoned)}};
    const std::string hay = build_haystack(filler, c, tok);
    std::size_t first = hay.find(c.needle);
    REQUIRE(first != std::string::npos);
    CHECK(hay.find(c.needle, first + 1) == std::string::npos);
}

TEST_CASE("needle insertion snaps to the nearest sentence boundary") {
    Tokenizer tok;
    auto filler = make_filler(300);
    NiahCase c;
    c.needle = "The pass key is 385243.";
    c.context_len_tokens = 200;
    c.depth = 0.5;
    const std::size_t off = needle_token_offset(filler, c, tok);
    // sentences are 4 tokens each, so boundaries are multiples of 4
    CHECK(off % 4 == 0);
    const std::size_t budget = 200 - tok.count(c.needle);
    const double target = 0.5 * static_cast<double>(budget);
    CHECK(std::abs(static_cast<double>(off) - target) <= 4.0);
}

TEST_CASE("standard cases") {
    auto cases = make_standard_cases(NiahVariant::Passkey, {1000, 2000}, {0.0, 0.5, 1.0});
    CHECK(cases.size() == 6);
    CHECK(cases[0].expected_answer == "385243");
    CHECK(cases[0].needle == "The pass key is 385243. Remember it. 385243 is the pass key.");
    CHECK(cases[0].question == "What is the pass key?");

    auto sandwich = make_standard_cases(NiahVariant::Sandwich, {1000}, {0.5});
    CHECK(sandwich[0].needle ==
          "The best thing to do in San Francisco is eat a sandwich and sit in Dolores Park on a "
          "sunny day.");
    CHECK(sandwich[0].expected_answer == "eat a sandwich and sit in Dolores Park");

    CHECK_THROWS_AS(make_standard_cases(NiahVariant::Passkey, {}, {0.5}), ArgumentError);
}

TEST_CASE("case scoring is normalized containment") {
    NiahCase c;
    c.expected_answer = "385243";
    CHECK(score_case("the key is 385243.", c) == 1);
    CHECK(score_case("The pass key is 385243. Remember it.", c) == 1);
    CHECK(score_case("", c) == 0);
    CHECK(score_case("I could not find it", c) == 0);

    NiahCase s;
    s.expected_answer = "eat a sandwich and sit in Dolores Park";
    CHECK(score_case("You should EAT A SANDWICH and sit in dolores park!", s) == 1);
}

TEST_CASE("grid run with stub extractor and csv/svg emission") {
    Tokenizer tok;
    auto filler = make_filler(3000);
    auto cases = make_standard_cases(NiahVariant::Passkey, {500, 1000, 2000}, {0.0, 0.5, 1.0});

    GatewayConfig gcfg;
    gcfg.stub = StubModelSpec{StubModelKind::NeedleExtractor, 0, ""};
    Gateway gw(gcfg);

    NiahRunConfig rcfg;
    rcfg.window.window_tokens = 4096;  // everything fits
    auto grid = run_grid(cases, filler, gw, rcfg, tok);
    REQUIRE(grid.cells.size() == 9);
    for (const auto& cell : grid.cells) {
        CHECK_FALSE(cell.missing);
        CHECK(cell.score == 1.0);
    }

    write_grid_csv(grid, "test_grid.csv");
    std::ifstream csv("test_grid.csv");
    std::string line;
    std::size_t rows = 0;
    while (std::getline(csv, line)) ++rows;
    CHECK(rows == 10);  // header + one row per cell

    write_grid_svg(grid, "test_grid.svg");
    std::ifstream svg("test_grid.svg");
    std::stringstream buf;
    buf << svg.rdbuf();
    CHECK(buf.str().find("<svg") != std::string::npos);
    std::remove("test_grid.csv");
    std::remove("test_grid.svg");
}

TEST_CASE("truncation-induced zeros are exactly predictable") {
    Tokenizer tok;
    auto filler = make_filler(3000);
    auto cases = make_standard_cases(NiahVariant::Passkey, {500, 2000}, {0.0, 0.5, 1.0});

    GatewayConfig gcfg;
    gcfg.stub = StubModelSpec{StubModelKind::NeedleExtractor, 0, ""};
    Gateway gw(gcfg);

    NiahRunConfig rcfg;
    rcfg.window.window_tokens = 1000;  // the 2000-token contexts lose their middle
    rcfg.window.strategy = TruncationStrategy::DropMiddle;
    auto grid = run_grid(cases, filler, gw, rcfg, tok);

    for (const auto& cell : grid.cells) {
        REQUIRE_FALSE(cell.missing);
        NiahCase c = cases[0];
        c.context_len_tokens = cell.length;
        c.depth = cell.depth;
        const std::size_t needle_len = tok.count(c.needle);
        const std::size_t needle_at = needle_token_offset(filler, c, tok);
        const std::size_t overhead = tok.count(rcfg.instruction) +
                                     tok.count("Question: " + c.question + "\nAnswer:");
        const std::size_t avail = rcfg.window.window_tokens - overhead;
        double expect = 1.0;
        if (cell.length > avail) {
            const std::size_t budget = avail - tok.count("[...]");
            const std::size_t head = (budget + 1) / 2;
            const std::size_t tail = budget / 2;
            // The extractor needs "The pass key is 385243" intact: the first
            // five needle tokens inside the kept head, or the whole needle
            // inside the kept tail.
            (void)needle_len;
            const bool in_head = needle_at + 5 <= head;
            const bool in_tail = needle_at >= cell.length - tail;
            expect = (in_head || in_tail) ? 1.0 : 0.0;
        }
        CHECK(cell.score == expect);
    }
}

TEST_CASE("default grid axes") {
    auto lens = default_lengths(1000, 131072, 8);
    CHECK(lens.front() == 1000);
    CHECK(lens.back() == 131072);
    for (std::size_t i = 1; i < lens.size(); ++i) CHECK(lens[i] > lens[i - 1]);

    auto depths = default_depths(10);
    CHECK(depths.size() == 10);
    CHECK(depths.front() == 0.0);
    CHECK(depths.back() == 1.0);
}
