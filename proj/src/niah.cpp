#include "lcl/niah.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "lcl/errors.hpp"

namespace lcl {

namespace {

const char* kSandwichNeedle =
    "The best thing to do in San Francisco is eat a sandwich and sit in Dolores Park on a "
    "sunny day.";
const char* kPasskeyNeedle = "The pass key is 385243. Remember it. 385243 is the pass key.";

bool ends_sentence(const std::string& tok_text) {
    return tok_text == "." || tok_text == "!" || tok_text == "?";
}

struct HaystackParts {
    std::string filler;         // exactly filler_budget tokens
    std::size_t insert_at = 0;  // token offset of the needle
    std::size_t filler_tokens = 0;
};

HaystackParts prepare(const std::vector<Document>& filler, const NiahCase& c,
                      const Tokenizer& tok) {
    const std::size_t needle_len = tok.count(c.needle);
    if (needle_len == 0 || needle_len >= c.context_len_tokens) {
        throw ArgumentError("needle token length must be positive and below the context length");
    }
    const std::size_t budget = c.context_len_tokens - needle_len;

    std::string text;
    std::size_t have = 0;
    for (const auto& d : filler) {
        std::string t = d.text;
        // Scrub collisions so the needle occurs exactly once in the output.
        for (auto pos = t.find(c.needle); pos != std::string::npos; pos = t.find(c.needle)) {
            t.erase(pos, c.needle.size());
        }
        if (t.empty()) continue;
        if (!text.empty()) text += "\n";
        text += t;
        have = tok.count(text);
        if (have >= budget) break;
    }
    if (have < budget) {
        throw DataError("insufficient filler: need " + std::to_string(budget) + " tokens, have " +
                        std::to_string(have));
    }

    HaystackParts out;
    out.filler = tok.slice(text, 0, budget);
    out.filler_tokens = budget;

    const double target = c.depth * static_cast<double>(budget);
    const std::size_t want = static_cast<std::size_t>(std::llround(target));

    // Candidate insertion points: start, end, and every post-sentence token index.
    const auto toks = tok.tokenize(out.filler);
    std::set<std::size_t> boundaries{0, budget};
    for (std::size_t k = 1; k < toks.size(); ++k) {
        if (ends_sentence(toks[k - 1].text)) boundaries.insert(k);
    }
    std::size_t best = 0;
    std::size_t best_dist = static_cast<std::size_t>(-1);
    for (std::size_t b : boundaries) {
        const std::size_t dist = b > want ? b - want : want - b;
        if (dist < best_dist) {
            best_dist = dist;
            best = b;
        }
    }
    out.insert_at = best;
    return out;
}

std::string color_for(double score) {
    const int r = static_cast<int>(std::lround(220.0 * (1.0 - score) + 30.0 * score));
    const int g = static_cast<int>(std::lround(60.0 * (1.0 - score) + 170.0 * score));
    return "rgb(" + std::to_string(r) + "," + std::to_string(g) + ",70)";
}

}  // namespace

std::string build_haystack(const std::vector<Document>& filler, const NiahCase& c,
                           const Tokenizer& tok) {
    const auto parts = prepare(filler, c, tok);
    std::string out;
    if (parts.insert_at == 0) {
        out = c.needle + "\n" + parts.filler;
    } else if (parts.insert_at == parts.filler_tokens) {
        out = parts.filler + "\n" + c.needle;
    } else {
        out = tok.slice(parts.filler, 0, parts.insert_at) + "\n" + c.needle + "\n" +
              tok.slice(parts.filler, parts.insert_at, parts.filler_tokens);
    }
    return out;
}

std::size_t needle_token_offset(const std::vector<Document>& filler, const NiahCase& c,
                                const Tokenizer& tok) {
    return prepare(filler, c, tok).insert_at;
}

std::vector<NiahCase> make_standard_cases(NiahVariant variant,
                                          const std::vector<std::size_t>& lengths,
                                          const std::vector<double>& depths) {
    if (lengths.empty() || depths.empty()) throw ArgumentError("niah grid axes must be nonempty");
    NiahCase proto;
    if (variant == NiahVariant::Sandwich) {
        proto.needle = kSandwichNeedle;
        proto.question = "What is the best thing to do in San Francisco?";
        proto.expected_answer = "eat a sandwich and sit in Dolores Park";
    } else {
        proto.needle = kPasskeyNeedle;
        proto.question = "What is the pass key?";
        proto.expected_answer = "385243";
    }
    std::vector<NiahCase> cases;
    for (std::size_t len : lengths) {
        for (double d : depths) {
            NiahCase c = proto;
            c.context_len_tokens = len;
            c.depth = d;
            cases.push_back(std::move(c));
        }
    }
    return cases;
}

int score_case(const std::string& response, const NiahCase& c, const NormalizationRule& rule) {
    const std::string resp = normalize_answer(response, rule);
    const std::string want = normalize_answer(c.expected_answer, rule);
    if (want.empty()) return resp.empty() ? 1 : 0;
    return resp.find(want) != std::string::npos ? 1 : 0;
}

NiahGrid run_grid(const std::vector<NiahCase>& cases, const std::vector<Document>& filler,
                  Gateway& gateway, const NiahRunConfig& cfg, const Tokenizer& tok) {
    NiahGrid grid;
    std::set<std::size_t> lens;
    std::set<double> depths;
    for (const auto& c : cases) {
        lens.insert(c.context_len_tokens);
        depths.insert(c.depth);
    }
    grid.lengths.assign(lens.begin(), lens.end());
    grid.depths.assign(depths.begin(), depths.end());
    grid.cells.resize(grid.lengths.size() * grid.depths.size());
    for (std::size_t li = 0; li < grid.lengths.size(); ++li) {
        for (std::size_t di = 0; di < grid.depths.size(); ++di) {
            auto& cell = grid.cells[li * grid.depths.size() + di];
            cell.length = grid.lengths[li];
            cell.depth = grid.depths[di];
            cell.missing = true;
        }
    }

    for (const auto& c : cases) {
        const std::size_t li = static_cast<std::size_t>(
            std::lower_bound(grid.lengths.begin(), grid.lengths.end(), c.context_len_tokens) -
            grid.lengths.begin());
        const std::size_t di = static_cast<std::size_t>(
            std::lower_bound(grid.depths.begin(), grid.depths.end(), c.depth) -
            grid.depths.begin());
        auto& cell = grid.cells[li * grid.depths.size() + di];
        try {
            const std::string haystack = build_haystack(filler, c, tok);
            const auto fitted = fit_to_window(
                PromptParts{cfg.instruction, haystack, "Question: " + c.question + "\nAnswer:"},
                cfg.window, tok);
            ChatRequest req;
            req.messages = {{"user", fitted.text}};
            req.max_output_tokens = 64;
            const std::string resp = gateway.complete(req);
            cell.score = score_case(resp, c);
            cell.missing = false;
        } catch (const TransportError&) {
            cell.missing = true;  // recorded, not fatal
        }
    }
    return grid;
}

void write_grid_csv(const NiahGrid& grid, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write grid csv: " + path);
    out << "length,depth,score\n";
    for (const auto& c : grid.cells) {
        out << c.length << "," << c.depth << ",";
        if (c.missing) {
            out << "missing";
        } else {
            out << c.score;
        }
        out << "\n";
    }
}

void write_grid_svg(const NiahGrid& grid, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write grid svg: " + path);
    const int cell = 28, margin = 70;
    const int w = margin + cell * static_cast<int>(grid.lengths.size()) + 20;
    const int h = margin + cell * static_cast<int>(grid.depths.size()) + 20;
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='" << h << "'>\n";
    out << "<text x='10' y='20' font-size='13'>needle-in-a-haystack grid</text>\n";
    for (std::size_t li = 0; li < grid.lengths.size(); ++li) {
        for (std::size_t di = 0; di < grid.depths.size(); ++di) {
            const auto& c = grid.cells[li * grid.depths.size() + di];
            const int x = margin + static_cast<int>(li) * cell;
            const int y = margin + static_cast<int>(di) * cell;
            const std::string fill = c.missing ? "rgb(160,160,160)" : color_for(c.score);
            out << "<rect x='" << x << "' y='" << y << "' width='" << cell - 2 << "' height='"
                << cell - 2 << "' fill='" << fill << "'/>\n";
        }
    }
    for (std::size_t li = 0; li < grid.lengths.size(); ++li) {
        out << "<text x='" << margin + static_cast<int>(li) * cell << "' y='" << margin - 8
            << "' font-size='9' transform='rotate(-40 " << margin + static_cast<int>(li) * cell
            << " " << margin - 8 << ")'>" << grid.lengths[li] << "</text>\n";
    }
    for (std::size_t di = 0; di < grid.depths.size(); ++di) {
        out << "<text x='8' y='" << margin + static_cast<int>(di) * cell + 16
            << "' font-size='9'>" << grid.depths[di] << "</text>\n";
    }
    out << "</svg>\n";
}

std::vector<std::size_t> default_lengths(std::size_t min_len, std::size_t max_len,
                                         std::size_t count) {
    if (min_len == 0 || max_len < min_len || count == 0) {
        throw ArgumentError("invalid niah length grid");
    }
    std::vector<std::size_t> out;
    if (count == 1) return {max_len};
    const double lo = std::log(static_cast<double>(min_len));
    const double hi = std::log(static_cast<double>(max_len));
    for (std::size_t i = 0; i < count; ++i) {
        const double t = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
        const auto v = static_cast<std::size_t>(std::llround(std::exp(t)));
        if (out.empty() || out.back() != v) out.push_back(v);
    }
    return out;
}

std::vector<double> default_depths(std::size_t count) {
    if (count == 0) throw ArgumentError("depth count must be >= 1");
    std::vector<double> out;
    if (count == 1) return {0.5};
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back(static_cast<double>(i) / static_cast<double>(count - 1));
    }
    return out;
}

}  // namespace lcl
