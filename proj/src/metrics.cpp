#include "lcl/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <sstream>

#include "lcl/errors.hpp"

namespace lcl {

namespace {

double f_score(double precision, double recall) {
    if (precision + recall == 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

MetricResult make_f_result(std::string name, double precision, double recall) {
    MetricResult r;
    r.name = std::move(name);
    r.precision = precision;
    r.recall = recall;
    r.score = f_score(precision, recall);
    return r;
}

std::vector<std::string> whitespace_split(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string w;
    while (in >> w) out.push_back(w);
    return out;
}

// LCS length table for a[0..n) vs b[0..m); dp[i][j] = LCS of a[0..i), b[0..j).
std::vector<std::vector<std::size_t>> lcs_table(const std::vector<std::string>& a,
                                                const std::vector<std::string>& b) {
    std::vector<std::vector<std::size_t>> dp(a.size() + 1, std::vector<std::size_t>(b.size() + 1, 0));
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            dp[i][j] = (a[i - 1] == b[j - 1]) ? dp[i - 1][j - 1] + 1
                                              : std::max(dp[i - 1][j], dp[i][j - 1]);
        }
    }
    return dp;
}

// Positions in `ref` matched by one LCS of (ref, pred).
std::vector<std::size_t> lcs_ref_positions(const std::vector<std::string>& ref,
                                           const std::vector<std::string>& pred) {
    const auto dp = lcs_table(ref, pred);
    std::vector<std::size_t> pos;
    std::size_t i = ref.size(), j = pred.size();
    while (i > 0 && j > 0) {
        if (ref[i - 1] == pred[j - 1]) {
            pos.push_back(i - 1);
            --i;
            --j;
        } else if (dp[i - 1][j] >= dp[i][j - 1]) {
            --i;
        } else {
            --j;
        }
    }
    std::reverse(pos.begin(), pos.end());
    return pos;
}

}  // namespace

std::string normalize_answer(std::string_view text, const NormalizationRule& rule) {
    std::string s;
    s.reserve(text.size());
    for (char raw : text) {
        unsigned char c = static_cast<unsigned char>(raw);
        if (rule.lowercase) c = static_cast<unsigned char>(std::tolower(c));
        if (rule.strip_punctuation && std::ispunct(c)) continue;
        s.push_back(static_cast<char>(c));
    }
    std::vector<std::string> words = whitespace_split(s);
    if (rule.strip_articles) {
        std::erase_if(words, [](const std::string& w) { return w == "a" || w == "an" || w == "the"; });
    }
    std::string out;
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (i) out.push_back(' ');
        out += words[i];
    }
    if (!rule.collapse_whitespace) return s;  // raw character pass only
    return out;
}

int exact_match(std::string_view pred, const std::vector<std::string>& golds,
                const NormalizationRule& rule) {
    if (golds.empty()) throw ArgumentError("exact_match: golds must be nonempty");
    const std::string p = normalize_answer(pred, rule);
    for (const auto& g : golds) {
        if (p == normalize_answer(g, rule)) return 1;
    }
    return 0;
}

double token_f1(std::string_view pred, const std::vector<std::string>& golds,
                const NormalizationRule& rule) {
    if (golds.empty()) throw ArgumentError("token_f1: golds must be nonempty");
    const auto pt = whitespace_split(normalize_answer(pred, rule));
    std::map<std::string, std::size_t> pcount;
    for (const auto& w : pt) ++pcount[w];

    double best = 0.0;
    for (const auto& g : golds) {
        const auto gt = whitespace_split(normalize_answer(g, rule));
        if (pt.empty() && gt.empty()) return 1.0;
        if (pt.empty() || gt.empty()) continue;
        std::map<std::string, std::size_t> gcount;
        for (const auto& w : gt) ++gcount[w];
        std::size_t overlap = 0;
        for (const auto& [w, n] : gcount) {
            auto it = pcount.find(w);
            if (it != pcount.end()) overlap += std::min(n, it->second);
        }
        if (overlap == 0) continue;
        const double prec = static_cast<double>(overlap) / static_cast<double>(pt.size());
        const double rec = static_cast<double>(overlap) / static_cast<double>(gt.size());
        best = std::max(best, f_score(prec, rec));
    }
    return best;
}

std::vector<std::string> rouge_tokens(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (char raw : text) {
        const unsigned char c = static_cast<unsigned char>(raw);
        if (std::isalnum(c) || c >= 0x80) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

MetricResult rouge_n(std::string_view pred, std::string_view ref, std::size_t n) {
    if (n == 0) throw ArgumentError("rouge_n: n must be >= 1");
    const auto pt = rouge_tokens(pred);
    const auto rt = rouge_tokens(ref);
    auto ngrams = [n](const std::vector<std::string>& toks) {
        std::map<std::vector<std::string>, std::size_t> grams;
        if (toks.size() >= n) {
            for (std::size_t i = 0; i + n <= toks.size(); ++i) {
                ++grams[std::vector<std::string>(toks.begin() + i, toks.begin() + i + n)];
            }
        }
        return grams;
    };
    const auto pg = ngrams(pt);
    const auto rg = ngrams(rt);
    std::size_t ptotal = 0, rtotal = 0, match = 0;
    for (const auto& [g, c] : pg) ptotal += c;
    for (const auto& [g, c] : rg) {
        rtotal += c;
        auto it = pg.find(g);
        if (it != pg.end()) match += std::min(c, it->second);
    }
    const double prec = ptotal ? static_cast<double>(match) / static_cast<double>(ptotal) : 0.0;
    const double rec = rtotal ? static_cast<double>(match) / static_cast<double>(rtotal) : 0.0;
    return make_f_result("rouge" + std::to_string(n), prec, rec);
}

MetricResult rouge_l(std::string_view pred, std::string_view ref) {
    const auto pt = rouge_tokens(pred);
    const auto rt = rouge_tokens(ref);
    if (pt.empty() || rt.empty()) return make_f_result("rougeL", 0.0, 0.0);
    const std::size_t lcs = lcs_table(rt, pt)[rt.size()][pt.size()];
    const double prec = static_cast<double>(lcs) / static_cast<double>(pt.size());
    const double rec = static_cast<double>(lcs) / static_cast<double>(rt.size());
    return make_f_result("rougeL", prec, rec);
}

std::vector<std::string> split_sentences(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (c == '\n') {
            if (!cur.empty()) out.push_back(std::move(cur)), cur.clear();
            continue;
        }
        cur.push_back(c);
        if ((c == '.' || c == '!' || c == '?') &&
            (i + 1 == text.size() ||
             std::isspace(static_cast<unsigned char>(text[i + 1])))) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    std::erase_if(out, [](const std::string& s) {
        return s.find_first_not_of(" \t\r") == std::string::npos;
    });
    return out;
}

MetricResult rouge_l_sum(std::string_view pred, std::string_view ref) {
    const auto pred_sents = split_sentences(pred);
    const auto ref_sents = split_sentences(ref);
    std::vector<std::vector<std::string>> pred_toks;
    std::size_t pred_total = 0, ref_total = 0;
    for (const auto& s : pred_sents) {
        pred_toks.push_back(rouge_tokens(s));
        pred_total += pred_toks.back().size();
    }
    std::size_t hits = 0;
    for (const auto& rs : ref_sents) {
        const auto rt = rouge_tokens(rs);
        ref_total += rt.size();
        if (rt.empty()) continue;
        std::vector<char> matched(rt.size(), 0);
        for (const auto& pt : pred_toks) {
            if (pt.empty()) continue;
            for (std::size_t pos : lcs_ref_positions(rt, pt)) matched[pos] = 1;
        }
        hits += static_cast<std::size_t>(std::count(matched.begin(), matched.end(), 1));
    }
    const double prec = pred_total ? static_cast<double>(hits) / static_cast<double>(pred_total) : 0.0;
    const double rec = ref_total ? static_cast<double>(hits) / static_cast<double>(ref_total) : 0.0;
    return make_f_result("rougeLsum", prec, rec);
}

double rouge_geo_mean(std::string_view pred, std::string_view ref) {
    const double r1 = rouge_n(pred, ref, 1).score;
    const double r2 = rouge_n(pred, ref, 2).score;
    const double rl = rouge_l(pred, ref).score;
    if (r1 == 0.0 || r2 == 0.0 || rl == 0.0) return 0.0;
    return std::cbrt(r1 * r2 * rl);
}

int mc_accuracy(std::string_view pred, std::size_t correct_index,
                const std::vector<std::string>& choices, const NormalizationRule& rule) {
    if (choices.empty()) throw ArgumentError("mc_accuracy: choices must be nonempty");
    if (correct_index >= choices.size()) {
        throw ArgumentError("mc_accuracy: correct choice index out of range");
    }
    const std::string p = " " + normalize_answer(pred, rule) + " ";

    std::vector<std::size_t> contained;
    for (std::size_t i = 0; i < choices.size(); ++i) {
        const std::string c = normalize_answer(choices[i], rule);
        if (c.empty()) continue;
        if (p.find(" " + c + " ") != std::string::npos) contained.push_back(i);
    }
    if (!contained.empty()) {
        return (contained.size() == 1 && contained[0] == correct_index) ? 1 : 0;
    }

    // Letter labels checked without article stripping ("A" would vanish).
    NormalizationRule letter_rule = rule;
    letter_rule.strip_articles = false;
    const auto toks = whitespace_split(normalize_answer(pred, letter_rule));
    std::vector<std::size_t> letters;
    for (const auto& t : toks) {
        if (t.size() == 1 && t[0] >= 'a' && t[0] < 'a' + static_cast<char>(choices.size())) {
            letters.push_back(static_cast<std::size_t>(t[0] - 'a'));
        }
    }
    if (letters.size() == 1 && letters[0] == correct_index) return 1;
    return 0;
}

}  // namespace lcl
