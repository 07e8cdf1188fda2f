#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lcl {

// Standard QA answer normalization: lowercase, drop punctuation, drop the
// articles a/an/the, collapse whitespace. Idempotent.
struct NormalizationRule {
    bool lowercase = true;
    bool strip_punctuation = true;
    bool strip_articles = true;
    bool collapse_whitespace = true;
};

std::string normalize_answer(std::string_view text, const NormalizationRule& rule = {});

struct MetricResult {
    std::string name;
    double score = 0.0;  // in [0, 1]
    std::optional<double> precision;
    std::optional<double> recall;
};

// 1 iff the normalized prediction equals any normalized gold.
// Throws ArgumentError on empty golds.
int exact_match(std::string_view pred, const std::vector<std::string>& golds,
                const NormalizationRule& rule = {});

// Max over golds of multiset token-overlap F1 on normalized text.
// Empty vs empty -> 1, empty vs nonempty -> 0.
double token_f1(std::string_view pred, const std::vector<std::string>& golds,
                const NormalizationRule& rule = {});

// N-gram overlap with multiset clipping. Texts too short for any n-gram
// score 0 by convention.
MetricResult rouge_n(std::string_view pred, std::string_view ref, std::size_t n);

// Longest-common-subsequence ROUGE: recall = LCS/|ref|, precision = LCS/|pred|.
MetricResult rouge_l(std::string_view pred, std::string_view ref);

// Summary-level ROUGE-L: both texts split into sentences, union-LCS hits
// accumulated per reference sentence across all prediction sentences.
MetricResult rouge_l_sum(std::string_view pred, std::string_view ref);

// (R1_F1 * R2_F1 * RL_F1)^(1/3); zero if any component is zero.
double rouge_geo_mean(std::string_view pred, std::string_view ref);

// 1 iff the prediction selects the correct choice: either its letter label
// (A, B, ...) as a standalone token, or containment of exactly one choice's
// normalized text, which must be the correct one.
// Throws ArgumentError when correct_index is out of range.
int mc_accuracy(std::string_view pred, std::size_t correct_index,
                const std::vector<std::string>& choices, const NormalizationRule& rule = {});

// Word tokens used by the ROUGE family: lowercased alphanumeric runs.
std::vector<std::string> rouge_tokens(std::string_view text);

// Sentence boundaries: newline, or sentence-final punctuation followed by
// whitespace. ROUGE-L-Sum values depend on this rule.
std::vector<std::string> split_sentences(std::string_view text);

}  // namespace lcl
