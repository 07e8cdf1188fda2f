#pragma once

#include <string>
#include <vector>

#include "lcl/corpus.hpp"
#include "lcl/gateway.hpp"
#include "lcl/metrics.hpp"
#include "lcl/tokenizer.hpp"

namespace lcl {

struct NiahCase {
    std::size_t context_len_tokens = 0;
    double depth = 0.0;  // 0 = start, 1 = end
    std::string needle;
    std::string question;
    std::string expected_answer;
};

enum class NiahVariant { Sandwich, Passkey };

struct NiahCell {
    std::size_t length = 0;
    double depth = 0.0;
    double score = 0.0;
    bool missing = false;  // transport failure, excluded not fatal
};

struct NiahGrid {
    std::vector<std::size_t> lengths;  // sorted
    std::vector<double> depths;       // sorted
    std::vector<NiahCell> cells;      // row-major: lengths x depths
};

// Filler truncated to context_len - needle_len tokens, needle spliced at the
// sentence boundary nearest round(depth * (context_len - needle_len)).
// The output has exactly context_len tokens and contains the needle once;
// filler sentences already containing the needle are scrubbed.
// Throws DataError when the filler cannot cover the context length.
std::string build_haystack(const std::vector<Document>& filler, const NiahCase& c,
                           const Tokenizer& tok);

// Token offset at which the needle starts in build_haystack's output.
std::size_t needle_token_offset(const std::vector<Document>& filler, const NiahCase& c,
                                const Tokenizer& tok);

std::vector<NiahCase> make_standard_cases(NiahVariant variant,
                                          const std::vector<std::size_t>& lengths,
                                          const std::vector<double>& depths);

// 1 iff the normalized expected answer is a substring of the normalized response.
int score_case(const std::string& response, const NiahCase& c,
               const NormalizationRule& rule = {});

struct NiahRunConfig {
    WindowPolicy window;
    std::string instruction =
        "Read the document and answer the question. Answer with the exact phrase from the document.";
};

NiahGrid run_grid(const std::vector<NiahCase>& cases, const std::vector<Document>& filler,
                  Gateway& gateway, const NiahRunConfig& cfg, const Tokenizer& tok);

void write_grid_csv(const NiahGrid& grid, const std::string& path);
void write_grid_svg(const NiahGrid& grid, const std::string& path);

// Default grid axes: lengths log-spaced from min_len to max_len, linearly
// spaced depths in [0, 1].
std::vector<std::size_t> default_lengths(std::size_t min_len, std::size_t max_len,
                                         std::size_t count);
std::vector<double> default_depths(std::size_t count);

}  // namespace lcl
