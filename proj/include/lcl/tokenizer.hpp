#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace lcl {

// A token plus its byte span in the source text. Spans are half-open,
// non-overlapping, and strictly increasing.
struct Token {
    std::string text;
    std::size_t begin = 0;
    std::size_t end = 0;
};

enum class TokenizerKind { DefaultRule, ExternalVocab };

struct TokenizerSpec {
    TokenizerKind kind = TokenizerKind::DefaultRule;
    std::string vocab_path;  // only for ExternalVocab
};

// Deterministic tokenizer behind every token-denominated parameter
// (chunk sizes, packing lengths, window budgets).
//
// Default rule: whitespace separates and is never emitted; a maximal run of
// letters/digits is one token; each ASCII punctuation character is its own
// token. Bytes >= 0x80 are treated as word characters so UTF-8 text stays
// intact.
class Tokenizer {
public:
    Tokenizer();  // default rule
    explicit Tokenizer(const TokenizerSpec& spec);  // throws ConfigError if vocab unreadable

    const TokenizerSpec& spec() const { return spec_; }

    std::vector<Token> tokenize(std::string_view text) const;
    std::size_t count(std::string_view text) const;

    // Substring covering tokens [begin_tok, end_tok) by byte spans.
    // Throws ArgumentError on out-of-range indices.
    std::string slice(std::string_view text, std::size_t begin_tok, std::size_t end_tok) const;

private:
    std::vector<Token> tokenize_rule(std::string_view text) const;
    std::vector<Token> tokenize_vocab(std::string_view text) const;

    TokenizerSpec spec_;
    std::unordered_set<std::string> vocab_;
    std::size_t vocab_max_len_ = 0;
};

}  // namespace lcl
