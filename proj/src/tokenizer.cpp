#include "lcl/tokenizer.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "lcl/errors.hpp"

namespace lcl {

namespace {

bool is_space_byte(unsigned char c) { return std::isspace(c) != 0; }

// Letters, digits, and any non-ASCII byte count as word characters.
bool is_word_byte(unsigned char c) { return std::isalnum(c) != 0 || c >= 0x80; }

}  // namespace

Tokenizer::Tokenizer() = default;

Tokenizer::Tokenizer(const TokenizerSpec& spec) : spec_(spec) {
    if (spec_.kind != TokenizerKind::ExternalVocab) return;
    std::ifstream in(spec_.vocab_path);
    if (!in) {
        throw ConfigError("cannot open vocab file: " + spec_.vocab_path);
    }
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        vocab_max_len_ = std::max(vocab_max_len_, line.size());
        vocab_.insert(line);
    }
    if (vocab_.empty()) {
        throw ConfigError("vocab file is empty: " + spec_.vocab_path);
    }
}

std::vector<Token> Tokenizer::tokenize(std::string_view text) const {
    return spec_.kind == TokenizerKind::ExternalVocab ? tokenize_vocab(text)
                                                      : tokenize_rule(text);
}

std::vector<Token> Tokenizer::tokenize_rule(std::string_view text) const {
    std::vector<Token> out;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        const unsigned char c = static_cast<unsigned char>(text[i]);
        if (is_space_byte(c)) {
            ++i;
            continue;
        }
        std::size_t j = i + 1;
        if (is_word_byte(c)) {
            while (j < n && is_word_byte(static_cast<unsigned char>(text[j]))) ++j;
        }
        out.push_back(Token{std::string(text.substr(i, j - i)), i, j});
        i = j;
    }
    return out;
}

std::vector<Token> Tokenizer::tokenize_vocab(std::string_view text) const {
    std::vector<Token> out;
    std::size_t i = 0;
    const std::size_t n = text.size();
    std::string probe;
    while (i < n) {
        if (is_space_byte(static_cast<unsigned char>(text[i]))) {
            ++i;
            continue;
        }
        // Longest match against the vocab; unmatched bytes become 1-byte tokens.
        std::size_t len = std::min(vocab_max_len_, n - i);
        std::size_t matched = 0;
        for (; len >= 1; --len) {
            probe.assign(text.substr(i, len));
            if (vocab_.count(probe) > 0) {
                matched = len;
                break;
            }
        }
        if (matched == 0) matched = 1;
        out.push_back(Token{std::string(text.substr(i, matched)), i, i + matched});
        i += matched;
    }
    return out;
}

std::size_t Tokenizer::count(std::string_view text) const {
    if (spec_.kind == TokenizerKind::ExternalVocab) return tokenize_vocab(text).size();
    // Single pass, no allocation.
    std::size_t cnt = 0;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        const unsigned char c = static_cast<unsigned char>(text[i]);
        if (is_space_byte(c)) {
            ++i;
            continue;
        }
        ++cnt;
        ++i;
        if (is_word_byte(c)) {
            while (i < n && is_word_byte(static_cast<unsigned char>(text[i]))) ++i;
        }
    }
    return cnt;
}

std::string Tokenizer::slice(std::string_view text, std::size_t begin_tok,
                             std::size_t end_tok) const {
    const auto toks = tokenize(text);
    if (begin_tok > end_tok || end_tok > toks.size()) {
        throw ArgumentError("slice [" + std::to_string(begin_tok) + ", " +
                            std::to_string(end_tok) + ") out of range for " +
                            std::to_string(toks.size()) + " tokens");
    }
    if (begin_tok == end_tok) return {};
    const std::size_t b = toks[begin_tok].begin;
    const std::size_t e = toks[end_tok - 1].end;
    return std::string(text.substr(b, e - b));
}

}  // namespace lcl
