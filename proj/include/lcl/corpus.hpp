#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lcl/tokenizer.hpp"

namespace lcl {

struct Document {
    std::string id;
    std::string text;
    std::size_t token_count = 0;  // per the configured tokenizer
};

Document make_document(std::string id, std::string text, const Tokenizer& tok);

struct UpsampleConfig {
    std::size_t long_threshold_tokens = 8192;
    double long_token_share = 0.1;
    std::uint64_t target_total_tokens = 1'000'000;
    std::uint64_t seed = 0;
};

enum class SeparatorKind { SpecialChar, BosEos, None };

struct SeparatorPolicy {
    SeparatorKind kind = SeparatorKind::SpecialChar;
    std::string special = "<s>";

    // Token slots one document boundary occupies in a packed sequence.
    std::size_t token_length() const {
        switch (kind) {
            case SeparatorKind::SpecialChar: return 1;
            case SeparatorKind::BosEos: return 2;
            case SeparatorKind::None: return 0;
        }
        return 0;
    }
};

struct Segment {
    std::string doc_id;
    std::size_t token_begin = 0;  // range within the source document
    std::size_t token_end = 0;
};

struct PackedSequence {
    std::vector<Segment> segments;
    std::size_t length_tokens = 0;    // document tokens + separator tokens
    std::size_t separator_count = 0;  // separator tokens in this sequence
};

// Sample documents with replacement until target_total_tokens are emitted.
// The partition pick probability is tuned so the expected share of emitted
// tokens coming from documents >= long_threshold equals long_token_share.
// Deterministic under a fixed seed. Throws ConfigError when a required
// partition is empty.
std::vector<Document> upsample(const std::vector<Document>& corpus, const UpsampleConfig& cfg);

// Greedy packing: documents in arrival order, oversized documents split across
// sequences, one separator per interior document boundary. Every sequence
// except possibly the last has exactly target_len tokens.
std::vector<PackedSequence> pack(const std::vector<Document>& docs, std::size_t target_len,
                                 const SeparatorPolicy& sep);

struct CorpusStats {
    std::uint64_t total_tokens = 0;
    std::size_t doc_count = 0;
    // power-of-two length buckets: upper bound -> count
    std::map<std::uint64_t, std::size_t> length_histogram;
    double long_token_share = 0.0;
};

CorpusStats corpus_stats(const std::vector<Document>& docs, std::size_t long_threshold);

// Continued-pretraining hyperparameters recorded for downstream trainers.
struct TrainingManifest {
    double learning_rate = 3e-5;
    std::size_t batch_size = 32;
    std::size_t steps = 2000;
    double rope_base = 150'000'000.0;
    std::size_t sequence_length = 131072;
    std::uint64_t total_tokens = 0;
    std::size_t sequence_count = 0;
    std::string separator = "<s>";
};

std::string manifest_to_json(const TrainingManifest& m);
TrainingManifest manifest_from_json(const std::string& text);
void write_manifest(const TrainingManifest& m, const std::string& path);

// JSONL corpus IO: one {"id": str, "text": str} object per line.
std::vector<Document> read_jsonl_corpus(const std::string& path, const Tokenizer& tok);
void write_jsonl_corpus(const std::vector<Document>& docs, const std::string& path);
void write_jsonl_packed(const std::vector<PackedSequence>& seqs, const std::string& path);

}  // namespace lcl
