#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lcl/corpus.hpp"
#include "lcl/tokenizer.hpp"

namespace lcl {

struct QaPair {
    std::string question;
    std::vector<std::string> answers;
};

struct SftSource {
    std::string id;
    std::vector<std::string> paragraphs;  // semantically related, kept in order
    std::string summary;
    std::vector<QaPair> qa_pairs;
};

struct SftSample {
    std::string id;
    std::string document;
    std::size_t token_count = 0;
    std::vector<QaPair> qa_pairs;
    std::size_t summary_position = 0;  // token offset of the summary
    std::vector<std::string> provenance;  // source id + distractor doc ids used
};

struct SftSynthConfig {
    std::size_t min_tokens = 32768;
    std::size_t max_tokens = 131072;
    bool allow_distractors = false;  // padding to reach min is an extension, off by default
    std::uint64_t seed = 0;
};

// Related paragraphs concatenated in source order; the summary inserted at a
// seeded uniformly random paragraph boundary. With distractors enabled,
// distractor paragraphs are appended at random boundaries until the sample
// reaches min_tokens, never exceeding max_tokens.
// Throws DataError when min_tokens is unreachable.
SftSample synthesize_long_sample(const SftSource& src, const SftSynthConfig& cfg,
                                 const std::vector<Document>& distractors, const Tokenizer& tok);

struct StageEntry {
    std::string dataset_id;
    double weight = 0.0;
};

struct Stage {
    std::string name;
    std::vector<StageEntry> entries;
};

struct StageBlend {
    std::vector<Stage> stages;
    bool cumulative = true;  // each stage includes the data of prior stages
};

struct DatasetInfo {
    std::string id;
    std::size_t example_count = 0;
};

struct ManifestEntry {
    std::string stage;
    std::string dataset_id;
    std::size_t example_index = 0;
};

// Expand a blend into a per-example manifest. When an entry's weight is 0,
// it defaults to the dataset size (proportional mixing). samples_per_stage
// examples are drawn per stage with replacement, seeded.
std::vector<ManifestEntry> blend_stages(const StageBlend& blend,
                                        const std::vector<DatasetInfo>& datasets,
                                        std::size_t samples_per_stage, std::uint64_t seed);

std::vector<SftSource> read_jsonl_sources(const std::string& path);
void write_jsonl_samples(const std::vector<SftSample>& samples, const std::string& path);
void write_jsonl_manifest(const std::vector<ManifestEntry>& entries, const std::string& path);
StageBlend read_blend_config(const std::string& path);

}  // namespace lcl
