#include "lcl/sft.hpp"

#include <algorithm>
#include <fstream>
#include <random>

#include <json.hpp>

#include "lcl/errors.hpp"
#include "lcl/gateway.hpp"

namespace lcl {

using nlohmann::json;

namespace {

struct Piece {
    std::string text;
    bool is_summary = false;
    std::size_t tokens = 0;
};

std::size_t total_tokens(const std::vector<Piece>& pieces) {
    std::size_t n = 0;
    for (const auto& p : pieces) n += p.tokens;
    return n;
}

}  // namespace

SftSample synthesize_long_sample(const SftSource& src, const SftSynthConfig& cfg,
                                 const std::vector<Document>& distractors, const Tokenizer& tok) {
    if (src.paragraphs.empty()) throw ArgumentError("sft source has no paragraphs");
    if (cfg.min_tokens > cfg.max_tokens) throw ArgumentError("sft: min_tokens > max_tokens");
    for (const auto& qa : src.qa_pairs) {
        if (qa.answers.empty()) throw ArgumentError("sft source qa pair has no answers");
    }

    // Per-sample RNG: global seed xor source id hash, so parallel synthesis
    // stays deterministic regardless of scheduling.
    std::mt19937_64 rng(cfg.seed ^ fnv1a64(src.id));

    std::vector<Piece> pieces;
    for (const auto& p : src.paragraphs) {
        pieces.push_back(Piece{p, false, tok.count(p)});
    }
    std::uniform_int_distribution<std::size_t> pos(0, pieces.size());
    Piece summary{src.summary, true, tok.count(src.summary)};
    pieces.insert(pieces.begin() + static_cast<std::ptrdiff_t>(pos(rng)), std::move(summary));

    if (total_tokens(pieces) > cfg.max_tokens) {
        throw DataError("sft source exceeds max_tokens before padding: " + src.id);
    }

    std::vector<std::string> provenance{src.id};
    if (total_tokens(pieces) < cfg.min_tokens) {
        if (!cfg.allow_distractors) {
            throw DataError("sft sample below min_tokens and distractor padding is disabled: " +
                            src.id);
        }
        if (distractors.empty()) throw DataError("sft: no distractor documents supplied");
        std::uniform_int_distribution<std::size_t> pick(0, distractors.size() - 1);
        std::size_t stalled = 0;
        while (total_tokens(pieces) < cfg.min_tokens) {
            const Document& d = distractors[pick(rng)];
            std::size_t dt = tok.count(d.text);
            std::string text = d.text;
            const std::size_t room = cfg.max_tokens - total_tokens(pieces);
            if (dt > room) {
                // truncate the final distractor rather than overshoot max
                text = tok.slice(d.text, 0, room);
                dt = room;
            }
            if (dt == 0) {
                if (++stalled > distractors.size()) {
                    throw DataError("sft: cannot reach min_tokens with available distractors");
                }
                continue;
            }
            std::uniform_int_distribution<std::size_t> at(0, pieces.size());
            pieces.insert(pieces.begin() + static_cast<std::ptrdiff_t>(at(rng)),
                          Piece{std::move(text), false, dt});
            provenance.push_back("distractor:" + d.id);
        }
    }

    SftSample out;
    out.id = src.id;
    out.qa_pairs = src.qa_pairs;
    out.provenance = std::move(provenance);
    std::size_t offset = 0;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        if (i) out.document += "\n\n";
        if (pieces[i].is_summary) out.summary_position = offset;
        out.document += pieces[i].text;
        offset += pieces[i].tokens;
    }
    out.token_count = offset;
    return out;
}

std::vector<ManifestEntry> blend_stages(const StageBlend& blend,
                                        const std::vector<DatasetInfo>& datasets,
                                        std::size_t samples_per_stage, std::uint64_t seed) {
    if (blend.stages.empty()) throw ArgumentError("blend has no stages");
    auto find_dataset = [&](const std::string& id) -> const DatasetInfo& {
        for (const auto& d : datasets) {
            if (d.id == id) return d;
        }
        throw ConfigError("unknown dataset id in blend: " + id);
    };

    std::mt19937_64 rng(seed);
    std::vector<ManifestEntry> out;
    std::vector<StageEntry> effective;  // grows across stages when cumulative

    for (const auto& stage : blend.stages) {
        if (!blend.cumulative) effective.clear();
        for (const auto& e : stage.entries) {
            find_dataset(e.dataset_id);
            effective.push_back(e);
        }
        if (effective.empty()) throw ConfigError("stage has no datasets: " + stage.name);

        if (effective.size() == 1 && samples_per_stage == 0) {
            // Single dataset, no sampling requested: the stage is that dataset verbatim.
            const auto& d = find_dataset(effective[0].dataset_id);
            for (std::size_t i = 0; i < d.example_count; ++i) {
                out.push_back(ManifestEntry{stage.name, d.id, i});
            }
            continue;
        }

        std::vector<double> weights;
        std::size_t total = 0;
        for (const auto& e : effective) {
            const auto& d = find_dataset(e.dataset_id);
            weights.push_back(e.weight > 0 ? e.weight : static_cast<double>(d.example_count));
            total += d.example_count;
        }
        const std::size_t n = samples_per_stage > 0 ? samples_per_stage : total;
        std::discrete_distribution<std::size_t> by_weight(weights.begin(), weights.end());
        for (std::size_t i = 0; i < n; ++i) {
            const auto& e = effective[by_weight(rng)];
            const auto& d = find_dataset(e.dataset_id);
            std::uniform_int_distribution<std::size_t> ex(0, d.example_count - 1);
            out.push_back(ManifestEntry{stage.name, d.id, ex(rng)});
        }
    }
    return out;
}

std::vector<SftSource> read_jsonl_sources(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open sft sources: " + path);
    std::vector<SftSource> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        SftSource s;
        s.id = j.at("id").get<std::string>();
        s.paragraphs = j.at("paragraphs").get<std::vector<std::string>>();
        s.summary = j.value("summary", std::string{});
        if (j.contains("qa_pairs")) {
            for (const auto& q : j["qa_pairs"]) {
                s.qa_pairs.push_back(QaPair{q.at("question").get<std::string>(),
                                            q.at("answers").get<std::vector<std::string>>()});
            }
        }
        out.push_back(std::move(s));
    }
    return out;
}

void write_jsonl_samples(const std::vector<SftSample>& samples, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write sft samples: " + path);
    for (const auto& s : samples) {
        json qa = json::array();
        for (const auto& q : s.qa_pairs) {
            qa.push_back({{"question", q.question}, {"answers", q.answers}});
        }
        json j;
        j["id"] = s.id;
        j["document"] = s.document;
        j["token_count"] = s.token_count;
        j["qa_pairs"] = qa;
        j["summary_position"] = s.summary_position;
        j["provenance"] = s.provenance;
        out << j.dump() << "\n";
    }
}

void write_jsonl_manifest(const std::vector<ManifestEntry>& entries, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write manifest: " + path);
    for (const auto& e : entries) {
        json j;
        j["stage"] = e.stage;
        j["dataset_id"] = e.dataset_id;
        j["example_index"] = e.example_index;
        out << j.dump() << "\n";
    }
}

StageBlend read_blend_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open blend config: " + path);
    json j = json::parse(in);
    StageBlend b;
    b.cumulative = j.value("cumulative", true);
    for (const auto& st : j.at("stages")) {
        Stage s;
        s.name = st.at("name").get<std::string>();
        for (const auto& e : st.at("datasets")) {
            s.entries.push_back(
                StageEntry{e.at("id").get<std::string>(), e.value("weight", 0.0)});
        }
        b.stages.push_back(std::move(s));
    }
    return b;
}

}  // namespace lcl
