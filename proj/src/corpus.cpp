#include "lcl/corpus.hpp"

#include <fstream>
#include <random>

#include <json.hpp>

#include "lcl/errors.hpp"

namespace lcl {

using nlohmann::json;

Document make_document(std::string id, std::string text, const Tokenizer& tok) {
    Document d;
    d.id = std::move(id);
    d.token_count = tok.count(text);
    d.text = std::move(text);
    return d;
}

std::vector<Document> upsample(const std::vector<Document>& corpus, const UpsampleConfig& cfg) {
    if (corpus.empty()) throw ConfigError("upsample: empty corpus");
    if (cfg.long_threshold_tokens == 0) throw ConfigError("upsample: threshold must be > 0");

    std::vector<std::size_t> long_idx, short_idx;
    double long_tokens = 0, short_tokens = 0;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        if (corpus[i].token_count >= cfg.long_threshold_tokens) {
            long_idx.push_back(i);
            long_tokens += static_cast<double>(corpus[i].token_count);
        } else {
            short_idx.push_back(i);
            short_tokens += static_cast<double>(corpus[i].token_count);
        }
    }

    const double share = cfg.long_token_share;
    const bool need_long = share > 0.0;
    const bool need_short = share < 1.0;
    if (need_long && long_idx.empty()) {
        throw ConfigError("upsample: no documents >= threshold (long partition empty)");
    }
    if (need_short && short_idx.empty()) {
        throw ConfigError("upsample: no documents < threshold (short partition empty)");
    }

    // Pick the long partition with probability p such that the expected token
    // share of long documents equals the configured share. Within a partition
    // documents are drawn uniformly, so the mean draw length is tokens/count.
    double p_long = 1.0;
    if (need_long && need_short) {
        const double mean_long = long_tokens / static_cast<double>(long_idx.size());
        const double mean_short = short_tokens / static_cast<double>(short_idx.size());
        p_long = share * mean_short / (share * mean_short + (1.0 - share) * mean_long);
    } else if (!need_long) {
        p_long = 0.0;
    }

    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> coin(0.0, 1.0);

    std::vector<Document> out;
    std::uint64_t emitted = 0;
    while (emitted < cfg.target_total_tokens) {
        const bool pick_long = coin(rng) < p_long;
        const auto& pool = pick_long ? long_idx : short_idx;
        std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
        const Document& d = corpus[pool[pick(rng)]];
        out.push_back(d);
        emitted += d.token_count;
    }
    return out;
}

std::vector<PackedSequence> pack(const std::vector<Document>& docs, std::size_t target_len,
                                 const SeparatorPolicy& sep) {
    if (target_len == 0) throw ArgumentError("pack: target_len must be > 0");
    const std::size_t sep_len = sep.token_length();
    if (target_len <= sep_len) throw ArgumentError("pack: target_len must exceed separator length");

    std::vector<PackedSequence> out;
    PackedSequence cur;

    auto flush = [&] {
        if (cur.length_tokens > 0) {
            out.push_back(std::move(cur));
            cur = PackedSequence{};
        }
    };

    bool first_doc = true;
    for (const auto& doc : docs) {
        if (doc.token_count == 0) continue;
        if (!first_doc) {
            // Interior boundary: separator tokens pack like any others and may
            // straddle a sequence edge (bos-eos naturally splits).
            for (std::size_t s = 0; s < sep_len; ++s) {
                ++cur.length_tokens;
                ++cur.separator_count;
                if (cur.length_tokens == target_len) flush();
            }
        }
        first_doc = false;
        std::size_t off = 0;
        while (off < doc.token_count) {
            const std::size_t room = target_len - cur.length_tokens;
            const std::size_t take = std::min(room, doc.token_count - off);
            cur.segments.push_back(Segment{doc.id, off, off + take});
            cur.length_tokens += take;
            off += take;
            if (cur.length_tokens == target_len) flush();
        }
    }
    flush();
    return out;
}

CorpusStats corpus_stats(const std::vector<Document>& docs, std::size_t long_threshold) {
    CorpusStats st;
    std::uint64_t long_tokens = 0;
    for (const auto& d : docs) {
        ++st.doc_count;
        st.total_tokens += d.token_count;
        if (long_threshold > 0 && d.token_count >= long_threshold) long_tokens += d.token_count;
        std::uint64_t bucket = 1;
        while (bucket < d.token_count) bucket <<= 1;
        ++st.length_histogram[bucket];
    }
    st.long_token_share =
        st.total_tokens > 0 ? static_cast<double>(long_tokens) / static_cast<double>(st.total_tokens)
                            : 0.0;
    return st;
}

std::string manifest_to_json(const TrainingManifest& m) {
    json j;
    j["learning_rate"] = m.learning_rate;
    j["batch_size"] = m.batch_size;
    j["steps"] = m.steps;
    j["rope_base"] = m.rope_base;
    j["sequence_length"] = m.sequence_length;
    j["total_tokens"] = m.total_tokens;
    j["sequence_count"] = m.sequence_count;
    j["separator"] = m.separator;
    return j.dump(2);
}

TrainingManifest manifest_from_json(const std::string& text) {
    json j = json::parse(text);
    TrainingManifest m;
    m.learning_rate = j.at("learning_rate").get<double>();
    m.batch_size = j.at("batch_size").get<std::size_t>();
    m.steps = j.at("steps").get<std::size_t>();
    m.rope_base = j.at("rope_base").get<double>();
    m.sequence_length = j.at("sequence_length").get<std::size_t>();
    m.total_tokens = j.at("total_tokens").get<std::uint64_t>();
    m.sequence_count = j.at("sequence_count").get<std::size_t>();
    m.separator = j.at("separator").get<std::string>();
    return m;
}

void write_manifest(const TrainingManifest& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write manifest: " + path);
    out << manifest_to_json(m) << "\n";
}

std::vector<Document> read_jsonl_corpus(const std::string& path, const Tokenizer& tok) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open corpus: " + path);
    std::vector<Document> docs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.contains("id") || !j.contains("text")) {
            throw DataError(path + ":" + std::to_string(lineno) + ": expected {\"id\", \"text\"}");
        }
        docs.push_back(make_document(j["id"].get<std::string>(), j["text"].get<std::string>(), tok));
    }
    return docs;
}

void write_jsonl_corpus(const std::vector<Document>& docs, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write corpus: " + path);
    for (const auto& d : docs) {
        json j;
        j["id"] = d.id;
        j["text"] = d.text;
        j["token_count"] = d.token_count;
        out << j.dump() << "\n";
    }
}

void write_jsonl_packed(const std::vector<PackedSequence>& seqs, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write packed sequences: " + path);
    for (const auto& s : seqs) {
        json segs = json::array();
        for (const auto& seg : s.segments) {
            segs.push_back({{"doc_id", seg.doc_id},
                            {"token_begin", seg.token_begin},
                            {"token_end", seg.token_end}});
        }
        json j;
        j["segments"] = segs;
        j["length_tokens"] = s.length_tokens;
        j["separator_count"] = s.separator_count;
        out << j.dump() << "\n";
    }
}

}  // namespace lcl
