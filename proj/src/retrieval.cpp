#include "lcl/retrieval.hpp"

#include <algorithm>
#include <cmath>

#include "lcl/errors.hpp"

namespace lcl {

void normalize_embedding(EmbeddingVector& v) {
    double norm_sq = 0.0;
    for (float x : v.values) {
        if (!std::isfinite(x)) throw ArgumentError("embedding contains non-finite value");
        norm_sq += static_cast<double>(x) * static_cast<double>(x);
    }
    if (norm_sq == 0.0) throw ArgumentError("cannot normalize zero embedding");
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (float& x : v.values) x = static_cast<float>(x * inv);
}

double dot(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.dim() != b.dim()) {
        throw ArgumentError("embedding dimension mismatch: " + std::to_string(a.dim()) + " vs " +
                            std::to_string(b.dim()));
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        acc += static_cast<double>(a.values[i]) * static_cast<double>(b.values[i]);
    }
    return acc;
}

std::vector<Chunk> chunk_document(const Document& doc, std::size_t chunk_size,
                                  const Tokenizer& tok) {
    if (chunk_size == 0) throw ArgumentError("chunk_size must be > 0");
    const auto toks = tok.tokenize(doc.text);
    std::vector<Chunk> out;
    for (std::size_t begin = 0; begin < toks.size(); begin += chunk_size) {
        const std::size_t end = std::min(begin + chunk_size, toks.size());
        Chunk c;
        c.doc_id = doc.id;
        c.index = out.size();
        c.token_begin = begin;
        c.token_end = end;
        c.text = doc.text.substr(toks[begin].begin, toks[end - 1].end - toks[begin].begin);
        out.push_back(std::move(c));
    }
    return out;
}

namespace {

std::vector<RankedChunk> rank_impl(const EmbeddingVector& query,
                                   const std::vector<EmbeddingVector>& candidates,
                                   const std::vector<Chunk>* chunks, std::size_t k) {
    if (k == 0) throw ArgumentError("rank_chunks: k must be >= 1");
    if (chunks && chunks->size() != candidates.size()) {
        throw ArgumentError("rank_chunks: chunk/vector count mismatch");
    }
    std::vector<RankedChunk> scored(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        scored[i] = RankedChunk{i, dot(query, candidates[i])};
    }
    auto better = [chunks](const RankedChunk& a, const RankedChunk& b) {
        if (a.score != b.score) return a.score > b.score;
        if (chunks) {
            const Chunk& ca = (*chunks)[a.chunk_id];
            const Chunk& cb = (*chunks)[b.chunk_id];
            if (ca.index != cb.index) return ca.index < cb.index;
            if (ca.doc_id != cb.doc_id) return ca.doc_id < cb.doc_id;
        }
        return a.chunk_id < b.chunk_id;
    };
    const std::size_t take = std::min(k, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take),
                      scored.end(), better);
    scored.resize(take);
    return scored;
}

}  // namespace

std::vector<RankedChunk> rank_chunks(const EmbeddingVector& query,
                                     const std::vector<EmbeddingVector>& candidates,
                                     std::size_t k) {
    return rank_impl(query, candidates, nullptr, k);
}

std::vector<RankedChunk> rank_chunks(const EmbeddingVector& query,
                                     const std::vector<EmbeddingVector>& candidates,
                                     const std::vector<Chunk>& chunks, std::size_t k) {
    return rank_impl(query, candidates, &chunks, k);
}

std::string assemble_context(std::vector<Chunk> selected, ChunkOrder order) {
    if (order == ChunkOrder::DocumentOrder) {
        std::stable_sort(selected.begin(), selected.end(), [](const Chunk& a, const Chunk& b) {
            if (a.doc_id != b.doc_id) return a.doc_id < b.doc_id;
            return a.index < b.index;
        });
    }
    std::string out;
    for (std::size_t i = 0; i < selected.size(); ++i) {
        if (i) out += "\n\n";
        out += selected[i].text;
    }
    return out;
}

}  // namespace lcl
