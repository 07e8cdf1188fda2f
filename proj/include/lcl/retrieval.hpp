#pragma once

#include <string>
#include <vector>

#include "lcl/corpus.hpp"
#include "lcl/tokenizer.hpp"

namespace lcl {

struct Chunk {
    std::string doc_id;
    std::size_t index = 0;  // 0-based position within the document
    std::string text;
    std::size_t token_begin = 0;
    std::size_t token_end = 0;
};

enum class ChunkOrder { DocumentOrder, RelevanceOrder };

struct RetrievalConfig {
    std::size_t chunk_size_tokens = 1200;
    std::size_t top_k = 5;
    ChunkOrder order = ChunkOrder::DocumentOrder;
    std::string query_prefix = "query: ";      // E5-family contract
    std::string passage_prefix = "passage: ";
};

struct EmbeddingVector {
    std::vector<float> values;

    std::size_t dim() const { return values.size(); }
};

// L2-normalize in place so cosine similarity reduces to a dot product.
// Throws ArgumentError on zero or non-finite vectors.
void normalize_embedding(EmbeddingVector& v);

double dot(const EmbeddingVector& a, const EmbeddingVector& b);

// Consecutive chunks tile the document's token range; all but possibly the
// last have exactly chunk_size tokens. An empty document yields no chunks.
std::vector<Chunk> chunk_document(const Document& doc, std::size_t chunk_size,
                                  const Tokenizer& tok);

struct RankedChunk {
    std::size_t chunk_id = 0;  // caller-side index into the candidate list
    double score = 0.0;
};

// Exact full-scan top-k by cosine similarity, descending. Ties break toward
// the lower chunk index within a doc, then the lexicographically smaller
// doc_id; with bare vectors that collapses to the lower candidate index.
std::vector<RankedChunk> rank_chunks(const EmbeddingVector& query,
                                     const std::vector<EmbeddingVector>& candidates,
                                     std::size_t k);

std::vector<RankedChunk> rank_chunks(const EmbeddingVector& query,
                                     const std::vector<EmbeddingVector>& candidates,
                                     const std::vector<Chunk>& chunks, std::size_t k);

// Join selected chunks with blank lines; DocumentOrder sorts by (doc_id, index).
std::string assemble_context(std::vector<Chunk> selected, ChunkOrder order);

}  // namespace lcl
