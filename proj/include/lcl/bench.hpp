#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lcl/gateway.hpp"
#include "lcl/retrieval.hpp"
#include "lcl/task.hpp"
#include "lcl/tokenizer.hpp"

namespace lcl {

struct RunConfig {
    std::string dataset_name = "dataset";
    EvalMode mode = EvalMode::Rag;
    RetrievalConfig retrieval;  // rag mode
    WindowPolicy window;        // full-context mode
    std::uint64_t seed = 0;
};

struct ResultRow {
    std::string dataset;
    std::string mode;            // "rag" | "full"
    std::string config_summary;  // e.g. "chunk=1200,k=5" or "window=131072"
    double score = 0.0;          // percent, [0, 100]
    std::size_t n_items = 0;
    std::size_t n_failed = 0;
    std::uint64_t total_retrieved_tokens = 0;
    bool valid = true;  // false when >10% of items failed on transport
};

struct ResultTable {
    std::vector<ResultRow> rows;
    std::string tokenizer_kind = "default-rule";
    std::vector<std::string> template_versions;
};

double score_prediction(const EvalTask& task, const std::string& prediction);

ResultRow run_eval(const std::vector<EvalTask>& tasks, const RunConfig& cfg, Gateway& gateway,
                   const Tokenizer& tok);

struct SweepPoint {
    std::size_t chunk_size = 0;
    std::size_t top_k = 0;
    std::size_t retrieved_tokens = 0;  // k * chunk_size
    double score = 0.0;
};

// One run_eval per (chunk_size, k) pair; defaults are the ablation grid
// chunk {300, 600, 1200} x k {5, 10, 20, 40}.
std::vector<SweepPoint> sweep(const std::vector<EvalTask>& tasks, const RunConfig& base,
                              const std::vector<std::size_t>& chunk_sizes,
                              const std::vector<std::size_t>& ks, Gateway& gateway,
                              const Tokenizer& tok);

// Paired rag/full scores with deltas.
ResultTable compare_modes(const std::vector<EvalTask>& tasks, const RunConfig& rag_cfg,
                          const RunConfig& full_cfg, Gateway& gateway, const Tokenizer& tok);

void write_results_csv(const ResultTable& table, const std::string& path);
void write_report_md(const ResultTable& table, const std::string& path);
void write_sweep_csv(const std::vector<SweepPoint>& points, const std::string& path);
void write_sweep_svg(const std::vector<SweepPoint>& points, const std::string& path);

}  // namespace lcl
