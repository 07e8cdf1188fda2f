#include "lcl/bench.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "lcl/errors.hpp"
#include "lcl/metrics.hpp"

namespace lcl {

double score_prediction(const EvalTask& task, const std::string& prediction) {
    switch (task.metric) {
        case MetricKind::F1:
            return token_f1(prediction, task.answers);
        case MetricKind::Em:
            return exact_match(prediction, task.answers);
        case MetricKind::RougeLSum:
            return rouge_l_sum(prediction, task.answers.at(0)).score;
        case MetricKind::RougeGeo:
            return rouge_geo_mean(prediction, task.answers.at(0));
        case MetricKind::Mc:
            return mc_accuracy(prediction, task.correct_choice, task.choices);
    }
    return 0.0;
}

namespace {

std::string config_summary(const RunConfig& cfg) {
    std::ostringstream s;
    if (cfg.mode == EvalMode::Rag) {
        s << "chunk=" << cfg.retrieval.chunk_size_tokens << ",k=" << cfg.retrieval.top_k
          << ",order=" << (cfg.retrieval.order == ChunkOrder::DocumentOrder ? "doc" : "rel");
    } else {
        s << "window=" << cfg.window.window_tokens;
    }
    return s.str();
}

std::string fmt_score(double v) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(4) << v;
    return s.str();
}

}  // namespace

ResultRow run_eval(const std::vector<EvalTask>& tasks, const RunConfig& cfg, Gateway& gateway,
                   const Tokenizer& tok) {
    if (tasks.empty()) throw ArgumentError("run_eval: tasks must be nonempty");

    // Aggregation is by item id, independent of evaluation order.
    std::vector<const EvalTask*> ordered;
    for (const auto& t : tasks) ordered.push_back(&t);
    std::sort(ordered.begin(), ordered.end(),
              [](const EvalTask* a, const EvalTask* b) { return a->id < b->id; });

    ResultRow row;
    row.dataset = cfg.dataset_name;
    row.mode = cfg.mode == EvalMode::Rag ? "rag" : "full";
    row.config_summary = config_summary(cfg);

    double sum = 0.0;
    for (const EvalTask* task : ordered) {
        try {
            std::string context;
            if (cfg.mode == EvalMode::Rag) {
                Document doc = make_document(task->id, task->document, tok);
                auto chunks = chunk_document(doc, cfg.retrieval.chunk_size_tokens, tok);
                if (chunks.empty()) throw DataError("task has empty document: " + task->id);
                std::vector<std::string> passage_texts;
                for (const auto& c : chunks) {
                    passage_texts.push_back(cfg.retrieval.passage_prefix + c.text);
                }
                auto chunk_vecs = gateway.embed(passage_texts);
                auto query_vec =
                    gateway.embed({cfg.retrieval.query_prefix + task->question})[0];
                auto ranked = rank_chunks(query_vec, chunk_vecs, chunks, cfg.retrieval.top_k);
                std::vector<Chunk> selected;
                for (const auto& r : ranked) {
                    selected.push_back(chunks[r.chunk_id]);
                    row.total_retrieved_tokens +=
                        chunks[r.chunk_id].token_end - chunks[r.chunk_id].token_begin;
                }
                context = assemble_context(std::move(selected), cfg.retrieval.order);
            } else {
                const auto fitted = fit_to_window(
                    PromptParts{"", task->document, task->question}, cfg.window, tok);
                context = fitted.document;
            }
            ChatRequest req = build_prompt(cfg.mode, *task, context);
            const std::string prediction = gateway.complete(req);
            sum += score_prediction(*task, prediction);
            ++row.n_items;
        } catch (const TransportError&) {
            ++row.n_failed;
        }
    }
    if (row.n_items == 0) {
        row.valid = false;
        return row;
    }
    row.score = 100.0 * sum / static_cast<double>(row.n_items);
    // Transport noise must not masquerade as model quality.
    const double fail_rate = static_cast<double>(row.n_failed) /
                             static_cast<double>(row.n_items + row.n_failed);
    row.valid = fail_rate <= 0.10;
    return row;
}

std::vector<SweepPoint> sweep(const std::vector<EvalTask>& tasks, const RunConfig& base,
                              const std::vector<std::size_t>& chunk_sizes,
                              const std::vector<std::size_t>& ks, Gateway& gateway,
                              const Tokenizer& tok) {
    if (chunk_sizes.empty() || ks.empty()) throw ArgumentError("sweep: empty grid");
    std::vector<SweepPoint> out;
    for (std::size_t size : chunk_sizes) {
        for (std::size_t k : ks) {
            RunConfig cfg = base;
            cfg.mode = EvalMode::Rag;
            cfg.retrieval.chunk_size_tokens = size;
            cfg.retrieval.top_k = k;
            const ResultRow row = run_eval(tasks, cfg, gateway, tok);
            out.push_back(SweepPoint{size, k, size * k, row.score});
        }
    }
    return out;
}

ResultTable compare_modes(const std::vector<EvalTask>& tasks, const RunConfig& rag_cfg,
                          const RunConfig& full_cfg, Gateway& gateway, const Tokenizer& tok) {
    RunConfig rag = rag_cfg;
    rag.mode = EvalMode::Rag;
    RunConfig full = full_cfg;
    full.mode = EvalMode::FullContext;
    full.dataset_name = rag.dataset_name;

    ResultTable table;
    table.rows.push_back(run_eval(tasks, rag, gateway, tok));
    table.rows.push_back(run_eval(tasks, full, gateway, tok));
    std::set<std::string> versions;
    for (const auto& t : tasks) versions.insert(prompt_template_version(t.type));
    table.template_versions.assign(versions.begin(), versions.end());
    return table;
}

void write_results_csv(const ResultTable& table, const std::string& path) {
    if (table.rows.empty()) throw ArgumentError("refusing to write empty results table");
    auto rows = table.rows;
    std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
        if (a.dataset != b.dataset) return a.dataset < b.dataset;
        if (a.mode != b.mode) return a.mode < b.mode;
        return a.config_summary < b.config_summary;
    });
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write results csv: " + path);
    out << "dataset,mode,config,score,n_items,n_failed,total_retrieved_tokens,valid\n";
    for (const auto& r : rows) {
        out << r.dataset << "," << r.mode << ",\"" << r.config_summary << "\","
            << fmt_score(r.score) << "," << r.n_items << "," << r.n_failed << ","
            << r.total_retrieved_tokens << "," << (r.valid ? "1" : "0") << "\n";
    }
}

void write_report_md(const ResultTable& table, const std::string& path) {
    if (table.rows.empty()) throw ArgumentError("refusing to write empty report");
    auto rows = table.rows;
    std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
        if (a.dataset != b.dataset) return a.dataset < b.dataset;
        if (a.mode != b.mode) return a.mode < b.mode;
        return a.config_summary < b.config_summary;
    });
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write report: " + path);
    out << "# Evaluation report\n\n";
    out << "tokenizer: " << table.tokenizer_kind << "\n\n";
    if (!table.template_versions.empty()) {
        out << "templates:";
        for (const auto& v : table.template_versions) out << " " << v;
        out << "\n\n";
    }
    out << "| dataset | mode | config | score | items | failed | retrieved tokens |\n";
    out << "|---|---|---|---|---|---|---|\n";
    for (const auto& r : rows) {
        out << "| " << r.dataset << " | " << r.mode << " | " << r.config_summary << " | "
            << fmt_score(r.score) << " | " << r.n_items << " | " << r.n_failed << " | "
            << r.total_retrieved_tokens << " |\n";
    }
}

void write_sweep_csv(const std::vector<SweepPoint>& points, const std::string& path) {
    if (points.empty()) throw ArgumentError("refusing to write empty sweep");
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write sweep csv: " + path);
    out << "chunk_size,top_k,retrieved_tokens,score\n";
    for (const auto& p : points) {
        out << p.chunk_size << "," << p.top_k << "," << p.retrieved_tokens << ","
            << fmt_score(p.score) << "\n";
    }
}

void write_sweep_svg(const std::vector<SweepPoint>& points, const std::string& path) {
    if (points.empty()) throw ArgumentError("refusing to write empty sweep");
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write sweep svg: " + path);
    const int w = 520, h = 340, ml = 60, mb = 40, mt = 20, mr = 20;
    std::size_t xmax = 1;
    for (const auto& p : points) xmax = std::max(xmax, p.retrieved_tokens);
    auto px = [&](std::size_t x) {
        return ml + static_cast<double>(x) / static_cast<double>(xmax) * (w - ml - mr);
    };
    auto py = [&](double score) { return (h - mb) - score / 100.0 * (h - mb - mt); };

    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='" << h << "'>\n";
    out << "<line x1='" << ml << "' y1='" << h - mb << "' x2='" << w - mr << "' y2='" << h - mb
        << "' stroke='black'/>\n";
    out << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='" << h - mb
        << "' stroke='black'/>\n";
    out << "<text x='" << w / 2 << "' y='" << h - 8
        << "' font-size='11'>retrieved tokens (k x chunk size)</text>\n";
    out << "<text x='12' y='" << h / 2 << "' font-size='11' transform='rotate(-90 12 " << h / 2
        << ")'>score</text>\n";

    std::set<std::size_t> sizes;
    for (const auto& p : points) sizes.insert(p.chunk_size);
    const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd"};
    std::size_t ci = 0;
    for (std::size_t size : sizes) {
        std::vector<SweepPoint> line;
        for (const auto& p : points) {
            if (p.chunk_size == size) line.push_back(p);
        }
        std::sort(line.begin(), line.end(),
                  [](const SweepPoint& a, const SweepPoint& b) {
                      return a.retrieved_tokens < b.retrieved_tokens;
                  });
        const char* color = colors[ci % 5];
        out << "<polyline fill='none' stroke='" << color << "' points='";
        for (const auto& p : line) out << px(p.retrieved_tokens) << "," << py(p.score) << " ";
        out << "'/>\n";
        for (const auto& p : line) {
            out << "<circle cx='" << px(p.retrieved_tokens) << "' cy='" << py(p.score)
                << "' r='3' fill='" << color << "'/>\n";
        }
        out << "<text x='" << w - mr - 90 << "' y='" << mt + 14 * static_cast<int>(ci + 1)
            << "' font-size='10' fill='" << color << "'>chunk " << size << "</text>\n";
        ++ci;
    }
    out << "</svg>\n";
}

}  // namespace lcl
