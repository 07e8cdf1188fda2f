#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lcl/bench.hpp"
#include "lcl/corpus.hpp"
#include "lcl/gateway.hpp"
#include "lcl/metrics.hpp"
#include "lcl/niah.hpp"
#include "lcl/retrieval.hpp"
#include "lcl/rope.hpp"
#include "lcl/sft.hpp"
#include "lcl/task.hpp"
#include "lcl/tokenizer.hpp"

namespace py = pybind11;
using namespace lcl;

PYBIND11_MODULE(_lclab, m) {
    m.doc() = "long-context data preparation, retrieval, and evaluation toolkit";

    // tokenizer
    py::class_<Token>(m, "Token")
        .def_readonly("text", &Token::text)
        .def_readonly("begin", &Token::begin)
        .def_readonly("end", &Token::end);
    py::class_<Tokenizer>(m, "Tokenizer")
        .def(py::init<>())
        .def(py::init([](const std::string& vocab_path) {
                 return Tokenizer{TokenizerSpec{TokenizerKind::ExternalVocab, vocab_path}};
             }),
             py::arg("vocab_path"))
        .def("tokenize", [](const Tokenizer& t, const std::string& s) { return t.tokenize(s); })
        .def("count", [](const Tokenizer& t, const std::string& s) { return t.count(s); })
        .def("slice", [](const Tokenizer& t, const std::string& s, std::size_t b, std::size_t e) {
            return t.slice(s, b, e);
        });

    // corpus
    py::class_<Document>(m, "Document")
        .def(py::init([](std::string id, std::string text, const Tokenizer& tok) {
                 return make_document(std::move(id), std::move(text), tok);
             }),
             py::arg("id"), py::arg("text"), py::arg("tokenizer") = Tokenizer{})
        .def_readwrite("id", &Document::id)
        .def_readwrite("text", &Document::text)
        .def_readonly("token_count", &Document::token_count);
    py::class_<UpsampleConfig>(m, "UpsampleConfig")
        .def(py::init<>())
        .def_readwrite("long_threshold_tokens", &UpsampleConfig::long_threshold_tokens)
        .def_readwrite("long_token_share", &UpsampleConfig::long_token_share)
        .def_readwrite("target_total_tokens", &UpsampleConfig::target_total_tokens)
        .def_readwrite("seed", &UpsampleConfig::seed);
    py::enum_<SeparatorKind>(m, "SeparatorKind")
        .value("SPECIAL_CHAR", SeparatorKind::SpecialChar)
        .value("BOS_EOS", SeparatorKind::BosEos)
        .value("NONE", SeparatorKind::None);
    py::class_<SeparatorPolicy>(m, "SeparatorPolicy")
        .def(py::init<>())
        .def_readwrite("kind", &SeparatorPolicy::kind)
        .def_readwrite("special", &SeparatorPolicy::special);
    py::class_<Segment>(m, "Segment")
        .def_readonly("doc_id", &Segment::doc_id)
        .def_readonly("token_begin", &Segment::token_begin)
        .def_readonly("token_end", &Segment::token_end);
    py::class_<PackedSequence>(m, "PackedSequence")
        .def_readonly("segments", &PackedSequence::segments)
        .def_readonly("length_tokens", &PackedSequence::length_tokens)
        .def_readonly("separator_count", &PackedSequence::separator_count);
    m.def("upsample", &upsample, py::arg("corpus"), py::arg("config"));
    m.def("pack", &pack, py::arg("docs"), py::arg("target_len"),
          py::arg("separator") = SeparatorPolicy{});
    py::class_<CorpusStats>(m, "CorpusStats")
        .def_readonly("total_tokens", &CorpusStats::total_tokens)
        .def_readonly("doc_count", &CorpusStats::doc_count)
        .def_readonly("length_histogram", &CorpusStats::length_histogram)
        .def_readonly("long_token_share", &CorpusStats::long_token_share);
    m.def("corpus_stats", &corpus_stats, py::arg("docs"), py::arg("long_threshold"));

    // rope
    py::class_<RopeConfig>(m, "RopeConfig")
        .def(py::init<>())
        .def(py::init([](std::size_t head_dim, double base) {
                 return RopeConfig{head_dim, base};
             }),
             py::arg("head_dim"), py::arg("base"))
        .def_readwrite("head_dim", &RopeConfig::head_dim)
        .def_readwrite("base", &RopeConfig::base);
    py::enum_<RopeScaleMethod>(m, "RopeScaleMethod")
        .value("EXPLICIT_BASE", RopeScaleMethod::ExplicitBase)
        .value("NTK_AWARE", RopeScaleMethod::NtkAware)
        .value("POSITION_INTERPOLATION", RopeScaleMethod::PositionInterpolation);
    py::class_<RopeScaleResult>(m, "RopeScaleResult")
        .def_readonly("config", &RopeScaleResult::config)
        .def_readonly("position_scale", &RopeScaleResult::position_scale)
        .def_readonly("method", &RopeScaleResult::method);
    m.def("dim_frequencies", &dim_frequencies);
    m.def("wavelengths", &wavelengths);
    m.def("max_supported_context", &max_supported_context);
    m.def("scale_base_for_context", &scale_base_for_context, py::arg("config"),
          py::arg("old_ctx"), py::arg("new_ctx"), py::arg("method"), py::arg("new_base") = 0.0);

    // metrics
    py::class_<NormalizationRule>(m, "NormalizationRule")
        .def(py::init<>())
        .def_readwrite("lowercase", &NormalizationRule::lowercase)
        .def_readwrite("strip_punctuation", &NormalizationRule::strip_punctuation)
        .def_readwrite("strip_articles", &NormalizationRule::strip_articles)
        .def_readwrite("collapse_whitespace", &NormalizationRule::collapse_whitespace);
    py::class_<MetricResult>(m, "MetricResult")
        .def_readonly("name", &MetricResult::name)
        .def_readonly("score", &MetricResult::score)
        .def_readonly("precision", &MetricResult::precision)
        .def_readonly("recall", &MetricResult::recall);
    m.def(
        "normalize_answer",
        [](const std::string& s, const NormalizationRule& r) { return normalize_answer(s, r); },
        py::arg("text"), py::arg("rule") = NormalizationRule{});
    m.def(
        "exact_match",
        [](const std::string& p, const std::vector<std::string>& g, const NormalizationRule& r) {
            return exact_match(p, g, r);
        },
        py::arg("pred"), py::arg("golds"), py::arg("rule") = NormalizationRule{});
    m.def(
        "token_f1",
        [](const std::string& p, const std::vector<std::string>& g, const NormalizationRule& r) {
            return token_f1(p, g, r);
        },
        py::arg("pred"), py::arg("golds"), py::arg("rule") = NormalizationRule{});
    m.def(
        "rouge_n",
        [](const std::string& p, const std::string& ref, std::size_t n) {
            return rouge_n(p, ref, n);
        },
        py::arg("pred"), py::arg("ref"), py::arg("n"));
    m.def("rouge_l",
          [](const std::string& p, const std::string& ref) { return rouge_l(p, ref); });
    m.def("rouge_l_sum",
          [](const std::string& p, const std::string& ref) { return rouge_l_sum(p, ref); });
    m.def("rouge_geo_mean",
          [](const std::string& p, const std::string& ref) { return rouge_geo_mean(p, ref); });
    m.def(
        "mc_accuracy",
        [](const std::string& p, std::size_t idx, const std::vector<std::string>& choices,
           const NormalizationRule& r) { return mc_accuracy(p, idx, choices, r); },
        py::arg("pred"), py::arg("correct_index"), py::arg("choices"),
        py::arg("rule") = NormalizationRule{});

    // retrieval
    py::class_<Chunk>(m, "Chunk")
        .def_readonly("doc_id", &Chunk::doc_id)
        .def_readonly("index", &Chunk::index)
        .def_readonly("text", &Chunk::text)
        .def_readonly("token_begin", &Chunk::token_begin)
        .def_readonly("token_end", &Chunk::token_end);
    py::enum_<ChunkOrder>(m, "ChunkOrder")
        .value("DOCUMENT_ORDER", ChunkOrder::DocumentOrder)
        .value("RELEVANCE_ORDER", ChunkOrder::RelevanceOrder);
    py::class_<EmbeddingVector>(m, "EmbeddingVector")
        .def(py::init([](std::vector<float> values) {
                 return EmbeddingVector{std::move(values)};
             }),
             py::arg("values"))
        .def_readwrite("values", &EmbeddingVector::values);
    py::class_<RankedChunk>(m, "RankedChunk")
        .def_readonly("chunk_id", &RankedChunk::chunk_id)
        .def_readonly("score", &RankedChunk::score);
    m.def("normalize_embedding", [](EmbeddingVector& v) { normalize_embedding(v); });
    m.def("dot", &dot);
    m.def("chunk_document", &chunk_document, py::arg("doc"), py::arg("chunk_size"),
          py::arg("tokenizer") = Tokenizer{});
    m.def(
        "rank_chunks",
        [](const EmbeddingVector& q, const std::vector<EmbeddingVector>& c, std::size_t k) {
            return rank_chunks(q, c, k);
        },
        py::arg("query"), py::arg("candidates"), py::arg("k"));
    m.def("assemble_context", &assemble_context, py::arg("selected"),
          py::arg("order") = ChunkOrder::DocumentOrder);

    // tasks
    py::enum_<TaskType>(m, "TaskType")
        .value("QA", TaskType::Qa)
        .value("MC", TaskType::Mc)
        .value("SUMM", TaskType::Summ)
        .value("DIALOGUE", TaskType::Dialogue);
    py::enum_<MetricKind>(m, "MetricKind")
        .value("F1", MetricKind::F1)
        .value("EM", MetricKind::Em)
        .value("ROUGE_L_SUM", MetricKind::RougeLSum)
        .value("ROUGE_GEO", MetricKind::RougeGeo)
        .value("MC", MetricKind::Mc);
    py::class_<EvalTask>(m, "EvalTask")
        .def(py::init<>())
        .def_readwrite("id", &EvalTask::id)
        .def_readwrite("document", &EvalTask::document)
        .def_readwrite("question", &EvalTask::question)
        .def_readwrite("answers", &EvalTask::answers)
        .def_readwrite("choices", &EvalTask::choices)
        .def_readwrite("correct_choice", &EvalTask::correct_choice)
        .def_readwrite("type", &EvalTask::type)
        .def_readwrite("metric", &EvalTask::metric);
    m.def("read_jsonl_tasks", &read_jsonl_tasks);

    // gateway
    py::enum_<TruncationStrategy>(m, "TruncationStrategy")
        .value("DROP_MIDDLE", TruncationStrategy::DropMiddle)
        .value("DROP_LEFT", TruncationStrategy::DropLeft)
        .value("ERROR", TruncationStrategy::Error);
    py::class_<WindowPolicy>(m, "WindowPolicy")
        .def(py::init<>())
        .def_readwrite("window_tokens", &WindowPolicy::window_tokens)
        .def_readwrite("strategy", &WindowPolicy::strategy);
    py::enum_<StubModelKind>(m, "StubModelKind")
        .value("NEEDLE_EXTRACTOR", StubModelKind::NeedleExtractor)
        .value("ECHO_FIRST_K", StubModelKind::EchoFirstK)
        .value("FIXED_ANSWER", StubModelKind::FixedAnswer);
    py::class_<StubModelSpec>(m, "StubModelSpec")
        .def(py::init<>())
        .def_readwrite("kind", &StubModelSpec::kind)
        .def_readwrite("echo_k", &StubModelSpec::echo_k)
        .def_readwrite("fixed_answer", &StubModelSpec::fixed_answer);
    py::class_<GatewayConfig>(m, "GatewayConfig")
        .def(py::init<>())
        .def_readwrite("cache_dir", &GatewayConfig::cache_dir)
        .def_readwrite("stub", &GatewayConfig::stub)
        .def_readwrite("embed_dim", &GatewayConfig::embed_dim)
        .def("load_env", &GatewayConfig::load_env);
    py::class_<ChatMessage>(m, "ChatMessage")
        .def(py::init([](std::string role, std::string content) {
                 return ChatMessage{std::move(role), std::move(content)};
             }),
             py::arg("role"), py::arg("content"))
        .def_readwrite("role", &ChatMessage::role)
        .def_readwrite("content", &ChatMessage::content);
    py::class_<ChatRequest>(m, "ChatRequest")
        .def(py::init<>())
        .def_readwrite("model", &ChatRequest::model)
        .def_readwrite("messages", &ChatRequest::messages)
        .def_readwrite("temperature", &ChatRequest::temperature)
        .def_readwrite("max_output_tokens", &ChatRequest::max_output_tokens);
    py::class_<Gateway>(m, "Gateway")
        .def(py::init<GatewayConfig>(), py::arg("config"))
        .def("complete", &Gateway::complete, py::call_guard<py::gil_scoped_release>())
        .def("embed", &Gateway::embed, py::call_guard<py::gil_scoped_release>())
        .def_property_readonly("network_calls", &Gateway::network_calls)
        .def_property_readonly("cache_hits", &Gateway::cache_hits);

    // niah
    py::enum_<NiahVariant>(m, "NiahVariant")
        .value("SANDWICH", NiahVariant::Sandwich)
        .value("PASSKEY", NiahVariant::Passkey);
    py::class_<NiahCase>(m, "NiahCase")
        .def(py::init<>())
        .def_readwrite("context_len_tokens", &NiahCase::context_len_tokens)
        .def_readwrite("depth", &NiahCase::depth)
        .def_readwrite("needle", &NiahCase::needle)
        .def_readwrite("question", &NiahCase::question)
        .def_readwrite("expected_answer", &NiahCase::expected_answer);
    py::class_<NiahCell>(m, "NiahCell")
        .def_readonly("length", &NiahCell::length)
        .def_readonly("depth", &NiahCell::depth)
        .def_readonly("score", &NiahCell::score)
        .def_readonly("missing", &NiahCell::missing);
    py::class_<NiahGrid>(m, "NiahGrid")
        .def_readonly("lengths", &NiahGrid::lengths)
        .def_readonly("depths", &NiahGrid::depths)
        .def_readonly("cells", &NiahGrid::cells);
    py::class_<NiahRunConfig>(m, "NiahRunConfig")
        .def(py::init<>())
        .def_readwrite("window", &NiahRunConfig::window)
        .def_readwrite("instruction", &NiahRunConfig::instruction);
    m.def("build_haystack", &build_haystack, py::arg("filler"), py::arg("case"),
          py::arg("tokenizer") = Tokenizer{});
    m.def("make_standard_cases", &make_standard_cases, py::arg("variant"), py::arg("lengths"),
          py::arg("depths"));
    m.def(
        "score_case",
        [](const std::string& response, const NiahCase& c) { return score_case(response, c); },
        py::arg("response"), py::arg("case"));
    m.def("run_grid", &run_grid, py::arg("cases"), py::arg("filler"), py::arg("gateway"),
          py::arg("config"), py::arg("tokenizer") = Tokenizer{});
    m.def("default_lengths", &default_lengths);
    m.def("default_depths", &default_depths);

    // sft
    py::class_<QaPair>(m, "QaPair")
        .def(py::init([](std::string q, std::vector<std::string> a) {
                 return QaPair{std::move(q), std::move(a)};
             }),
             py::arg("question"), py::arg("answers"))
        .def_readwrite("question", &QaPair::question)
        .def_readwrite("answers", &QaPair::answers);
    py::class_<SftSource>(m, "SftSource")
        .def(py::init<>())
        .def_readwrite("id", &SftSource::id)
        .def_readwrite("paragraphs", &SftSource::paragraphs)
        .def_readwrite("summary", &SftSource::summary)
        .def_readwrite("qa_pairs", &SftSource::qa_pairs);
    py::class_<SftSample>(m, "SftSample")
        .def_readonly("id", &SftSample::id)
        .def_readonly("document", &SftSample::document)
        .def_readonly("token_count", &SftSample::token_count)
        .def_readonly("qa_pairs", &SftSample::qa_pairs)
        .def_readonly("summary_position", &SftSample::summary_position)
        .def_readonly("provenance", &SftSample::provenance);
    py::class_<SftSynthConfig>(m, "SftSynthConfig")
        .def(py::init<>())
        .def_readwrite("min_tokens", &SftSynthConfig::min_tokens)
        .def_readwrite("max_tokens", &SftSynthConfig::max_tokens)
        .def_readwrite("allow_distractors", &SftSynthConfig::allow_distractors)
        .def_readwrite("seed", &SftSynthConfig::seed);
    m.def("synthesize_long_sample", &synthesize_long_sample, py::arg("source"),
          py::arg("config"), py::arg("distractors") = std::vector<Document>{},
          py::arg("tokenizer") = Tokenizer{});

    // bench
    py::enum_<EvalMode>(m, "EvalMode")
        .value("RAG", EvalMode::Rag)
        .value("FULL_CONTEXT", EvalMode::FullContext);
    py::class_<RetrievalConfig>(m, "RetrievalConfig")
        .def(py::init<>())
        .def_readwrite("chunk_size_tokens", &RetrievalConfig::chunk_size_tokens)
        .def_readwrite("top_k", &RetrievalConfig::top_k)
        .def_readwrite("order", &RetrievalConfig::order)
        .def_readwrite("query_prefix", &RetrievalConfig::query_prefix)
        .def_readwrite("passage_prefix", &RetrievalConfig::passage_prefix);
    py::class_<RunConfig>(m, "RunConfig")
        .def(py::init<>())
        .def_readwrite("dataset_name", &RunConfig::dataset_name)
        .def_readwrite("mode", &RunConfig::mode)
        .def_readwrite("retrieval", &RunConfig::retrieval)
        .def_readwrite("window", &RunConfig::window)
        .def_readwrite("seed", &RunConfig::seed);
    py::class_<ResultRow>(m, "ResultRow")
        .def_readonly("dataset", &ResultRow::dataset)
        .def_readonly("mode", &ResultRow::mode)
        .def_readonly("config_summary", &ResultRow::config_summary)
        .def_readonly("score", &ResultRow::score)
        .def_readonly("n_items", &ResultRow::n_items)
        .def_readonly("n_failed", &ResultRow::n_failed)
        .def_readonly("total_retrieved_tokens", &ResultRow::total_retrieved_tokens)
        .def_readonly("valid", &ResultRow::valid);
    py::class_<SweepPoint>(m, "SweepPoint")
        .def_readonly("chunk_size", &SweepPoint::chunk_size)
        .def_readonly("top_k", &SweepPoint::top_k)
        .def_readonly("retrieved_tokens", &SweepPoint::retrieved_tokens)
        .def_readonly("score", &SweepPoint::score);
    m.def("score_prediction", &score_prediction, py::arg("task"), py::arg("prediction"));
    m.def("run_eval", &run_eval, py::arg("tasks"), py::arg("config"), py::arg("gateway"),
          py::arg("tokenizer") = Tokenizer{});
    m.def("sweep", &sweep, py::arg("tasks"), py::arg("base"), py::arg("chunk_sizes"),
          py::arg("ks"), py::arg("gateway"), py::arg("tokenizer") = Tokenizer{});
}
