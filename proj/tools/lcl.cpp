// lcl: command-line front end for the long-context toolkit.

#include <algorithm>
#include <chrono>
#include <ctime>
#include <map>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lcl/bench.hpp"
#include "lcl/corpus.hpp"
#include "lcl/errors.hpp"
#include "lcl/gateway.hpp"
#include "lcl/metrics.hpp"
#include "lcl/niah.hpp"
#include "lcl/retrieval.hpp"
#include "lcl/rope.hpp"
#include "lcl/sft.hpp"
#include "lcl/task.hpp"
#include "lcl/tokenizer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace lcl;

namespace {

struct TokOpts {
    std::string vocab;
};

Tokenizer make_tokenizer(const TokOpts& o) {
    if (o.vocab.empty()) return Tokenizer{};
    return Tokenizer{TokenizerSpec{TokenizerKind::ExternalVocab, o.vocab}};
}

struct GatewayOpts {
    std::string cache_dir;
    std::string api_base;
    std::string api_key;
    std::string model = "default";
    std::string stub = "needle";  // needle | echo | fixed
    std::string fixed_answer;
    std::size_t echo_k = 32;
    std::size_t embed_dim = 64;
};

void add_gateway_opts(CLI::App* cmd, GatewayOpts& o) {
    cmd->add_option("--cache-dir", o.cache_dir, "response cache directory");
    cmd->add_option("--api-base", o.api_base, "chat endpoint base URL (default: offline stub)");
    cmd->add_option("--api-key", o.api_key, "bearer token for the endpoint");
    cmd->add_option("--model", o.model, "model name sent to the endpoint");
    cmd->add_option("--stub", o.stub, "offline stub: needle|echo|fixed")
        ->check(CLI::IsMember({"needle", "echo", "fixed"}));
    cmd->add_option("--fixed-answer", o.fixed_answer, "answer for the fixed stub");
    cmd->add_option("--embed-dim", o.embed_dim, "embedding dimension for offline stubs");
}

Gateway make_gateway(const GatewayOpts& o) {
    GatewayConfig cfg;
    cfg.cache_dir = o.cache_dir;
    cfg.load_env();
    if (!o.api_base.empty()) cfg.chat.base_url = o.api_base;
    if (!o.api_key.empty()) cfg.chat.api_key = o.api_key;
    cfg.chat.model = o.model;
    cfg.embed_dim = o.embed_dim;
    StubModelSpec stub;
    if (o.stub == "echo") stub.kind = StubModelKind::EchoFirstK;
    if (o.stub == "fixed") stub.kind = StubModelKind::FixedAnswer;
    stub.echo_k = o.echo_k;
    stub.fixed_answer = o.fixed_answer;
    cfg.stub = stub;
    return Gateway(cfg);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

SeparatorPolicy parse_separator(const std::string& s) {
    if (s == "none") return {SeparatorKind::None, ""};
    if (s == "bos-eos") return {SeparatorKind::BosEos, ""};
    return {SeparatorKind::SpecialChar, s};
}

std::string run_dir(const std::string& root) {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y%m%d-%H%M%S", std::localtime(&t));
    fs::path dir = fs::path(root) / buf;
    for (int suffix = 1; fs::exists(dir); ++suffix) {
        dir = fs::path(root) / (std::string(buf) + "-" + std::to_string(suffix));
    }
    fs::create_directories(dir);
    return dir.string();
}

json stats_to_json(const CorpusStats& st) {
    json j;
    j["total_tokens"] = st.total_tokens;
    j["doc_count"] = st.doc_count;
    j["long_token_share"] = st.long_token_share;
    json hist = json::object();
    for (const auto& [bucket, count] : st.length_histogram) {
        hist[std::to_string(bucket)] = count;
    }
    j["length_histogram"] = hist;
    return j;
}

void register_tok(CLI::App& app, TokOpts& tok_opts) {
    auto* tok = app.add_subcommand("tok", "tokenizer utilities");
    tok->require_subcommand(1);

    auto* count = tok->add_subcommand("count", "count tokens in a file");
    auto file = std::make_shared<std::string>();
    count->add_option("file", *file, "input text file")->required();
    count->callback([&tok_opts, file] {
        std::cout << make_tokenizer(tok_opts).count(read_file(*file)) << "\n";
    });

    auto* slice = tok->add_subcommand("slice", "print a token range of a file");
    auto sfile = std::make_shared<std::string>();
    auto start = std::make_shared<std::size_t>(0);
    auto end = std::make_shared<std::size_t>(0);
    slice->add_option("file", *sfile, "input text file")->required();
    slice->add_option("--start", *start, "first token index")->required();
    slice->add_option("--end", *end, "one past the last token index")->required();
    slice->callback([&tok_opts, sfile, start, end] {
        std::cout << make_tokenizer(tok_opts).slice(read_file(*sfile), *start, *end) << "\n";
    });
}

void register_corpus(CLI::App& app, TokOpts& tok_opts) {
    auto* corpus = app.add_subcommand("corpus", "pretraining data preparation");
    corpus->require_subcommand(1);

    struct UpArgs {
        std::string input, output;
        UpsampleConfig cfg;
    };
    auto up = std::make_shared<UpArgs>();
    up->cfg.long_threshold_tokens = 8192;
    auto* upsample_cmd = corpus->add_subcommand("upsample", "upsample long documents");
    upsample_cmd->add_option("--input", up->input, "input corpus JSONL")->required();
    upsample_cmd->add_option("--output", up->output, "output corpus JSONL")->required();
    upsample_cmd->add_option("--share", up->cfg.long_token_share, "target long-token share");
    upsample_cmd->add_option("--threshold", up->cfg.long_threshold_tokens,
                             "long-document token threshold");
    upsample_cmd->add_option("--total-tokens", up->cfg.target_total_tokens,
                             "tokens to emit");
    upsample_cmd->add_option("--seed", up->cfg.seed, "sampling seed");
    upsample_cmd->callback([&tok_opts, up] {
        const auto tok = make_tokenizer(tok_opts);
        const auto docs = read_jsonl_corpus(up->input, tok);
        const auto out = upsample(docs, up->cfg);
        write_jsonl_corpus(out, up->output);
        const auto st = corpus_stats(out, up->cfg.long_threshold_tokens);
        std::cout << "emitted " << st.total_tokens << " tokens in " << st.doc_count
                  << " documents, long-token share " << st.long_token_share << "\n";
    });

    struct PackArgs {
        std::string input, output, manifest, separator = "<s>";
        std::size_t target_len = 131072;
    };
    auto pk = std::make_shared<PackArgs>();
    auto* pack_cmd = corpus->add_subcommand("pack", "pack documents into fixed-length sequences");
    pack_cmd->add_option("--input", pk->input, "input corpus JSONL")->required();
    pack_cmd->add_option("--output", pk->output, "output packed-sequence JSONL")->required();
    pack_cmd->add_option("--target-len", pk->target_len, "sequence length in tokens");
    pack_cmd->add_option("--separator", pk->separator,
                         "document separator: a literal string, bos-eos, or none");
    pack_cmd->add_option("--manifest", pk->manifest, "also write a training manifest JSON");
    pack_cmd->callback([&tok_opts, pk] {
        const auto tok = make_tokenizer(tok_opts);
        const auto docs = read_jsonl_corpus(pk->input, tok);
        const auto sep = parse_separator(pk->separator);
        const auto seqs = pack(docs, pk->target_len, sep);
        write_jsonl_packed(seqs, pk->output);
        if (!pk->manifest.empty()) {
            TrainingManifest m;
            m.sequence_length = pk->target_len;
            m.sequence_count = seqs.size();
            m.separator = pk->separator;
            for (const auto& s : seqs) m.total_tokens += s.length_tokens;
            write_manifest(m, pk->manifest);
        }
        std::cout << "packed " << docs.size() << " documents into " << seqs.size()
                  << " sequences of " << pk->target_len << " tokens\n";
    });

    struct StatArgs {
        std::string input;
        std::size_t threshold = 8192;
    };
    auto st = std::make_shared<StatArgs>();
    auto* stats_cmd = corpus->add_subcommand("stats", "corpus token statistics");
    stats_cmd->add_option("--input", st->input, "input corpus JSONL")->required();
    stats_cmd->add_option("--threshold", st->threshold, "long-document token threshold");
    stats_cmd->callback([&tok_opts, st] {
        const auto tok = make_tokenizer(tok_opts);
        const auto docs = read_jsonl_corpus(st->input, tok);
        std::cout << stats_to_json(corpus_stats(docs, st->threshold)).dump(2) << "\n";
    });
}

void register_rope(CLI::App& app) {
    auto* rope = app.add_subcommand("rope", "rotary-embedding context-extension math");
    rope->require_subcommand(1);

    struct InfoArgs {
        RopeConfig cfg;
        double target_ctx = 0.0;
    };
    auto in = std::make_shared<InfoArgs>();
    auto* info = rope->add_subcommand("info", "frequencies, wavelengths, supported context");
    info->add_option("--dim", in->cfg.head_dim, "head dimension (even)");
    info->add_option("--base", in->cfg.base, "base frequency");
    info->add_option("--target-ctx", in->target_ctx, "context length to check against");
    info->callback([in] {
        const auto f = dim_frequencies(in->cfg);
        const auto lam = wavelengths(in->cfg);
        const double max_ctx = max_supported_context(in->cfg);
        std::cout << "head_dim " << in->cfg.head_dim << ", base " << in->cfg.base << "\n"
                  << "frequencies: " << f.size() << " values, f0=" << f.front()
                  << " .. f" << (f.size() - 1) << "=" << f.back() << "\n"
                  << "wavelengths: lambda0=" << lam.front() << " .. lambda_max=" << lam.back()
                  << "\n"
                  << "max supported context ~ " << max_ctx << " tokens\n";
        if (in->target_ctx > 0.0) {
            const bool ok = max_ctx > in->target_ctx;
            std::cout << "target " << in->target_ctx << ": "
                      << (ok ? "within" : "beyond") << " the supported range\n";
        }
    });

    struct ScaleArgs {
        RopeConfig cfg;
        std::string method = "ntk";
        double from = 8192.0, to = 131072.0, new_base = 0.0;
    };
    auto sc = std::make_shared<ScaleArgs>();
    auto* scale = rope->add_subcommand("scale", "rescale the base for a longer context");
    scale->add_option("--dim", sc->cfg.head_dim, "head dimension (even)");
    scale->add_option("--base", sc->cfg.base, "current base frequency");
    scale->add_option("--method", sc->method, "ntk | pi | base")
        ->check(CLI::IsMember({"ntk", "pi", "base"}));
    scale->add_option("--from", sc->from, "current context length");
    scale->add_option("--to", sc->to, "target context length");
    scale->add_option("--new-base", sc->new_base, "explicit base (method=base)");
    scale->callback([sc] {
        RopeScaleMethod m = RopeScaleMethod::NtkAware;
        if (sc->method == "pi") m = RopeScaleMethod::PositionInterpolation;
        if (sc->method == "base") m = RopeScaleMethod::ExplicitBase;
        const auto res = scale_base_for_context(sc->cfg, sc->from, sc->to, m, sc->new_base);
        std::cout << "base " << sc->cfg.base << " -> " << res.config.base << "\n";
        if (res.position_scale != 1.0) {
            std::cout << "position scale " << res.position_scale << "\n";
        }
        std::cout << "max supported context ~ " << max_supported_context(res.config)
                  << " tokens (target " << sc->to << ")\n";
    });
}

std::uint64_t chunk_hash(const Chunk& c) {
    return fnv1a64(c.doc_id + "\x1f" + std::to_string(c.index) + "\x1f" + c.text);
}

void register_rag(CLI::App& app, TokOpts& tok_opts) {
    auto* rag = app.add_subcommand("rag", "chunking, embedding, retrieval");
    rag->require_subcommand(1);

    struct ChunkArgs {
        std::string input, output;
        std::size_t chunk_size = 1200;
    };
    auto ch = std::make_shared<ChunkArgs>();
    auto* chunk_cmd = rag->add_subcommand("chunk", "split documents into token chunks");
    chunk_cmd->add_option("--input", ch->input, "input corpus JSONL")->required();
    chunk_cmd->add_option("--output", ch->output, "output chunk JSONL")->required();
    chunk_cmd->add_option("--chunk-size", ch->chunk_size, "chunk size in tokens");
    chunk_cmd->callback([&tok_opts, ch] {
        const auto tok = make_tokenizer(tok_opts);
        const auto docs = read_jsonl_corpus(ch->input, tok);
        std::ofstream out(ch->output);
        if (!out) throw ConfigError("cannot write chunks: " + ch->output);
        std::size_t n = 0;
        for (const auto& doc : docs) {
            for (const auto& c : chunk_document(doc, ch->chunk_size, tok)) {
                json j;
                j["doc_id"] = c.doc_id;
                j["index"] = c.index;
                j["text"] = c.text;
                j["token_begin"] = c.token_begin;
                j["token_end"] = c.token_end;
                out << j.dump() << "\n";
                ++n;
            }
        }
        std::cout << "wrote " << n << " chunks\n";
    });

    struct EmbedArgs {
        std::string input, output;
        GatewayOpts gw;
        std::string passage_prefix = "passage: ";
    };
    auto em = std::make_shared<EmbedArgs>();
    auto* embed_cmd = rag->add_subcommand("embed", "embed chunks into a vector cache");
    embed_cmd->add_option("--input", em->input, "chunk JSONL from 'rag chunk'")->required();
    embed_cmd->add_option("--output", em->output, "vector cache JSONL")->required();
    embed_cmd->add_option("--passage-prefix", em->passage_prefix, "prefix before each passage");
    add_gateway_opts(embed_cmd, em->gw);
    embed_cmd->callback([em] {
        std::ifstream in(em->input);
        if (!in) throw ConfigError("cannot open chunks: " + em->input);
        std::vector<Chunk> chunks;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            json j = json::parse(line);
            chunks.push_back(Chunk{j.at("doc_id"), j.at("index"), j.at("text"),
                                   j.value("token_begin", std::size_t{0}),
                                   j.value("token_end", std::size_t{0})});
        }
        auto gw = make_gateway(em->gw);
        std::vector<std::string> texts;
        for (const auto& c : chunks) texts.push_back(em->passage_prefix + c.text);
        const auto vecs = gw.embed(texts);
        std::ofstream out(em->output);
        if (!out) throw ConfigError("cannot write vectors: " + em->output);
        for (std::size_t i = 0; i < chunks.size(); ++i) {
            json j;
            j["hash"] = chunk_hash(chunks[i]);
            j["vector"] = vecs[i].values;
            out << j.dump() << "\n";
        }
        std::cout << "embedded " << chunks.size() << " chunks\n";
    });

    struct RetrieveArgs {
        std::string input, query, order = "doc";
        RetrievalConfig cfg;
        GatewayOpts gw;
    };
    auto re = std::make_shared<RetrieveArgs>();
    auto* retrieve_cmd = rag->add_subcommand("retrieve", "rank chunks against a query");
    retrieve_cmd->add_option("--input", re->input, "input corpus JSONL")->required();
    retrieve_cmd->add_option("--query", re->query, "retrieval query")->required();
    retrieve_cmd->add_option("--chunk-size", re->cfg.chunk_size_tokens, "chunk size in tokens");
    retrieve_cmd->add_option("--top-k", re->cfg.top_k, "chunks to keep");
    retrieve_cmd->add_option("--order", re->order, "context order: doc | rel")
        ->check(CLI::IsMember({"doc", "rel"}));
    add_gateway_opts(retrieve_cmd, re->gw);
    retrieve_cmd->callback([&tok_opts, re] {
        const auto tok = make_tokenizer(tok_opts);
        const auto docs = read_jsonl_corpus(re->input, tok);
        std::vector<Chunk> chunks;
        for (const auto& doc : docs) {
            auto cs = chunk_document(doc, re->cfg.chunk_size_tokens, tok);
            chunks.insert(chunks.end(), cs.begin(), cs.end());
        }
        auto gw = make_gateway(re->gw);
        std::vector<std::string> texts = {re->cfg.query_prefix + re->query};
        for (const auto& c : chunks) texts.push_back(re->cfg.passage_prefix + c.text);
        const auto vecs = gw.embed(texts);
        const EmbeddingVector query = vecs[0];
        const std::vector<EmbeddingVector> cands(vecs.begin() + 1, vecs.end());
        const auto ranked = rank_chunks(query, cands, chunks, re->cfg.top_k);
        std::vector<Chunk> selected;
        for (const auto& r : ranked) {
            std::cout << chunks[r.chunk_id].doc_id << "#" << chunks[r.chunk_id].index
                      << " score " << r.score << "\n";
            selected.push_back(chunks[r.chunk_id]);
        }
        const auto order =
            re->order == "rel" ? ChunkOrder::RelevanceOrder : ChunkOrder::DocumentOrder;
        std::cout << "---\n" << assemble_context(std::move(selected), order) << "\n";
    });
}

void register_score(CLI::App& app) {
    struct ScoreArgs {
        std::string metric = "f1", pred_file, gold_file, output;
    };
    auto sa = std::make_shared<ScoreArgs>();
    auto* score_cmd = app.add_subcommand("score", "score predictions against gold answers");
    score_cmd->add_option("--metric", sa->metric, "f1 | em | rougeLsum | rougeGeo | mc")
        ->check(CLI::IsMember({"f1", "em", "rougeLsum", "rougeGeo", "mc"}));
    score_cmd
        ->add_option("--pred-file", sa->pred_file,
                     "JSONL of {\"id\": str, \"prediction\": str}")
        ->required();
    score_cmd->add_option("--gold-file", sa->gold_file, "task JSONL with gold answers")
        ->required();
    score_cmd->add_option("--output", sa->output, "CSV output path (default: stdout)");
    score_cmd->callback([sa] {
        const auto tasks = read_jsonl_tasks(sa->gold_file);
        std::map<std::string, const EvalTask*> by_id;
        for (const auto& t : tasks) by_id[t.id] = &t;

        std::ifstream in(sa->pred_file);
        if (!in) throw ConfigError("cannot open predictions: " + sa->pred_file);
        const MetricKind metric = metric_from_name(sa->metric);

        std::ostringstream csv;
        csv << "id,metric," << "score\n";
        double sum = 0.0;
        std::size_t n = 0;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            json j = json::parse(line);
            const std::string id = j.at("id").get<std::string>();
            const auto it = by_id.find(id);
            if (it == by_id.end()) throw DataError("prediction for unknown task id: " + id);
            EvalTask task = *it->second;
            task.metric = metric;
            const double s = score_prediction(task, j.at("prediction").get<std::string>());
            csv << id << "," << sa->metric << "," << s << "\n";
            sum += s;
            ++n;
        }
        if (n == 0) throw DataError("no predictions to score");
        csv << "aggregate," << sa->metric << "," << sum / static_cast<double>(n) << "\n";
        if (sa->output.empty()) {
            std::cout << csv.str();
        } else {
            std::ofstream out(sa->output);
            if (!out) throw ConfigError("cannot write csv: " + sa->output);
            out << csv.str();
        }
    });
}

void register_niah(CLI::App& app, TokOpts& tok_opts) {
    auto* niah = app.add_subcommand("niah", "needle-in-a-haystack probes");
    niah->require_subcommand(1);

    struct RunArgs {
        std::string variant = "passkey", mode = "full", filler, out = "runs";
        std::size_t min_len = 1000, max_len = 131072, length_count = 8, depth_count = 10;
        std::size_t window = 131072;
        RetrievalConfig retrieval;
        GatewayOpts gw;
    };
    auto ra = std::make_shared<RunArgs>();
    auto* run_cmd = niah->add_subcommand("run", "run a length x depth grid");
    run_cmd->add_option("--variant", ra->variant, "passkey | sandwich")
        ->check(CLI::IsMember({"passkey", "sandwich"}));
    run_cmd->add_option("--mode", ra->mode, "full | rag")
        ->check(CLI::IsMember({"full", "rag"}));
    run_cmd->add_option("--filler", ra->filler, "filler corpus JSONL")->required();
    run_cmd->add_option("--min-len", ra->min_len, "shortest context in tokens");
    run_cmd->add_option("--max-len", ra->max_len, "longest context in tokens");
    run_cmd->add_option("--lengths", ra->length_count, "grid points along the length axis");
    run_cmd->add_option("--depths", ra->depth_count, "grid points along the depth axis");
    run_cmd->add_option("--window", ra->window, "model context window in tokens");
    run_cmd->add_option("--chunk-size", ra->retrieval.chunk_size_tokens,
                        "rag mode: chunk size in tokens");
    run_cmd->add_option("--top-k", ra->retrieval.top_k, "rag mode: chunks to keep");
    run_cmd->add_option("--out", ra->out, "runs directory");
    add_gateway_opts(run_cmd, ra->gw);
    run_cmd->callback([&tok_opts, ra] {
        const auto tok = make_tokenizer(tok_opts);
        const auto filler = read_jsonl_corpus(ra->filler, tok);
        const auto variant =
            ra->variant == "sandwich" ? NiahVariant::Sandwich : NiahVariant::Passkey;
        const auto cases = make_standard_cases(variant,
                                               default_lengths(ra->min_len, ra->max_len,
                                                               ra->length_count),
                                               default_depths(ra->depth_count));
        auto gw = make_gateway(ra->gw);
        NiahRunConfig rcfg;
        rcfg.window.window_tokens = ra->window;

        NiahGrid grid;
        if (ra->mode == "full") {
            grid = run_grid(cases, filler, gw, rcfg, tok);
        } else {
            for (const auto& c : cases) {
                if (std::find(grid.lengths.begin(), grid.lengths.end(), c.context_len_tokens) ==
                    grid.lengths.end()) {
                    grid.lengths.push_back(c.context_len_tokens);
                }
                if (std::find(grid.depths.begin(), grid.depths.end(), c.depth) ==
                    grid.depths.end()) {
                    grid.depths.push_back(c.depth);
                }
            }
            std::sort(grid.lengths.begin(), grid.lengths.end());
            std::sort(grid.depths.begin(), grid.depths.end());
            for (const auto& c : cases) {
                const std::string hay = build_haystack(filler, c, tok);
                const Document doc{"haystack", hay, tok.count(hay)};
                const auto chunks = chunk_document(doc, ra->retrieval.chunk_size_tokens, tok);
                std::vector<std::string> texts = {ra->retrieval.query_prefix + c.question};
                for (const auto& ck : chunks) {
                    texts.push_back(ra->retrieval.passage_prefix + ck.text);
                }
                const auto vecs = gw.embed(texts);
                const std::vector<EmbeddingVector> cands(vecs.begin() + 1, vecs.end());
                const auto ranked = rank_chunks(vecs[0], cands, chunks, ra->retrieval.top_k);
                std::vector<Chunk> selected;
                for (const auto& r : ranked) selected.push_back(chunks[r.chunk_id]);
                const std::string context =
                    assemble_context(std::move(selected), ra->retrieval.order);

                ChatRequest req;
                req.model = gw.config().chat.model;
                req.messages = {{"system", rcfg.instruction},
                                {"user", context + "\n\nQuestion: " + c.question + "\nAnswer:"}};
                NiahCell cell;
                cell.length = c.context_len_tokens;
                cell.depth = c.depth;
                try {
                    cell.score = score_case(gw.complete(req), c);
                } catch (const TransportError&) {
                    cell.missing = true;
                }
                grid.cells.push_back(cell);
            }
        }

        const std::string dir = run_dir(ra->out);
        write_grid_csv(grid, (fs::path(dir) / "niah_grid.csv").string());
        write_grid_svg(grid, (fs::path(dir) / "niah_grid.svg").string());
        double total = 0.0;
        std::size_t scored = 0;
        for (const auto& cell : grid.cells) {
            if (!cell.missing) { total += cell.score; ++scored; }
        }
        std::cout << "grid " << grid.lengths.size() << "x" << grid.depths.size()
                  << ", mean score " << (scored ? total / scored : 0.0) << "\n"
                  << "wrote " << dir << "/niah_grid.{csv,svg}\n";
    });
}

void register_sft(CLI::App& app, TokOpts& tok_opts) {
    auto* sft = app.add_subcommand("sft", "synthetic long-context SFT data");
    sft->require_subcommand(1);

    struct SynthArgs {
        std::string input, output, distractor_file;
        SftSynthConfig cfg;
    };
    auto sy = std::make_shared<SynthArgs>();
    auto* synth_cmd = sft->add_subcommand("synth", "assemble long samples from sources");
    synth_cmd->add_option("--input", sy->input, "source JSONL")->required();
    synth_cmd->add_option("--output", sy->output, "sample JSONL")->required();
    synth_cmd->add_option("--min-tokens", sy->cfg.min_tokens, "minimum sample length");
    synth_cmd->add_option("--max-tokens", sy->cfg.max_tokens, "maximum sample length");
    synth_cmd->add_option("--seed", sy->cfg.seed, "placement seed");
    synth_cmd->add_option("--distractors", sy->distractor_file,
                          "corpus JSONL used to pad short sources");
    synth_cmd->callback([&tok_opts, sy] {
        const auto tok = make_tokenizer(tok_opts);
        const auto sources = read_jsonl_sources(sy->input);
        std::vector<Document> distractors;
        if (!sy->distractor_file.empty()) {
            distractors = read_jsonl_corpus(sy->distractor_file, tok);
            sy->cfg.allow_distractors = true;
        }
        std::vector<SftSample> samples;
        for (const auto& src : sources) {
            samples.push_back(synthesize_long_sample(src, sy->cfg, distractors, tok));
        }
        write_jsonl_samples(samples, sy->output);
        std::cout << "synthesized " << samples.size() << " samples\n";
    });

    struct BlendArgs {
        std::string config, output;
        std::vector<std::string> datasets;
        std::size_t samples_per_stage = 0;
        std::uint64_t seed = 0;
    };
    auto bl = std::make_shared<BlendArgs>();
    auto* blend_cmd = sft->add_subcommand("blend", "expand a staged blend into a manifest");
    blend_cmd->add_option("--config", bl->config, "blend config JSON")->required();
    blend_cmd->add_option("--output", bl->output, "manifest JSONL")->required();
    blend_cmd
        ->add_option("--dataset", bl->datasets, "dataset as id=example_count (repeatable)")
        ->required();
    blend_cmd->add_option("--samples-per-stage", bl->samples_per_stage,
                          "examples drawn per stage (0 = every example once)");
    blend_cmd->add_option("--seed", bl->seed, "sampling seed");
    blend_cmd->callback([bl] {
        std::vector<DatasetInfo> infos;
        for (const auto& spec : bl->datasets) {
            const auto eq = spec.find('=');
            if (eq == std::string::npos) {
                throw ArgumentError("--dataset expects id=example_count, got: " + spec);
            }
            infos.push_back(
                DatasetInfo{spec.substr(0, eq), std::stoul(spec.substr(eq + 1))});
        }
        const auto blend = read_blend_config(bl->config);
        const auto manifest = blend_stages(blend, infos, bl->samples_per_stage, bl->seed);
        write_jsonl_manifest(manifest, bl->output);
        std::cout << "wrote " << manifest.size() << " manifest entries\n";
    });
}

json run_config_json(const RunConfig& cfg) {
    json j;
    j["dataset"] = cfg.dataset_name;
    j["mode"] = cfg.mode == EvalMode::Rag ? "rag" : "full";
    j["chunk_size_tokens"] = cfg.retrieval.chunk_size_tokens;
    j["top_k"] = cfg.retrieval.top_k;
    j["window_tokens"] = cfg.window.window_tokens;
    j["seed"] = cfg.seed;
    return j;
}

void register_bench(CLI::App& app, TokOpts& tok_opts) {
    auto* bench = app.add_subcommand("bench", "task evaluation runs");
    bench->require_subcommand(1);

    struct RunArgs {
        std::string tasks, mode = "rag", dataset = "dataset", out = "runs";
        RunConfig cfg;
        GatewayOpts gw;
    };

    auto add_common = [&tok_opts](CLI::App* cmd, std::shared_ptr<RunArgs> a) {
        cmd->add_option("--tasks", a->tasks, "task JSONL")->required();
        cmd->add_option("--dataset", a->dataset, "dataset name for reports");
        cmd->add_option("--chunk-size", a->cfg.retrieval.chunk_size_tokens,
                        "rag chunk size in tokens");
        cmd->add_option("--top-k", a->cfg.retrieval.top_k, "rag chunks to keep");
        cmd->add_option("--window", a->cfg.window.window_tokens,
                        "full-context window in tokens");
        cmd->add_option("--out", a->out, "runs directory");
        add_gateway_opts(cmd, a->gw);
    };

    auto ra = std::make_shared<RunArgs>();
    auto* run_cmd = bench->add_subcommand("run", "one evaluation run");
    run_cmd->add_option("--mode", ra->mode, "rag | full")
        ->check(CLI::IsMember({"rag", "full"}));
    add_common(run_cmd, ra);
    run_cmd->callback([&tok_opts, ra] {
        const auto tok = make_tokenizer(tok_opts);
        const auto tasks = read_jsonl_tasks(ra->tasks);
        ra->cfg.dataset_name = ra->dataset;
        ra->cfg.mode = ra->mode == "full" ? EvalMode::FullContext : EvalMode::Rag;
        auto gw = make_gateway(ra->gw);

        ResultTable table;
        table.rows.push_back(run_eval(tasks, ra->cfg, gw, tok));
        table.template_versions.push_back(prompt_template_version(tasks.front().type));

        const std::string dir = run_dir(ra->out);
        std::ofstream cfg_out(fs::path(dir) / "config.json");
        cfg_out << run_config_json(ra->cfg).dump(2) << "\n";
        write_results_csv(table, (fs::path(dir) / "results.csv").string());
        write_report_md(table, (fs::path(dir) / "report.md").string());
        std::cout << "score " << table.rows[0].score << " over " << table.rows[0].n_items
                  << " items";
        if (!table.rows[0].valid) std::cout << " (INVALID: too many transport failures)";
        std::cout << "\nwrote " << dir << "/{config.json,results.csv,report.md}\n";
    });

    auto sa = std::make_shared<RunArgs>();
    auto chunk_sizes = std::make_shared<std::vector<std::size_t>>();
    auto ks = std::make_shared<std::vector<std::size_t>>();
    auto* sweep_cmd = bench->add_subcommand("sweep", "chunk-size x top-k ablation grid");
    add_common(sweep_cmd, sa);
    sweep_cmd->add_option("--chunk-sizes", *chunk_sizes, "chunk sizes to sweep")
        ->delimiter(',');
    sweep_cmd->add_option("--ks", *ks, "top-k values to sweep")->delimiter(',');
    sweep_cmd->callback([&tok_opts, sa, chunk_sizes, ks] {
        const auto tok = make_tokenizer(tok_opts);
        const auto tasks = read_jsonl_tasks(sa->tasks);
        sa->cfg.dataset_name = sa->dataset;
        auto gw = make_gateway(sa->gw);
        if (chunk_sizes->empty()) *chunk_sizes = {300, 600, 1200};
        if (ks->empty()) *ks = {5, 10, 20, 40};

        const auto points = sweep(tasks, sa->cfg, *chunk_sizes, *ks, gw, tok);
        const std::string dir = run_dir(sa->out);
        std::ofstream cfg_out(fs::path(dir) / "config.json");
        cfg_out << run_config_json(sa->cfg).dump(2) << "\n";
        write_sweep_csv(points, (fs::path(dir) / "results.csv").string());
        write_sweep_svg(points, (fs::path(dir) / "curve.svg").string());
        for (const auto& p : points) {
            std::cout << "chunk " << p.chunk_size << " k " << p.top_k << " ("
                      << p.retrieved_tokens << " tokens): " << p.score << "\n";
        }
        std::cout << "wrote " << dir << "/{config.json,results.csv,curve.svg}\n";
    });

    auto ca = std::make_shared<RunArgs>();
    auto* compare_cmd = bench->add_subcommand("compare", "rag vs full-context on one task set");
    add_common(compare_cmd, ca);
    compare_cmd->callback([&tok_opts, ca] {
        const auto tok = make_tokenizer(tok_opts);
        const auto tasks = read_jsonl_tasks(ca->tasks);
        ca->cfg.dataset_name = ca->dataset;
        auto gw = make_gateway(ca->gw);

        RunConfig rag = ca->cfg;
        rag.mode = EvalMode::Rag;
        RunConfig full = ca->cfg;
        full.mode = EvalMode::FullContext;
        const auto table = compare_modes(tasks, rag, full, gw, tok);

        const std::string dir = run_dir(ca->out);
        std::ofstream cfg_out(fs::path(dir) / "config.json");
        cfg_out << run_config_json(ca->cfg).dump(2) << "\n";
        write_results_csv(table, (fs::path(dir) / "results.csv").string());
        write_report_md(table, (fs::path(dir) / "report.md").string());
        std::cout << "rag " << table.rows[0].score << " vs full " << table.rows[1].score
                  << " (delta " << table.rows[0].score - table.rows[1].score << ")\n"
                  << "wrote " << dir << "/{config.json,results.csv,report.md}\n";
    });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"long-context data preparation, retrieval, and evaluation toolkit"};
    app.require_subcommand(1);

    TokOpts tok_opts;
    app.add_option("--vocab", tok_opts.vocab,
                   "newline-delimited token vocabulary (default: rule tokenizer)");

    register_tok(app, tok_opts);
    register_corpus(app, tok_opts);
    register_rope(app);
    register_rag(app, tok_opts);
    register_score(app);
    register_niah(app, tok_opts);
    register_sft(app, tok_opts);
    register_bench(app, tok_opts);

    try {
        CLI11_PARSE(app, argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
