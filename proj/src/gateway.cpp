#include "lcl/gateway.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "lcl/errors.hpp"
#include "lcl/metrics.hpp"

namespace lcl {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kElisionMarker = "[...]";

std::string join_parts(const std::string& a, const std::string& b, const std::string& c) {
    std::string out;
    for (const std::string* p : {&a, &b, &c}) {
        if (p->empty()) continue;
        if (!out.empty()) out += "\n\n";
        out += *p;
    }
    return out;
}

}  // namespace

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string canonical_request_json(const ChatRequest& req) {
    // nlohmann::json keeps object keys sorted; dump() emits no whitespace.
    json msgs = json::array();
    for (const auto& m : req.messages) {
        msgs.push_back({{"content", m.content}, {"role", m.role}});
    }
    json j;
    j["max_tokens"] = req.max_output_tokens;
    j["messages"] = msgs;
    j["model"] = req.model;
    j["temperature"] = req.temperature;
    return j.dump();
}

std::string request_hash(const ChatRequest& req) {
    std::ostringstream out;
    out << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(canonical_request_json(req));
    return out.str();
}

FittedPrompt fit_to_window(const PromptParts& parts, const WindowPolicy& policy,
                           const Tokenizer& tok) {
    if (policy.window_tokens == 0) throw ArgumentError("window_tokens must be > 0");
    const std::size_t inst_t = tok.count(parts.instruction);
    const std::size_t q_t = tok.count(parts.question);
    if (inst_t + q_t > policy.window_tokens) {
        throw WindowOverflowError("instruction and question alone exceed the window",
                                  inst_t + q_t, policy.window_tokens);
    }
    const std::size_t avail = policy.window_tokens - inst_t - q_t;
    const std::size_t doc_t = tok.count(parts.document);

    FittedPrompt out;
    if (doc_t <= avail) {
        out.document = parts.document;
        out.text = join_parts(parts.instruction, out.document, parts.question);
        return out;
    }
    if (policy.strategy == TruncationStrategy::Error) {
        throw WindowOverflowError("prompt exceeds window", inst_t + q_t + doc_t,
                                  policy.window_tokens);
    }
    if (policy.strategy == TruncationStrategy::DropLeft) {
        out.document = tok.slice(parts.document, doc_t - avail, doc_t);
        out.dropped_tokens = doc_t - avail;
    } else {  // DropMiddle
        const std::size_t marker_t = tok.count(kElisionMarker);
        if (avail <= marker_t) {
            out.document = tok.slice(parts.document, 0, avail);
            out.dropped_tokens = doc_t - avail;
        } else {
            const std::size_t budget = avail - marker_t;
            const std::size_t head = (budget + 1) / 2;
            const std::size_t tail = budget / 2;
            out.document = tok.slice(parts.document, 0, head);
            out.document += "\n";
            out.document += kElisionMarker;
            out.document += "\n";
            out.document += tok.slice(parts.document, doc_t - tail, doc_t);
            out.dropped_tokens = doc_t - budget;
        }
    }
    out.text = join_parts(parts.instruction, out.document, parts.question);
    return out;
}

std::string prompt_template_version(TaskType type) {
    switch (type) {
        case TaskType::Qa: return "qa-v1";
        case TaskType::Mc: return "mc-v1";
        case TaskType::Summ: return "summ-v1";
        case TaskType::Dialogue: return "dialogue-v1";
    }
    return "qa-v1";
}

ChatRequest build_prompt(EvalMode mode, const EvalTask& task, const std::string& context) {
    (void)mode;  // both modes share one template; they differ only in the context handed in
    if (context.empty()) throw ArgumentError("build_prompt: context must be nonempty");
    ChatRequest req;
    std::string system, user;
    switch (task.type) {
        case TaskType::Qa:
            system = "Answer the question using only the provided context. Answer concisely.";
            user = "Context:\n" + context + "\n\nQuestion: " + task.question + "\nAnswer:";
            req.max_output_tokens = 128;
            break;
        case TaskType::Mc: {
            if (task.choices.empty()) throw ArgumentError("mc task has no choices");
            system = "Answer the multiple-choice question using the provided context. "
                     "Reply with the letter of the correct choice.";
            user = "Context:\n" + context + "\n\nQuestion: " + task.question + "\n";
            for (std::size_t i = 0; i < task.choices.size(); ++i) {
                user += static_cast<char>('A' + i);
                user += ". " + task.choices[i] + "\n";
            }
            user += "Answer:";
            req.max_output_tokens = 16;
            break;
        }
        case TaskType::Summ:
            system = "Summarize the following text concisely.";
            user = "Text:\n" + context + "\n\nSummary:";
            req.max_output_tokens = 512;
            break;
        case TaskType::Dialogue:
            system = "Read the dialogue transcript and answer the question about it.";
            user = "Transcript:\n" + context + "\n\nQuestion: " + task.question + "\nAnswer:";
            req.max_output_tokens = 64;
            break;
    }
    req.messages = {{"system", system}, {"user", user}};
    return req;
}

void GatewayConfig::load_env() {
    if (const char* v = std::getenv("LCL_API_BASE")) chat.base_url = v;
    if (const char* v = std::getenv("LCL_API_KEY")) chat.api_key = v;
    if (const char* v = std::getenv("LCL_EMBED_API_BASE")) embed.base_url = v;
    if (const char* v = std::getenv("LCL_EMBED_API_KEY")) embed.api_key = v;
}

Gateway::Gateway(GatewayConfig cfg) : cfg_(std::move(cfg)) {
    if (!cfg_.cache_dir.empty()) fs::create_directories(cfg_.cache_dir);
}

std::optional<std::string> Gateway::cache_lookup(const std::string& hash) const {
    if (cfg_.cache_dir.empty()) return std::nullopt;
    const fs::path p = fs::path(cfg_.cache_dir) / hash.substr(0, 2) / (hash + ".json");
    std::ifstream in(p);
    if (!in) return std::nullopt;
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.contains("response")) return std::nullopt;
    return j["response"].get<std::string>();
}

void Gateway::cache_store(const std::string& hash, const std::string& request_json,
                          const std::string& response) const {
    if (cfg_.cache_dir.empty()) return;
    const fs::path dir = fs::path(cfg_.cache_dir) / hash.substr(0, 2);
    fs::create_directories(dir);
    const fs::path target = dir / (hash + ".json");
    const fs::path tmp = dir / (hash + ".tmp");
    {
        std::ofstream out(tmp);
        json j;
        j["request"] = request_json;
        j["response"] = response;
        out << j.dump();
    }
    fs::rename(tmp, target);  // atomic on POSIX
}

std::string Gateway::complete(const ChatRequest& req) {
    const std::string hash = request_hash(req);
    if (auto hit = cache_lookup(hash)) {
        ++cache_hits_;
        return *hit;
    }
    // Concurrent identical requests serialize on a per-hash mutex so only the
    // first pays for the network call.
    std::shared_ptr<std::mutex> gate;
    {
        std::lock_guard lk(inflight_mu_);
        auto& slot = inflight_[hash];
        if (!slot) slot = std::make_shared<std::mutex>();
        gate = slot;
    }
    std::lock_guard request_lk(*gate);
    if (auto hit = cache_lookup(hash)) {
        ++cache_hits_;
        return *hit;
    }
    const std::string response = complete_uncached(req);
    cache_store(hash, canonical_request_json(req), response);
    return response;
}

std::string Gateway::complete_uncached(const ChatRequest& req) {
    if (cfg_.chat.base_url.empty()) {
        if (!cfg_.stub) throw TransportError("no chat endpoint configured and no stub model", 0);
        return stub_complete(req);
    }
    json msgs = json::array();
    for (const auto& m : req.messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
    json body;
    body["model"] = cfg_.chat.model.empty() ? req.model : cfg_.chat.model;
    body["messages"] = msgs;
    body["temperature"] = req.temperature;
    body["max_tokens"] = req.max_output_tokens;

    const std::string raw = http_post_json(cfg_.chat, "/chat/completions", body.dump());
    json j = json::parse(raw, nullptr, false);
    if (j.is_discarded() || !j.contains("choices") || j["choices"].empty() ||
        !j["choices"][0].contains("message")) {
        throw ProtocolError("malformed chat completion response");
    }
    return j["choices"][0]["message"].value("content", std::string{});
}

std::string Gateway::http_post_json(const EndpointConfig& ep, const std::string& path,
                                    const std::string& body) {
    int last_status = 0;
    for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(std::chrono::milliseconds(cfg_.backoff_ms << (attempt - 1)));
        }
        httplib::Client cli(ep.base_url);
        cli.set_read_timeout(120, 0);
        httplib::Headers headers;
        if (!ep.api_key.empty()) headers.emplace("Authorization", "Bearer " + ep.api_key);
        auto res = cli.Post(path, headers, body, "application/json");
        if (!res) {
            last_status = 0;
            continue;
        }
        ++network_calls_;
        if (res->status >= 200 && res->status < 300) return res->body;
        last_status = res->status;
        if (res->status >= 400 && res->status < 500 && res->status != 429) break;  // not retryable
    }
    throw TransportError("POST " + path + " failed (last status " + std::to_string(last_status) + ")",
                         last_status);
}

std::string Gateway::stub_complete(const ChatRequest& req) const {
    std::string user;
    for (const auto& m : req.messages) {
        if (m.role == "user") user = m.content;
    }
    switch (cfg_.stub->kind) {
        case StubModelKind::FixedAnswer:
            return cfg_.stub->fixed_answer;
        case StubModelKind::EchoFirstK: {
            Tokenizer tok;
            const std::size_t n = tok.count(user);
            return tok.slice(user, 0, std::min(n, cfg_.stub->echo_k));
        }
        case StubModelKind::NeedleExtractor: {
            // Payload-bearing patterns, checked in order, plain string scans.
            auto after = [&user](const std::string& lead) -> std::optional<std::string> {
                const auto pos = user.find(lead);
                if (pos == std::string::npos) return std::nullopt;
                std::size_t b = pos + lead.size();
                std::size_t e = b;
                while (e < user.size() && user[e] != '.' && user[e] != '\n') ++e;
                return user.substr(b, e - b);
            };
            if (auto v = after("The pass key is ")) return *v;
            if (auto v = after("The best thing to do in San Francisco is ")) return *v;
            if (auto v = after("the answer is ")) return *v;
            if (auto v = after("The answer is ")) return *v;
            return "";
        }
    }
    return "";
}

EmbeddingVector Gateway::stub_embed(const std::string& text) const {
    auto hash_vector = [this](std::string_view s) {
        std::mt19937_64 rng(fnv1a64(s));
        std::normal_distribution<double> dist(0.0, 1.0);
        EmbeddingVector v;
        v.values.resize(cfg_.embed_dim);
        for (auto& x : v.values) x = static_cast<float>(dist(rng));
        return v;
    };
    EmbeddingVector v;
    if (cfg_.embed_stub == EmbedStubKind::HashVector) {
        v = hash_vector(text);
    } else {
        // Sum of per-word hash vectors: shared vocabulary yields real cosine
        // similarity between query and passage.
        v.values.assign(cfg_.embed_dim, 0.0f);
        bool any = false;
        for (const auto& w : rouge_tokens(text)) {
            const EmbeddingVector wv = hash_vector(w);
            for (std::size_t i = 0; i < cfg_.embed_dim; ++i) v.values[i] += wv.values[i];
            any = true;
        }
        if (!any) v = hash_vector(text);
    }
    normalize_embedding(v);
    return v;
}

std::vector<EmbeddingVector> Gateway::embed(const std::vector<std::string>& texts) {
    if (texts.empty()) throw ArgumentError("embed: texts must be nonempty");
    std::vector<EmbeddingVector> out(texts.size());
    std::vector<std::size_t> misses;

    auto text_hash = [this](const std::string& t) {
        std::ostringstream key;
        key << "embed|" << cfg_.embed.model << "|" << static_cast<int>(cfg_.embed_stub) << "|"
            << cfg_.embed_dim << "|" << t;
        std::ostringstream hex;
        hex << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(key.str());
        return hex.str();
    };

    for (std::size_t i = 0; i < texts.size(); ++i) {
        const std::string h = text_hash(texts[i]);
        if (auto hit = cache_lookup(h)) {
            ++cache_hits_;
            json j = json::parse(*hit);
            out[i].values = j.get<std::vector<float>>();
        } else {
            misses.push_back(i);
        }
    }

    if (!misses.empty() && cfg_.embed.base_url.empty()) {
        for (std::size_t i : misses) {
            out[i] = stub_embed(texts[i]);
            cache_store(text_hash(texts[i]), texts[i], json(out[i].values).dump());
        }
    } else if (!misses.empty()) {
        json input = json::array();
        for (std::size_t i : misses) input.push_back(texts[i]);
        json body;
        body["model"] = cfg_.embed.model;
        body["input"] = input;
        const std::string raw = http_post_json(cfg_.embed, "/embeddings", body.dump());
        json j = json::parse(raw, nullptr, false);
        if (j.is_discarded() || !j.contains("data") || j["data"].size() != misses.size()) {
            throw ProtocolError("malformed embeddings response");
        }
        for (std::size_t n = 0; n < misses.size(); ++n) {
            const std::size_t i = misses[n];
            out[i].values = j["data"][n].at("embedding").get<std::vector<float>>();
            normalize_embedding(out[i]);
            cache_store(text_hash(texts[i]), texts[i], json(out[i].values).dump());
        }
    }
    return out;
}

}  // namespace lcl
