#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "lcl/retrieval.hpp"
#include "lcl/task.hpp"
#include "lcl/tokenizer.hpp"

namespace lcl {

struct ChatMessage {
    std::string role;  // system | user | assistant
    std::string content;
};

struct ChatRequest {
    std::string model = "default";
    std::vector<ChatMessage> messages;
    double temperature = 0.0;
    std::size_t max_output_tokens = 512;
};

// Sorted-key UTF-8 JSON with no insignificant whitespace; hashes are stable
// across platforms and key insertion order.
std::string canonical_request_json(const ChatRequest& req);
std::string request_hash(const ChatRequest& req);
std::uint64_t fnv1a64(std::string_view data);

enum class TruncationStrategy { DropMiddle, DropLeft, Error };

struct WindowPolicy {
    std::size_t window_tokens = 131072;
    TruncationStrategy strategy = TruncationStrategy::DropMiddle;
};

struct PromptParts {
    std::string instruction;
    std::string document;
    std::string question;
};

struct FittedPrompt {
    std::string text;
    std::string document;           // possibly truncated
    std::size_t dropped_tokens = 0;
};

// Truncate the document so instruction + document + question fit the window.
// DropMiddle keeps equal head and tail halves around an elision marker;
// DropLeft keeps the final budget-many tokens. Throws WindowOverflowError
// when strategy is Error and the parts overflow, or when instruction and
// question alone exceed the window.
FittedPrompt fit_to_window(const PromptParts& parts, const WindowPolicy& policy,
                           const Tokenizer& tok);

enum class EvalMode { Rag, FullContext };

// Versioned prompt template id for a task type; emitted into result metadata.
std::string prompt_template_version(TaskType type);

// Fixed per-task-type template, context preceding question. Deterministic.
ChatRequest build_prompt(EvalMode mode, const EvalTask& task, const std::string& context);

enum class StubModelKind { NeedleExtractor, EchoFirstK, FixedAnswer };

struct StubModelSpec {
    StubModelKind kind = StubModelKind::NeedleExtractor;
    std::size_t echo_k = 32;
    std::string fixed_answer;
};

enum class EmbedStubKind { HashVector, BagOfWords };

struct EndpointConfig {
    std::string base_url;  // empty = offline (stub required)
    std::string api_key;
    std::string model = "default";
};

struct GatewayConfig {
    std::string cache_dir;  // empty = no persistent cache
    EndpointConfig chat;
    EndpointConfig embed;
    std::optional<StubModelSpec> stub;  // used when chat.base_url is empty
    EmbedStubKind embed_stub = EmbedStubKind::BagOfWords;
    std::size_t embed_dim = 64;
    int max_retries = 3;
    int backoff_ms = 250;

    // Fills chat/embed endpoints from LCL_API_BASE, LCL_API_KEY,
    // LCL_EMBED_API_BASE, LCL_EMBED_API_KEY when set.
    void load_env();
};

// Chat-completion and embedding client with deterministic request caching.
// Cache layout: cache/<first-2-hash-chars>/<hash>.json, atomic writes,
// in-flight deduplication by request hash.
class Gateway {
public:
    explicit Gateway(GatewayConfig cfg);

    std::string complete(const ChatRequest& req);
    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts);

    std::uint64_t network_calls() const { return network_calls_.load(); }
    std::uint64_t cache_hits() const { return cache_hits_.load(); }
    const GatewayConfig& config() const { return cfg_; }

private:
    std::optional<std::string> cache_lookup(const std::string& hash) const;
    void cache_store(const std::string& hash, const std::string& request_json,
                     const std::string& response) const;
    std::string complete_uncached(const ChatRequest& req);
    std::string stub_complete(const ChatRequest& req) const;
    EmbeddingVector stub_embed(const std::string& text) const;
    std::string http_post_json(const EndpointConfig& ep, const std::string& path,
                               const std::string& body);

    GatewayConfig cfg_;
    std::atomic<std::uint64_t> network_calls_{0};
    std::atomic<std::uint64_t> cache_hits_{0};
    std::mutex inflight_mu_;
    std::map<std::string, std::shared_ptr<std::mutex>> inflight_;
};

}  // namespace lcl
