/*
 * Copyright 2026 The tablerag-cpp Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tablerag {

using EmbeddingVector = std::vector<float>;

/// Token estimate used for every budget and complexity figure:
/// ceil(code points / 4).
std::size_t count_tokens(std::string_view text);

/// Scales `v` to unit L2 norm. Throws EmptyInput on a zero vector.
void l2_normalize(EmbeddingVector& v);

/// Text encoder f_enc. Implementations return one unit-norm vector per input,
/// in input order, and must be callable from several threads.
class Encoder {
public:
    virtual ~Encoder() = default;

    virtual std::size_t dim() const = 0;
    /// Identifier stored alongside persisted indexes.
    virtual std::string name() const = 0;
    /// Throws EmptyInput when `texts` is empty or any text is blank.
    virtual std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) const = 0;
    /// How many embed_batch calls may usefully run at once.
    virtual std::size_t max_concurrency() const { return 1; }

    EmbeddingVector embed(const std::string& text) const;
};

/// Offline encoder: hashed character trigrams of the lower-cased text,
/// signed-bucketed into `dim` slots and L2-normalised.
class HashingEncoder final : public Encoder {
public:
    explicit HashingEncoder(std::size_t dim = 256, std::uint64_t seed = 0);

    std::size_t dim() const override { return dim_; }
    std::string name() const override;
    std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) const override;

private:
    std::size_t dim_;
    std::uint64_t seed_;
};

/// Decorator that meters how many texts and tokens reach the wrapped encoder.
class CountingEncoder final : public Encoder {
public:
    explicit CountingEncoder(std::shared_ptr<const Encoder> inner) : inner_(std::move(inner)) {}

    std::size_t dim() const override { return inner_->dim(); }
    std::string name() const override { return inner_->name(); }
    std::size_t max_concurrency() const override { return inner_->max_concurrency(); }
    std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) const override;

    std::size_t texts() const { return texts_.load(); }
    std::size_t tokens() const { return tokens_.load(); }
    void reset() {
        texts_ = 0;
        tokens_ = 0;
    }

private:
    std::shared_ptr<const Encoder> inner_;
    mutable std::atomic<std::size_t> texts_{0};
    mutable std::atomic<std::size_t> tokens_{0};
};

struct ChatParams {
    double temperature = 0.0;
    int max_output_tokens = 1024;
    std::vector<std::string> stop_sequences;
};

/// Cuts `text` at the earliest occurrence of any stop sequence.
std::string apply_stop_sequences(std::string text, std::span<const std::string> stops);

/// The chat LM. Implementations must be callable from several threads.
class ChatModel {
public:
    virtual ~ChatModel() = default;

    virtual std::string complete(std::string_view prompt, const ChatParams& params) = 0;
    /// True when identical prompts always yield identical replies
    /// regardless of temperature, so repeated sampling is pointless.
    virtual bool deterministic() const { return false; }
    virtual std::size_t max_concurrency() const { return 1; }
};

struct ScriptEntry {
    std::string prompt_contains;
    std::string reply;
    bool reusable = false;  // not consumed when matched
};

/// Playback chat model. Each call returns the first unconsumed entry whose
/// `prompt_contains` occurs in the prompt, then consumes it; with no match it
/// throws ScriptExhausted. Stop sequences are applied to the reply.
class ScriptedChatModel final : public ChatModel {
public:
    explicit ScriptedChatModel(std::vector<ScriptEntry> entries);

    /// JSON list of {"prompt_contains": str, "reply": str, "reusable"?: bool}.
    static std::unique_ptr<ScriptedChatModel> from_json(std::string_view json);
    static std::unique_ptr<ScriptedChatModel> from_file(const std::filesystem::path& path);

    std::string complete(std::string_view prompt, const ChatParams& params) override;
    bool deterministic() const override { return true; }

    std::vector<std::string> prompts() const;
    std::size_t remaining() const;

private:
    mutable std::mutex mu_;
    std::vector<ScriptEntry> entries_;
    std::vector<bool> consumed_;
    std::vector<std::string> prompts_;
};

// ---------------------------------------------------------------------------
// Remote endpoints

struct LmEndpointConfig {
    std::string base_url;                 // e.g. https://api.openai.com/v1
    std::string model_name;
    std::string api_key_env_var = "OPENAI_API_KEY";
    std::size_t max_concurrent_requests = 4;
    int timeout_ms = 60000;
    int retry_count = 3;
    int retry_base_delay_ms = 500;
    std::size_t embedding_dim = 3072;     // used only by the encoder
};

struct HttpResponse {
    int status = 0;  // 0 when the request never completed
    std::string body;
};

/// Minimal POST transport so tests can substitute a fake server.
class HttpTransport {
public:
    virtual ~HttpTransport() = default;
    virtual HttpResponse post(const std::string& path, const std::string& json_body,
                              const std::map<std::string, std::string>& headers) = 0;
};

/// cpp-httplib transport bound to one base URL.
std::shared_ptr<HttpTransport> make_http_transport(const LmEndpointConfig& config);

/// Counting gate bounding in-flight requests.
class RequestGate {
public:
    explicit RequestGate(std::size_t limit) : available_(limit ? limit : 1) {}
    void acquire();
    void release();

private:
    std::mutex mu_;
    std::condition_variable cv_;
    std::size_t available_;
};

/// Shared request path: auth header, concurrency gate, retries with
/// exponential backoff. Returns the parsed 2xx JSON body or throws RemoteError.
class RemoteClient {
public:
    RemoteClient(LmEndpointConfig config, std::shared_ptr<HttpTransport> transport);

    std::string post_json(const std::string& path, const std::string& body) const;
    const LmEndpointConfig& config() const { return config_; }

private:
    LmEndpointConfig config_;
    std::shared_ptr<HttpTransport> transport_;
    mutable RequestGate gate_;
};

/// POST {base}/embeddings with {"model","input"}; reads data[i].embedding.
class RemoteEncoder final : public Encoder {
public:
    RemoteEncoder(LmEndpointConfig config, std::shared_ptr<HttpTransport> transport = nullptr);

    std::size_t dim() const override { return client_.config().embedding_dim; }
    std::string name() const override { return "remote:" + client_.config().model_name; }
    std::size_t max_concurrency() const override { return client_.config().max_concurrent_requests; }
    std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) const override;

private:
    RemoteClient client_;
};

/// POST {base}/chat/completions with {"model","messages","temperature","stop"};
/// reads choices[0].message.content.
class RemoteChatModel final : public ChatModel {
public:
    RemoteChatModel(LmEndpointConfig config, std::shared_ptr<HttpTransport> transport = nullptr);

    std::string complete(std::string_view prompt, const ChatParams& params) override;
    std::size_t max_concurrency() const override { return client_.config().max_concurrent_requests; }

private:
    RemoteClient client_;
};

}  // namespace tablerag
