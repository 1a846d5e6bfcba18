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


#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "tablerag/errors.hpp"
#include "tablerag/lm.hpp"

namespace tablerag {

namespace {

struct SplitUrl {
    std::string origin;  // scheme://host[:port]
    std::string prefix;  // path prefix without trailing slash
};

SplitUrl split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw RemoteError("base_url needs a scheme: " + url);
    auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, ""};
    std::string prefix = url.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    return {url.substr(0, path_start), prefix};
}

class HttplibTransport final : public HttpTransport {
public:
    explicit HttplibTransport(const LmEndpointConfig& config) : url_(split_url(config.base_url)) {
        timeout_ms_ = config.timeout_ms;
    }

    HttpResponse post(const std::string& path, const std::string& json_body,
                      const std::map<std::string, std::string>& headers) override {
        // httplib clients are not thread-safe; one per request keeps this reentrant.
        httplib::Client client(url_.origin);
        auto timeout = std::chrono::milliseconds(timeout_ms_);
        client.set_connection_timeout(timeout);
        client.set_read_timeout(timeout);
        client.set_write_timeout(timeout);
        httplib::Headers hs;
        for (const auto& [k, v] : headers) hs.emplace(k, v);
        auto res = client.Post(url_.prefix + path, hs, json_body, "application/json");
        if (!res) return {0, httplib::to_string(res.error())};
        return {res->status, res->body};
    }

private:
    SplitUrl url_;
    int timeout_ms_ = 60000;
};

}  // namespace

std::shared_ptr<HttpTransport> make_http_transport(const LmEndpointConfig& config) {
    return std::make_shared<HttplibTransport>(config);
}

void RequestGate::acquire() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return available_ > 0; });
    --available_;
}

void RequestGate::release() {
    {
        std::lock_guard lock(mu_);
        ++available_;
    }
    cv_.notify_one();
}

RemoteClient::RemoteClient(LmEndpointConfig config, std::shared_ptr<HttpTransport> transport)
    : config_(std::move(config)),
      transport_(transport ? std::move(transport) : make_http_transport(config_)),
      gate_(config_.max_concurrent_requests) {
    if (config_.max_concurrent_requests < 1) throw RemoteError("max_concurrent_requests must be >= 1");
}

std::string RemoteClient::post_json(const std::string& path, const std::string& body) const {
    std::map<std::string, std::string> headers;
    if (!config_.api_key_env_var.empty()) {
        if (const char* key = std::getenv(config_.api_key_env_var.c_str())) {
            headers["Authorization"] = std::string("Bearer ") + key;
        }
    }

    HttpResponse last;
    for (int attempt = 0; attempt <= config_.retry_count; ++attempt) {
        if (attempt > 0 && config_.retry_base_delay_ms > 0) {
            std::this_thread::sleep_for(std::chrono::milliseconds(config_.retry_base_delay_ms) * (1 << (attempt - 1)));
        }
        gate_.acquire();
        try {
            last = transport_->post(path, body, headers);
        } catch (...) {
            gate_.release();
            throw;
        }
        gate_.release();
        if (last.status >= 200 && last.status < 300) return last.body;
        bool transient = last.status == 0 || last.status == 429 || last.status >= 500;
        if (!transient) break;
    }
    throw RemoteError("POST " + path + " failed (status " + std::to_string(last.status) + "): " + last.body.substr(0, 200));
}

RemoteEncoder::RemoteEncoder(LmEndpointConfig config, std::shared_ptr<HttpTransport> transport)
    : client_(std::move(config), std::move(transport)) {}

std::vector<EmbeddingVector> RemoteEncoder::embed_batch(std::span<const std::string> texts) const {
    if (texts.empty()) throw EmptyInput("embed_batch called with no texts");
    for (const auto& t : texts) {
        if (t.find_first_not_of(" \t\r\n") == std::string::npos) throw EmptyInput("blank text in batch");
    }
    nlohmann::json req = {{"model", client_.config().model_name},
                          {"input", std::vector<std::string>(texts.begin(), texts.end())}};
    auto body = client_.post_json("/embeddings", req.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace));

    std::vector<EmbeddingVector> out(texts.size());
    try {
        auto doc = nlohmann::json::parse(body);
        const auto& data = doc.at("data");
        if (!data.is_array() || data.size() != texts.size()) {
            throw RemoteError("embedding response holds " + std::to_string(data.size()) + " vectors for " +
                              std::to_string(texts.size()) + " inputs");
        }
        for (std::size_t i = 0; i < data.size(); ++i) {
            auto idx = data[i].value("index", i);
            if (idx >= out.size()) throw RemoteError("embedding index out of range");
            out[idx] = data[i].at("embedding").get<EmbeddingVector>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw RemoteError(std::string("malformed embedding response: ") + e.what());
    }
    for (auto& v : out) {
        if (v.size() != dim()) {
            throw RemoteError("embedding has dim " + std::to_string(v.size()) + ", configured " +
                              std::to_string(dim()));
        }
        try {
            l2_normalize(v);
        } catch (const EmptyInput&) {
            throw RemoteError("endpoint returned a zero embedding");
        }
    }
    return out;
}

RemoteChatModel::RemoteChatModel(LmEndpointConfig config, std::shared_ptr<HttpTransport> transport)
    : client_(std::move(config), std::move(transport)) {}

std::string RemoteChatModel::complete(std::string_view prompt, const ChatParams& params) {
    nlohmann::json req = {{"model", client_.config().model_name},
                          {"messages", nlohmann::json::array({{{"role", "user"}, {"content", std::string(prompt)}}})},
                          {"temperature", params.temperature},
                          {"max_tokens", params.max_output_tokens}};
    if (!params.stop_sequences.empty()) req["stop"] = params.stop_sequences;
    auto body = client_.post_json("/chat/completions", req.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace));
    std::string content;
    try {
        auto doc = nlohmann::json::parse(body);
        content = doc.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw RemoteError(std::string("malformed chat response: ") + e.what());
    }
    // Not every server honours "stop".
    return apply_stop_sequences(std::move(content), params.stop_sequences);
}

}  // namespace tablerag
