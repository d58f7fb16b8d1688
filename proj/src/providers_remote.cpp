#include <cmath>
#include <cstdlib>

#include <httplib.h>

#include "manurag/providers.hpp"
#include "manurag/util.hpp"

namespace manurag {

struct RemoteClient::Impl {
    explicit Impl(const ProviderConfig& config) : http(config.endpoint) {
        auto seconds = static_cast<time_t>(config.timeout_seconds);
        auto micros = static_cast<time_t>((config.timeout_seconds - static_cast<double>(seconds)) * 1e6);
        http.set_connection_timeout(seconds, micros);
        http.set_read_timeout(seconds, micros);
        http.set_write_timeout(seconds, micros);
        if (!config.api_key_env.empty()) {
            if (const char* key = std::getenv(config.api_key_env.c_str())) {
                http.set_default_headers({{"Authorization", std::string("Bearer ") + key}});
            }
        }
    }

    httplib::Client http;
};

RemoteClient::RemoteClient(ProviderConfig config)
    : config_(std::move(config)), impl_(std::make_unique<Impl>(config_)) {}

RemoteClient::~RemoteClient() = default;
RemoteClient::RemoteClient(RemoteClient&&) noexcept = default;
RemoteClient& RemoteClient::operator=(RemoteClient&&) noexcept = default;

nlohmann::json RemoteClient::invoke(const std::string& task, const nlohmann::json& input) {
    nlohmann::json body{{"task", task}, {"model", config_.model_name}, {"input", input}};
    auto res = impl_->http.Post("/invoke", body.dump(), "application/json");
    if (!res) {
        throw Error(ErrorKind::ProviderUnreachable,
                    config_.endpoint + " (" + httplib::to_string(res.error()) + ")");
    }
    if (res->status == 413) {
        throw Error(ErrorKind::ContextTooLarge, res->body);
    }
    if (res->status < 200 || res->status >= 300) {
        throw Error(ErrorKind::ProviderRejected,
                    "status " + std::to_string(res->status) + ": " + res->body);
    }
    nlohmann::json parsed;
    try {
        parsed = nlohmann::json::parse(res->body);
    } catch (const std::exception& e) {
        throw Error(ErrorKind::ProviderRejected, std::string("unparseable response: ") + e.what());
    }
    if (!parsed.contains("output")) {
        throw Error(ErrorKind::ProviderRejected, "response missing output field");
    }
    return parsed.at("output");
}

namespace {

Embedding parse_embedding(const nlohmann::json& output, size_t& dim) {
    Embedding v;
    try {
        v = output.get<Embedding>();
    } catch (const std::exception& e) {
        throw Error(ErrorKind::ProviderRejected, std::string("bad embedding payload: ") + e.what());
    }
    if (v.empty()) throw Error(ErrorKind::ProviderRejected, "empty embedding");
    for (float x : v) {
        if (!std::isfinite(x)) throw Error(ErrorKind::ProviderRejected, "non-finite embedding value");
    }
    if (dim == 0) dim = v.size();
    if (v.size() != dim) {
        throw Error(ErrorKind::DimMismatch, "provider changed embedding dim mid-stream");
    }
    return v;
}

std::string require_nonempty(const std::string& text, const char* what) {
    if (util::split_whitespace(text).empty()) {
        throw Error(ErrorKind::EmptyInput, what);
    }
    return text;
}

}  // namespace

Embedding RemoteTextEmbedder::embed(const std::string& text) {
    return parse_embedding(client_.invoke("embed_text", require_nonempty(text, "embed_text input")),
                           dim_);
}

Embedding RemoteMultiModalEmbedder::embed_text(const std::string& text) {
    return parse_embedding(
        client_.invoke("embed_mm_text", require_nonempty(text, "embed_mm_text input")), dim_);
}

Embedding RemoteMultiModalEmbedder::embed_image(const ImageBytes& image) {
    if (image.empty()) throw Error(ErrorKind::UndecodableImage, "zero-byte image");
    nlohmann::json input{{"image_b64", util::base64_encode(image)}};
    return parse_embedding(client_.invoke("embed_mm_image", input), dim_);
}

std::string RemoteGenerator::generate(const std::string& prompt,
                                      const std::vector<ImageBytes>& images) {
    require_nonempty(prompt, "generate prompt");
    nlohmann::json images_b64 = nlohmann::json::array();
    for (const auto& image : images) images_b64.push_back(util::base64_encode(image));
    nlohmann::json input{{"prompt", prompt},
                         {"images_b64", std::move(images_b64)},
                         {"temperature", client_.config().temperature}};
    return client_.invoke("generate", input).get<std::string>();
}

std::string RemoteImageDescriber::describe(const ImageBytes& image, AssetKind kind) {
    if (image.empty()) throw Error(ErrorKind::UndecodableImage, "zero-byte image");
    nlohmann::json input{{"image_b64", util::base64_encode(image)}, {"kind", to_string(kind)}};
    return client_.invoke("describe_image", input).get<std::string>();
}

std::vector<std::string> RemoteJudge::decompose_claims(const std::string& text) {
    require_nonempty(text, "decompose_claims input");
    return client_.invoke("decompose_claims", text).get<std::vector<std::string>>();
}

bool RemoteJudge::entails(const std::string& claim, const std::string& premise) {
    nlohmann::json input{{"claim", claim}, {"premise", premise}};
    return client_.invoke("entails", input).get<bool>();
}

double RemoteSimilarityScorer::score(const std::string& answer, const std::string& reference) {
    require_nonempty(answer, "similarity answer");
    require_nonempty(reference, "similarity reference");
    nlohmann::json input{{"answer", answer}, {"reference", reference}};
    return client_.invoke("similarity_score", input).get<double>();
}

}  // namespace manurag
