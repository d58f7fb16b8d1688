#include "manurag/stub_server.hpp"

#include <thread>

#include <httplib.h>

#include "manurag/util.hpp"

namespace manurag {

struct StubServer::Impl {
    httplib::Server server;
    std::thread worker;
    int port = 0;
};

StubServer::StubServer(size_t dim, SidecarCatalog sidecars)
    : impl_(std::make_unique<Impl>()),
      dim_(dim),
      mm_(sidecars, dim),
      scorer_(dim),
      describer_(std::move(sidecars)) {}

StubServer::~StubServer() { stop(); }

std::string StubServer::start() {
    impl_->server.Post("/invoke", [this](const httplib::Request& req, httplib::Response& res) {
        nlohmann::json body;
        try {
            body = nlohmann::json::parse(req.body);
            auto task = body.at("task").get<std::string>();
            nlohmann::json output = dispatch(task, body.at("input"));
            res.status = 200;
            res.set_content(nlohmann::json{{"output", std::move(output)}}.dump(), "application/json");
        } catch (const Error& e) {
            res.status = e.kind() == ErrorKind::ContextTooLarge ? 413 : 400;
            res.set_content(nlohmann::json{{"error", e.what()}}.dump(), "application/json");
        } catch (const std::exception& e) {
            res.status = 400;
            res.set_content(nlohmann::json{{"error", e.what()}}.dump(), "application/json");
        }
    });
    impl_->port = impl_->server.bind_to_any_port("127.0.0.1");
    if (impl_->port <= 0) throw Error(ErrorKind::IoFailure, "stub server could not bind");
    impl_->worker = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return "http://127.0.0.1:" + std::to_string(impl_->port);
}

void StubServer::stop() {
    if (impl_ && impl_->worker.joinable()) {
        impl_->server.stop();
        impl_->worker.join();
    }
}

void StubServer::set_canned(const std::string& task, nlohmann::json output) {
    std::lock_guard lock(mutex_);
    canned_[task] = std::move(output);
}

uint64_t StubServer::hits(const std::string& task) const {
    std::lock_guard lock(mutex_);
    auto it = hits_.find(task);
    return it == hits_.end() ? 0 : it->second;
}

nlohmann::json StubServer::dispatch(const std::string& task, const nlohmann::json& input) {
    {
        std::lock_guard lock(mutex_);
        ++hits_[task];
        if (auto it = canned_.find(task); it != canned_.end()) return it->second;
    }
    if (task == "embed_text" || task == "embed_mm_text") {
        return offline_hash_embedding(input.get<std::string>(), dim_);
    }
    if (task == "embed_mm_image") {
        auto bytes = util::base64_decode(input.at("image_b64").get<std::string>());
        return mm_.embed_image(bytes);
    }
    if (task == "generate") {
        // Echo transport check: callers see exactly the prompt they sent.
        return input.at("prompt").get<std::string>();
    }
    if (task == "describe_image") {
        auto bytes = util::base64_decode(input.at("image_b64").get<std::string>());
        auto kind = asset_kind_from_string(input.at("kind").get<std::string>());
        return describer_.describe(bytes, kind.value_or(AssetKind::Figure));
    }
    if (task == "decompose_claims") {
        return judge_.decompose_claims(input.get<std::string>());
    }
    if (task == "entails") {
        return judge_.entails(input.at("claim").get<std::string>(),
                              input.at("premise").get<std::string>());
    }
    if (task == "similarity_score") {
        return scorer_.score(input.at("answer").get<std::string>(),
                             input.at("reference").get<std::string>());
    }
    throw Error(ErrorKind::ProviderRejected, "unknown task: " + task);
}

}  // namespace manurag
