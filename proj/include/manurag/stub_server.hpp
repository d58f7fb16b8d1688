#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>

#include <json.hpp>

#include "manurag/providers.hpp"

namespace manurag {

/// In-process HTTP server speaking the provider wire contract, backed by
/// the offline providers. Integration tests point remote providers at it
/// to exercise the transport without a real model service.
///
/// Defaults: embeddings use the offline hash scheme, generate echoes the
/// prompt, describe/judge/scorer are the offline implementations. Any
/// task's output can be overridden with a canned value, and every task
/// keeps a hit counter.
class StubServer {
public:
    explicit StubServer(size_t dim = 64, SidecarCatalog sidecars = {});
    ~StubServer();

    StubServer(const StubServer&) = delete;
    StubServer& operator=(const StubServer&) = delete;

    /// Binds 127.0.0.1 on an ephemeral port and serves on a background
    /// thread. Returns the base URL, e.g. "http://127.0.0.1:41311".
    std::string start();
    void stop();

    void set_canned(const std::string& task, nlohmann::json output);
    uint64_t hits(const std::string& task) const;

private:
    nlohmann::json dispatch(const std::string& task, const nlohmann::json& input);

    struct Impl;
    std::unique_ptr<Impl> impl_;

    size_t dim_;
    OfflineMultiModalEmbedder mm_;
    OfflineJudge judge_;
    OfflineSimilarityScorer scorer_;
    OfflineImageDescriber describer_;

    mutable std::mutex mutex_;
    std::map<std::string, nlohmann::json> canned_;
    std::map<std::string, uint64_t> hits_;
};

}  // namespace manurag
