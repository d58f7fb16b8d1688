#include "test_support.hpp"

#include <fstream>

#include <json.hpp>

#include "manurag/util.hpp"

namespace manurag::testing {

std::filesystem::path write_corpus(const std::filesystem::path& dir,
                                   const std::vector<TestDoc>& docs) {
    std::filesystem::create_directories(dir / "assets");
    std::ofstream manifest(dir / "manifest.jsonl");
    for (const auto& doc : docs) {
        nlohmann::json assets = nlohmann::json::array();
        for (const auto& asset : doc.assets) {
            const std::string asset_rel = "assets/" + asset.uuid + ".png";
            util::write_file_text(dir / asset_rel, asset.bytes);
            if (!asset.description.empty()) {
                util::write_file_text(dir / "assets" / (asset.uuid + ".txt"), asset.description);
            }
            assets.push_back({{"uuid", asset.uuid}, {"kind", asset.kind}, {"path", asset_rel}});
        }
        util::write_file_text(dir / (doc.doc_id + ".md"), doc.body);
        nlohmann::json record{
            {"doc_id", doc.doc_id}, {"markdown", doc.doc_id + ".md"}, {"assets", assets}};
        manifest << record.dump() << "\n";
    }
    return dir;
}

ProviderSet offline_providers(const Corpus& corpus, std::shared_ptr<Generator> generator,
                              size_t dim) {
    auto sidecars = SidecarCatalog::from_corpus(corpus);
    ProviderSet providers;
    providers.text_embedder = std::make_shared<OfflineTextEmbedder>(dim);
    providers.mm_embedder = std::make_shared<OfflineMultiModalEmbedder>(sidecars, dim);
    providers.generator = std::move(generator);
    providers.describer = std::make_shared<CachedDescriber>(
        std::make_shared<OfflineImageDescriber>(sidecars), std::make_shared<DescriptionCache>());
    providers.judge = std::make_shared<OfflineJudge>();
    providers.scorer = std::make_shared<OfflineSimilarityScorer>(dim);
    return providers;
}

}  // namespace manurag::testing
