#include "manurag/vector_store.hpp"

namespace manurag {

double cosine(const Embedding& a, const Embedding& b) {
    if (a.size() != b.size()) {
        throw Error(ErrorKind::DimMismatch, std::to_string(a.size()) + " vs " + std::to_string(b.size()));
    }
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        dot += static_cast<double>(a[i]) * b[i];
        na += static_cast<double>(a[i]) * a[i];
        nb += static_cast<double>(b[i]) * b[i];
    }
    if (na == 0.0 || nb == 0.0) throw Error(ErrorKind::ZeroVector, "cosine of all-zero vector");
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::vector<Uuid> referenced_images(const std::vector<ScoredHit>& hits,
                                    const TextVectorStore& store) {
    std::vector<Uuid> out;
    std::set<Uuid> seen;
    for (const auto& hit : hits) {
        for (const auto& uuid : store.entry(hit.index).payload.images) {
            if (seen.insert(uuid).second) out.push_back(uuid);
        }
    }
    return out;
}

}  // namespace manurag
