#include "manurag/metrics.hpp"

#include <algorithm>
#include <map>

#include "manurag/util.hpp"

namespace manurag {

double f1_score(const ClaimVerdicts& v) {
    if (v.tp == 0) return 0.0;
    const double precision = static_cast<double>(v.tp) / static_cast<double>(v.tp + v.fp);
    const double recall = static_cast<double>(v.tp) / static_cast<double>(v.tp + v.fn);
    return 2.0 * precision * recall / (precision + recall);
}

ClaimVerdicts claim_verdicts(const std::string& answer, const std::string& reference,
                             Judge& judge) {
    ClaimVerdicts v;
    for (const auto& claim : judge.decompose_claims(answer)) {
        if (judge.entails(claim, reference)) {
            ++v.tp;
        } else {
            ++v.fp;
        }
    }
    for (const auto& claim : judge.decompose_claims(reference)) {
        if (!judge.entails(claim, answer)) ++v.fn;
    }
    return v;
}

double factual_correctness(const std::string& answer, const std::string& reference, Judge& judge) {
    if (answer.empty() || reference.empty()) {
        throw Error(ErrorKind::EmptyInput, "factual correctness needs both texts");
    }
    return f1_score(claim_verdicts(answer, reference, judge));
}

double semantic_similarity(const std::string& answer, const std::string& reference,
                           SimilarityScorer& scorer) {
    return std::clamp(scorer.score(answer, reference), 0.0, 1.0);
}

namespace {

std::map<std::string, size_t> unigram_counts(const std::string& text) {
    std::map<std::string, size_t> counts;
    for (const auto& token : util::split_whitespace(text)) {
        auto normalized = util::normalize_token(token);
        if (!normalized.empty()) ++counts[normalized];
    }
    return counts;
}

}  // namespace

double rouge1_f1(const std::string& answer, const std::string& reference) {
    auto answer_counts = unigram_counts(answer);
    auto reference_counts = unigram_counts(reference);
    size_t answer_total = 0, reference_total = 0, overlap = 0;
    for (const auto& [token, n] : answer_counts) answer_total += n;
    for (const auto& [token, n] : reference_counts) reference_total += n;
    for (const auto& [token, n] : answer_counts) {
        auto it = reference_counts.find(token);
        if (it != reference_counts.end()) overlap += std::min(n, it->second);
    }
    if (overlap == 0 || answer_total == 0 || reference_total == 0) return 0.0;
    const double precision = static_cast<double>(overlap) / static_cast<double>(answer_total);
    const double recall = static_cast<double>(overlap) / static_cast<double>(reference_total);
    return 2.0 * precision * recall / (precision + recall);
}

double context_precision_at_k(const std::vector<bool>& relevance) {
    size_t relevant_so_far = 0;
    size_t relevant_total = 0;
    double weighted_sum = 0.0;
    for (size_t rank = 0; rank < relevance.size(); ++rank) {
        if (!relevance[rank]) continue;
        ++relevant_so_far;
        ++relevant_total;
        weighted_sum += static_cast<double>(relevant_so_far) / static_cast<double>(rank + 1);
    }
    if (relevant_total == 0) return 0.0;
    return weighted_sum / static_cast<double>(relevant_total);
}

std::vector<bool> judge_context_relevance(const std::vector<std::string>& contexts,
                                          const std::string& reference, Judge& judge, size_t K) {
    auto claims = judge.decompose_claims(reference);
    std::vector<bool> relevance;
    for (size_t i = 0; i < contexts.size() && i < K; ++i) {
        bool relevant = false;
        for (const auto& claim : claims) {
            if (judge.entails(claim, contexts[i])) {
                relevant = true;
                break;
            }
        }
        relevance.push_back(relevant);
    }
    return relevance;
}

double context_recall(const std::string& reference, const std::vector<std::string>& contexts,
                      Judge& judge) {
    auto claims = judge.decompose_claims(reference);
    if (claims.empty()) {
        throw Error(ErrorKind::UndefinedMetric, "reference decomposes into zero claims");
    }
    if (contexts.empty()) return 0.0;
    std::string premise;
    for (const auto& context : contexts) {
        if (!premise.empty()) premise.push_back('\n');
        premise += context;
    }
    size_t attributed = 0;
    for (const auto& claim : claims) {
        if (judge.entails(claim, premise)) ++attributed;
    }
    return static_cast<double>(attributed) / static_cast<double>(claims.size());
}

void to_json(nlohmann::json& j, const MetricReport& r) {
    j = nlohmann::json::object();
    if (r.factual_correctness) j["factual_correctness"] = *r.factual_correctness;
    if (r.semantic_similarity) j["semantic_similarity"] = *r.semantic_similarity;
    if (r.rouge1_f1) j["rouge1_f1"] = *r.rouge1_f1;
    if (r.context_precision) j["context_precision"] = *r.context_precision;
    if (r.context_recall) j["context_recall"] = *r.context_recall;
}

void from_json(const nlohmann::json& j, MetricReport& r) {
    r = MetricReport{};
    if (j.contains("factual_correctness")) r.factual_correctness = j["factual_correctness"].get<double>();
    if (j.contains("semantic_similarity")) r.semantic_similarity = j["semantic_similarity"].get<double>();
    if (j.contains("rouge1_f1")) r.rouge1_f1 = j["rouge1_f1"].get<double>();
    if (j.contains("context_precision")) r.context_precision = j["context_precision"].get<double>();
    if (j.contains("context_recall")) r.context_recall = j["context_recall"].get<double>();
}

}  // namespace manurag
