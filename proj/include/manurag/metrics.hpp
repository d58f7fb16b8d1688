#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "manurag/providers.hpp"

namespace manurag {

/// Claim-match counts between an answer and its reference.
struct ClaimVerdicts {
    size_t tp = 0;  // answer claims entailed by the reference
    size_t fp = 0;  // answer claims not entailed
    size_t fn = 0;  // reference claims not entailed by the answer
};

/// F1 = 2PR / (P + R); zero when no claim matches.
double f1_score(const ClaimVerdicts& v);

ClaimVerdicts claim_verdicts(const std::string& answer, const std::string& reference, Judge& judge);

/// Claim-level F1 between answer and reference under the judge.
double factual_correctness(const std::string& answer, const std::string& reference, Judge& judge);

/// Scorer output clamped to [0, 1].
double semantic_similarity(const std::string& answer, const std::string& reference,
                           SimilarityScorer& scorer);

/// Unigram-overlap F1. Unigrams are case-folded whitespace tokens with
/// surrounding punctuation stripped; overlap counts with clipped
/// multiplicity.
double rouge1_f1(const std::string& answer, const std::string& reference);

/// Rank-weighted precision over a binary relevance vector:
/// sum of Precision@k over relevant ranks, divided by the number of
/// relevant items; zero when nothing is relevant.
double context_precision_at_k(const std::vector<bool>& relevance);

/// Per-rank relevance for the first K contexts: a context is relevant
/// iff it entails at least one reference claim.
std::vector<bool> judge_context_relevance(const std::vector<std::string>& contexts,
                                          const std::string& reference, Judge& judge, size_t K);

/// Fraction of reference claims attributable to the concatenated
/// contexts. Empty contexts score 0; a reference that decomposes into
/// zero claims is UndefinedMetric.
double context_recall(const std::string& reference, const std::vector<std::string>& contexts,
                      Judge& judge);

/// Per-row metric values; absent means not applicable, never zero.
struct MetricReport {
    std::optional<double> factual_correctness;
    std::optional<double> semantic_similarity;
    std::optional<double> rouge1_f1;
    std::optional<double> context_precision;
    std::optional<double> context_recall;

    bool operator==(const MetricReport&) const = default;
};

void to_json(nlohmann::json& j, const MetricReport& r);
void from_json(const nlohmann::json& j, MetricReport& r);

}  // namespace manurag
