#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "manurag/metrics.hpp"
#include "manurag/pipelines.hpp"

namespace manurag {

/// Context precision is judged over the first three retrieved contexts.
inline constexpr size_t kContextPrecisionK = 3;

/// Question/reference token budget; longer rows are rejected at load.
inline constexpr size_t kMaxItemTokens = 600;

struct Choice {
    std::string label;
    std::string text;

    bool operator==(const Choice&) const = default;
};

struct QAItem {
    std::string id;
    QType qtype = QType::RQ;
    std::string question;
    std::string reference;
    std::vector<Choice> choices;  // MCQ only

    bool operator==(const QAItem&) const = default;
};

struct DatasetLoad {
    std::vector<QAItem> items;
    std::vector<std::string> rejected_ids;  // over-length rows
};

/// JSONL rows: {"id", "qtype", "question", "reference", "choices"?}.
/// Rows longer than the token budget are rejected and reported, MCQ rows
/// without a `(a)`-style label in the reference are MalformedRow, and a
/// dataset with nothing usable is EmptyDataset.
DatasetLoad load_dataset(const std::filesystem::path& path, QType qtype);

struct BenchRunConfig {
    PipelineVariant variant = PipelineVariant::RagHq;
    std::string dataset_name;
    size_t k = 1;
    ChunkingParams chunking;
    uint64_t seed = 0;
    size_t workers = 1;
    nlohmann::json provider_models = nlohmann::json::object();
};

/// One benchmark row: the answer plus everything needed to re-score it.
struct EvalRecord {
    std::string id;
    QType qtype = QType::RQ;
    std::string question;
    std::string reference;
    std::string answer;
    std::vector<std::string> context_ids;
    std::vector<std::string> contexts;
    std::vector<std::string> image_uuids;
    MetricReport scores;
    std::string error;  // non-empty = row failed, excluded from aggregates

    bool ok() const { return error.empty(); }
};

struct BenchRun {
    BenchRunConfig config;
    std::vector<EvalRecord> rows;
    std::map<std::string, double> aggregates;  // metric -> mean over ok rows, in percent

    size_t error_count() const;
};

/// Means recomputed from rows; rouge only counts rows that carry it.
std::map<std::string, double> compute_aggregates(const std::vector<EvalRecord>& rows);

/// Answers and scores every item. Rows run concurrently up to
/// config.workers and come back ordered by item id; a provider failure
/// marks its row as an error instead of aborting the run.
BenchRun run_bench(const Corpus& corpus, const std::vector<QAItem>& items,
                   const IndexBundle& index, const ProviderSet& providers, BenchRunConfig config,
                   const PromptTemplates& templates = PromptTemplates::defaults());

void to_json(nlohmann::json& j, const BenchRunConfig& c);
void from_json(const nlohmann::json& j, BenchRunConfig& c);
void to_json(nlohmann::json& j, const EvalRecord& r);
void from_json(const nlohmann::json& j, EvalRecord& r);
void to_json(nlohmann::json& j, const BenchRun& run);
void from_json(const nlohmann::json& j, BenchRun& run);

/// Result tables over a sweep of runs: rows are methods, columns are
/// metric-per-dataset, percentages with two decimals, best per column
/// flagged (markdown bold / trailing `*` in csv).
std::string emit_report_markdown(const std::vector<BenchRun>& runs);
std::string emit_report_csv(const std::vector<BenchRun>& runs);

}  // namespace manurag
