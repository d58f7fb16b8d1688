#include "manurag/bench.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "manurag/util.hpp"

namespace manurag {

namespace {

bool has_choice_label(const std::string& text) {
    for (size_t i = 0; i + 2 < text.size(); ++i) {
        if (text[i] == '(' && std::islower(static_cast<unsigned char>(text[i + 1])) &&
            text[i + 2] == ')') {
            return true;
        }
    }
    return false;
}

}  // namespace

DatasetLoad load_dataset(const std::filesystem::path& path, QType qtype) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::UnreadableFile, path.string());

    DatasetLoad load;
    std::set<std::string> seen_ids;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        QAItem item;
        try {
            auto row = nlohmann::json::parse(line);
            item.id = row.at("id").get<std::string>();
            auto row_qtype = qtype_from_string(row.at("qtype").get<std::string>());
            if (!row_qtype) throw Error(ErrorKind::MalformedRow, "unknown qtype");
            item.qtype = *row_qtype;
            item.question = row.at("question").get<std::string>();
            item.reference = row.at("reference").get<std::string>();
            if (row.contains("choices")) {
                for (const auto& choice : row.at("choices")) {
                    item.choices.push_back(Choice{choice.at("label").get<std::string>(),
                                                  choice.at("text").get<std::string>()});
                }
            }
        } catch (const Error&) {
            throw Error(ErrorKind::MalformedRow, "line " + std::to_string(line_no));
        } catch (const std::exception& e) {
            throw Error(ErrorKind::MalformedRow,
                        "line " + std::to_string(line_no) + ": " + e.what());
        }
        if (item.qtype != qtype) {
            throw Error(ErrorKind::MalformedRow,
                        "line " + std::to_string(line_no) + ": qtype mismatch");
        }
        if (item.question.empty() || item.reference.empty() || !seen_ids.insert(item.id).second) {
            throw Error(ErrorKind::MalformedRow, "line " + std::to_string(line_no));
        }
        if (qtype == QType::MCQ && !has_choice_label(item.reference)) {
            throw Error(ErrorKind::MalformedRow,
                        "line " + std::to_string(line_no) + ": MCQ reference has no (x) label");
        }
        if (tokenize(item.question).size() > kMaxItemTokens ||
            tokenize(item.reference).size() > kMaxItemTokens) {
            load.rejected_ids.push_back(item.id);
            continue;
        }
        load.items.push_back(std::move(item));
    }
    if (load.items.empty()) {
        throw Error(ErrorKind::EmptyDataset, path.string());
    }
    return load;
}

size_t BenchRun::error_count() const {
    size_t n = 0;
    for (const auto& row : rows) {
        if (!row.ok()) ++n;
    }
    return n;
}

std::map<std::string, double> compute_aggregates(const std::vector<EvalRecord>& rows) {
    struct Accumulator {
        double sum = 0.0;
        size_t n = 0;
    };
    std::map<std::string, Accumulator> acc;
    auto add = [&acc](const char* name, const std::optional<double>& value) {
        if (value) {
            acc[name].sum += *value;
            ++acc[name].n;
        }
    };
    for (const auto& row : rows) {
        if (!row.ok()) continue;
        add("factual_correctness", row.scores.factual_correctness);
        add("semantic_similarity", row.scores.semantic_similarity);
        add("rouge1_f1", row.scores.rouge1_f1);
        add("context_precision", row.scores.context_precision);
        add("context_recall", row.scores.context_recall);
    }
    std::map<std::string, double> means;
    for (const auto& [name, a] : acc) {
        means[name] = a.sum / static_cast<double>(a.n) * 100.0;
    }
    return means;
}

BenchRun run_bench(const Corpus& corpus, const std::vector<QAItem>& items,
                   const IndexBundle& index, const ProviderSet& providers, BenchRunConfig config,
                   const PromptTemplates& templates) {
    if (!providers.judge || !providers.scorer) {
        throw Error(ErrorKind::ProviderUnreachable, "bench requires a judge and a scorer");
    }
    config.provider_models = providers.describe_models();

    BenchRun run;
    run.config = config;
    run.rows.resize(items.size());

    util::parallel_for(items.size(), config.workers, [&](size_t i) {
        const QAItem& item = items[i];
        EvalRecord rec;
        rec.id = item.id;
        rec.qtype = item.qtype;
        rec.question = item.question;
        rec.reference = item.reference;
        try {
            Answer result =
                answer(item.question, item.qtype, corpus, index, providers, config.k, templates);
            rec.answer = result.text;
            for (const auto& hit : result.bundle.text_hits) {
                rec.context_ids.push_back(hit.id);
                rec.contexts.push_back(hit.text);
            }
            for (const auto& uuid : result.bundle.image_uuids_for_generation()) {
                rec.image_uuids.push_back(uuid.to_string());
            }
            rec.scores.factual_correctness =
                factual_correctness(rec.answer, item.reference, *providers.judge);
            rec.scores.semantic_similarity =
                semantic_similarity(rec.answer, item.reference, *providers.scorer);
            if (item.qtype == QType::MCQ) {
                rec.scores.rouge1_f1 = rouge1_f1(rec.answer, item.reference);
            }
            auto relevance = judge_context_relevance(rec.contexts, item.reference,
                                                     *providers.judge, kContextPrecisionK);
            rec.scores.context_precision = context_precision_at_k(relevance);
            try {
                rec.scores.context_recall =
                    context_recall(item.reference, rec.contexts, *providers.judge);
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::UndefinedMetric) throw;
                // zero-claim reference: metric stays absent
            }
        } catch (const Error& e) {
            rec.scores = MetricReport{};
            rec.error = e.what();
        }
        run.rows[i] = std::move(rec);
    });

    std::sort(run.rows.begin(), run.rows.end(),
              [](const EvalRecord& a, const EvalRecord& b) { return a.id < b.id; });
    run.aggregates = compute_aggregates(run.rows);
    return run;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

void to_json(nlohmann::json& j, const BenchRunConfig& c) {
    j = nlohmann::json{{"variant", to_string(c.variant)},
                       {"dataset", c.dataset_name},
                       {"k", c.k},
                       {"chunk_size", c.chunking.chunk_size},
                       {"chunk_overlap", c.chunking.chunk_overlap},
                       {"seed", c.seed},
                       {"workers", c.workers},
                       {"providers", c.provider_models}};
}

void from_json(const nlohmann::json& j, BenchRunConfig& c) {
    auto variant = variant_from_string(j.at("variant").get<std::string>());
    if (!variant) throw Error(ErrorKind::MalformedRow, "unknown variant in run config");
    c.variant = *variant;
    c.dataset_name = j.at("dataset").get<std::string>();
    c.k = j.at("k").get<size_t>();
    c.chunking.chunk_size = j.at("chunk_size").get<size_t>();
    c.chunking.chunk_overlap = j.at("chunk_overlap").get<size_t>();
    c.seed = j.at("seed").get<uint64_t>();
    c.workers = j.at("workers").get<size_t>();
    c.provider_models = j.value("providers", nlohmann::json::object());
}

void to_json(nlohmann::json& j, const EvalRecord& r) {
    j = nlohmann::json{{"id", r.id},
                       {"qtype", to_string(r.qtype)},
                       {"question", r.question},
                       {"reference", r.reference},
                       {"answer", r.answer},
                       {"context_ids", r.context_ids},
                       {"contexts", r.contexts},
                       {"image_uuids", r.image_uuids},
                       {"scores", r.scores}};
    if (!r.error.empty()) j["error"] = r.error;
}

void from_json(const nlohmann::json& j, EvalRecord& r) {
    r.id = j.at("id").get<std::string>();
    auto qtype = qtype_from_string(j.at("qtype").get<std::string>());
    if (!qtype) throw Error(ErrorKind::MalformedRow, "unknown qtype in record");
    r.qtype = *qtype;
    r.question = j.at("question").get<std::string>();
    r.reference = j.at("reference").get<std::string>();
    r.answer = j.at("answer").get<std::string>();
    r.context_ids = j.at("context_ids").get<std::vector<std::string>>();
    r.contexts = j.at("contexts").get<std::vector<std::string>>();
    r.image_uuids = j.at("image_uuids").get<std::vector<std::string>>();
    r.scores = j.at("scores").get<MetricReport>();
    r.error = j.value("error", std::string{});
}

void to_json(nlohmann::json& j, const BenchRun& run) {
    j = nlohmann::json{{"config", run.config}, {"rows", run.rows}, {"aggregates", run.aggregates}};
}

void from_json(const nlohmann::json& j, BenchRun& run) {
    run.config = j.at("config").get<BenchRunConfig>();
    run.rows = j.at("rows").get<std::vector<EvalRecord>>();
    run.aggregates = j.at("aggregates").get<std::map<std::string, double>>();
}

// ---------------------------------------------------------------------------
// Report tables
// ---------------------------------------------------------------------------

namespace {

std::string format_percent(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", value);
    return buf;
}

std::vector<std::string> dataset_order(const std::vector<BenchRun>& runs) {
    // canonical first, anything else appended alphabetically
    std::vector<std::string> order;
    std::set<std::string> present;
    for (const auto& run : runs) present.insert(run.config.dataset_name);
    for (const char* name : {"MathQ", "MCQ", "RQ"}) {
        if (present.erase(name) > 0) order.push_back(name);
    }
    order.insert(order.end(), present.begin(), present.end());
    return order;
}

std::vector<PipelineVariant> variant_order(const std::vector<BenchRun>& runs) {
    std::vector<PipelineVariant> order;
    for (PipelineVariant v : kAllVariants) {
        for (const auto& run : runs) {
            if (run.config.variant == v) {
                order.push_back(v);
                break;
            }
        }
    }
    return order;
}

const BenchRun* find_run(const std::vector<BenchRun>& runs, PipelineVariant variant,
                         const std::string& dataset) {
    for (const auto& run : runs) {
        if (run.config.variant == variant && run.config.dataset_name == dataset) return &run;
    }
    return nullptr;
}

struct Column {
    std::string header;
    std::string dataset;
    std::string metric;
};

struct Table {
    std::string title;
    std::vector<Column> columns;
};

std::vector<Table> build_tables(const std::vector<BenchRun>& runs) {
    const auto datasets = dataset_order(runs);
    Table quality{"Factual Correctness / Semantic Similarity (%)", {}};
    Table rouge{"ROUGE-1 F1 (%)", {}};
    Table context{"Context Precision / Recall (%)", {}};
    for (const auto& dataset : datasets) {
        quality.columns.push_back({dataset + " FC", dataset, "factual_correctness"});
        quality.columns.push_back({dataset + " SS", dataset, "semantic_similarity"});
        context.columns.push_back({dataset + " CP", dataset, "context_precision"});
        context.columns.push_back({dataset + " CR", dataset, "context_recall"});
        bool any_rouge = false;
        for (const auto& run : runs) {
            if (run.config.dataset_name == dataset && run.aggregates.contains("rouge1_f1")) {
                any_rouge = true;
                break;
            }
        }
        if (any_rouge) rouge.columns.push_back({dataset + " ROUGE", dataset, "rouge1_f1"});
    }
    std::vector<Table> tables{quality};
    if (!rouge.columns.empty()) tables.push_back(rouge);
    tables.push_back(context);
    return tables;
}

/// Cell grid for one table: values[row][col], NaN = absent.
std::vector<std::vector<double>> table_values(const Table& table,
                                              const std::vector<PipelineVariant>& variants,
                                              const std::vector<BenchRun>& runs) {
    std::vector<std::vector<double>> values(variants.size(),
                                            std::vector<double>(table.columns.size(),
                                                                std::nan("")));
    for (size_t r = 0; r < variants.size(); ++r) {
        for (size_t c = 0; c < table.columns.size(); ++c) {
            const BenchRun* run = find_run(runs, variants[r], table.columns[c].dataset);
            if (run == nullptr) continue;
            auto it = run->aggregates.find(table.columns[c].metric);
            if (it != run->aggregates.end()) values[r][c] = it->second;
        }
    }
    return values;
}

std::vector<size_t> best_rows(const std::vector<std::vector<double>>& values, size_t col) {
    std::vector<size_t> best;
    double best_value = -1.0;
    for (size_t r = 0; r < values.size(); ++r) {
        double v = values[r][col];
        if (std::isnan(v)) continue;
        if (v > best_value) {
            best_value = v;
            best = {r};
        } else if (v == best_value) {
            best.push_back(r);
        }
    }
    return best;
}

}  // namespace

std::string emit_report_markdown(const std::vector<BenchRun>& runs) {
    if (runs.empty()) throw Error(ErrorKind::EmptyDataset, "no runs to report");
    const auto variants = variant_order(runs);
    std::ostringstream out;
    out << "# Benchmark Report\n";
    for (const auto& table : build_tables(runs)) {
        auto values = table_values(table, variants, runs);
        out << "\n## " << table.title << "\n\n";
        out << "| Method |";
        for (const auto& column : table.columns) out << " " << column.header << " |";
        out << "\n|---|";
        for (size_t c = 0; c < table.columns.size(); ++c) out << "---|";
        out << "\n";
        for (size_t r = 0; r < variants.size(); ++r) {
            out << "| " << display_name(variants[r]) << " |";
            for (size_t c = 0; c < table.columns.size(); ++c) {
                if (std::isnan(values[r][c])) {
                    out << " - |";
                    continue;
                }
                auto best = best_rows(values, c);
                bool is_best = std::find(best.begin(), best.end(), r) != best.end();
                if (is_best) {
                    out << " **" << format_percent(values[r][c]) << "** |";
                } else {
                    out << " " << format_percent(values[r][c]) << " |";
                }
            }
            out << "\n";
        }
    }
    return out.str();
}

std::string emit_report_csv(const std::vector<BenchRun>& runs) {
    if (runs.empty()) throw Error(ErrorKind::EmptyDataset, "no runs to report");
    const auto variants = variant_order(runs);
    std::ostringstream out;
    bool first_table = true;
    for (const auto& table : build_tables(runs)) {
        auto values = table_values(table, variants, runs);
        if (!first_table) out << "\n";
        first_table = false;
        out << "# " << table.title << "\n";
        out << "Method";
        for (const auto& column : table.columns) out << "," << column.header;
        out << "\n";
        for (size_t r = 0; r < variants.size(); ++r) {
            out << display_name(variants[r]);
            for (size_t c = 0; c < table.columns.size(); ++c) {
                out << ",";
                if (std::isnan(values[r][c])) {
                    out << "-";
                    continue;
                }
                auto best = best_rows(values, c);
                bool is_best = std::find(best.begin(), best.end(), r) != best.end();
                out << format_percent(values[r][c]) << (is_best ? "*" : "");
            }
            out << "\n";
        }
    }
    return out.str();
}

}  // namespace manurag
