#include "manurag/prompts.hpp"

#include "manurag/error.hpp"
#include "manurag/util.hpp"

namespace manurag {

namespace {

constexpr std::string_view kMathqTemplate =
    "As a manufacturing expert, solve the math question step by step using the provided context "
    "and your knowledge of manufacturing calculations. Make sure to clearly explain your "
    "reasoning:\n"
    "\n"
    "{context_str}\n"
    "\n"
    "Question:\n"
    "\n"
    "Query: {query_str}\n"
    "\n"
    "Answer:\n";

constexpr std::string_view kMcqTemplate =
    "As a manufacturing expert, answer the following multi-choice questions based on the provided "
    "context step by step. Select the correct letter choices only.\n"
    "\n"
    "Answer format:\n"
    "\n"
    "\"Explanation\": \"Your explanation here.\", \"YourChoice\": \"Answer. (d), (e), and (g).\"\n"
    "\n"
    "{context_str}\n"
    "\n"
    "Answer the following question:\n"
    "\n"
    "Query: {query_str}\n"
    "\n"
    "Answer:\n";

constexpr std::string_view kRqTemplate =
    "You are an expert in manufacturing major. You need to answer the following short response "
    "question based on the context and your knowledge of manufacturing processes and materials. "
    "Please provide a detailed explanation and justify your answer. Be concise, clear, and "
    "accurate.\n"
    "\n"
    "{context_str}\n"
    "\n"
    "Answer the following question:\n"
    "\n"
    "Query: {query_str}\n"
    "\n"
    "Answer:\n";

void substitute(std::string& text, std::string_view slot, const std::string& value) {
    size_t pos = 0;
    while ((pos = text.find(slot, pos)) != std::string::npos) {
        text.replace(pos, slot.size(), value);
        pos += value.size();
    }
}

}  // namespace

const char* to_string(QType qtype) {
    switch (qtype) {
        case QType::MathQ: return "mathq";
        case QType::MCQ: return "mcq";
        case QType::RQ: return "rq";
    }
    return "mathq";
}

std::optional<QType> qtype_from_string(std::string_view s) {
    if (s == "mathq") return QType::MathQ;
    if (s == "mcq") return QType::MCQ;
    if (s == "rq") return QType::RQ;
    return std::nullopt;
}

PromptTemplates PromptTemplates::defaults() {
    return PromptTemplates{std::string(kMathqTemplate), std::string(kMcqTemplate),
                           std::string(kRqTemplate)};
}

PromptTemplates PromptTemplates::load_dir(const std::filesystem::path& dir) {
    return PromptTemplates{util::read_file_text(dir / "mathq.txt"),
                           util::read_file_text(dir / "mcq.txt"),
                           util::read_file_text(dir / "rq.txt")};
}

const std::string& PromptTemplates::for_qtype(QType qtype) const {
    switch (qtype) {
        case QType::MathQ: return mathq;
        case QType::MCQ: return mcq;
        case QType::RQ: return rq;
    }
    return mathq;
}

std::string PromptTemplates::render(QType qtype, const std::string& context_str,
                                    const std::string& query_str) const {
    std::string out = for_qtype(qtype);
    substitute(out, "{context_str}", context_str);
    substitute(out, "{query_str}", query_str);
    return out;
}

std::string render_prompt(QType qtype, const std::string& context_str,
                          const std::string& query_str) {
    return PromptTemplates::defaults().render(qtype, context_str, query_str);
}

}  // namespace manurag
