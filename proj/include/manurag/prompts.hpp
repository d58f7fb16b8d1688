#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace manurag {

enum class QType { MathQ, MCQ, RQ };

const char* to_string(QType qtype);
std::optional<QType> qtype_from_string(std::string_view s);

/// The three question-type prompt bodies with `{context_str}` and
/// `{query_str}` slots. Shipped as editable files under templates/;
/// the embedded defaults are the same bytes.
struct PromptTemplates {
    std::string mathq;
    std::string mcq;
    std::string rq;

    static PromptTemplates defaults();

    /// Reads mathq.txt / mcq.txt / rq.txt from a directory.
    static PromptTemplates load_dir(const std::filesystem::path& dir);

    const std::string& for_qtype(QType qtype) const;

    std::string render(QType qtype, const std::string& context_str,
                       const std::string& query_str) const;
};

/// Renders with the default templates.
std::string render_prompt(QType qtype, const std::string& context_str,
                          const std::string& query_str);

}  // namespace manurag
