#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "manurag/chunker.hpp"
#include "manurag/corpus.hpp"
#include "manurag/prompts.hpp"
#include "manurag/providers.hpp"
#include "manurag/vector_store.hpp"

namespace manurag {

/// The six pipeline wirings. Each fixes an index plan, a retrieval plan,
/// and a generation plan:
///
///   RagRaw  text store over flattened plain words        LLM
///   RagHq   text store over structured markdown as-is    LLM
///   Manu1   text + image stores, images from top-k       MLLM
///   Manu2   text store only, links kept in chunk text    LLM
///   Manu3   text + image stores, linked images first     MLLM
///   Manu4   text store with links replaced by            LLM
///           model-written descriptions before chunking
enum class PipelineVariant { RagRaw, RagHq, Manu1, Manu2, Manu3, Manu4 };

constexpr PipelineVariant kAllVariants[] = {PipelineVariant::RagRaw, PipelineVariant::RagHq,
                                            PipelineVariant::Manu1,  PipelineVariant::Manu2,
                                            PipelineVariant::Manu3,  PipelineVariant::Manu4};

const char* to_string(PipelineVariant v);
const char* display_name(PipelineVariant v);  // report row label
std::optional<PipelineVariant> variant_from_string(std::string_view s);

/// Whether the variant builds and queries an image vector store.
bool uses_image_store(PipelineVariant v);
/// Whether the generator receives image bytes.
bool uses_mllm(PipelineVariant v);

/// Separator line between retrieved chunks in the rendered context.
inline constexpr std::string_view kContextSeparator = "\n\n---\n\n";

struct TextHit {
    std::string id;
    double score = 0.0;
    std::string text;
    std::vector<Uuid> images;
};

struct ImageHit {
    Uuid uuid;
    double score = 0.0;
    std::string path;  // relative to corpus root
};

/// Everything retrieval hands to generation, kept verbatim afterwards
/// because the context metrics score it.
struct RetrievalBundle {
    std::string question;
    std::string prompt;
    std::vector<TextHit> text_hits;
    std::vector<ImageHit> image_hits;  // image-store hits (Manu1; Manu3 backfill)
    std::vector<Uuid> referenced;      // linked images (Manu3), capped at k

    /// Generation order for images: store hits first, then referenced.
    std::vector<Uuid> image_uuids_for_generation() const;
};

struct Answer {
    std::string text;
    RetrievalBundle bundle;
    PipelineVariant variant = PipelineVariant::RagHq;
    std::chrono::microseconds latency{0};
    uint64_t provider_calls = 0;  // generator invocations
};

struct IndexBundle {
    PipelineVariant variant;
    ChunkingParams params;
    TextVectorStore text;
    std::optional<ImageVectorStore> image;
};

/// RagRaw body preparation: drop link tokens and $...$ math, strip
/// markdown syntax characters, collapse whitespace.
std::string strip_to_plain_words(std::string_view body);

/// Manu4 body preparation: every link token becomes
/// `[IMAGE <uuid>]: <description>`.
std::string replace_links_with_descriptions(const std::string& body, const Corpus& corpus,
                                            CachedDescriber& describer);

/// Chunks and embeds the corpus per the variant's index plan. Embedding
/// calls fan out over `workers` threads; insertion order stays chunk order.
IndexBundle build_index(const Corpus& corpus, PipelineVariant variant,
                        const ChunkingParams& params, const ProviderSet& providers,
                        size_t workers = 1);

/// Top-k retrieval plus prompt rendering for one question.
RetrievalBundle retrieve(const std::string& question, QType qtype, const IndexBundle& index,
                         const ProviderSet& providers, size_t k,
                         const PromptTemplates& templates = PromptTemplates::defaults());

/// Retrieval, prompt rendering, and one generation call.
Answer answer(const std::string& question, QType qtype, const Corpus& corpus,
              const IndexBundle& index, const ProviderSet& providers, size_t k,
              const PromptTemplates& templates = PromptTemplates::defaults());

}  // namespace manurag
