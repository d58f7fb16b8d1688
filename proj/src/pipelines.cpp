#include "manurag/pipelines.hpp"

#include <cctype>

#include "manurag/util.hpp"

namespace manurag {

const char* to_string(PipelineVariant v) {
    switch (v) {
        case PipelineVariant::RagRaw: return "rag_raw";
        case PipelineVariant::RagHq: return "rag_hq";
        case PipelineVariant::Manu1: return "manu1";
        case PipelineVariant::Manu2: return "manu2";
        case PipelineVariant::Manu3: return "manu3";
        case PipelineVariant::Manu4: return "manu4";
    }
    return "rag_hq";
}

const char* display_name(PipelineVariant v) {
    switch (v) {
        case PipelineVariant::RagRaw: return "RAG";
        case PipelineVariant::RagHq: return "RAG_hq";
        case PipelineVariant::Manu1: return "ManuRAG1";
        case PipelineVariant::Manu2: return "ManuRAG2";
        case PipelineVariant::Manu3: return "ManuRAG3";
        case PipelineVariant::Manu4: return "ManuRAG4";
    }
    return "RAG_hq";
}

std::optional<PipelineVariant> variant_from_string(std::string_view s) {
    for (PipelineVariant v : kAllVariants) {
        if (s == to_string(v)) return v;
    }
    return std::nullopt;
}

bool uses_image_store(PipelineVariant v) {
    return v == PipelineVariant::Manu1 || v == PipelineVariant::Manu3;
}

bool uses_mllm(PipelineVariant v) {
    return v == PipelineVariant::Manu1 || v == PipelineVariant::Manu3;
}

std::vector<Uuid> RetrievalBundle::image_uuids_for_generation() const {
    std::vector<Uuid> out;
    out.reserve(image_hits.size() + referenced.size());
    for (const auto& hit : image_hits) out.push_back(hit.uuid);
    for (const auto& uuid : referenced) out.push_back(uuid);
    return out;
}

std::string strip_to_plain_words(std::string_view body) {
    std::string without_links;
    without_links.reserve(body.size());
    size_t cursor = 0;
    for (const auto& span : find_links(body)) {
        without_links += body.substr(cursor, span.offset - cursor);
        without_links.push_back(' ');
        cursor = span.offset + span.length;
    }
    without_links += body.substr(cursor);

    std::string out;
    out.reserve(without_links.size());
    bool in_math = false;
    for (size_t i = 0; i < without_links.size(); ++i) {
        char c = without_links[i];
        if (c == '$') {
            in_math = !in_math;  // $$ toggles twice, net effect identical
            out.push_back(' ');
            continue;
        }
        if (in_math) continue;
        static constexpr std::string_view kMarkdownChars = "#*_`|>[]!";
        if (kMarkdownChars.find(c) != std::string_view::npos) {
            out.push_back(' ');
            continue;
        }
        out.push_back(c);
    }

    // collapse whitespace runs
    std::string collapsed;
    collapsed.reserve(out.size());
    for (const auto& token : util::split_whitespace(out)) {
        if (!collapsed.empty()) collapsed.push_back(' ');
        collapsed += token;
    }
    return collapsed;
}

std::string replace_links_with_descriptions(const std::string& body, const Corpus& corpus,
                                            CachedDescriber& describer) {
    std::string out;
    out.reserve(body.size());
    size_t cursor = 0;
    for (const auto& span : find_links(body)) {
        const ImageAsset* asset = corpus.find_asset(span.uuid);
        if (asset == nullptr) {
            throw Error(ErrorKind::MissingAsset, span.uuid.to_string());
        }
        auto bytes = util::read_file_bytes(corpus.root / asset->path);
        auto description = describer.describe(asset->uuid, bytes, asset->kind);
        out += body.substr(cursor, span.offset - cursor);
        out += "[IMAGE " + span.uuid.to_string() + "]: " + description;
        cursor = span.offset + span.length;
    }
    out += body.substr(cursor);
    return out;
}

namespace {

std::string prepared_body(const ExtractedDocument& doc, PipelineVariant variant,
                          const Corpus& corpus, const ProviderSet& providers) {
    switch (variant) {
        case PipelineVariant::RagRaw:
            return strip_to_plain_words(doc.body);
        case PipelineVariant::Manu4:
            if (!providers.describer) {
                throw Error(ErrorKind::ProviderUnreachable, "manu4 requires an image describer");
            }
            return replace_links_with_descriptions(doc.body, corpus, *providers.describer);
        default:
            return doc.body;
    }
}

}  // namespace

IndexBundle build_index(const Corpus& corpus, PipelineVariant variant,
                        const ChunkingParams& params, const ProviderSet& providers,
                        size_t workers) {
    if (!providers.text_embedder) {
        throw Error(ErrorKind::ProviderUnreachable, "no text embedder configured");
    }

    std::vector<Chunk> chunks;
    for (const auto& doc : corpus.documents) {
        auto body = prepared_body(doc, variant, corpus, providers);
        auto doc_chunks = chunk(tokenize(body), doc.doc_id, params);
        for (auto& c : doc_chunks) {
            chunks.push_back(attach_images(std::move(c), corpus));
        }
    }

    TextVectorStore text_store(providers.text_embedder->dim());
    {
        std::vector<Embedding> vectors(chunks.size());
        util::parallel_for(chunks.size(), workers, [&](size_t i) {
            try {
                vectors[i] = providers.text_embedder->embed(chunks[i].text);
            } catch (const Error& e) {
                throw Error(e.kind(), std::string(e.what()) + " (chunk " + chunks[i].id() + ")");
            }
        });
        for (size_t i = 0; i < chunks.size(); ++i) {
            text_store.insert(chunks[i].id(), std::move(vectors[i]), std::move(chunks[i]));
        }
    }

    std::optional<ImageVectorStore> image_store;
    if (uses_image_store(variant)) {
        if (!providers.mm_embedder) {
            throw Error(ErrorKind::ProviderUnreachable, "variant requires a multi-modal embedder");
        }
        image_store.emplace(providers.mm_embedder->dim());
        std::vector<const ImageAsset*> assets;
        for (const auto& doc : corpus.documents) {
            for (const auto& asset : doc.assets) assets.push_back(&asset);
        }
        std::vector<Embedding> vectors(assets.size());
        util::parallel_for(assets.size(), workers, [&](size_t i) {
            try {
                auto bytes = util::read_file_bytes(corpus.root / assets[i]->path);
                vectors[i] = providers.mm_embedder->embed_image(bytes);
            } catch (const Error& e) {
                throw Error(e.kind(), std::string(e.what()) + " (asset " +
                                          assets[i]->uuid.to_string() + ")");
            }
        });
        for (size_t i = 0; i < assets.size(); ++i) {
            image_store->insert(assets[i]->uuid.to_string(), std::move(vectors[i]), *assets[i]);
        }
    }

    return IndexBundle{variant, params, std::move(text_store), std::move(image_store)};
}

RetrievalBundle retrieve(const std::string& question, QType qtype, const IndexBundle& index,
                         const ProviderSet& providers, size_t k, const PromptTemplates& templates) {
    RetrievalBundle bundle;
    bundle.question = question;

    auto q1 = providers.text_embedder->embed(question);
    auto hits = index.text.top_k(q1, k);
    for (const auto& hit : hits) {
        const auto& payload = index.text.entry(hit.index).payload;
        bundle.text_hits.push_back(TextHit{hit.id, hit.score, payload.text, payload.images});
    }

    if (index.variant == PipelineVariant::Manu3) {
        auto linked = referenced_images(hits, index.text);
        if (linked.size() > k) linked.resize(k);
        bundle.referenced = std::move(linked);
    }

    // Manu1 always searches the image store; Manu3 only when no linked
    // image exists (linked hits take the whole budget otherwise).
    const bool want_image_search =
        index.variant == PipelineVariant::Manu1 ||
        (index.variant == PipelineVariant::Manu3 && bundle.referenced.empty());
    if (want_image_search && index.image && !index.image->empty()) {
        if (!providers.mm_embedder) {
            throw Error(ErrorKind::ProviderUnreachable, "variant requires a multi-modal embedder");
        }
        auto q2 = providers.mm_embedder->embed_text(question);
        for (const auto& hit : index.image->top_k(q2, k)) {
            const auto& asset = index.image->entry(hit.index).payload;
            bundle.image_hits.push_back(ImageHit{asset.uuid, hit.score, asset.path});
        }
    }

    std::string context;
    for (const auto& hit : bundle.text_hits) {
        if (!context.empty()) context += kContextSeparator;
        context += hit.text;
    }
    bundle.prompt = templates.render(qtype, context, question);
    return bundle;
}

Answer answer(const std::string& question, QType qtype, const Corpus& corpus,
              const IndexBundle& index, const ProviderSet& providers, size_t k,
              const PromptTemplates& templates) {
    if (!providers.generator) {
        throw Error(ErrorKind::ProviderUnreachable, "no generator configured");
    }
    const auto start = std::chrono::steady_clock::now();

    Answer result;
    result.variant = index.variant;
    result.bundle = retrieve(question, qtype, index, providers, k, templates);

    std::vector<ImageBytes> images;
    if (uses_mllm(index.variant)) {
        for (const auto& uuid : result.bundle.image_uuids_for_generation()) {
            const ImageAsset* asset = corpus.find_asset(uuid);
            if (asset == nullptr) throw Error(ErrorKind::MissingAsset, uuid.to_string());
            images.push_back(util::read_file_bytes(corpus.root / asset->path));
        }
    }

    result.text = providers.generator->generate(result.bundle.prompt, images);
    result.provider_calls = 1;
    result.latency = std::chrono::duration_cast<std::chrono::microseconds>(
        std::chrono::steady_clock::now() - start);
    return result;
}

}  // namespace manurag
