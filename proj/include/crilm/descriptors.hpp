#pragma once

#include <string>

#include "crilm/catalog.hpp"
#include "crilm/schema.hpp"

namespace crilm {

struct PromptSpec {
    std::string dataset_description;
    std::string instruction;
    std::string text; // full prompt sent to the model
};

struct EndpointConfig {
    std::string url;   // chat-completions endpoint, e.g. https://host/v1/chat/completions
    std::string api_key;
    std::string model = "gpt-3.5-turbo";
    std::string cache_dir; // empty disables caching
    int max_attempts = 3;

    // CRILM_LLM_ENDPOINT / CRILM_LLM_API_KEY / CRILM_LLM_MODEL / CRILM_CACHE_DIR
    static EndpointConfig from_env();
};

// Deterministic prompt: dataset description, enumerated feature list, the
// descriptor request, and a strict `name: descriptor` line format directive.
PromptSpec build_prompt(const Schema& schema,
                        const std::string& dataset_description);

// Parses a strict line-oriented `name: descriptor` response. Throws
// MalformedResponse on an unparseable line and CoverageGap when features
// are left without a descriptor.
DescriptorCatalog parse_descriptor_response(const std::string& content,
                                            const Schema& schema);

// Calls the remote endpoint (with retries and exponential backoff), parses
// and validates the response, and caches the catalog under a content hash
// of (prompt, model).
DescriptorCatalog request_descriptors(const PromptSpec& prompt,
                                      const Schema& schema,
                                      const EndpointConfig& endpoint);

// Shipped catalog for one of the bundled datasets. `catalog_dir` holds the
// <name>.catalog.json files.
DescriptorCatalog load_bundled(const std::string& dataset_name,
                               const std::string& catalog_dir);

std::string sha256_hex(const std::string& data);

} // namespace crilm
