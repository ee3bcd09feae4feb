#include "crilm/descriptors.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <openssl/evp.h>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "crilm/error.hpp"

namespace crilm {

namespace {

std::string env_or(const char* name, const std::string& fallback = "") {
    const char* v = std::getenv(name);
    return v ? std::string(v) : fallback;
}

std::mutex cache_mutex; // serializes cache writes

} // namespace

EndpointConfig EndpointConfig::from_env() {
    EndpointConfig cfg;
    cfg.url = env_or("CRILM_LLM_ENDPOINT");
    cfg.api_key = env_or("CRILM_LLM_API_KEY");
    cfg.model = env_or("CRILM_LLM_MODEL", cfg.model);
    cfg.cache_dir = env_or("CRILM_CACHE_DIR");
    return cfg;
}

std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

PromptSpec build_prompt(const Schema& schema,
                        const std::string& dataset_description) {
    if (dataset_description.empty())
        throw usage_error("EmptyDescription",
                          "dataset description must be non-empty");

    PromptSpec prompt;
    prompt.dataset_description = dataset_description;
    prompt.instruction =
        "For any missing attribute values, suggest contextually relevant "
        "descriptors to fill in the missing data.";

    std::ostringstream out;
    out << dataset_description << "\n\n"
        << "The dataset has the following features:\n";
    std::size_t i = 1;
    for (const auto& f : schema.features()) {
        out << i++ << ". " << f.name << " (" << to_string(f.kind);
        if (!f.unit_phrase.empty()) out << ", " << f.unit_phrase;
        out << ")\n";
    }
    out << "\n"
        << prompt.instruction << "\n"
        << "Respond with exactly one line per feature, formatted as "
           "'name: descriptor', using the feature names above and no other "
           "text.\n";
    prompt.text = out.str();
    return prompt;
}

DescriptorCatalog parse_descriptor_response(const std::string& content,
                                            const Schema& schema) {
    DescriptorCatalog catalog;
    catalog.dataset_name = schema.dataset_name();

    std::istringstream in(content);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto colon = line.find(':');
        if (colon == std::string::npos)
            throw data_error("MalformedResponse",
                             "line has no 'name: descriptor' separator: '" +
                                 line + "'");
        std::string name = line.substr(0, colon);
        std::string descriptor = line.substr(colon + 1);
        while (!name.empty() && name.front() == ' ') name.erase(0, 1);
        while (!name.empty() && name.back() == ' ') name.pop_back();
        while (!descriptor.empty() && descriptor.front() == ' ')
            descriptor.erase(0, 1);
        while (!descriptor.empty() && descriptor.back() == ' ')
            descriptor.pop_back();
        if (!schema.has_feature(name))
            throw data_error("MalformedResponse",
                             "'" + name + "' is not a schema feature");
        if (descriptor.empty())
            throw data_error("MalformedResponse",
                             "empty descriptor for '" + name + "'");
        catalog.entries[name] = descriptor;
    }

    std::vector<std::string> missing;
    for (const auto& f : schema.features())
        if (!catalog.covers(f.name)) missing.push_back(f.name);
    if (!missing.empty()) {
        std::string joined;
        for (const auto& m : missing) {
            if (!joined.empty()) joined += ", ";
            joined += m;
        }
        throw data_error("CoverageGap",
                         "response lacks descriptors for: " + joined);
    }
    return catalog;
}

namespace {

struct ParsedUrl {
    std::string base; // scheme://host[:port]
    std::string path;
};

ParsedUrl parse_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        throw usage_error("BadEndpoint", "endpoint URL needs a scheme: " + url);
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

std::string chat_completion(const PromptSpec& prompt,
                            const EndpointConfig& endpoint) {
    const auto [base, path] = parse_url(endpoint.url);
    const nlohmann::json body = {
        {"model", endpoint.model},
        {"temperature", 0},
        {"messages",
         {{{"role", "user"}, {"content", prompt.text}}}},
    };

    std::string last_error;
    for (int attempt = 0; attempt < endpoint.max_attempts; ++attempt) {
        if (attempt > 0)
            std::this_thread::sleep_for(
                std::chrono::milliseconds(250 << attempt));

        httplib::Client client(base);
        client.set_connection_timeout(10);
        client.set_read_timeout(120);
        httplib::Headers headers;
        if (!endpoint.api_key.empty())
            headers.emplace("Authorization", "Bearer " + endpoint.api_key);

        auto res = client.Post(path, headers, body.dump(), "application/json");
        if (!res) {
            last_error = "connection failed: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status == 401 || res->status == 403)
            throw network_error("AuthError",
                                "endpoint rejected the credential (HTTP " +
                                    std::to_string(res->status) + ")");
        if (res->status == 429 || res->status >= 500) {
            last_error = "HTTP " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200)
            throw network_error("NetworkError",
                                "HTTP " + std::to_string(res->status) + ": " +
                                    res->body);
        try {
            auto doc = nlohmann::json::parse(res->body);
            return doc.at("choices").at(0).at("message").at("content")
                .get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw data_error("MalformedResponse",
                             std::string("response is not chat-completions "
                                         "shaped: ") +
                                 e.what());
        }
    }
    throw network_error("NetworkError",
                        "gave up after " +
                            std::to_string(endpoint.max_attempts) +
                            " attempts: " + last_error);
}

} // namespace

DescriptorCatalog request_descriptors(const PromptSpec& prompt,
                                      const Schema& schema,
                                      const EndpointConfig& endpoint) {
    if (endpoint.url.empty())
        throw usage_error("NoEndpoint", "no endpoint URL configured");

    std::filesystem::path cache_file;
    if (!endpoint.cache_dir.empty()) {
        const std::string key =
            sha256_hex(prompt.text + '\x1f' + endpoint.model);
        cache_file = std::filesystem::path(endpoint.cache_dir) / (key + ".json");
        std::lock_guard<std::mutex> lock(cache_mutex);
        if (std::filesystem::exists(cache_file))
            return DescriptorCatalog::load(cache_file.string());
    }

    const std::string content = chat_completion(prompt, endpoint);
    DescriptorCatalog catalog = parse_descriptor_response(content, schema);
    catalog.provenance = "remote:" + endpoint.model;

    if (!cache_file.empty()) {
        std::lock_guard<std::mutex> lock(cache_mutex);
        std::filesystem::create_directories(cache_file.parent_path());
        catalog.save(cache_file.string());
    }
    return catalog;
}

DescriptorCatalog load_bundled(const std::string& dataset_name,
                               const std::string& catalog_dir) {
    const auto path = std::filesystem::path(catalog_dir) /
                      (dataset_name + ".catalog.json");
    if (!std::filesystem::exists(path))
        throw data_error("UnknownDataset",
                         "no bundled catalog for '" + dataset_name + "'");
    return DescriptorCatalog::load(path.string());
}

} // namespace crilm
