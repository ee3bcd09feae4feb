#pragma once

#include <map>
#include <string>

#include <json.hpp>

namespace crilm {

// Per-feature natural-language descriptors for missing values.
struct DescriptorCatalog {
    std::string dataset_name;
    std::map<std::string, std::string> entries; // feature name -> sentence
    std::string provenance = "bundled";         // "bundled" or "remote:<model>"

    bool covers(const std::string& feature) const {
        return entries.count(feature) != 0;
    }
    const std::string& descriptor(const std::string& feature) const;

    nlohmann::json to_json() const;
    static DescriptorCatalog from_json(const nlohmann::json& doc);
    static DescriptorCatalog load(const std::string& path);
    void save(const std::string& path) const;
};

} // namespace crilm
