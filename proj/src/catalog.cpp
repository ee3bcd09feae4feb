#include "crilm/catalog.hpp"

#include <fstream>

#include "crilm/error.hpp"

namespace crilm {

const std::string& DescriptorCatalog::descriptor(
    const std::string& feature) const {
    auto it = entries.find(feature);
    if (it == entries.end())
        throw data_error("CatalogGap",
                         "no descriptor for feature '" + feature + "'");
    return it->second;
}

nlohmann::json DescriptorCatalog::to_json() const {
    return {{"dataset", dataset_name},
            {"provenance", provenance},
            {"entries", entries}};
}

DescriptorCatalog DescriptorCatalog::from_json(const nlohmann::json& doc) {
    DescriptorCatalog catalog;
    try {
        catalog.dataset_name = doc.at("dataset").get<std::string>();
        catalog.provenance = doc.value("provenance", std::string("bundled"));
        catalog.entries =
            doc.at("entries").get<std::map<std::string, std::string>>();
    } catch (const nlohmann::json::exception& e) {
        throw data_error("BadCatalog", e.what());
    }
    for (const auto& [feature, sentence] : catalog.entries)
        if (sentence.empty())
            throw data_error("BadCatalog",
                             "empty descriptor for feature '" + feature + "'");
    return catalog;
}

DescriptorCatalog DescriptorCatalog::load(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw data_error("CatalogFileNotFound", "cannot open '" + path + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw data_error("BadCatalog", e.what());
    }
    return from_json(doc);
}

void DescriptorCatalog::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out)
        throw data_error("IoError", "cannot write '" + path + "'");
    out << to_json().dump(2) << '\n';
}

} // namespace crilm
