#include "crilm/schema.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "crilm/error.hpp"

namespace crilm {

std::string to_string(ColumnKind kind) {
    return kind == ColumnKind::Continuous ? "continuous" : "categorical";
}

ColumnKind column_kind_from_string(const std::string& s) {
    if (s == "continuous") return ColumnKind::Continuous;
    if (s == "categorical") return ColumnKind::Categorical;
    throw data_error("BadColumnKind", "unknown column kind '" + s + "'");
}

Schema Schema::from_json(const nlohmann::json& doc) {
    Schema schema;
    try {
        schema.dataset_name_ = doc.at("dataset").get<std::string>();
        schema.default_decimals_ = doc.value("decimals", 2);

        for (const auto& f : doc.at("features")) {
            FeatureSpec spec;
            spec.name = f.at("name").get<std::string>();
            spec.kind = column_kind_from_string(
                f.value("kind", std::string("continuous")));
            spec.unit_phrase = f.value("unit_phrase", std::string());
            spec.template_id = f.at("template_id").get<std::string>();
            if (f.contains("labels"))
                spec.labels = f.at("labels").get<std::vector<std::string>>();
            schema.features_.push_back(std::move(spec));
        }

        const auto& t = doc.at("target");
        schema.target_.name = t.at("name").get<std::string>();
        schema.target_.labels = t.at("labels").get<std::vector<std::string>>();
        schema.target_.template_id = t.at("template_id").get<std::string>();

        for (const auto& [id, tpl] : doc.at("templates").items()) {
            SentenceTemplate st;
            st.pattern = tpl.at("pattern").get<std::string>();
            st.decimals = tpl.value("decimals", schema.default_decimals_);
            schema.templates_.emplace(id, std::move(st));
        }
    } catch (const nlohmann::json::exception& e) {
        throw data_error("BadSchema", e.what());
    }
    schema.validate();
    return schema;
}

Schema Schema::load(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw data_error("SchemaFileNotFound", "cannot open '" + path + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw data_error("BadSchema", e.what());
    }
    return from_json(doc);
}

void Schema::validate() const {
    if (features_.empty())
        throw data_error("BadSchema", "schema has no features");

    std::set<std::string> names;
    for (const auto& f : features_) {
        if (!names.insert(f.name).second)
            throw data_error("BadSchema", "duplicate feature name '" + f.name + "'");
        if (!templates_.count(f.template_id))
            throw data_error("BadSchema",
                             "template_id '" + f.template_id +
                                 "' of feature '" + f.name + "' is not registered");
    }
    if (names.count(target_.name))
        throw data_error("BadSchema",
                         "target name '" + target_.name + "' collides with a feature");
    if (target_.labels.empty())
        throw data_error("BadSchema", "target has no labels");
    if (!templates_.count(target_.template_id))
        throw data_error("BadSchema",
                         "target template_id '" + target_.template_id +
                             "' is not registered");

    for (const auto& [id, tpl] : templates_) {
        auto first = tpl.pattern.find("{value}");
        if (first == std::string::npos ||
            tpl.pattern.find("{value}", first + 1) != std::string::npos)
            throw data_error("BadSchema",
                             "template '" + id +
                                 "' must contain exactly one {value} placeholder");
    }
}

std::size_t Schema::feature_index(const std::string& name) const {
    for (std::size_t j = 0; j < features_.size(); ++j)
        if (features_[j].name == name) return j;
    throw data_error("UnknownFeature", "no feature named '" + name + "'");
}

bool Schema::has_feature(const std::string& name) const {
    return std::any_of(features_.begin(), features_.end(),
                       [&](const FeatureSpec& f) { return f.name == name; });
}

const SentenceTemplate& Schema::sentence_template(
    const std::string& template_id) const {
    auto it = templates_.find(template_id);
    if (it == templates_.end())
        throw data_error("UnknownTemplate",
                         "no template registered as '" + template_id + "'");
    return it->second;
}

std::size_t Schema::label_index(const std::string& label) const {
    for (std::size_t i = 0; i < target_.labels.size(); ++i)
        if (target_.labels[i] == label) return i;
    throw data_error("UnknownLabel", "no target label '" + label + "'");
}

nlohmann::json Schema::to_json() const {
    nlohmann::json doc;
    doc["dataset"] = dataset_name_;
    doc["decimals"] = default_decimals_;
    doc["features"] = nlohmann::json::array();
    for (const auto& f : features_) {
        nlohmann::json jf{{"name", f.name},
                          {"kind", to_string(f.kind)},
                          {"unit_phrase", f.unit_phrase},
                          {"template_id", f.template_id}};
        if (!f.labels.empty()) jf["labels"] = f.labels;
        doc["features"].push_back(std::move(jf));
    }
    doc["target"] = {{"name", target_.name},
                     {"labels", target_.labels},
                     {"template_id", target_.template_id}};
    doc["templates"] = nlohmann::json::object();
    for (const auto& [id, tpl] : templates_)
        doc["templates"][id] = {{"pattern", tpl.pattern},
                                {"decimals", tpl.decimals}};
    return doc;
}

} // namespace crilm
