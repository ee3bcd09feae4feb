#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace crilm {

enum class ColumnKind { Continuous, Categorical };

std::string to_string(ColumnKind kind);
ColumnKind column_kind_from_string(const std::string& s);

// One {value} placeholder embedded in fixed prose.
struct SentenceTemplate {
    std::string pattern;
    int decimals = 2; // continuous value formatting; categorical is verbatim
};

struct FeatureSpec {
    std::string name;
    ColumnKind kind = ColumnKind::Continuous;
    std::string unit_phrase;
    std::string template_id;
    std::vector<std::string> labels; // categorical features; defines order
};

struct TargetSpec {
    std::string name;
    std::vector<std::string> labels;
    std::string template_id;
};

class Schema {
public:
    static Schema from_json(const nlohmann::json& doc);
    static Schema load(const std::string& path);

    const std::string& dataset_name() const { return dataset_name_; }
    const std::vector<FeatureSpec>& features() const { return features_; }
    const TargetSpec& target() const { return target_; }
    std::size_t feature_count() const { return features_.size(); }

    // Throws UnknownFeature.
    std::size_t feature_index(const std::string& name) const;
    bool has_feature(const std::string& name) const;

    // Throws UnknownTemplate.
    const SentenceTemplate& sentence_template(const std::string& template_id) const;

    std::size_t label_index(const std::string& label) const;

    nlohmann::json to_json() const;

private:
    void validate() const;

    std::string dataset_name_;
    std::vector<FeatureSpec> features_;
    TargetSpec target_;
    std::map<std::string, SentenceTemplate> templates_;
    int default_decimals_ = 2;
};

} // namespace crilm
