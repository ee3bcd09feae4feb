#pragma once

#include <optional>
#include <string>
#include <vector>

#include "crilm/catalog.hpp"
#include "crilm/dataset.hpp"

namespace crilm {

// How missing cells appear in the rendered prose. FeatureSpecific replaces
// the whole feature sentence with the catalog's standalone descriptor;
// Generic slots a fixed token into the feature's sentence template.
struct DescriptorMode {
    enum class Kind { FeatureSpecific, Generic } kind = Kind::Generic;
    DescriptorCatalog catalog;
    std::string token = "NaN";

    static DescriptorMode specific(DescriptorCatalog cat) {
        DescriptorMode m;
        m.kind = Kind::FeatureSpecific;
        m.catalog = std::move(cat);
        return m;
    }
    static DescriptorMode generic(std::string tok);
};

// One data instance as ordered natural-language sentences, schema order,
// with the target sentence appended when rendered with a target.
struct ContextualRecord {
    std::vector<std::string> sentences; // d feature sentences (+1 target)
    bool has_target = false;
    std::size_t row_index = 0;
    std::vector<bool> missing_flags; // per feature

    const std::string& target_sentence() const { return sentences.back(); }
    std::string to_line() const; // single-space join
};

std::string render_value(double v, int decimals);
std::string render_with_template(const SentenceTemplate& tpl,
                                 const std::string& token);

ContextualRecord render_record(const Dataset& ds, std::size_t row,
                               const DescriptorMode& mode, bool with_target);

std::vector<ContextualRecord> render_dataset(const Dataset& ds,
                                             const DescriptorMode& mode,
                                             bool with_target);

struct ParsedRecord {
    // one entry per feature; nullopt = missing
    std::vector<std::optional<std::string>> tokens;
    std::optional<std::string> target;
};

// Inverse of render_record under the same schema and mode. Observed values
// come back exactly at the template's precision; throws UnparseableSentence
// when a sentence matches neither its template nor its descriptor.
ParsedRecord parse_back(const ContextualRecord& record, const Schema& schema,
                        const DescriptorMode& mode);

} // namespace crilm
