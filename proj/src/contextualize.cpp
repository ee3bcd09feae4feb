#include "crilm/contextualize.hpp"

#include <cstdio>

#include "crilm/error.hpp"

namespace crilm {

DescriptorMode DescriptorMode::generic(std::string tok) {
    if (tok.empty())
        throw usage_error("EmptyGenericToken",
                          "generic descriptor token must be non-empty");
    DescriptorMode m;
    m.kind = Kind::Generic;
    m.token = std::move(tok);
    return m;
}

std::string ContextualRecord::to_line() const {
    std::string line;
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        if (i) line += ' ';
        line += sentences[i];
    }
    return line;
}

std::string render_value(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

std::string render_with_template(const SentenceTemplate& tpl,
                                 const std::string& token) {
    const auto pos = tpl.pattern.find("{value}");
    std::string out = tpl.pattern;
    out.replace(pos, 7, token);
    return out;
}

namespace {

std::string observed_token(const Dataset& ds, std::size_t row, std::size_t col,
                           const SentenceTemplate& tpl) {
    const auto& fs = ds.schema().features()[col];
    return fs.kind == ColumnKind::Continuous
               ? render_value(ds.value(row, col), tpl.decimals)
               : ds.category(row, col);
}

} // namespace

ContextualRecord render_record(const Dataset& ds, std::size_t row,
                               const DescriptorMode& mode, bool with_target) {
    if (row >= ds.rows())
        throw data_error("RowOutOfRange",
                         "row " + std::to_string(row) + " out of range");

    const Schema& schema = ds.schema();
    ContextualRecord record;
    record.row_index = row;
    record.has_target = with_target;

    for (std::size_t j = 0; j < ds.feature_count(); ++j) {
        const auto& fs = schema.features()[j];
        const auto& tpl = schema.sentence_template(fs.template_id);
        const bool missing = ds.missing(row, j);
        record.missing_flags.push_back(missing);
        if (!missing) {
            record.sentences.push_back(
                render_with_template(tpl, observed_token(ds, row, j, tpl)));
        } else if (mode.kind == DescriptorMode::Kind::FeatureSpecific) {
            if (!mode.catalog.covers(fs.name))
                throw data_error("CatalogGap",
                                 "no descriptor for feature '" + fs.name + "'");
            record.sentences.push_back(mode.catalog.descriptor(fs.name));
        } else {
            record.sentences.push_back(render_with_template(tpl, mode.token));
        }
    }

    if (with_target) {
        const auto& tpl = schema.sentence_template(schema.target().template_id);
        record.sentences.push_back(
            render_with_template(tpl, ds.target(row)));
    }
    return record;
}

std::vector<ContextualRecord> render_dataset(const Dataset& ds,
                                             const DescriptorMode& mode,
                                             bool with_target) {
    std::vector<ContextualRecord> records;
    records.reserve(ds.rows());
    for (std::size_t i = 0; i < ds.rows(); ++i)
        records.push_back(render_record(ds, i, mode, with_target));
    return records;
}

namespace {

// Extracts the {value} token if `sentence` matches the template's fixed
// prose; nullopt otherwise.
std::optional<std::string> match_template(const SentenceTemplate& tpl,
                                          const std::string& sentence) {
    const auto pos = tpl.pattern.find("{value}");
    const std::string prefix = tpl.pattern.substr(0, pos);
    const std::string suffix = tpl.pattern.substr(pos + 7);
    if (sentence.size() < prefix.size() + suffix.size()) return std::nullopt;
    if (sentence.compare(0, prefix.size(), prefix) != 0) return std::nullopt;
    if (sentence.compare(sentence.size() - suffix.size(), suffix.size(),
                         suffix) != 0)
        return std::nullopt;
    return sentence.substr(prefix.size(),
                           sentence.size() - prefix.size() - suffix.size());
}

} // namespace

ParsedRecord parse_back(const ContextualRecord& record, const Schema& schema,
                        const DescriptorMode& mode) {
    const std::size_t d = schema.feature_count();
    const std::size_t expected = d + (record.has_target ? 1 : 0);
    if (record.sentences.size() != expected)
        throw data_error("UnparseableSentence",
                         "record has " + std::to_string(record.sentences.size()) +
                             " sentences, expected " + std::to_string(expected));

    ParsedRecord out;
    for (std::size_t j = 0; j < d; ++j) {
        const auto& fs = schema.features()[j];
        const auto& sentence = record.sentences[j];

        if (mode.kind == DescriptorMode::Kind::FeatureSpecific &&
            mode.catalog.covers(fs.name) &&
            sentence == mode.catalog.descriptor(fs.name)) {
            out.tokens.emplace_back(std::nullopt);
            continue;
        }
        const auto& tpl = schema.sentence_template(fs.template_id);
        auto token = match_template(tpl, sentence);
        if (!token)
            throw data_error("UnparseableSentence",
                             "sentence " + std::to_string(j) +
                                 " does not match its template: '" + sentence +
                                 "'");
        if (mode.kind == DescriptorMode::Kind::Generic && *token == mode.token)
            out.tokens.emplace_back(std::nullopt);
        else
            out.tokens.emplace_back(std::move(*token));
    }

    if (record.has_target) {
        const auto& tpl = schema.sentence_template(schema.target().template_id);
        auto token = match_template(tpl, record.sentences[d]);
        if (!token)
            throw data_error("UnparseableSentence",
                             "target sentence does not match its template");
        out.target = std::move(*token);
    }
    return out;
}

} // namespace crilm
