#include "crilm/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "crilm/error.hpp"
#include "crilm/rng.hpp"

namespace crilm {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

} // namespace

std::size_t round_count(double x) {
    return static_cast<std::size_t>(std::floor(x + 0.5));
}

Dataset::Dataset(Schema schema, std::size_t rows)
    : schema_(std::move(schema)), rows_(rows) {
    const std::size_t d = schema_.feature_count();
    columns_.resize(d);
    for (std::size_t j = 0; j < d; ++j) {
        auto& col = columns_[j];
        col.raw.resize(rows_);
        if (schema_.features()[j].kind == ColumnKind::Continuous)
            col.num.resize(rows_, 0.0);
        else
            col.cat.resize(rows_);
    }
    target_.resize(rows_);
    mask_.assign(rows_ * d, 0);
}

Dataset Dataset::load_csv(const std::string& path, const Schema& schema,
                          const std::string& sentinel) {
    std::ifstream in(path);
    if (!in)
        throw data_error("FileNotFound", "cannot open '" + path + "'");

    std::string line;
    if (!std::getline(in, line))
        throw data_error("EmptyDataset", "'" + path + "' has no header row");

    const auto header = split_fields(line);
    const std::size_t d = schema.feature_count();
    if (header.size() != d + 1)
        throw data_error("MissingColumn",
                         "expected " + std::to_string(d + 1) + " columns, got " +
                             std::to_string(header.size()));
    for (std::size_t j = 0; j < d; ++j)
        if (header[j] != schema.features()[j].name)
            throw data_error("MissingColumn",
                             "header column " + std::to_string(j) + " is '" +
                                 header[j] + "', expected '" +
                                 schema.features()[j].name + "'");
    if (header[d] != schema.target().name)
        throw data_error("MissingColumn",
                         "last header column is '" + header[d] +
                             "', expected target '" + schema.target().name + "'");

    std::vector<std::vector<std::string>> records;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto fields = split_fields(line);
        if (fields.size() != d + 1)
            throw data_error("MissingColumn",
                             "row " + std::to_string(records.size()) + " has " +
                                 std::to_string(fields.size()) + " fields");
        records.push_back(std::move(fields));
    }
    if (records.empty())
        throw data_error("EmptyDataset", "'" + path + "' has no data rows");

    Dataset ds(schema, records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& fields = records[i];
        for (std::size_t j = 0; j < d; ++j) {
            const std::string& tok = fields[j];
            if (tok == sentinel) {
                ds.set_missing(i, j, true);
                continue;
            }
            ds.columns_[j].raw[i] = tok;
            if (schema.features()[j].kind == ColumnKind::Continuous) {
                double v = 0.0;
                auto [ptr, ec] =
                    std::from_chars(tok.data(), tok.data() + tok.size(), v);
                if (ec != std::errc{} || ptr != tok.data() + tok.size() ||
                    !std::isfinite(v))
                    throw data_error("TypeMismatch",
                                     "row " + std::to_string(i) + " col " +
                                         std::to_string(j) + ": '" + tok +
                                         "' is not a finite number");
                ds.columns_[j].num[i] = v;
            } else {
                ds.columns_[j].cat[i] = tok;
            }
        }
        const std::string& label = fields[d];
        if (std::find(schema.target().labels.begin(),
                      schema.target().labels.end(),
                      label) == schema.target().labels.end())
            throw data_error("UnknownLabel",
                             "row " + std::to_string(i) + ": target '" + label +
                                 "' is not a schema label");
        ds.target_[i] = label;
    }
    return ds;
}

void Dataset::check_cell(std::size_t row, std::size_t col) const {
    if (row >= rows_ || col >= feature_count())
        throw data_error("RowOutOfRange",
                         "cell (" + std::to_string(row) + ", " +
                             std::to_string(col) + ") out of range");
    if (missing(row, col))
        throw data_error("MaskedCellAccess",
                         "cell (" + std::to_string(row) + ", " +
                             std::to_string(col) + ") is masked");
}

double Dataset::value(std::size_t row, std::size_t col) const {
    check_cell(row, col);
    if (schema_.features()[col].kind != ColumnKind::Continuous)
        throw data_error("KindMismatch",
                         "feature '" + schema_.features()[col].name +
                             "' is not continuous");
    return columns_[col].num[row];
}

const std::string& Dataset::category(std::size_t row, std::size_t col) const {
    check_cell(row, col);
    if (schema_.features()[col].kind != ColumnKind::Categorical)
        throw data_error("KindMismatch",
                         "feature '" + schema_.features()[col].name +
                             "' is not categorical");
    return columns_[col].cat[row];
}

const std::string& Dataset::raw(std::size_t row, std::size_t col) const {
    check_cell(row, col);
    return columns_[col].raw[row];
}

std::string Dataset::format_value(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

void Dataset::set_value(std::size_t row, std::size_t col, double v) {
    if (schema_.features()[col].kind != ColumnKind::Continuous)
        throw data_error("KindMismatch",
                         "feature '" + schema_.features()[col].name +
                             "' is not continuous");
    columns_[col].num[row] = v;
    columns_[col].raw[row] = format_value(v);
}

void Dataset::set_category(std::size_t row, std::size_t col, std::string token) {
    if (schema_.features()[col].kind != ColumnKind::Categorical)
        throw data_error("KindMismatch",
                         "feature '" + schema_.features()[col].name +
                             "' is not categorical");
    columns_[col].raw[row] = token;
    columns_[col].cat[row] = std::move(token);
}

void Dataset::set_mask(std::vector<std::uint8_t> mask) {
    if (mask.size() != mask_.size())
        throw data_error("MaskShape", "mask size does not match dataset shape");
    mask_ = std::move(mask);
}

void Dataset::clear_mask() { std::fill(mask_.begin(), mask_.end(), 0); }

std::size_t Dataset::missing_count() const {
    std::size_t c = 0;
    for (auto m : mask_) c += m;
    return c;
}

std::size_t Dataset::missing_count(std::size_t col) const {
    std::size_t c = 0;
    const std::size_t d = feature_count();
    for (std::size_t i = 0; i < rows_; ++i) c += mask_[i * d + col];
    return c;
}

std::vector<double> Dataset::observed_values(std::size_t col) const {
    std::vector<double> out;
    out.reserve(rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        if (!missing(i, col)) out.push_back(columns_[col].num[i]);
    return out;
}

std::vector<std::size_t> Dataset::observed_rows(std::size_t col) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < rows_; ++i)
        if (!missing(i, col)) out.push_back(i);
    return out;
}

Dataset Dataset::select_rows(const std::vector<std::size_t>& rows) const {
    Dataset out(schema_, rows.size());
    const std::size_t d = feature_count();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::size_t src = rows[i];
        for (std::size_t j = 0; j < d; ++j) {
            out.columns_[j].raw[i] = columns_[j].raw[src];
            if (!columns_[j].num.empty())
                out.columns_[j].num[i] = columns_[j].num[src];
            if (!columns_[j].cat.empty())
                out.columns_[j].cat[i] = columns_[j].cat[src];
            out.mask_[i * d + j] = mask_[src * d + j];
        }
        out.target_[i] = target_[src];
    }
    return out;
}

void Dataset::write_csv(const std::string& path,
                        const std::string& sentinel) const {
    std::ofstream out(path);
    if (!out)
        throw data_error("IoError", "cannot write '" + path + "'");
    const std::size_t d = feature_count();
    for (std::size_t j = 0; j < d; ++j)
        out << schema_.features()[j].name << ',';
    out << schema_.target().name << '\n';
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            if (missing(i, j))
                out << sentinel;
            else
                out << columns_[j].raw[i];
            out << ',';
        }
        out << target_[i] << '\n';
    }
    if (!out)
        throw data_error("IoError", "failed writing '" + path + "'");
}

std::pair<Dataset, Dataset> split_eval(const Dataset& ds, double fraction,
                                       std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction < 1.0))
        throw data_error("DegenerateSplit", "fraction must be in (0, 1)");
    const std::size_t n = ds.rows();
    if (n < 2)
        throw data_error("DegenerateSplit", "need at least 2 rows to split");

    const std::size_t eval_n = round_count(fraction * static_cast<double>(n));
    if (eval_n == 0 || eval_n >= n)
        throw data_error("DegenerateSplit",
                         "split of n=" + std::to_string(n) + " at fraction " +
                             std::to_string(fraction) + " leaves a side empty");

    auto gen = rng::engine(rng::derive(seed, "split_eval"));
    auto eval_rows = rng::sample_without_replacement(n, eval_n, gen);
    std::vector<std::uint8_t> in_eval(n, 0);
    for (auto r : eval_rows) in_eval[r] = 1;

    std::vector<std::size_t> train_idx, eval_idx;
    for (std::size_t i = 0; i < n; ++i)
        (in_eval[i] ? eval_idx : train_idx).push_back(i);
    return {ds.select_rows(train_idx), ds.select_rows(eval_idx)};
}

} // namespace crilm
