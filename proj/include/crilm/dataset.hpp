#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "crilm/schema.hpp"

namespace crilm {

// Column-typed table with a boolean missingness mask. Values hidden by the
// mask are unreadable through value()/category(); the mask is the single
// source of truth for the observed/missing partition. Target labels are
// never masked.
class Dataset {
public:
    Dataset(Schema schema, std::size_t rows);

    // CSV with a header row matching schema feature order plus the target
    // column. Fields equal to `sentinel` enter as masked cells.
    static Dataset load_csv(const std::string& path, const Schema& schema,
                            const std::string& sentinel = "");

    const Schema& schema() const { return schema_; }
    std::size_t rows() const { return rows_; }
    std::size_t feature_count() const { return schema_.feature_count(); }

    bool missing(std::size_t row, std::size_t col) const {
        return mask_[row * feature_count() + col] != 0;
    }
    void set_missing(std::size_t row, std::size_t col, bool m) {
        mask_[row * feature_count() + col] = m ? 1 : 0;
    }

    // Observed-cell accessors; throw MaskedCellAccess when the mask is set.
    double value(std::size_t row, std::size_t col) const;
    const std::string& category(std::size_t row, std::size_t col) const;
    const std::string& raw(std::size_t row, std::size_t col) const;

    void set_value(std::size_t row, std::size_t col, double v);
    void set_category(std::size_t row, std::size_t col, std::string token);

    const std::string& target(std::size_t row) const { return target_[row]; }
    void set_target(std::size_t row, std::string label) {
        target_[row] = std::move(label);
    }
    std::size_t target_index(std::size_t row) const {
        return schema_.target().labels.empty() ? 0
                                               : schema_.label_index(target_[row]);
    }

    const std::vector<std::uint8_t>& mask() const { return mask_; }
    void set_mask(std::vector<std::uint8_t> mask);
    void clear_mask();

    std::size_t missing_count() const;
    std::size_t missing_count(std::size_t col) const;
    bool any_missing() const { return missing_count() > 0; }

    // Observed values of one continuous column, in row order.
    std::vector<double> observed_values(std::size_t col) const;
    std::vector<std::size_t> observed_rows(std::size_t col) const;

    Dataset select_rows(const std::vector<std::size_t>& rows) const;

    // Observed cells keep their original tokens byte-for-byte; masked cells
    // emit the sentinel.
    void write_csv(const std::string& path,
                   const std::string& sentinel = "") const;

    static std::string format_value(double v);

private:
    struct Column {
        std::vector<double> num;      // continuous columns
        std::vector<std::string> cat; // categorical columns
        std::vector<std::string> raw; // original / formatted tokens
    };

    void check_cell(std::size_t row, std::size_t col) const;

    Schema schema_;
    std::size_t rows_ = 0;
    std::vector<Column> columns_;
    std::vector<std::string> target_;
    std::vector<std::uint8_t> mask_; // row-major, n x d
};

// Disjoint (train, eval) partition with |eval| = round(fraction * n),
// deterministic in the seed. Throws DegenerateSplit if either side is empty.
std::pair<Dataset, Dataset> split_eval(const Dataset& ds, double fraction,
                                       std::uint64_t seed);

// round-half-up of x, for fractional count budgets
std::size_t round_count(double x);

} // namespace crilm
