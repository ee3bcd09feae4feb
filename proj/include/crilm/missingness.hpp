#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "crilm/dataset.hpp"

namespace crilm {

enum class Mechanism { Mcar, Mar, Mnar };

std::string to_string(Mechanism m);
Mechanism mechanism_from_string(const std::string& s);

struct MissingnessSpec {
    Mechanism mechanism = Mechanism::Mcar;
    double rate = 0.30;            // MCAR: fraction removed per feature
    std::string independent_col;   // MAR: empty = first feature
    double subset_quantile = 0.30; // MAR: subset threshold quantile
    double removal_rate = 0.60;    // MAR: fraction removed within the subset
    double quantile = 0.30;        // MNAR: self-masking threshold quantile
    std::uint64_t seed = 0;

    void validate(const Schema& schema) const;
};

struct MissingnessReport {
    std::string mechanism;
    std::uint64_t seed = 0;
    std::vector<std::size_t> per_feature_missing; // aligned with schema order
    std::vector<std::string> feature_names;
    std::vector<bool> fully_missing; // flags degenerate features
    std::size_t total_missing = 0;
    double overall_fraction = 0.0;

    nlohmann::json to_json() const;
};

// For each feature independently, masks exactly round(rate * n) cells chosen
// uniformly without replacement from a per-feature substream of `seed`.
// Refuses datasets that already contain missing cells unless
// allow_compounding is set.
Dataset inject_mcar(const Dataset& ds, double rate, std::uint64_t seed,
                    bool allow_compounding = false);

// Masks round(removal_rate * |S|) cells per dependent feature, where S is
// the set of rows whose independent value lies at or below its
// subset_quantile quantile. The independent column is never masked.
Dataset inject_mar(const Dataset& ds, const MissingnessSpec& spec,
                   bool allow_compounding = false);

// Self-masking: cell (i, j) is masked iff its value <= the column's
// `quantile` threshold. Deterministic; no seed involved.
Dataset inject_mnar(const Dataset& ds, double quantile,
                    bool allow_compounding = false);

Dataset inject(const Dataset& ds, const MissingnessSpec& spec,
               bool allow_compounding = false);

MissingnessReport audit(const Dataset& ds,
                        const std::string& mechanism = "unknown",
                        std::uint64_t seed = 0);

} // namespace crilm
