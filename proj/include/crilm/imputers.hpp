#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "crilm/dataset.hpp"

namespace crilm {

struct ImputerKind {
    enum class Method { Mean, Knn, Chained, External } method = Method::Mean;
    int k = 5;               // knn
    int max_iter = 10;       // chained
    double tol = 1e-4;       // chained
    std::string name() const;
    std::string external_csv; // external: pre-imputed table to splice in

    static ImputerKind mean() { return {}; }
    static ImputerKind knn(int k);
    static ImputerKind chained(int max_iter = 10, double tol = 1e-4);
    static ImputerKind external(std::string csv_path);
};

struct ImputedDataset {
    Dataset data;                            // mask all-false
    std::vector<std::uint8_t> original_mask; // provenance
    std::string imputer;
    bool converged = true; // chained equations only
};

// Continuous missing cells get the observed column mean; categorical cells
// the observed column mode.
ImputedDataset impute_mean(const Dataset& ds);

// Donor distances are computed over dimensions observed in both rows after
// z-scoring with observed column stats; the squared sum is rescaled by
// d / |co-observed dims|. The k nearest donors that observe the missing
// feature vote (continuous: mean, categorical: majority, ties by smallest
// donor index). A querying row that shares no observed dimension with any
// candidate falls back to the column mean/mode of the donor pool.
ImputedDataset impute_knn(const Dataset& ds, int k);

// Single-chain chained-equations imputation: mean-initialize, then cycle
// features in schema order fitting a ridge-damped least-squares regression
// of each feature on the others and re-predicting its originally missing
// cells, until the largest imputed-cell change drops below tol or max_iter
// sweeps elapse. Non-convergence is reported via the converged flag.
ImputedDataset impute_chained(const Dataset& ds, int max_iter = 10,
                              double tol = 1e-4);

ImputedDataset impute(const Dataset& ds, const ImputerKind& kind);

// Same imputers, with all fitted state (means, donors, regression models,
// standardization stats) taken from `ref` so evaluation-side imputation
// never sees evaluation data statistics.
ImputedDataset impute_with_reference(const Dataset& ds, const Dataset& ref,
                                     const ImputerKind& kind);

// Accuracy of a downstream proxy given (imputed train, imputed eval).
using ProxyFn =
    std::function<double(const ImputedDataset&, const ImputedDataset&)>;

// Picks the grid k with the best proxy accuracy on a held-out split of
// `train` (ties go to the smaller k).
int tune_k(const Dataset& train, const std::vector<int>& grid,
           const ProxyFn& proxy, std::uint64_t seed,
           double holdout_fraction = 0.20);

} // namespace crilm
