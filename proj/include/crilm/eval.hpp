#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "crilm/imputers.hpp"
#include "crilm/missingness.hpp"

namespace crilm {

struct ExperimentSpec {
    MissingnessSpec mechanism;
    std::vector<ImputerKind> imputers;
    double eval_fraction = 0.20;
    int repetitions = 5;
    int proxy_k = 5;
    std::uint64_t master_seed = 0;

    void validate() const;
    std::uint64_t repetition_seed(int repetition) const;
};

struct RecoveryScore {
    double rmse = 0.0;          // z-standardized, over masked continuous cells
    double cell_accuracy = 0.0; // exact-match rate over masked categorical cells
    std::size_t continuous_cells = 0;
    std::size_t categorical_cells = 0;
};

struct MetricRow {
    std::string imputer;
    int repetition = 0;
    RecoveryScore recovery;
    double proxy_accuracy = 0.0;
    bool ok = true;
    std::string error; // set when ok is false; never silently dropped
};

struct MetricAggregate {
    std::string imputer;
    double rmse_mean = 0.0, rmse_std = 0.0;
    double cell_accuracy_mean = 0.0, cell_accuracy_std = 0.0;
    double proxy_mean = 0.0, proxy_std = 0.0;
    int repetitions = 0;
};

struct MetricReport {
    std::string mechanism;
    std::uint64_t master_seed = 0;
    std::vector<MetricRow> rows;
    std::vector<MetricAggregate> aggregates;
};

// Hide known cells per the mechanism, impute, and score recovery against
// ground truth. ds_complete must have no missing cells.
RecoveryScore mask_and_recover(const Dataset& ds_complete,
                               const MissingnessSpec& mechanism,
                               const ImputerKind& imputer);

RecoveryScore score_recovery(const Dataset& truth, const Dataset& imputed,
                             const std::vector<std::uint8_t>& mask,
                             const Dataset& scale_source);

// k-NN majority-vote classifier over z-standardized features, stats fitted
// on train. Ties break toward the smallest class index in schema label
// order; k is clamped to the number of train rows.
double proxy_classify(const ImputedDataset& train, const ImputedDataset& eval,
                      int k);

// The 5-repetition protocol: per repetition, split, inject train and eval,
// impute (eval side with train-fitted state), score recovery and the proxy.
// Fully deterministic in the master seed.
MetricReport run_grid(const Dataset& ds_complete, const ExperimentSpec& spec);

enum class ReportFormat { Markdown, Csv };

// Per-imputer mean +/- std plus a gain column (proxy accuracy, percentage
// points) against the first imputer as baseline.
std::string render_report(const MetricReport& report, ReportFormat format);

} // namespace crilm
