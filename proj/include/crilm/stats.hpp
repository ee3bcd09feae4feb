#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "crilm/dataset.hpp"

namespace crilm {

// q-quantile with linear interpolation between closest order statistics,
// h = (n - 1) * q. Throws EmptyInput.
double quantile(std::vector<double> values, double q);

struct ContinuousStats {
    double mean = 0.0;
    double std = 0.0; // sample std (n - 1 denominator); 0 for a single value
    double min = 0.0;
    double max = 0.0;
    double q30 = 0.0;
    std::size_t observed = 0;
};

struct CategoryCount {
    std::string token;
    std::size_t count = 0;
};

struct CategoricalStats {
    std::string mode;
    std::vector<CategoryCount> counts; // first-configured / first-seen order
    std::size_t observed = 0;
};

struct FeatureStats {
    ColumnKind kind = ColumnKind::Continuous;
    ContinuousStats continuous;
    CategoricalStats categorical;
};

struct SummaryStats {
    std::vector<FeatureStats> features;
};

// Statistics over observed cells only. Throws FullyMissingFeature when a
// feature has no observed cell.
SummaryStats summarize(const Dataset& ds);

ContinuousStats continuous_stats(const std::vector<double>& observed);

} // namespace crilm
