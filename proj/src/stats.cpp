#include "crilm/stats.hpp"

#include <algorithm>
#include <cmath>

#include "crilm/error.hpp"

namespace crilm {

double quantile(std::vector<double> values, double q) {
    if (values.empty())
        throw data_error("EmptyInput", "quantile of an empty list");
    if (q < 0.0 || q > 1.0)
        throw data_error("BadQuantile", "q must be in [0, 1]");
    std::sort(values.begin(), values.end());
    const double h = static_cast<double>(values.size() - 1) * q;
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = h - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

ContinuousStats continuous_stats(const std::vector<double>& observed) {
    ContinuousStats s;
    s.observed = observed.size();
    if (observed.empty()) return s;
    double sum = 0.0;
    s.min = s.max = observed.front();
    for (double v : observed) {
        sum += v;
        s.min = std::min(s.min, v);
        s.max = std::max(s.max, v);
    }
    s.mean = sum / static_cast<double>(observed.size());
    if (observed.size() > 1) {
        double ss = 0.0;
        for (double v : observed) ss += (v - s.mean) * (v - s.mean);
        s.std = std::sqrt(ss / static_cast<double>(observed.size() - 1));
    }
    s.q30 = quantile(observed, 0.30);
    return s;
}

SummaryStats summarize(const Dataset& ds) {
    SummaryStats out;
    const auto& schema = ds.schema();
    for (std::size_t j = 0; j < ds.feature_count(); ++j) {
        FeatureStats fs;
        fs.kind = schema.features()[j].kind;
        if (fs.kind == ColumnKind::Continuous) {
            auto observed = ds.observed_values(j);
            if (observed.empty())
                throw data_error("FullyMissingFeature",
                                 "feature '" + schema.features()[j].name +
                                     "' has no observed cell");
            fs.continuous = continuous_stats(observed);
        } else {
            auto& cs = fs.categorical;
            // seed counts with the configured label order for tie-breaking
            for (const auto& label : schema.features()[j].labels)
                cs.counts.push_back({label, 0});
            for (std::size_t i = 0; i < ds.rows(); ++i) {
                if (ds.missing(i, j)) continue;
                const auto& tok = ds.category(i, j);
                auto it = std::find_if(cs.counts.begin(), cs.counts.end(),
                                       [&](const CategoryCount& c) {
                                           return c.token == tok;
                                       });
                if (it == cs.counts.end())
                    cs.counts.push_back({tok, 1});
                else
                    ++it->count;
                ++cs.observed;
            }
            if (cs.observed == 0)
                throw data_error("FullyMissingFeature",
                                 "feature '" + schema.features()[j].name +
                                     "' has no observed cell");
            std::size_t best = 0;
            for (std::size_t i = 1; i < cs.counts.size(); ++i)
                if (cs.counts[i].count > cs.counts[best].count) best = i;
            cs.mode = cs.counts[best].token;
        }
        out.features.push_back(std::move(fs));
    }
    return out;
}

} // namespace crilm
