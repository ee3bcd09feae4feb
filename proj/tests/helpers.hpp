#pragma once

// Shared builders and independent oracles for the test suites. Oracles are
// deliberately written as plain brute force so they do not share code paths
// with the library implementations they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "crilm/dataset.hpp"
#include "crilm/schema.hpp"

namespace testutil {

inline crilm::Schema make_schema(std::size_t d, std::size_t labels = 3) {
    nlohmann::json doc;
    doc["dataset"] = "synthetic";
    doc["decimals"] = 2;
    doc["features"] = nlohmann::json::array();
    doc["templates"] = nlohmann::json::object();
    for (std::size_t j = 0; j < d; ++j) {
        const std::string name = "f" + std::to_string(j + 1);
        doc["features"].push_back({{"name", name},
                                   {"kind", "continuous"},
                                   {"unit_phrase", ""},
                                   {"template_id", name}});
        doc["templates"][name] = {
            {"pattern", "The value of " + name + " is {value}."}};
    }
    std::vector<std::string> label_names;
    for (std::size_t c = 0; c < labels; ++c)
        label_names.push_back(std::string(1, static_cast<char>('a' + c)));
    doc["target"] = {{"name", "label"},
                     {"labels", label_names},
                     {"template_id", "target"}};
    doc["templates"]["target"] = {{"pattern", "The label is {value}."}};
    return crilm::Schema::from_json(doc);
}

inline crilm::Dataset make_dataset(
    const std::vector<std::vector<double>>& rows,
    const std::vector<std::string>& targets = {}) {
    const std::size_t d = rows.at(0).size();
    crilm::Dataset ds(make_schema(d), rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < d; ++j) ds.set_value(i, j, rows[i][j]);
        ds.set_target(i, targets.empty() ? "a" : targets[i]);
    }
    return ds;
}

// Independent order-statistic quantile: value at fractional rank (n-1)q.
inline double oracle_quantile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const double rank = q * static_cast<double>(v.size() - 1);
    const auto lower = static_cast<std::size_t>(rank);
    if (lower + 1 >= v.size()) return v.back();
    const double w = rank - static_cast<double>(lower);
    // interpolate in the lower + w*(upper - lower) form so tied order
    // statistics reproduce the shared value to the last bit
    return v[lower] + w * (v[lower + 1] - v[lower]);
}

inline double oracle_mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

inline double oracle_std(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = oracle_mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

// Two-sample Kolmogorov-Smirnov p-value (asymptotic).
inline double ks_two_sample_p(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    double d = 0.0;
    std::size_t ia = 0, ib = 0;
    while (ia < a.size() && ib < b.size()) {
        const double x = std::min(a[ia], b[ib]);
        while (ia < a.size() && a[ia] <= x) ++ia;
        while (ib < b.size() && b[ib] <= x) ++ib;
        d = std::max(d, std::abs(static_cast<double>(ia) / na -
                                 static_cast<double>(ib) / nb));
    }
    const double en = std::sqrt(na * nb / (na + nb));
    const double lambda = (en + 0.12 + 0.11 / en) * d;
    double p = 0.0;
    for (int k = 1; k <= 100; ++k)
        p += 2.0 * std::pow(-1.0, k - 1) * std::exp(-2.0 * k * k * lambda * lambda);
    return std::clamp(p, 0.0, 1.0);
}

inline double gaussian(std::mt19937_64& gen) {
    // Box-Muller on raw 53-bit uniforms; keeps tests engine-portable.
    const double u1 =
        (static_cast<double>(gen() >> 11) + 0.5) * 0x1.0p-53;
    const double u2 = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.141592653589793 * u2);
}

// n x 2 sample with correlation rho.
inline std::vector<std::vector<double>> correlated_gaussian(
    std::size_t n, double rho, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::vector<std::vector<double>> rows;
    rows.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = gaussian(gen);
        const double y = rho * x + std::sqrt(1.0 - rho * rho) * gaussian(gen);
        rows.push_back({x, y});
    }
    return rows;
}

} // namespace testutil
