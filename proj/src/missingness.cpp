#include "crilm/missingness.hpp"

#include <algorithm>

#include "crilm/error.hpp"
#include "crilm/rng.hpp"
#include "crilm/stats.hpp"

namespace crilm {

std::string to_string(Mechanism m) {
    switch (m) {
        case Mechanism::Mcar: return "mcar";
        case Mechanism::Mar: return "mar";
        case Mechanism::Mnar: return "mnar";
    }
    return "mcar";
}

Mechanism mechanism_from_string(const std::string& s) {
    if (s == "mcar" || s == "MCAR") return Mechanism::Mcar;
    if (s == "mar" || s == "MAR") return Mechanism::Mar;
    if (s == "mnar" || s == "MNAR") return Mechanism::Mnar;
    throw usage_error("BadMechanism", "unknown mechanism '" + s + "'");
}

void MissingnessSpec::validate(const Schema& schema) const {
    auto check_fraction = [](double f, const char* name) {
        if (!(f >= 0.0 && f <= 1.0))
            throw data_error("BadFraction",
                             std::string(name) + " must be in [0, 1]");
    };
    check_fraction(rate, "rate");
    check_fraction(subset_quantile, "subset_quantile");
    check_fraction(removal_rate, "removal_rate");
    check_fraction(quantile, "quantile");
    if (mechanism == Mechanism::Mar && !independent_col.empty()) {
        std::size_t j = schema.feature_index(independent_col);
        if (schema.features()[j].kind != ColumnKind::Continuous)
            throw data_error("IndependentColNotContinuous",
                             "MAR independent column '" + independent_col +
                                 "' must be continuous");
    }
}

namespace {

void refuse_compounding(const Dataset& ds, bool allow) {
    if (!allow && ds.any_missing())
        throw data_error("CompoundingRefused",
                         "dataset already contains missing cells; pass the "
                         "compounding opt-in to stack mechanisms");
}

} // namespace

Dataset inject_mcar(const Dataset& ds, double rate, std::uint64_t seed,
                    bool allow_compounding) {
    if (!(rate >= 0.0 && rate <= 1.0))
        throw data_error("BadFraction", "rate must be in [0, 1]");
    refuse_compounding(ds, allow_compounding);

    Dataset out = ds;
    const std::size_t n = ds.rows();
    const std::size_t m = round_count(rate * static_cast<double>(n));
    for (std::size_t j = 0; j < ds.feature_count(); ++j) {
        auto gen = rng::engine(rng::derive(seed, "mcar", j));
        for (auto i : rng::sample_without_replacement(n, m, gen))
            out.set_missing(i, j, true);
    }
    return out;
}

Dataset inject_mar(const Dataset& ds, const MissingnessSpec& spec,
                   bool allow_compounding) {
    spec.validate(ds.schema());
    refuse_compounding(ds, allow_compounding);

    const std::size_t indep =
        spec.independent_col.empty() ? 0
                                     : ds.schema().feature_index(spec.independent_col);
    const auto& indep_spec = ds.schema().features()[indep];
    if (indep_spec.kind != ColumnKind::Continuous)
        throw data_error("IndependentColNotContinuous",
                         "MAR independent column '" + indep_spec.name +
                             "' must be continuous");
    if (ds.missing_count(indep) > 0)
        throw data_error("IndependentColMissingValues",
                         "MAR independent column '" + indep_spec.name +
                             "' has missing cells");

    const auto indep_values = ds.observed_values(indep);
    const double threshold = quantile(indep_values, spec.subset_quantile);
    std::vector<std::size_t> subset;
    for (std::size_t i = 0; i < ds.rows(); ++i)
        if (ds.value(i, indep) <= threshold) subset.push_back(i);
    if (subset.empty())
        throw data_error("EmptySubset", "no rows fall in the quantile subset");

    Dataset out = ds;
    const std::size_t m =
        round_count(spec.removal_rate * static_cast<double>(subset.size()));
    for (std::size_t j = 0; j < ds.feature_count(); ++j) {
        if (j == indep) continue;
        auto gen = rng::engine(rng::derive(spec.seed, "mar", j));
        for (auto pos : rng::sample_without_replacement(subset.size(), m, gen))
            out.set_missing(subset[pos], j, true);
    }
    return out;
}

Dataset inject_mnar(const Dataset& ds, double q, bool allow_compounding) {
    if (!(q >= 0.0 && q <= 1.0))
        throw data_error("BadFraction", "quantile must be in [0, 1]");
    refuse_compounding(ds, allow_compounding);

    Dataset out = ds;
    for (std::size_t j = 0; j < ds.feature_count(); ++j) {
        const auto& fs = ds.schema().features()[j];
        if (fs.kind != ColumnKind::Continuous)
            throw data_error("UnorderedCategorical",
                             "MNAR needs an ordered column; feature '" +
                                 fs.name + "' is categorical");
        const auto observed = ds.observed_values(j);
        if (observed.empty()) continue;
        const double threshold = quantile(observed, q);
        for (std::size_t i = 0; i < ds.rows(); ++i)
            if (!ds.missing(i, j) && ds.value(i, j) <= threshold)
                out.set_missing(i, j, true);
    }
    return out;
}

Dataset inject(const Dataset& ds, const MissingnessSpec& spec,
               bool allow_compounding) {
    switch (spec.mechanism) {
        case Mechanism::Mcar:
            return inject_mcar(ds, spec.rate, spec.seed, allow_compounding);
        case Mechanism::Mar:
            return inject_mar(ds, spec, allow_compounding);
        case Mechanism::Mnar:
            return inject_mnar(ds, spec.quantile, allow_compounding);
    }
    throw data_error("BadMechanism", "unreachable");
}

MissingnessReport audit(const Dataset& ds, const std::string& mechanism,
                        std::uint64_t seed) {
    MissingnessReport report;
    report.mechanism = mechanism;
    report.seed = seed;
    for (std::size_t j = 0; j < ds.feature_count(); ++j) {
        const std::size_t c = ds.missing_count(j);
        report.feature_names.push_back(ds.schema().features()[j].name);
        report.per_feature_missing.push_back(c);
        report.fully_missing.push_back(c == ds.rows());
        report.total_missing += c;
    }
    report.overall_fraction =
        static_cast<double>(report.total_missing) /
        static_cast<double>(ds.rows() * ds.feature_count());
    return report;
}

nlohmann::json MissingnessReport::to_json() const {
    nlohmann::json per_feature = nlohmann::json::object();
    for (std::size_t j = 0; j < feature_names.size(); ++j)
        per_feature[feature_names[j]] = {
            {"missing", per_feature_missing[j]},
            {"fully_missing", static_cast<bool>(fully_missing[j])}};
    return {{"mechanism", mechanism},
            {"seed", seed},
            {"per_feature", per_feature},
            {"total_missing", total_missing},
            {"overall_fraction", overall_fraction}};
}

} // namespace crilm
