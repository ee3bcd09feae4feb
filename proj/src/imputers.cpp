#include "crilm/imputers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "crilm/error.hpp"
#include "crilm/rng.hpp"
#include "crilm/stats.hpp"

namespace crilm {

ImputerKind ImputerKind::knn(int k) {
    ImputerKind kind;
    kind.method = Method::Knn;
    kind.k = k;
    return kind;
}

ImputerKind ImputerKind::chained(int max_iter, double tol) {
    ImputerKind kind;
    kind.method = Method::Chained;
    kind.max_iter = max_iter;
    kind.tol = tol;
    return kind;
}

ImputerKind ImputerKind::external(std::string csv_path) {
    ImputerKind kind;
    kind.method = Method::External;
    kind.external_csv = std::move(csv_path);
    return kind;
}

std::string ImputerKind::name() const {
    switch (method) {
        case Method::Mean: return "mean";
        case Method::Knn: return "knn(k=" + std::to_string(k) + ")";
        case Method::Chained: return "chained";
        case Method::External: return "external(" + external_csv + ")";
    }
    return "?";
}

namespace {

struct ColumnScale {
    double mean = 0.0;
    double std = 1.0; // constant columns scale by 1
};

std::vector<ColumnScale> fit_scales(const Dataset& ds) {
    std::vector<ColumnScale> scales(ds.feature_count());
    for (std::size_t j = 0; j < ds.feature_count(); ++j) {
        if (ds.schema().features()[j].kind != ColumnKind::Continuous) continue;
        auto observed = ds.observed_values(j);
        if (observed.empty())
            throw data_error("FullyMissingFeature",
                             "feature '" + ds.schema().features()[j].name +
                                 "' has no observed cell");
        auto s = continuous_stats(observed);
        scales[j].mean = s.mean;
        scales[j].std = s.std > 0.0 ? s.std : 1.0;
    }
    return scales;
}

SummaryStats require_summary(const Dataset& ds) { return summarize(ds); }

ImputedDataset mean_impute_core(const Dataset& ds, const Dataset& ref) {
    const SummaryStats stats = require_summary(ref);
    ImputedDataset out{ds, ds.mask(), "mean", true};
    for (std::size_t j = 0; j < ds.feature_count(); ++j) {
        const auto& fs = ds.schema().features()[j];
        for (std::size_t i = 0; i < ds.rows(); ++i) {
            if (!ds.missing(i, j)) continue;
            out.data.set_missing(i, j, false);
            if (fs.kind == ColumnKind::Continuous)
                out.data.set_value(i, j, stats.features[j].continuous.mean);
            else
                out.data.set_category(i, j, stats.features[j].categorical.mode);
        }
    }
    return out;
}

// Squared z-scored distance over co-observed dims, rescaled by d / |shared|.
// Categorical dims contribute 2 on mismatch (squared one-hot distance).
// Returns nullopt when no dimension is co-observed.
std::optional<double> row_distance(const Dataset& a, std::size_t ia,
                                   const Dataset& b, std::size_t ib,
                                   const std::vector<ColumnScale>& scales) {
    const std::size_t d = a.feature_count();
    double sum = 0.0;
    std::size_t shared = 0;
    for (std::size_t j = 0; j < d; ++j) {
        if (a.missing(ia, j) || b.missing(ib, j)) continue;
        ++shared;
        if (a.schema().features()[j].kind == ColumnKind::Continuous) {
            const double za = (a.value(ia, j) - scales[j].mean) / scales[j].std;
            const double zb = (b.value(ib, j) - scales[j].mean) / scales[j].std;
            sum += (za - zb) * (za - zb);
        } else if (a.category(ia, j) != b.category(ib, j)) {
            sum += 2.0;
        }
    }
    if (shared == 0) return std::nullopt;
    return sum * static_cast<double>(d) / static_cast<double>(shared);
}

// Like fit_scales, but tolerates fully missing columns: such columns are
// never co-observed, so their scale is irrelevant to any distance, and the
// donor scan below reports the condition as NoDonor instead.
std::vector<ColumnScale> fit_scales_lenient(const Dataset& ds) {
    std::vector<ColumnScale> scales(ds.feature_count());
    for (std::size_t j = 0; j < ds.feature_count(); ++j) {
        if (ds.schema().features()[j].kind != ColumnKind::Continuous) continue;
        auto observed = ds.observed_values(j);
        if (observed.empty()) continue;
        auto s = continuous_stats(observed);
        scales[j].mean = s.mean;
        scales[j].std = s.std > 0.0 ? s.std : 1.0;
    }
    return scales;
}

ImputedDataset knn_impute_core(const Dataset& ds, const Dataset& ref, int k,
                               bool exclude_same_index) {
    if (k < 1) throw usage_error("BadK", "k must be >= 1");
    const auto scales = fit_scales_lenient(ref);
    ImputedDataset out{ds, ds.mask(), ImputerKind::knn(k).name(), true};

    // Column fallbacks for cells with no comparable donor (the querying row
    // shares no observed dimension with any candidate).
    std::vector<double> fallback_mean(ds.feature_count(), 0.0);
    std::vector<std::string> fallback_mode(ds.feature_count());
    std::vector<bool> fallback_ready(ds.feature_count(), false);

    for (std::size_t i = 0; i < ds.rows(); ++i) {
        for (std::size_t j = 0; j < ds.feature_count(); ++j) {
            if (!ds.missing(i, j)) continue;

            struct Donor {
                double dist;
                std::size_t index;
            };
            std::vector<Donor> donors;
            std::size_t candidates = 0;
            for (std::size_t r = 0; r < ref.rows(); ++r) {
                if (exclude_same_index && r == i) continue;
                if (ref.missing(r, j)) continue;
                ++candidates;
                if (auto dist = row_distance(ds, i, ref, r, scales))
                    donors.push_back({*dist, r});
            }
            if (candidates == 0)
                throw data_error("NoDonor",
                                 "no row observes feature " + std::to_string(j) +
                                     " for cell (" + std::to_string(i) + ", " +
                                     std::to_string(j) + ")");
            if (candidates < static_cast<std::size_t>(k))
                throw data_error("InsufficientDonors",
                                 "k=" + std::to_string(k) + " but only " +
                                     std::to_string(candidates) +
                                     " candidate donors for feature " +
                                     std::to_string(j));
            out.data.set_missing(i, j, false);
            const auto& fs = ds.schema().features()[j];

            if (donors.empty()) {
                // the querying row shares no observed dimension with any
                // candidate; fall back to the reference column statistic
                if (!fallback_ready[j]) {
                    if (fs.kind == ColumnKind::Continuous) {
                        fallback_mean[j] =
                            continuous_stats(ref.observed_values(j)).mean;
                    } else {
                        std::map<std::string, std::size_t> counts;
                        std::vector<std::string> order = fs.labels;
                        for (std::size_t r = 0; r < ref.rows(); ++r) {
                            if (ref.missing(r, j)) continue;
                            const auto& tok = ref.category(r, j);
                            if (!counts.count(tok) &&
                                std::find(order.begin(), order.end(), tok) ==
                                    order.end())
                                order.push_back(tok);
                            ++counts[tok];
                        }
                        std::size_t best_count = 0;
                        for (const auto& tok : order)
                            if (counts.count(tok) &&
                                counts[tok] > best_count) {
                                best_count = counts[tok];
                                fallback_mode[j] = tok;
                            }
                    }
                    fallback_ready[j] = true;
                }
                if (fs.kind == ColumnKind::Continuous)
                    out.data.set_value(i, j, fallback_mean[j]);
                else
                    out.data.set_category(i, j, fallback_mode[j]);
                continue;
            }

            std::sort(donors.begin(), donors.end(),
                      [](const Donor& a, const Donor& b) {
                          return a.dist != b.dist ? a.dist < b.dist
                                                  : a.index < b.index;
                      });
            const std::size_t use =
                std::min(donors.size(), static_cast<std::size_t>(k));
            donors.resize(use);

            if (fs.kind == ColumnKind::Continuous) {
                double sum = 0.0;
                for (const auto& donor : donors)
                    sum += ref.value(donor.index, j);
                out.data.set_value(i, j, sum / static_cast<double>(use));
            } else {
                // majority vote; ties resolved by the smallest donor index
                std::map<std::string, std::pair<std::size_t, std::size_t>> votes;
                for (const auto& donor : donors) {
                    auto& [count, first] = votes[ref.category(donor.index, j)];
                    if (count == 0) first = donor.index;
                    ++count;
                }
                std::string best;
                std::size_t best_count = 0;
                std::size_t best_first = std::numeric_limits<std::size_t>::max();
                for (const auto& [tok, count_and_first] : votes) {
                    const auto [count, first] = count_and_first;
                    if (count > best_count ||
                        (count == best_count && first < best_first)) {
                        best = tok;
                        best_count = count;
                        best_first = first;
                    }
                }
                out.data.set_category(i, j, best);
            }
        }
    }
    return out;
}

// Solves A x = b by Gaussian elimination with partial pivoting. A is small
// (regressor count + 1 square).
std::vector<double> solve_linear(std::vector<std::vector<double>> a,
                                 std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        if (a[col][col] == 0.0) continue; // ridge damping keeps this rare
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n, 0.0);
    for (std::size_t r = n; r-- > 0;) {
        double s = b[r];
        for (std::size_t c = r + 1; c < n; ++c) s -= a[r][c] * x[c];
        x[r] = a[r][r] != 0.0 ? s / a[r][r] : 0.0;
    }
    return x;
}

constexpr double kRidgeLambda = 1e-6;

// Regressor layout for predicting feature j: intercept, then every other
// feature; continuous ones z-scored, categorical ones one-hot over the
// categories seen in `vocabulary`.
struct RegressorLayout {
    std::vector<ColumnScale> scales;
    std::vector<std::vector<std::string>> vocab; // per feature, categorical only
    std::size_t width(std::size_t skip, const Schema& schema) const {
        std::size_t w = 1;
        for (std::size_t j = 0; j < schema.feature_count(); ++j) {
            if (j == skip) continue;
            w += schema.features()[j].kind == ColumnKind::Continuous
                     ? 1
                     : vocab[j].size();
        }
        return w;
    }
};

RegressorLayout make_layout(const Dataset& ds) {
    RegressorLayout layout;
    layout.scales = fit_scales(ds);
    layout.vocab.resize(ds.feature_count());
    for (std::size_t j = 0; j < ds.feature_count(); ++j) {
        const auto& fs = ds.schema().features()[j];
        if (fs.kind != ColumnKind::Categorical) continue;
        auto& vocab = layout.vocab[j];
        vocab = fs.labels;
        for (std::size_t i = 0; i < ds.rows(); ++i) {
            if (ds.missing(i, j)) continue;
            const auto& tok = ds.category(i, j);
            if (std::find(vocab.begin(), vocab.end(), tok) == vocab.end())
                vocab.push_back(tok);
        }
    }
    return layout;
}

// Current cell values during chained sweeps: continuous as doubles,
// categorical as tokens (set once by the mean/mode initializer).
struct WorkTable {
    std::vector<std::vector<double>> num; // n x d
    std::vector<std::vector<std::string>> cat;

    static WorkTable from(const ImputedDataset& imp) {
        const auto& ds = imp.data;
        WorkTable w;
        w.num.assign(ds.rows(),
                     std::vector<double>(ds.feature_count(), 0.0));
        w.cat.assign(ds.rows(),
                     std::vector<std::string>(ds.feature_count()));
        for (std::size_t i = 0; i < ds.rows(); ++i)
            for (std::size_t j = 0; j < ds.feature_count(); ++j) {
                if (ds.schema().features()[j].kind == ColumnKind::Continuous)
                    w.num[i][j] = ds.value(i, j);
                else
                    w.cat[i][j] = ds.category(i, j);
            }
        return w;
    }
};

std::vector<double> regressor_row(const WorkTable& work, std::size_t i,
                                  std::size_t skip, const Schema& schema,
                                  const RegressorLayout& layout) {
    std::vector<double> x;
    x.push_back(1.0);
    for (std::size_t j = 0; j < schema.feature_count(); ++j) {
        if (j == skip) continue;
        if (schema.features()[j].kind == ColumnKind::Continuous) {
            x.push_back((work.num[i][j] - layout.scales[j].mean) /
                        layout.scales[j].std);
        } else {
            for (const auto& tok : layout.vocab[j])
                x.push_back(work.cat[i][j] == tok ? 1.0 : 0.0);
        }
    }
    return x;
}

std::vector<double> fit_ridge(const std::vector<std::vector<double>>& xs,
                              const std::vector<double>& ys) {
    const std::size_t p = xs.front().size();
    std::vector<std::vector<double>> ata(p, std::vector<double>(p, 0.0));
    std::vector<double> atb(p, 0.0);
    for (std::size_t r = 0; r < xs.size(); ++r) {
        for (std::size_t a = 0; a < p; ++a) {
            atb[a] += xs[r][a] * ys[r];
            for (std::size_t b = a; b < p; ++b)
                ata[a][b] += xs[r][a] * xs[r][b];
        }
    }
    for (std::size_t a = 0; a < p; ++a) {
        for (std::size_t b = 0; b < a; ++b) ata[a][b] = ata[b][a];
        ata[a][a] += kRidgeLambda;
    }
    return solve_linear(std::move(ata), std::move(atb));
}

double predict(const std::vector<double>& beta, const std::vector<double>& x) {
    double y = 0.0;
    for (std::size_t a = 0; a < beta.size(); ++a) y += beta[a] * x[a];
    return y;
}

ImputedDataset finish_chained(const Dataset& original, const WorkTable& work,
                              bool converged) {
    ImputedDataset out{original, original.mask(), "chained", converged};
    for (std::size_t i = 0; i < original.rows(); ++i)
        for (std::size_t j = 0; j < original.feature_count(); ++j) {
            if (!original.missing(i, j)) continue;
            out.data.set_missing(i, j, false);
            if (original.schema().features()[j].kind == ColumnKind::Continuous)
                out.data.set_value(i, j, work.num[i][j]);
            else
                out.data.set_category(i, j, work.cat[i][j]);
        }
    return out;
}

} // namespace

ImputedDataset impute_mean(const Dataset& ds) { return mean_impute_core(ds, ds); }

ImputedDataset impute_knn(const Dataset& ds, int k) {
    return knn_impute_core(ds, ds, k, /*exclude_same_index=*/true);
}

ImputedDataset impute_chained(const Dataset& ds, int max_iter, double tol) {
    if (max_iter < 1) throw usage_error("BadMaxIter", "max_iter must be >= 1");
    if (!(tol > 0.0)) throw usage_error("BadTol", "tol must be > 0");
    if (ds.feature_count() < 2)
        throw data_error("TooFewFeatures",
                         "chained equations needs at least 2 features");

    const RegressorLayout layout = make_layout(ds);
    WorkTable work = WorkTable::from(impute_mean(ds));
    if (!ds.any_missing()) return finish_chained(ds, work, true);

    bool converged = false;
    for (int sweep = 0; sweep < max_iter && !converged; ++sweep) {
        double max_change = 0.0;
        for (std::size_t j = 0; j < ds.feature_count(); ++j) {
            if (ds.schema().features()[j].kind != ColumnKind::Continuous)
                continue; // categorical targets keep their mode fallback
            if (ds.missing_count(j) == 0) continue;

            std::vector<std::vector<double>> xs;
            std::vector<double> ys;
            for (std::size_t i = 0; i < ds.rows(); ++i) {
                if (ds.missing(i, j)) continue;
                xs.push_back(regressor_row(work, i, j, ds.schema(), layout));
                ys.push_back(ds.value(i, j));
            }
            const auto beta = fit_ridge(xs, ys);
            for (std::size_t i = 0; i < ds.rows(); ++i) {
                if (!ds.missing(i, j)) continue;
                const double y = predict(
                    beta, regressor_row(work, i, j, ds.schema(), layout));
                max_change = std::max(max_change, std::abs(y - work.num[i][j]));
                work.num[i][j] = y;
            }
        }
        converged = max_change < tol;
    }
    return finish_chained(ds, work, converged);
}

ImputedDataset impute(const Dataset& ds, const ImputerKind& kind) {
    switch (kind.method) {
        case ImputerKind::Method::Mean: return impute_mean(ds);
        case ImputerKind::Method::Knn: return impute_knn(ds, kind.k);
        case ImputerKind::Method::Chained:
            return impute_chained(ds, kind.max_iter, kind.tol);
        case ImputerKind::Method::External: {
            Dataset ext =
                Dataset::load_csv(kind.external_csv, ds.schema());
            if (ext.rows() != ds.rows())
                throw data_error("ExternalShapeMismatch",
                                 "external imputation has " +
                                     std::to_string(ext.rows()) +
                                     " rows, expected " +
                                     std::to_string(ds.rows()));
            ImputedDataset out{ds, ds.mask(), kind.name(), true};
            for (std::size_t i = 0; i < ds.rows(); ++i)
                for (std::size_t j = 0; j < ds.feature_count(); ++j) {
                    if (!ds.missing(i, j)) continue;
                    out.data.set_missing(i, j, false);
                    if (ds.schema().features()[j].kind == ColumnKind::Continuous)
                        out.data.set_value(i, j, ext.value(i, j));
                    else
                        out.data.set_category(i, j, ext.category(i, j));
                }
            return out;
        }
    }
    throw usage_error("BadImputer", "unreachable");
}

ImputedDataset impute_with_reference(const Dataset& ds, const Dataset& ref,
                                     const ImputerKind& kind) {
    switch (kind.method) {
        case ImputerKind::Method::Mean: {
            auto out = mean_impute_core(ds, ref);
            return out;
        }
        case ImputerKind::Method::Knn:
            return knn_impute_core(ds, ref, kind.k,
                                   /*exclude_same_index=*/false);
        case ImputerKind::Method::Chained: {
            // Fit the per-feature models on the completed reference, then
            // iterate predictions on `ds` with those fixed models.
            ImputedDataset ref_done =
                impute_chained(ref, kind.max_iter, kind.tol);
            const RegressorLayout layout = make_layout(ref);
            WorkTable ref_work = WorkTable::from(ref_done);

            std::vector<std::vector<double>> betas(ds.feature_count());
            for (std::size_t j = 0; j < ds.feature_count(); ++j) {
                if (ds.schema().features()[j].kind != ColumnKind::Continuous)
                    continue;
                std::vector<std::vector<double>> xs;
                std::vector<double> ys;
                for (std::size_t i = 0; i < ref.rows(); ++i) {
                    if (ref.missing(i, j)) continue;
                    xs.push_back(
                        regressor_row(ref_work, i, j, ref.schema(), layout));
                    ys.push_back(ref.value(i, j));
                }
                if (!xs.empty()) betas[j] = fit_ridge(xs, ys);
            }

            WorkTable work = WorkTable::from(mean_impute_core(ds, ref));
            bool converged = !ds.any_missing();
            for (int sweep = 0; sweep < kind.max_iter && !converged; ++sweep) {
                double max_change = 0.0;
                for (std::size_t j = 0; j < ds.feature_count(); ++j) {
                    if (betas[j].empty() || ds.missing_count(j) == 0) continue;
                    for (std::size_t i = 0; i < ds.rows(); ++i) {
                        if (!ds.missing(i, j)) continue;
                        const double y = predict(
                            betas[j],
                            regressor_row(work, i, j, ds.schema(), layout));
                        max_change =
                            std::max(max_change, std::abs(y - work.num[i][j]));
                        work.num[i][j] = y;
                    }
                }
                converged = max_change < kind.tol;
            }
            auto out = finish_chained(ds, work, converged);
            out.converged = out.converged && ref_done.converged;
            return out;
        }
        case ImputerKind::Method::External: return impute(ds, kind);
    }
    throw usage_error("BadImputer", "unreachable");
}

int tune_k(const Dataset& train, const std::vector<int>& grid,
           const ProxyFn& proxy, std::uint64_t seed, double holdout_fraction) {
    if (grid.empty()) throw usage_error("EmptyGrid", "k grid is empty");

    auto sorted = grid;
    std::sort(sorted.begin(), sorted.end());
    if (sorted.size() == 1) return sorted.front();

    auto [fit, holdout] = split_eval(train, holdout_fraction,
                                     rng::derive(seed, "tune_k"));
    int best_k = sorted.front();
    double best_acc = -1.0;
    for (int k : sorted) {
        ImputedDataset fit_imp = impute_knn(fit, k);
        ImputedDataset holdout_imp =
            impute_with_reference(holdout, fit, ImputerKind::knn(k));
        const double acc = proxy(fit_imp, holdout_imp);
        if (acc > best_acc) {
            best_acc = acc;
            best_k = k;
        }
    }
    return best_k;
}

} // namespace crilm
