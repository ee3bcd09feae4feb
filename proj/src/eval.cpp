#include "crilm/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "crilm/error.hpp"
#include "crilm/rng.hpp"
#include "crilm/stats.hpp"

namespace crilm {

void ExperimentSpec::validate() const {
    if (repetitions < 1)
        throw usage_error("BadRepetitions", "repetitions must be >= 1");
    if (!(eval_fraction > 0.0 && eval_fraction < 1.0))
        throw usage_error("BadFraction", "eval_fraction must be in (0, 1)");
    if (imputers.empty())
        throw usage_error("NoImputers", "at least one imputer is required");
    if (proxy_k < 1) throw usage_error("BadK", "proxy_k must be >= 1");
}

std::uint64_t ExperimentSpec::repetition_seed(int repetition) const {
    return rng::derive(master_seed, "repetition",
                       static_cast<std::uint64_t>(repetition));
}

RecoveryScore score_recovery(const Dataset& truth, const Dataset& imputed,
                             const std::vector<std::uint8_t>& mask,
                             const Dataset& scale_source) {
    RecoveryScore score;
    const std::size_t d = truth.feature_count();
    double sq_sum = 0.0;
    std::size_t cat_hits = 0;

    std::vector<double> col_std(d, 1.0);
    for (std::size_t j = 0; j < d; ++j) {
        if (truth.schema().features()[j].kind != ColumnKind::Continuous)
            continue;
        auto s = continuous_stats(scale_source.observed_values(j));
        col_std[j] = s.std > 0.0 ? s.std : 1.0;
    }

    for (std::size_t i = 0; i < truth.rows(); ++i)
        for (std::size_t j = 0; j < d; ++j) {
            if (!mask[i * d + j]) continue;
            if (truth.schema().features()[j].kind == ColumnKind::Continuous) {
                const double delta =
                    (imputed.value(i, j) - truth.value(i, j)) / col_std[j];
                sq_sum += delta * delta;
                ++score.continuous_cells;
            } else {
                cat_hits += imputed.category(i, j) == truth.category(i, j);
                ++score.categorical_cells;
            }
        }

    if (score.continuous_cells > 0)
        score.rmse =
            std::sqrt(sq_sum / static_cast<double>(score.continuous_cells));
    if (score.categorical_cells > 0)
        score.cell_accuracy = static_cast<double>(cat_hits) /
                              static_cast<double>(score.categorical_cells);
    return score;
}

RecoveryScore mask_and_recover(const Dataset& ds_complete,
                               const MissingnessSpec& mechanism,
                               const ImputerKind& imputer) {
    if (ds_complete.any_missing())
        throw data_error("NotFullyObserved",
                         "mask_and_recover needs a complete dataset");
    Dataset injected = inject(ds_complete, mechanism);
    ImputedDataset imp = impute(injected, imputer);
    return score_recovery(ds_complete, imp.data, injected.mask(), ds_complete);
}

double proxy_classify(const ImputedDataset& train, const ImputedDataset& eval,
                      int k) {
    const Dataset& tr = train.data;
    const Dataset& ev = eval.data;
    if (tr.rows() == 0) throw data_error("EmptyTrain", "train side is empty");
    if (ev.rows() == 0) throw data_error("EmptyEval", "eval side is empty");
    if (k < 1) throw usage_error("BadK", "k must be >= 1");
    const std::size_t kk =
        std::min<std::size_t>(static_cast<std::size_t>(k), tr.rows());

    const std::size_t d = tr.feature_count();
    std::vector<double> mean(d, 0.0), sd(d, 1.0);
    for (std::size_t j = 0; j < d; ++j) {
        if (tr.schema().features()[j].kind != ColumnKind::Continuous) continue;
        auto s = continuous_stats(tr.observed_values(j));
        mean[j] = s.mean;
        sd[j] = s.std > 0.0 ? s.std : 1.0;
    }

    std::size_t correct = 0;
    for (std::size_t e = 0; e < ev.rows(); ++e) {
        struct Neighbor {
            double dist;
            std::size_t index;
        };
        std::vector<Neighbor> neighbors;
        neighbors.reserve(tr.rows());
        for (std::size_t t = 0; t < tr.rows(); ++t) {
            double sum = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                if (tr.schema().features()[j].kind == ColumnKind::Continuous) {
                    const double ze = (ev.value(e, j) - mean[j]) / sd[j];
                    const double zt = (tr.value(t, j) - mean[j]) / sd[j];
                    sum += (ze - zt) * (ze - zt);
                } else if (ev.category(e, j) != tr.category(t, j)) {
                    sum += 2.0;
                }
            }
            neighbors.push_back({sum, t});
        }
        std::sort(neighbors.begin(), neighbors.end(),
                  [](const Neighbor& a, const Neighbor& b) {
                      return a.dist != b.dist ? a.dist < b.dist
                                              : a.index < b.index;
                  });

        const auto& labels = tr.schema().target().labels;
        std::vector<std::size_t> votes(labels.size(), 0);
        for (std::size_t i = 0; i < kk; ++i)
            ++votes[tr.target_index(neighbors[i].index)];
        std::size_t best = 0;
        for (std::size_t c = 1; c < votes.size(); ++c)
            if (votes[c] > votes[best]) best = c; // ties keep the lower index
        correct += labels[best] == ev.target(e);
    }
    return static_cast<double>(correct) / static_cast<double>(ev.rows());
}

namespace {

void accumulate_aggregates(MetricReport& report) {
    struct Acc {
        std::vector<double> rmse, cell, proxy;
    };
    std::vector<std::string> order;
    std::map<std::string, Acc> by_imputer;
    for (const auto& row : report.rows) {
        if (!row.ok) continue;
        if (!by_imputer.count(row.imputer)) order.push_back(row.imputer);
        auto& acc = by_imputer[row.imputer];
        acc.rmse.push_back(row.recovery.rmse);
        acc.cell.push_back(row.recovery.cell_accuracy);
        acc.proxy.push_back(row.proxy_accuracy);
    }

    auto mean_of = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x;
        return v.empty() ? 0.0 : s / static_cast<double>(v.size());
    };
    auto std_of = [&](const std::vector<double>& v) {
        if (v.size() < 2) return 0.0;
        const double m = mean_of(v);
        double ss = 0.0;
        for (double x : v) ss += (x - m) * (x - m);
        return std::sqrt(ss / static_cast<double>(v.size() - 1));
    };

    for (const auto& name : order) {
        const auto& acc = by_imputer[name];
        MetricAggregate agg;
        agg.imputer = name;
        agg.repetitions = static_cast<int>(acc.proxy.size());
        agg.rmse_mean = mean_of(acc.rmse);
        agg.rmse_std = std_of(acc.rmse);
        agg.cell_accuracy_mean = mean_of(acc.cell);
        agg.cell_accuracy_std = std_of(acc.cell);
        agg.proxy_mean = mean_of(acc.proxy);
        agg.proxy_std = std_of(acc.proxy);
        report.aggregates.push_back(std::move(agg));
    }
}

} // namespace

MetricReport run_grid(const Dataset& ds_complete, const ExperimentSpec& spec) {
    spec.validate();
    if (ds_complete.any_missing())
        throw data_error("NotFullyObserved",
                         "run_grid needs a complete dataset as ground truth");

    MetricReport report;
    report.mechanism = to_string(spec.mechanism.mechanism);
    report.master_seed = spec.master_seed;

    for (int r = 0; r < spec.repetitions; ++r) {
        const std::uint64_t seed_r = spec.repetition_seed(r);
        auto [train_c, eval_c] =
            split_eval(ds_complete, spec.eval_fraction, seed_r);

        MissingnessSpec train_mech = spec.mechanism;
        train_mech.seed = rng::derive(seed_r, "train-mask");
        MissingnessSpec eval_mech = spec.mechanism;
        eval_mech.seed = rng::derive(seed_r, "eval-mask");

        Dataset train_m = inject(train_c, train_mech);
        Dataset eval_m = inject(eval_c, eval_mech);

        for (const auto& kind : spec.imputers) {
            MetricRow row;
            row.imputer = kind.name();
            row.repetition = r;
            try {
                if (kind.method == ImputerKind::Method::External) {
                    // External tables are row-aligned with the full input;
                    // mask the full table, splice, then split for the proxy.
                    MissingnessSpec full_mech = spec.mechanism;
                    full_mech.seed = train_mech.seed;
                    Dataset full_m = inject(ds_complete, full_mech);
                    ImputedDataset full_imp = impute(full_m, kind);
                    row.recovery = score_recovery(ds_complete, full_imp.data,
                                                  full_m.mask(), ds_complete);
                    auto [tr, ev] = split_eval(full_imp.data,
                                               spec.eval_fraction, seed_r);
                    ImputedDataset tr_imp{tr, tr.mask(), kind.name(), true};
                    ImputedDataset ev_imp{ev, ev.mask(), kind.name(), true};
                    row.proxy_accuracy =
                        proxy_classify(tr_imp, ev_imp, spec.proxy_k);
                } else {
                    ImputedDataset train_imp = impute(train_m, kind);
                    ImputedDataset eval_imp =
                        impute_with_reference(eval_m, train_m, kind);

                    RecoveryScore tr_score = score_recovery(
                        train_c, train_imp.data, train_m.mask(), train_c);
                    RecoveryScore ev_score = score_recovery(
                        eval_c, eval_imp.data, eval_m.mask(), train_c);

                    // pool both sides' masked cells
                    const std::size_t nc =
                        tr_score.continuous_cells + ev_score.continuous_cells;
                    const std::size_t ncat = tr_score.categorical_cells +
                                             ev_score.categorical_cells;
                    RecoveryScore pooled;
                    pooled.continuous_cells = nc;
                    pooled.categorical_cells = ncat;
                    if (nc > 0)
                        pooled.rmse = std::sqrt(
                            (tr_score.rmse * tr_score.rmse *
                                 static_cast<double>(tr_score.continuous_cells) +
                             ev_score.rmse * ev_score.rmse *
                                 static_cast<double>(ev_score.continuous_cells)) /
                            static_cast<double>(nc));
                    if (ncat > 0)
                        pooled.cell_accuracy =
                            (tr_score.cell_accuracy *
                                 static_cast<double>(tr_score.categorical_cells) +
                             ev_score.cell_accuracy *
                                 static_cast<double>(ev_score.categorical_cells)) /
                            static_cast<double>(ncat);
                    row.recovery = pooled;
                    row.proxy_accuracy =
                        proxy_classify(train_imp, eval_imp, spec.proxy_k);
                }
            } catch (const Error& e) {
                row.ok = false;
                row.error = e.what();
            }
            report.rows.push_back(std::move(row));
        }
    }

    accumulate_aggregates(report);
    return report;
}

namespace {

std::string fmt(double v, int decimals = 4) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

std::string fmt_gain(double delta_points) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%+.1f%%", delta_points);
    return buf;
}

} // namespace

std::string render_report(const MetricReport& report, ReportFormat format) {
    std::ostringstream out;
    const bool has_baseline = report.aggregates.size() > 1;
    const double baseline =
        report.aggregates.empty() ? 0.0 : report.aggregates.front().proxy_mean;

    if (format == ReportFormat::Markdown) {
        out << "# Imputation report (" << report.mechanism
            << ", seed " << report.master_seed << ")\n\n";
        out << "| Imputer | RMSE | Cell accuracy | Proxy accuracy | Gain |\n";
        out << "|---|---|---|---|---|\n";
        for (std::size_t i = 0; i < report.aggregates.size(); ++i) {
            const auto& a = report.aggregates[i];
            out << "| " << a.imputer << " | " << fmt(a.rmse_mean) << " ± "
                << fmt(a.rmse_std) << " | " << fmt(a.cell_accuracy_mean)
                << " ± " << fmt(a.cell_accuracy_std) << " | "
                << fmt(a.proxy_mean) << " ± " << fmt(a.proxy_std) << " | ";
            if (has_baseline && i > 0)
                out << fmt_gain((a.proxy_mean - baseline) * 100.0);
            out << " |\n";
        }
        bool any_failed = false;
        for (const auto& row : report.rows) any_failed |= !row.ok;
        if (any_failed) {
            out << "\n## Failed runs\n\n";
            for (const auto& row : report.rows)
                if (!row.ok)
                    out << "- " << row.imputer << " repetition "
                        << row.repetition << ": " << row.error << "\n";
        }
    } else {
        out << "imputer,repetition,rmse,cell_accuracy,proxy_accuracy,gain\n";
        for (const auto& row : report.rows) {
            if (!row.ok) {
                out << row.imputer << ',' << row.repetition
                    << ",,,,failed: " << row.error << '\n';
                continue;
            }
            out << row.imputer << ',' << row.repetition << ','
                << fmt(row.recovery.rmse, 6) << ','
                << fmt(row.recovery.cell_accuracy, 6) << ','
                << fmt(row.proxy_accuracy, 6) << ",\n";
        }
        for (std::size_t i = 0; i < report.aggregates.size(); ++i) {
            const auto& a = report.aggregates[i];
            out << a.imputer << ",mean," << fmt(a.rmse_mean, 6) << ','
                << fmt(a.cell_accuracy_mean, 6) << ',' << fmt(a.proxy_mean, 6)
                << ',';
            if (has_baseline && i > 0)
                out << fmt_gain((a.proxy_mean - baseline) * 100.0);
            out << '\n';
            out << a.imputer << ",std," << fmt(a.rmse_std, 6) << ','
                << fmt(a.cell_accuracy_std, 6) << ',' << fmt(a.proxy_std, 6)
                << ",\n";
        }
    }
    return out.str();
}

} // namespace crilm
