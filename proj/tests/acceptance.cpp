// Acceptance gate: one self-contained check per criterion, each printing a
// single PASS/FAIL line. Exits nonzero if any criterion fails. argv[1] must
// be the path to the crilm CLI binary (used by the end-to-end smoke check).

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "crilm/contextualize.hpp"
#include "crilm/dataset.hpp"
#include "crilm/descriptors.hpp"
#include "crilm/emit.hpp"
#include "crilm/error.hpp"
#include "crilm/eval.hpp"
#include "crilm/imputers.hpp"
#include "crilm/missingness.hpp"
#include "crilm/schema.hpp"
#include "crilm/stats.hpp"
#include "helpers.hpp"

namespace fs = std::filesystem;
using namespace crilm;

namespace {

const std::string kDataDir = CRILM_DATA_DIR;
const char* kCsvDatasets[] = {"iris", "wine", "breast_cancer"};

Dataset load_bundled_csv(const std::string& name) {
    auto schema = Schema::load(kDataDir + "/schemas/" + name + ".schema.json");
    return Dataset::load_csv(kDataDir + "/csv/" + name + ".csv", schema);
}

void require(bool cond, const std::string& what) {
    if (!cond) throw std::runtime_error(what);
}

// ---------------------------------------------------------------- criteria

void criterion_mcar() {
    for (const auto* name : kCsvDatasets) {
        auto ds = load_bundled_csv(name);
        const std::size_t expect = round_count(0.3 * double(ds.rows()));
        for (int s = 0; s < 100; ++s) {
            auto out = inject_mcar(ds, 0.3, 1000 + s);
            for (std::size_t j = 0; j < ds.feature_count(); ++j)
                require(out.missing_count(j) == expect,
                        std::string(name) + ": per-feature count != round(0.3n)");
        }
    }
    // value independence on iid synthetic data
    std::mt19937_64 gen(7);
    std::vector<std::vector<double>> rows(300, std::vector<double>(1));
    for (auto& r : rows) r[0] = testutil::gaussian(gen);
    auto ds = testutil::make_dataset(rows);
    int pass = 0;
    for (int s = 0; s < 100; ++s) {
        auto out = inject_mcar(ds, 0.3, 5000 + s);
        std::vector<double> masked, unmasked;
        for (std::size_t i = 0; i < ds.rows(); ++i)
            (out.missing(i, 0) ? masked : unmasked).push_back(rows[i][0]);
        if (testutil::ks_two_sample_p(masked, unmasked) > 0.01) ++pass;
    }
    require(pass >= 95, "KS independence held in only " +
                            std::to_string(pass) + "/100 seeds");
}

void criterion_mar() {
    for (const auto* name : kCsvDatasets) {
        auto ds = load_bundled_csv(name);
        MissingnessSpec spec;
        spec.mechanism = Mechanism::Mar;
        spec.seed = 17;
        auto out = inject_mar(ds, spec);

        // independent brute-force subset from the first feature
        std::vector<double> indep;
        for (std::size_t i = 0; i < ds.rows(); ++i)
            indep.push_back(ds.value(i, 0));
        const double threshold = testutil::oracle_quantile(indep, 0.30);
        std::size_t subset = 0;
        for (double v : indep) subset += v <= threshold;
        const std::size_t expect = round_count(0.6 * double(subset));

        require(out.missing_count(0) == 0, "independent column was masked");
        for (std::size_t j = 1; j < ds.feature_count(); ++j) {
            require(out.missing_count(j) == expect,
                    std::string(name) + ": dependent count != round(0.6|S|)");
            for (std::size_t i = 0; i < ds.rows(); ++i)
                if (out.missing(i, j))
                    require(indep[i] <= threshold,
                            "masked cell outside the q30 subset");
        }
    }
}

void criterion_mnar() {
    for (const auto* name : kCsvDatasets) {
        auto ds = load_bundled_csv(name);
        auto out = inject_mnar(ds, 0.3);
        auto rerun = inject_mnar(ds, 0.3);
        require(out.mask() == rerun.mask(), "MNAR mask not bit-identical");
        for (std::size_t j = 0; j < ds.feature_count(); ++j) {
            const double threshold =
                testutil::oracle_quantile(
                    [&] {
                        std::vector<double> col;
                        for (std::size_t i = 0; i < ds.rows(); ++i)
                            col.push_back(ds.value(i, j));
                        return col;
                    }(),
                    0.30);
            for (std::size_t i = 0; i < ds.rows(); ++i)
                require(out.missing(i, j) == (ds.value(i, j) <= threshold),
                        "MNAR mask disagrees with the q30 threshold");
        }
    }
}

void criterion_imputer_oracles() {
    // mean imputer vs brute force, 1000 random tables
    std::mt19937_64 gen(404);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 3 + gen() % 10, d = 1 + gen() % 4;
        std::vector<std::vector<double>> rows(n, std::vector<double>(d));
        for (auto& r : rows)
            for (auto& v : r) v = testutil::gaussian(gen) * 3.0;
        auto ds = testutil::make_dataset(rows);
        for (std::size_t j = 0; j < d; ++j) {
            const std::size_t keep = gen() % n;
            for (std::size_t i = 0; i < n; ++i)
                if (i != keep && gen() % 3 == 0) ds.set_missing(i, j, true);
        }
        auto imp = impute_mean(ds);
        for (std::size_t j = 0; j < d; ++j) {
            std::vector<double> obs;
            for (std::size_t i = 0; i < n; ++i)
                if (!ds.missing(i, j)) obs.push_back(rows[i][j]);
            const double m = testutil::oracle_mean(obs);
            for (std::size_t i = 0; i < n; ++i)
                if (ds.missing(i, j))
                    require(std::abs(imp.data.value(i, j) - m) < 1e-12,
                            "mean imputer deviates from the oracle");
        }
    }

    // chained equations on y = 2x: the 30% MCAR mask goes on the dependent
    // column, so every masked cell is recoverable from its observed partner
    std::vector<std::vector<double>> lin;
    for (int i = 0; i < 100; ++i) lin.push_back({double(i), 2.0 * i});
    auto lds = testutil::make_dataset(lin);
    auto injected = lds;
    {
        auto one_col = inject_mcar(testutil::make_dataset([&] {
                                       std::vector<std::vector<double>> ys;
                                       for (const auto& r : lin)
                                           ys.push_back({r[1]});
                                       return ys;
                                   }()),
                                   0.3, 11);
        std::size_t masked = 0;
        for (std::size_t i = 0; i < 100; ++i)
            if (one_col.missing(i, 0)) {
                injected.set_missing(i, 1, true);
                ++masked;
            }
        require(masked == 30, "expected round(0.3*100) masked cells");
    }
    auto chained = impute_chained(injected);
    double max_err = 0.0;
    for (std::size_t i = 0; i < lds.rows(); ++i)
        if (injected.missing(i, 1))
            max_err = std::max(
                max_err, std::abs(chained.data.value(i, 1) - lin[i][1]));
    require(max_err < 1e-5, "chained y=2x max error " + std::to_string(max_err));

    // k-NN 4-row fixture: donors B and C vote (10 + 50) / 2 = 30
    auto kds = testutil::make_dataset(
        {{0, 0, 0}, {0, 0, 10}, {9, 9, 50}, {10, 10, 52}});
    kds.set_missing(0, 2, true);
    auto knn = impute_knn(kds, 2);
    require(std::abs(knn.data.value(0, 2) - 30.0) < 1e-9,
            "knn fixture value " + std::to_string(knn.data.value(0, 2)));
}

void criterion_imputer_ordering() {
    int wins = 0;
    for (int s = 0; s < 20; ++s) {
        auto rows = testutil::correlated_gaussian(200, 0.9, 9000 + s);
        auto ds = testutil::make_dataset(rows);
        auto injected = inject_mcar(ds, 0.3, 100 + s);
        auto rmse = [&](const ImputedDataset& imp) {
            return score_recovery(ds, imp.data, injected.mask(), ds).rmse;
        };
        if (rmse(impute_chained(injected)) < rmse(impute_mean(injected)))
            ++wins;
    }
    require(wins >= 18, "chained < mean in only " + std::to_string(wins) +
                            "/20 seeds");
}

void criterion_roundtrip() {
    for (const auto* name : kCsvDatasets) {
        auto ds = load_bundled_csv(name);
        auto injected = inject_mcar(ds, 0.3, 77);
        auto catalog = load_bundled(name, kDataDir + "/catalogs");
        std::vector<DescriptorMode> modes{DescriptorMode::specific(catalog)};
        for (const char* tok : {"NaN", "Missing value", "Value not recorded"})
            modes.push_back(DescriptorMode::generic(tok));

        for (const auto& mode : modes) {
            auto records = render_dataset(injected, mode, true);
            std::size_t descriptors = 0;
            for (std::size_t i = 0; i < records.size(); ++i) {
                for (bool m : records[i].missing_flags) descriptors += m;
                auto parsed = parse_back(records[i], ds.schema(), mode);
                require(parsed.target == injected.target(i),
                        "target did not round-trip");
                for (std::size_t j = 0; j < ds.feature_count(); ++j) {
                    if (injected.missing(i, j)) {
                        require(!parsed.tokens[j].has_value(),
                                "masked cell came back with a value");
                    } else {
                        require(parsed.tokens[j].has_value(),
                                "observed cell came back missing");
                        const auto& tpl = ds.schema().sentence_template(
                            ds.schema().features()[j].template_id);
                        require(*parsed.tokens[j] ==
                                    render_value(injected.value(i, j),
                                                 tpl.decimals),
                                "observed value did not round-trip");
                    }
                }
            }
            require(descriptors == injected.missing_count(),
                    "descriptor count != masked-cell count");
        }
    }
}

void criterion_paper_text() {
    auto ds = load_bundled_csv("wine");
    const auto j = ds.schema().feature_index("Alcohol");
    ds.set_value(0, j, 12.47);
    auto rec = render_record(ds, 0, DescriptorMode::generic("NaN"), false);
    require(rec.sentences[j] == "The alcohol content in the wine is 12.47.",
            "alcohol sentence mismatch: '" + rec.sentences[j] + "'");

    auto catalog = load_bundled("wine", kDataDir + "/catalogs");
    const auto ma = ds.schema().feature_index("Malic acid");
    ds.set_missing(0, ma, true);
    auto spec = render_record(ds, 0, DescriptorMode::specific(catalog), false);
    require(spec.sentences[ma] ==
                "Malic acid quantity missing for this wine sample.",
            "malic acid descriptor mismatch: '" + spec.sentences[ma] + "'");

    const auto instruction = build_instruction(ds.schema(), true);
    require(instruction.find(
                "Predict the class based on the given measurements.") !=
                std::string::npos,
            "instruction lacks the prediction sentence");
    require(instruction.find("Use the context provided by the missing value "
                             "descriptors to inform the prediction.") !=
                std::string::npos,
            "instruction lacks the descriptor-guidance sentence");
}

void criterion_protocol() {
    auto ds = load_bundled_csv("iris");
    ExperimentSpec spec;
    spec.mechanism.mechanism = Mechanism::Mcar;
    spec.mechanism.rate = 0.3;
    spec.imputers = {ImputerKind::mean(), ImputerKind::knn(5)};
    spec.master_seed = 3;

    auto [train, eval] = split_eval(ds, 0.20, spec.repetition_seed(0));
    require(eval.rows() == 30 && train.rows() == 120,
            "20% split of 150 rows is not 120/30");

    auto report = run_grid(ds, spec);
    require(report.rows.size() == 10, "expected 5 rows per imputer");
    for (const auto& agg : report.aggregates) {
        std::vector<double> proxies, rmses;
        for (const auto& row : report.rows)
            if (row.ok && row.imputer == agg.imputer) {
                proxies.push_back(row.proxy_accuracy);
                rmses.push_back(row.recovery.rmse);
            }
        require(int(proxies.size()) == agg.repetitions,
                "aggregate repetition count mismatch");
        require(std::abs(testutil::oracle_mean(proxies) - agg.proxy_mean) <
                    1e-12,
                "proxy mean does not recompute from the rows");
        require(std::abs(testutil::oracle_std(proxies) - agg.proxy_std) < 1e-12,
                "proxy std does not recompute from the rows");
        require(std::abs(testutil::oracle_mean(rmses) - agg.rmse_mean) < 1e-12,
                "rmse mean does not recompute from the rows");
    }

    const auto text = render_report(report, ReportFormat::Markdown);
    const auto again = render_report(run_grid(ds, spec), ReportFormat::Markdown);
    require(text == again, "identical spec did not give an identical report");
}

void criterion_emission() {
    const auto tmp = fs::temp_directory_path() / "crilm_acceptance_emit.jsonl";
    for (const auto* name : kCsvDatasets) {
        auto ds = load_bundled_csv(name);
        auto catalog = load_bundled(name, kDataDir + "/catalogs");
        for (Mechanism mech :
             {Mechanism::Mcar, Mechanism::Mar, Mechanism::Mnar}) {
            MissingnessSpec spec;
            spec.mechanism = mech;
            spec.seed = 5;
            auto injected = inject(ds, spec);
            auto records = render_dataset(
                injected, DescriptorMode::specific(catalog), true);
            emit_records(records, ds.schema(), tmp.string());
            auto parsed = parse_emitted_file(tmp.string());
            require(parsed.size() == records.size(), "emitted count mismatch");
            for (std::size_t i = 0; i < parsed.size(); ++i) {
                require(parsed[i].output == records[i].target_sentence(),
                        "emitted output did not round-trip");
                require(parsed[i].input.find(parsed[i].output) ==
                            std::string::npos,
                        "label leaked into the input");
                std::string prose;
                for (std::size_t j = 0; j < ds.feature_count(); ++j) {
                    if (j) prose += ' ';
                    prose += records[i].sentences[j];
                }
                require(parsed[i].input == prose,
                        "emitted input did not round-trip");
            }
        }
    }
}

void criterion_descriptor_service() {
    for (const auto* name : {"iris", "wine", "seeds"}) {
        auto schema =
            Schema::load(kDataDir + "/schemas/" + std::string(name) +
                         ".schema.json");
        auto catalog = load_bundled(name, kDataDir + "/catalogs");
        for (const auto& f : schema.features())
            require(catalog.covers(f.name),
                    std::string(name) + " catalog misses " + f.name);
    }
    auto wine = load_bundled("wine", kDataDir + "/catalogs");
    require(wine.descriptor("Malic acid") ==
                "Malic acid quantity missing for this wine sample.",
            "wine catalog entry mismatch");
    auto iris = load_bundled("iris", kDataDir + "/catalogs");
    require(iris.descriptor("Sepal Length") == "Sepal Length: Unavailable",
            "iris catalog entry mismatch");

    // fixture transcript: the bundled wine entries in name: descriptor form
    auto schema = Schema::load(kDataDir + "/schemas/wine.schema.json");
    std::string transcript;
    for (const auto& f : schema.features())
        transcript += f.name + ": " + wine.descriptor(f.name) + "\n";
    auto parsed = parse_descriptor_response(transcript, schema);
    require(parsed.entries.size() == 13, "wine transcript parse != 13 entries");

    // drop one line -> coverage gap
    std::string truncated =
        transcript.substr(0, transcript.rfind("Proline:"));
    bool raised = false;
    try {
        parse_descriptor_response(truncated, schema);
    } catch (const Error& e) {
        raised = e.code() == "CoverageGap";
    }
    require(raised, "12-line fixture did not raise CoverageGap");
}

void criterion_smoke(const std::string& cli) {
    const auto out_dir = fs::temp_directory_path() / "crilm_acceptance_runall";
    fs::remove_all(out_dir);
    const auto config_path =
        fs::temp_directory_path() / "crilm_acceptance_runall.json";
    {
        std::ofstream cfg(config_path);
        cfg << "{\n"
            << "  \"input_csv\": \"" << kDataDir << "/csv/iris.csv\",\n"
            << "  \"schema\": \"" << kDataDir << "/schemas/iris.schema.json\",\n"
            << "  \"catalog\": \"" << kDataDir
            << "/catalogs/iris.catalog.json\",\n"
            << "  \"output_dir\": \"" << out_dir.string() << "\",\n"
            << "  \"generic_tokens\": [\"NaN\", \"Missing value\"],\n"
            << "  \"seed\": 20240817\n"
            << "}\n";
    }

    const auto start = std::chrono::steady_clock::now();
    const std::string cmd =
        "\"" + cli + "\" run-all --config \"" + config_path.string() +
        "\" > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    const auto elapsed = std::chrono::duration_cast<std::chrono::seconds>(
                             std::chrono::steady_clock::now() - start)
                             .count();
    require(rc == 0, "run-all exited with " + std::to_string(rc));
    require(elapsed < 120,
            "run-all took " + std::to_string(elapsed) + "s (budget 120s)");

    for (const char* mech : {"mcar", "mar", "mnar"}) {
        const fs::path dir = out_dir / mech;
        for (const char* artifact :
             {"masked.csv", "mask_report.json", "imputed_mean.csv",
              "imputed_knn_k_5_.csv", "imputed_chained.csv",
              "corpus_specific.txt", "records_specific.jsonl",
              "corpus_generic_NaN.txt", "records_generic_NaN.jsonl",
              "corpus_generic_Missing_value.txt",
              "records_generic_Missing_value.jsonl", "report.md"})
            require(fs::exists(dir / artifact),
                    std::string(mech) + "/" + artifact + " missing");
    }
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: crilm_acceptance <path-to-crilm-cli>\n";
        return 2;
    }
    const std::string cli = argv[1];

    struct Criterion {
        const char* label;
        std::function<void()> run;
    };
    const std::vector<Criterion> criteria{
        {"1 missingness fidelity (MCAR)", criterion_mcar},
        {"2 missingness fidelity (MAR)", criterion_mar},
        {"3 missingness fidelity (MNAR)", criterion_mnar},
        {"4 imputer oracles", criterion_imputer_oracles},
        {"5 imputer ordering property", criterion_imputer_ordering},
        {"6 contextualization round-trip", criterion_roundtrip},
        {"7 reference-text fidelity", criterion_paper_text},
        {"8 protocol fidelity", criterion_protocol},
        {"9 emission validity", criterion_emission},
        {"10 descriptor service", criterion_descriptor_service},
        {"11 end-to-end smoke", [&] { criterion_smoke(cli); }},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        const auto start = std::chrono::steady_clock::now();
        std::string error;
        try {
            criterion.run();
        } catch (const std::exception& e) {
            error = e.what();
        }
        const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::steady_clock::now() - start)
                            .count();
        if (error.empty()) {
            std::cout << "PASS  criterion " << criterion.label << " (" << ms
                      << " ms)\n";
        } else {
            ++failures;
            std::cout << "FAIL  criterion " << criterion.label << " (" << ms
                      << " ms): " << error << "\n";
        }
    }
    return failures == 0 ? 0 : 1;
}
