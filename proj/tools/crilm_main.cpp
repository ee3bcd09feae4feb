// crilm: missing-data pipeline CLI
//
// inject -> impute/contextualize -> descriptors -> emit -> evaluate,
// plus a run-all driver that reproduces the whole pipeline from a config.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "crilm/contextualize.hpp"
#include "crilm/dataset.hpp"
#include "crilm/descriptors.hpp"
#include "crilm/emit.hpp"
#include "crilm/error.hpp"
#include "crilm/eval.hpp"
#include "crilm/imputers.hpp"
#include "crilm/missingness.hpp"
#include "crilm/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw crilm::data_error("FileNotFound", "cannot open '" + path + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw crilm::data_error("BadConfig", e.what());
    }
    return doc;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw crilm::data_error("IoError", "cannot write '" + path + "'");
    out << text;
}

crilm::MissingnessSpec mechanism_from_json(const json& doc) {
    crilm::MissingnessSpec spec;
    spec.mechanism = crilm::mechanism_from_string(
        doc.value("type", std::string("mcar")));
    spec.rate = doc.value("rate", spec.rate);
    spec.subset_quantile = doc.value("subset_quantile", spec.subset_quantile);
    spec.removal_rate = doc.value("removal_rate", spec.removal_rate);
    spec.quantile = doc.value("quantile", spec.quantile);
    spec.independent_col =
        doc.value("independent_col", spec.independent_col);
    spec.seed = doc.value("seed", spec.seed);
    return spec;
}

crilm::ImputerKind imputer_from_json(const json& doc) {
    const std::string method = doc.value("method", std::string("mean"));
    if (method == "mean") return crilm::ImputerKind::mean();
    if (method == "knn") return crilm::ImputerKind::knn(doc.value("k", 5));
    if (method == "chained")
        return crilm::ImputerKind::chained(doc.value("max_iter", 10),
                                           doc.value("tol", 1e-4));
    if (method == "external")
        return crilm::ImputerKind::external(doc.at("csv").get<std::string>());
    throw crilm::usage_error("BadImputer", "unknown method '" + method + "'");
}

crilm::ImputerKind imputer_from_flags(const std::string& method, int k,
                                      int max_iter, double tol) {
    if (method == "mean") return crilm::ImputerKind::mean();
    if (method == "knn") return crilm::ImputerKind::knn(k);
    if (method == "chained") return crilm::ImputerKind::chained(max_iter, tol);
    throw crilm::usage_error("BadImputer", "unknown method '" + method + "'");
}

void write_corpus(const std::vector<crilm::ContextualRecord>& records,
                  const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw crilm::data_error("IoError", "cannot write '" + path + "'");
    for (const auto& record : records) out << record.to_line() << '\n';
}

crilm::DescriptorMode resolve_mode(const std::string& mode_name,
                                   const std::string& generic_token,
                                   const std::string& catalog_path) {
    if (mode_name == "generic")
        return crilm::DescriptorMode::generic(generic_token);
    if (mode_name == "specific") {
        if (catalog_path.empty())
            throw crilm::usage_error("NoCatalog",
                                     "--catalog is required in specific mode");
        return crilm::DescriptorMode::specific(
            crilm::DescriptorCatalog::load(catalog_path));
    }
    throw crilm::usage_error("BadMode", "mode must be specific or generic");
}

// ------------------------------------------------------------------ run-all

void run_all(const std::string& config_path) {
    const json cfg = load_json_file(config_path);

    const auto schema =
        crilm::Schema::load(cfg.at("schema").get<std::string>());
    const auto ds = crilm::Dataset::load_csv(
        cfg.at("input_csv").get<std::string>(), schema);
    const auto catalog =
        crilm::DescriptorCatalog::load(cfg.at("catalog").get<std::string>());
    const std::uint64_t seed = cfg.value("seed", 0);
    const fs::path out_dir = cfg.at("output_dir").get<std::string>();

    std::vector<crilm::ImputerKind> imputers;
    if (cfg.contains("imputers"))
        for (const auto& item : cfg.at("imputers"))
            imputers.push_back(imputer_from_json(item));
    else
        imputers = {crilm::ImputerKind::mean(), crilm::ImputerKind::knn(5),
                    crilm::ImputerKind::chained()};

    std::vector<std::string> generic_tokens =
        cfg.value("generic_tokens", std::vector<std::string>{"NaN"});

    for (const auto& mech_name :
         cfg.value("mechanisms",
                   std::vector<std::string>{"mcar", "mar", "mnar"})) {
        crilm::MissingnessSpec mech;
        mech.mechanism = crilm::mechanism_from_string(mech_name);
        mech.rate = cfg.value("mcar_rate", mech.rate);
        mech.subset_quantile =
            cfg.value("mar_subset_quantile", mech.subset_quantile);
        mech.removal_rate = cfg.value("mar_removal_rate", mech.removal_rate);
        mech.independent_col =
            cfg.value("mar_independent_col", mech.independent_col);
        mech.quantile = cfg.value("mnar_quantile", mech.quantile);
        mech.seed = crilm::rng::derive(seed, mech_name);

        const fs::path mech_dir = out_dir / mech_name;
        fs::create_directories(mech_dir);

        const auto injected = crilm::inject(ds, mech);
        injected.write_csv((mech_dir / "masked.csv").string());
        write_text((mech_dir / "mask_report.json").string(),
                   crilm::audit(injected, mech_name, mech.seed)
                           .to_json()
                           .dump(2) +
                       "\n");

        for (const auto& kind : imputers) {
            auto imp = crilm::impute(injected, kind);
            std::string stem = kind.name();
            for (auto& c : stem)
                if (c == '(' || c == ')' || c == '=') c = '_';
            imp.data.write_csv(
                (mech_dir / ("imputed_" + stem + ".csv")).string());
        }

        const auto specific = crilm::DescriptorMode::specific(catalog);
        write_corpus(crilm::render_dataset(injected, specific, true),
                     (mech_dir / "corpus_specific.txt").string());
        crilm::emit_records(crilm::render_dataset(injected, specific, true),
                            schema,
                            (mech_dir / "records_specific.jsonl").string(),
                            true);
        for (const auto& token : generic_tokens) {
            const auto generic = crilm::DescriptorMode::generic(token);
            std::string stem = token;
            for (auto& c : stem)
                if (c == ' ') c = '_';
            write_corpus(crilm::render_dataset(injected, generic, true),
                         (mech_dir / ("corpus_generic_" + stem + ".txt"))
                             .string());
            crilm::emit_records(
                crilm::render_dataset(injected, generic, true), schema,
                (mech_dir / ("records_generic_" + stem + ".jsonl")).string(),
                true);
        }

        crilm::ExperimentSpec spec;
        spec.mechanism = mech;
        spec.imputers = imputers;
        spec.eval_fraction = cfg.value("eval_fraction", 0.20);
        spec.repetitions = cfg.value("repetitions", 5);
        spec.proxy_k = cfg.value("proxy_k", 5);
        spec.master_seed = crilm::rng::derive(seed, "grid-" + mech_name);
        const auto report = crilm::run_grid(ds, spec);
        write_text((mech_dir / "report.md").string(),
                   crilm::render_report(report, crilm::ReportFormat::Markdown));
    }
    std::cerr << "run-all artifacts written to " << out_dir << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"CRILM missing-data pipeline"};
    app.require_subcommand(1);

    // ---- inject
    auto* inject = app.add_subcommand(
        "inject", "Apply a missingness mechanism to a complete CSV");
    std::string in_path, schema_path, out_path, report_path;
    std::string mechanism = "mcar", independent_col;
    double rate = 0.30, quantile = 0.30, removal_rate = 0.60;
    std::uint64_t seed = 0;
    bool allow_compounding = false;
    inject->add_option("--in", in_path, "input CSV")->required();
    inject->add_option("--schema", schema_path, "schema file")->required();
    inject->add_option("--out", out_path, "output CSV")->required();
    inject->add_option("--report", report_path, "mask report (JSON)");
    inject->add_option("--mechanism", mechanism, "mcar|mar|mnar");
    inject->add_option("--rate", rate, "MCAR removal rate");
    inject->add_option("--quantile", quantile,
                       "subset/self-masking quantile");
    inject->add_option("--removal-rate", removal_rate,
                       "MAR removal rate within the subset");
    inject->add_option("--independent-col", independent_col,
                       "MAR independent feature (default: first)");
    inject->add_option("--seed", seed, "mechanism seed");
    inject->add_flag("--allow-compounding", allow_compounding,
                     "permit injecting into an already-masked dataset");

    // ---- impute
    auto* impute_cmd =
        app.add_subcommand("impute", "Fill missing cells of a CSV");
    std::string imp_in, imp_schema, imp_out, imp_method = "mean";
    int imp_k = 5, imp_max_iter = 10;
    double imp_tol = 1e-4;
    impute_cmd->add_option("--in", imp_in, "input CSV")->required();
    impute_cmd->add_option("--schema", imp_schema, "schema file")->required();
    impute_cmd->add_option("--out", imp_out, "output CSV")->required();
    impute_cmd->add_option("--method", imp_method, "mean|knn|chained");
    impute_cmd->add_option("--k", imp_k, "k for knn");
    impute_cmd->add_option("--max-iter", imp_max_iter,
                           "chained-equations sweep cap");
    impute_cmd->add_option("--tol", imp_tol,
                           "chained-equations convergence tolerance");

    // ---- tune-k
    auto* tune = app.add_subcommand(
        "tune-k", "Pick k for knn imputation via the downstream proxy");
    std::string tune_in, tune_schema, tune_grid = "3,5,7,9";
    std::uint64_t tune_seed = 0;
    int tune_proxy_k = 5;
    tune->add_option("--in", tune_in, "input CSV (with missing cells)")
        ->required();
    tune->add_option("--schema", tune_schema, "schema file")->required();
    tune->add_option("--grid", tune_grid, "comma-separated k grid");
    tune->add_option("--seed", tune_seed, "holdout split seed");
    tune->add_option("--proxy-k", tune_proxy_k, "proxy classifier k");

    // ---- contextualize
    auto* ctx = app.add_subcommand(
        "contextualize", "Render records as natural-language lines");
    std::string ctx_in, ctx_schema, ctx_out, ctx_catalog;
    std::string ctx_mode = "specific", ctx_token = "NaN";
    bool ctx_with_target = false;
    ctx->add_option("--in", ctx_in, "input CSV")->required();
    ctx->add_option("--schema", ctx_schema, "schema file")->required();
    ctx->add_option("--out", ctx_out, "output text file")->required();
    ctx->add_option("--mode", ctx_mode, "specific|generic");
    ctx->add_option("--generic-token", ctx_token, "generic descriptor token");
    ctx->add_option("--catalog", ctx_catalog, "descriptor catalog (specific)");
    ctx->add_flag("--with-target", ctx_with_target,
                  "append the target sentence");

    // ---- descriptors
    auto* desc = app.add_subcommand(
        "descriptors", "Obtain a missing-value descriptor catalog");
    std::string desc_dataset, desc_schema, desc_describe, desc_out;
    std::string desc_catalog_dir;
    bool desc_offline = false;
    desc->add_option("--dataset", desc_dataset, "bundled dataset name");
    desc->add_option("--schema", desc_schema, "schema file");
    desc->add_option("--describe-file", desc_describe,
                     "text file with the dataset description (remote mode)");
    desc->add_option("--catalog-dir", desc_catalog_dir,
                     "directory of bundled catalogs");
    desc->add_option("--out", desc_out, "output catalog JSON")->required();
    desc->add_flag("--offline", desc_offline, "force the bundled catalog");

    // ---- emit
    auto* emit_cmd = app.add_subcommand(
        "emit", "Package a masked CSV into fine-tuning records");
    std::string emit_in, emit_schema, emit_out, emit_catalog;
    std::string emit_mode = "specific", emit_token = "NaN";
    bool emit_no_target = false;
    emit_cmd->add_option("--in", emit_in, "input CSV")->required();
    emit_cmd->add_option("--schema", emit_schema, "schema file")->required();
    emit_cmd->add_option("--out", emit_out, "output records file")->required();
    emit_cmd->add_option("--mode", emit_mode, "specific|generic");
    emit_cmd->add_option("--generic-token", emit_token, "generic token");
    emit_cmd->add_option("--catalog", emit_catalog, "descriptor catalog");
    emit_cmd->add_flag("--no-target", emit_no_target,
                       "emit inference records without the target");

    // ---- evaluate
    auto* evaluate = app.add_subcommand(
        "evaluate", "Run the repetition protocol and render a report");
    std::string eval_spec, eval_format = "markdown", eval_out;
    std::vector<std::string> eval_external;
    evaluate->add_option("--spec", eval_spec, "experiment config (JSON)")
        ->required();
    evaluate->add_option("--format", eval_format, "markdown|csv");
    evaluate->add_option("--out", eval_out, "output file (default: stdout)");
    evaluate->add_option("--imputed", eval_external,
                         "externally imputed CSV, evaluated alongside");

    // ---- validate
    auto* validate = app.add_subcommand(
        "validate", "Check a CSV against its schema");
    std::string val_in, val_schema;
    validate->add_option("--in", val_in, "input CSV")->required();
    validate->add_option("--schema", val_schema, "schema file")->required();

    // ---- run-all
    auto* runall = app.add_subcommand(
        "run-all", "Reproduce the full pipeline from a config file");
    std::string runall_config;
    runall->add_option("--config", runall_config, "pipeline config (JSON)")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*inject) {
            const auto schema = crilm::Schema::load(schema_path);
            const auto ds = crilm::Dataset::load_csv(in_path, schema);
            crilm::MissingnessSpec spec;
            spec.mechanism = crilm::mechanism_from_string(mechanism);
            spec.rate = rate;
            spec.subset_quantile = quantile;
            spec.removal_rate = removal_rate;
            spec.quantile = quantile;
            spec.independent_col = independent_col;
            spec.seed = seed;
            const auto injected = crilm::inject(ds, spec, allow_compounding);
            injected.write_csv(out_path);
            if (!report_path.empty())
                write_text(report_path,
                           crilm::audit(injected, mechanism, seed)
                                   .to_json()
                                   .dump(2) +
                               "\n");
        } else if (*impute_cmd) {
            const auto schema = crilm::Schema::load(imp_schema);
            const auto ds = crilm::Dataset::load_csv(imp_in, schema);
            const auto kind =
                imputer_from_flags(imp_method, imp_k, imp_max_iter, imp_tol);
            auto imp = crilm::impute(ds, kind);
            if (!imp.converged)
                std::cerr << "warning: chained equations did not converge\n";
            imp.data.write_csv(imp_out);
        } else if (*tune) {
            const auto schema = crilm::Schema::load(tune_schema);
            const auto ds = crilm::Dataset::load_csv(tune_in, schema);
            std::vector<int> grid;
            std::stringstream ss(tune_grid);
            std::string item;
            while (std::getline(ss, item, ','))
                if (!item.empty()) grid.push_back(std::stoi(item));
            const int proxy_k = tune_proxy_k;
            const int best = crilm::tune_k(
                ds, grid,
                [proxy_k](const crilm::ImputedDataset& tr,
                          const crilm::ImputedDataset& ev) {
                    return crilm::proxy_classify(tr, ev, proxy_k);
                },
                tune_seed);
            std::cout << best << "\n";
        } else if (*ctx) {
            const auto schema = crilm::Schema::load(ctx_schema);
            const auto ds = crilm::Dataset::load_csv(ctx_in, schema);
            const auto mode = resolve_mode(ctx_mode, ctx_token, ctx_catalog);
            write_corpus(crilm::render_dataset(ds, mode, ctx_with_target),
                         ctx_out);
        } else if (*desc) {
            const std::string catalog_dir =
                !desc_catalog_dir.empty()
                    ? desc_catalog_dir
                    : (std::getenv("CRILM_CATALOG_DIR")
                           ? std::getenv("CRILM_CATALOG_DIR")
                           : "data/catalogs");
            auto endpoint = crilm::EndpointConfig::from_env();
            if (desc_offline || endpoint.url.empty()) {
                if (desc_dataset.empty())
                    throw crilm::usage_error(
                        "NoDataset", "--dataset is required in offline mode");
                crilm::load_bundled(desc_dataset, catalog_dir).save(desc_out);
            } else {
                if (desc_schema.empty() || desc_describe.empty())
                    throw crilm::usage_error(
                        "NoSchema",
                        "--schema and --describe-file are required for the "
                        "remote path");
                const auto schema = crilm::Schema::load(desc_schema);
                std::ifstream df(desc_describe);
                if (!df)
                    throw crilm::data_error("FileNotFound",
                                            "cannot open '" + desc_describe +
                                                "'");
                std::stringstream buffer;
                buffer << df.rdbuf();
                const auto prompt =
                    crilm::build_prompt(schema, buffer.str());
                crilm::request_descriptors(prompt, schema, endpoint)
                    .save(desc_out);
            }
        } else if (*emit_cmd) {
            const auto schema = crilm::Schema::load(emit_schema);
            const auto ds = crilm::Dataset::load_csv(emit_in, schema);
            const auto mode = resolve_mode(emit_mode, emit_token, emit_catalog);
            const bool aware =
                mode.kind == crilm::DescriptorMode::Kind::FeatureSpecific ||
                ds.any_missing();
            const auto records =
                crilm::render_dataset(ds, mode, !emit_no_target);
            const std::size_t n =
                crilm::emit_records(records, schema, emit_out, aware);
            std::cerr << n << " records written to " << emit_out << "\n";
        } else if (*evaluate) {
            const json cfg = load_json_file(eval_spec);
            const auto schema =
                crilm::Schema::load(cfg.at("schema").get<std::string>());
            const auto ds = crilm::Dataset::load_csv(
                cfg.at("input_csv").get<std::string>(), schema);
            crilm::ExperimentSpec spec;
            if (cfg.contains("mechanism"))
                spec.mechanism = mechanism_from_json(cfg.at("mechanism"));
            if (cfg.contains("imputers"))
                for (const auto& item : cfg.at("imputers"))
                    spec.imputers.push_back(imputer_from_json(item));
            spec.eval_fraction = cfg.value("eval_fraction", 0.20);
            spec.repetitions = cfg.value("repetitions", 5);
            spec.proxy_k = cfg.value("proxy_k", 5);
            spec.master_seed = cfg.value("seed", 0);
            for (const auto& csv : eval_external)
                spec.imputers.push_back(crilm::ImputerKind::external(csv));
            const auto report = crilm::run_grid(ds, spec);
            const auto text = crilm::render_report(
                report, eval_format == "csv" ? crilm::ReportFormat::Csv
                                             : crilm::ReportFormat::Markdown);
            if (eval_out.empty())
                std::cout << text;
            else
                write_text(eval_out, text);
        } else if (*validate) {
            const auto schema = crilm::Schema::load(val_schema);
            const auto ds = crilm::Dataset::load_csv(val_in, schema);
            std::cerr << "ok: " << ds.rows() << " rows, "
                      << ds.feature_count() << " features\n";
        } else if (*runall) {
            run_all(runall_config);
        }
    } catch (const crilm::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
