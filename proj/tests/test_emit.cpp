#include <doctest.h>

#include <fstream>

#include "crilm/descriptors.hpp"
#include "crilm/emit.hpp"
#include "crilm/error.hpp"
#include "crilm/missingness.hpp"
#include "helpers.hpp"

using namespace crilm;

namespace {

const std::string kDataDir = CRILM_DATA_DIR;

std::string temp_path(const std::string& name) {
    return std::string("/tmp/crilm_emit_") + name;
}

} // namespace

TEST_CASE("build_instruction wording") {
    auto schema = Schema::load(kDataDir + "/schemas/wine.schema.json");
    const auto plain = build_instruction(schema, false);
    CHECK(plain.find("Predict the class based on the given measurements.") !=
          std::string::npos);
    CHECK(plain.find("class 1 wine") != std::string::npos);
    CHECK(plain.find("class 3 wine") != std::string::npos);
    CHECK(plain.find("descriptors") == std::string::npos);

    const auto aware = build_instruction(schema, true);
    CHECK(aware.find("Use the context provided by the missing value "
                     "descriptors to inform the prediction.") !=
          std::string::npos);
    CHECK(aware.rfind(plain, 0) == 0); // aware extends the plain instruction
}

TEST_CASE("to_finetune_record separates input from output") {
    auto schema = Schema::load(kDataDir + "/schemas/wine.schema.json");
    auto ds = Dataset::load_csv(kDataDir + "/csv/wine.csv", schema);
    auto rec = render_record(ds, 0, DescriptorMode::generic("NaN"), true);
    auto ft = to_finetune_record(rec, schema, build_instruction(schema, true));

    CHECK(ft.output == rec.target_sentence());
    CHECK(ft.input.find(ft.output) == std::string::npos); // no label leak
    for (std::size_t j = 0; j < 13; ++j)
        CHECK(ft.input.find(rec.sentences[j]) != std::string::npos);
}

TEST_CASE("emit_records round-trips through JSONL") {
    auto schema = Schema::load(kDataDir + "/schemas/wine.schema.json");
    auto ds = Dataset::load_csv(kDataDir + "/csv/wine.csv", schema);
    std::vector<std::size_t> head;
    for (std::size_t i = 0; i < 25; ++i) head.push_back(i);
    auto sub = ds.select_rows(head);
    auto injected = inject_mcar(sub, 0.3, 4);
    auto catalog = load_bundled("wine", kDataDir + "/catalogs");
    auto records =
        render_dataset(injected, DescriptorMode::specific(catalog), true);

    const auto path = temp_path("roundtrip.jsonl");
    CHECK(emit_records(records, schema, path) == 25);

    auto parsed = parse_emitted_file(path);
    REQUIRE(parsed.size() == 25);
    const auto instruction = build_instruction(schema, true);
    for (std::size_t i = 0; i < parsed.size(); ++i) {
        CHECK(parsed[i].instruction == instruction);
        CHECK(parsed[i].output == records[i].target_sentence());
        CHECK(parsed[i].input.find(parsed[i].output) == std::string::npos);
        // inputs are the record prose minus the target sentence
        std::string prose;
        for (std::size_t j = 0; j < 13; ++j) {
            if (!prose.empty()) prose += ' ';
            prose += records[i].sentences[j];
        }
        CHECK(parsed[i].input == prose);
    }
}

TEST_CASE("emit_records without targets omits the output key") {
    auto schema = Schema::load(kDataDir + "/schemas/wine.schema.json");
    auto ds = Dataset::load_csv(kDataDir + "/csv/wine.csv", schema);
    std::vector<std::size_t> head{0, 1, 2};
    auto records = render_dataset(ds.select_rows(head),
                                  DescriptorMode::generic("NaN"), false);
    const auto path = temp_path("notarget.jsonl");
    emit_records(records, schema, path, false);

    std::ifstream in(path);
    std::string line;
    std::size_t lines = 0;
    while (std::getline(in, line)) {
        ++lines;
        auto doc = nlohmann::json::parse(line);
        CHECK(doc.contains("instruction"));
        CHECK(doc.contains("input"));
        CHECK_FALSE(doc.contains("output"));
    }
    CHECK(lines == 3);

    auto parsed = parse_emitted_file(path);
    for (const auto& r : parsed) CHECK(r.output.empty());
}

TEST_CASE("emit_records error paths") {
    auto schema = Schema::load(kDataDir + "/schemas/wine.schema.json");
    auto ds = Dataset::load_csv(kDataDir + "/csv/wine.csv", schema);
    std::vector<std::size_t> head{0, 1};
    auto sub = ds.select_rows(head);

    SUBCASE("mixed target presence is rejected") {
        auto with = render_record(sub, 0, DescriptorMode::generic("NaN"), true);
        auto without =
            render_record(sub, 1, DescriptorMode::generic("NaN"), false);
        CHECK_THROWS_WITH_AS(
            emit_records({with, without}, schema, temp_path("mixed.jsonl")),
            doctest::Contains("MixedTargetPresence"), Error);
    }
    SUBCASE("empty record list is rejected") {
        CHECK_THROWS_WITH_AS(
            emit_records({}, schema, temp_path("empty.jsonl")),
            doctest::Contains("EmptyDataset"), Error);
    }
    SUBCASE("unwritable path is an io error") {
        auto rec = render_record(sub, 0, DescriptorMode::generic("NaN"), true);
        CHECK_THROWS_WITH_AS(
            emit_records({rec}, schema, "/nonexistent/dir/out.jsonl"),
            doctest::Contains("IoError"), Error);
    }
}
