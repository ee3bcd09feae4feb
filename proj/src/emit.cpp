#include "crilm/emit.hpp"

#include <fstream>

#include <json.hpp>

#include "crilm/error.hpp"

namespace crilm {

std::string build_instruction(const Schema& schema, bool missingness_aware) {
    std::string out = "Predict the class based on the given measurements.";
    out += " Possible classes: ";
    const auto& labels = schema.target().labels;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (i) out += ", ";
        out += labels[i];
    }
    out += '.';
    if (missingness_aware)
        out += " Use the context provided by the missing value descriptors "
               "to inform the prediction.";
    return out;
}

FineTuneRecord to_finetune_record(const ContextualRecord& record,
                                  const Schema& schema,
                                  const std::string& instruction) {
    FineTuneRecord out;
    out.instruction = instruction;
    const std::size_t d = schema.feature_count();
    for (std::size_t j = 0; j < d; ++j) {
        if (j) out.input += ' ';
        out.input += record.sentences[j];
    }
    if (record.has_target) out.output = record.target_sentence();
    return out;
}

std::size_t emit_records(const std::vector<ContextualRecord>& records,
                         const Schema& schema, const std::string& out_path,
                         bool missingness_aware) {
    if (records.empty())
        throw data_error("EmptyDataset", "no records to emit");
    bool any_target = false, any_without = false;
    for (const auto& r : records)
        (r.has_target ? any_target : any_without) = true;
    if (any_target && any_without)
        throw data_error("MixedTargetPresence",
                         "records mix with-target and without-target rows");

    std::ofstream out(out_path, std::ios::binary);
    if (!out)
        throw data_error("IoError", "cannot write '" + out_path + "'");

    const std::string instruction =
        build_instruction(schema, missingness_aware);
    for (const auto& record : records) {
        const FineTuneRecord ft =
            to_finetune_record(record, schema, instruction);
        nlohmann::json line{{"instruction", ft.instruction},
                            {"input", ft.input}};
        if (record.has_target) line["output"] = ft.output;
        out << line.dump() << '\n';
    }
    if (!out)
        throw data_error("IoError", "failed writing '" + out_path + "'");
    return records.size();
}

std::vector<FineTuneRecord> parse_emitted_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw data_error("FileNotFound", "cannot open '" + path + "'");
    std::vector<FineTuneRecord> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        try {
            auto doc = nlohmann::json::parse(line);
            FineTuneRecord r;
            r.instruction = doc.at("instruction").get<std::string>();
            r.input = doc.at("input").get<std::string>();
            r.output = doc.value("output", std::string());
            out.push_back(std::move(r));
        } catch (const nlohmann::json::exception& e) {
            throw data_error("BadEmittedRecord",
                             "line " + std::to_string(out.size()) + ": " +
                                 e.what());
        }
    }
    return out;
}

} // namespace crilm
