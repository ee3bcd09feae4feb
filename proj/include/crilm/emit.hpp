#pragma once

#include <string>
#include <vector>

#include "crilm/contextualize.hpp"
#include "crilm/schema.hpp"

namespace crilm {

struct FineTuneRecord {
    std::string instruction;
    std::string input;  // record prose without the target sentence
    std::string output; // target sentence; empty for inference records
};

// Classification instruction naming the label set; with missingness_aware
// it also carries the descriptor-guidance sentence.
std::string build_instruction(const Schema& schema, bool missingness_aware);

FineTuneRecord to_finetune_record(const ContextualRecord& record,
                                  const Schema& schema,
                                  const std::string& instruction);

// Line-delimited JSON objects with keys instruction/input/output (output is
// omitted when no record carries a target). Records must be uniformly with
// or without targets; returns the number of lines written.
std::size_t emit_records(const std::vector<ContextualRecord>& records,
                         const Schema& schema, const std::string& out_path,
                         bool missingness_aware = true);

std::vector<FineTuneRecord> parse_emitted_file(const std::string& path);

} // namespace crilm
