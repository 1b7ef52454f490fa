#pragma once

// JSONL dataset: one {"id": string, "label": 0|1, "tree": string} per line.
// label 1 = fake, 0 = true.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "hero/ling_tree.hpp"

namespace hero {

struct LabeledDocument {
  std::string id;
  LingTree tree;
  int y = 0;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LineDiagnostic {
  std::size_t line;
  std::string message;
};

struct DatasetLoad {
  std::vector<LabeledDocument> docs;
  std::vector<LineDiagnostic> errors;
  std::size_t lines = 0;  // non-blank records seen
};

// Throws std::invalid_argument with a field-level message on a bad record.
LabeledDocument parse_record(const std::string& line);
std::string format_record(const LabeledDocument& doc);

// Never throws on bad records; they are collected in errors.
DatasetLoad read_dataset(std::istream& in);
DatasetLoad load_dataset(const std::filesystem::path& path);

// Like load_dataset, but throws std::invalid_argument on the first bad line.
std::vector<LabeledDocument> load_dataset_strict(const std::filesystem::path& path);

void write_dataset(std::ostream& out, const std::vector<LabeledDocument>& docs);

}  // namespace hero
