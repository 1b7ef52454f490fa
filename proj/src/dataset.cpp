#include "hero/dataset.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

namespace hero {

using nlohmann::json;

LabeledDocument parse_record(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("record is not a JSON object");

  auto field = [&](const char* name) -> const json& {
    auto it = j.find(name);
    if (it == j.end()) throw std::invalid_argument(std::string("missing field \"") + name + "\"");
    return *it;
  };

  LabeledDocument doc;
  const json& id = field("id");
  if (!id.is_string()) throw std::invalid_argument("field \"id\" must be a string");
  doc.id = id.get<std::string>();

  const json& label = field("label");
  if (!label.is_number_integer() || (label.get<long long>() != 0 && label.get<long long>() != 1))
    throw std::invalid_argument("field \"label\" must be 0 or 1");
  doc.y = static_cast<int>(label.get<long long>());

  const json& tree = field("tree");
  if (!tree.is_string()) throw std::invalid_argument("field \"tree\" must be a string");
  try {
    doc.tree = parse_sexpr(tree.get<std::string>(), doc.id);
  } catch (const TreeError& e) {
    throw std::invalid_argument(std::string("field \"tree\": ") + e.what() + " (offset " +
                                std::to_string(e.offset()) + ")");
  }
  return doc;
}

std::string format_record(const LabeledDocument& doc) {
  // Keys in a fixed order so files diff cleanly.
  return "{\"id\":" + json(doc.id).dump() + ",\"label\":" + std::to_string(doc.y) +
         ",\"tree\":" + json(serialize_sexpr(doc.tree)).dump() + "}";
}

DatasetLoad read_dataset(std::istream& in) {
  DatasetLoad out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    ++out.lines;
    try {
      out.docs.push_back(parse_record(line));
    } catch (const std::invalid_argument& e) {
      out.errors.push_back({line_no, e.what()});
    }
  }
  return out;
}

DatasetLoad load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset " + path.string());
  return read_dataset(in);
}

std::vector<LabeledDocument> load_dataset_strict(const std::filesystem::path& path) {
  DatasetLoad load = load_dataset(path);
  if (!load.errors.empty()) {
    const auto& e = load.errors.front();
    throw std::invalid_argument(path.string() + ":" + std::to_string(e.line) + ": " + e.message);
  }
  return std::move(load.docs);
}

void write_dataset(std::ostream& out, const std::vector<LabeledDocument>& docs) {
  for (const auto& d : docs) out << format_record(d) << '\n';
}

}  // namespace hero
