#include "hero/embed.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>

namespace hero {

bool EmbeddingTable::insert(std::string token, Vec vec) {
  if (vec.size() != dim_)
    throw EmbedError(EmbedError::Kind::DimMismatch, 0,
                     "vector for '" + token + "' has " + std::to_string(vec.size()) + " values, expected " +
                         std::to_string(dim_));
  auto [it, inserted] = entries_.insert_or_assign(std::move(token), std::move(vec));
  return !inserted;
}

const Vec& EmbeddingTable::lookup(std::string_view token, std::size_t* oov, const LookupPolicy& policy) const {
  if (auto it = entries_.find(std::string(token)); it != entries_.end()) return it->second;
  if (policy.lowercase_fallback) {
    std::string lower(token);
    for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (auto it = entries_.find(lower); it != entries_.end()) return it->second;
  }
  if (oov) ++*oov;
  return zero_;
}

LoadedTable parse_table(std::istream& in, int expected_dim) {
  if (expected_dim <= 0)
    throw EmbedError(EmbedError::Kind::DimMismatch, 0, "embedding dimension must be positive");
  LoadedTable out{EmbeddingTable(expected_dim), 0};
  std::string line;
  std::size_t line_no = 0;
  std::vector<double> values;
  values.reserve(expected_dim);
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;

    const char* p = line.data();
    const char* end = p + line.size();
    while (p < end && (*p == ' ' || *p == '\t')) ++p;
    const char* tok_begin = p;
    while (p < end && *p != ' ' && *p != '\t') ++p;
    std::string token(tok_begin, p);

    values.clear();
    while (true) {
      while (p < end && (*p == ' ' || *p == '\t')) ++p;
      if (p >= end) break;
      double v = 0.0;
      auto [next, ec] = std::from_chars(p, end, v);
      if (ec != std::errc() || (next < end && *next != ' ' && *next != '\t') || !std::isfinite(v))
        throw EmbedError(EmbedError::Kind::ParseError, line_no,
                         "line " + std::to_string(line_no) + ": bad number in vector for '" + token + "'");
      values.push_back(v);
      p = next;
    }
    if (static_cast<int>(values.size()) != expected_dim)
      throw EmbedError(EmbedError::Kind::DimMismatch, line_no,
                       "line " + std::to_string(line_no) + ": " + std::to_string(values.size()) +
                           " values, expected " + std::to_string(expected_dim));
    Vec vec = Eigen::Map<const Vec>(values.data(), expected_dim);
    if (out.table.insert(std::move(token), std::move(vec))) ++out.duplicates;
  }
  if (out.table.size() == 0) throw EmbedError(EmbedError::Kind::EmptyFile, 0, "embedding file has no entries");
  return out;
}

LoadedTable load_table(const std::filesystem::path& path, int expected_dim) {
  std::ifstream in(path);
  if (!in) throw EmbedError(EmbedError::Kind::Io, 0, "cannot open embedding file " + path.string());
  return parse_table(in, expected_dim);
}

LeafEmbeddings embed_leaves(const EmbeddingTable& table, const LingTree& tree, const LookupPolicy& policy) {
  LeafEmbeddings out;
  for (const auto& word : leaf_words(tree)) out.vectors.push_back(table.lookup(word, &out.oov, policy));
  return out;
}

}  // namespace hero
