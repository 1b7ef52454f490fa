#pragma once

// Frozen pretrained word vectors (GloVe-style text: "token v1 v2 ... vd").

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "hero/ling_tree.hpp"

namespace hero {

using Vec = Eigen::VectorXd;

class EmbedError : public std::runtime_error {
 public:
  enum class Kind { DimMismatch, ParseError, EmptyFile, Io };

  EmbedError(Kind kind, std::size_t line, const std::string& what)
      : std::runtime_error(what), kind_(kind), line_(line) {}

  Kind kind() const { return kind_; }
  std::size_t line() const { return line_; }

 private:
  Kind kind_;
  std::size_t line_;
};

struct LookupPolicy {
  bool lowercase_fallback = true;
};

class EmbeddingTable {
 public:
  explicit EmbeddingTable(int dim = 0) : dim_(dim), zero_(Vec::Zero(dim)) {}

  int dim() const { return dim_; }
  std::size_t size() const { return entries_.size(); }
  bool contains(std::string_view token) const { return entries_.count(std::string(token)) != 0; }

  // Returns true if an existing entry was replaced.
  bool insert(std::string token, Vec vec);

  // Exact match, then lowercased match, then the zero vector (bumping *oov).
  const Vec& lookup(std::string_view token, std::size_t* oov = nullptr,
                    const LookupPolicy& policy = {}) const;

 private:
  int dim_;
  std::unordered_map<std::string, Vec> entries_;
  Vec zero_;
};

struct LoadedTable {
  EmbeddingTable table;
  std::size_t duplicates = 0;
};

LoadedTable load_table(const std::filesystem::path& path, int expected_dim);
LoadedTable parse_table(std::istream& in, int expected_dim);

struct LeafEmbeddings {
  std::vector<Vec> vectors;  // one per WORD leaf, left to right
  std::size_t oov = 0;
};

LeafEmbeddings embed_leaves(const EmbeddingTable& table, const LingTree& tree,
                            const LookupPolicy& policy = {});

}  // namespace hero
