#pragma once

// Self-describing JSON checkpoint:
//
//   {"version": 1, "mode": ..., "ablation": ..., "d": ...,
//    "attribute_vocab": {"syntax": [...], "rr": [...]},
//    "registry": {key: {"fwd": {"W_r": [[...]], ...}, "bwd": {...}}},
//    "classifier": {"W": [[...], [...]], "b": [...]}}
//
// Doubles are written in shortest round-trip form, so a reload is exact.

#include <filesystem>
#include <stdexcept>
#include <string>

#include "hero/model.hpp"

namespace hero {

inline constexpr int kCheckpointVersion = 1;

class CheckpointError : public std::runtime_error {
 public:
  enum class Kind { VersionMismatch, CorruptCheckpoint, Io };
  CheckpointError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

std::string checkpoint_to_string(const ModelParams& model);
ModelParams checkpoint_from_string(const std::string& text);

void save_model(const ModelParams& model, const std::filesystem::path& path);
ModelParams load_model(const std::filesystem::path& path);

}  // namespace hero
