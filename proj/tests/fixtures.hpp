#pragma once

#include <vector>

#include "hero/model.hpp"
#include "hero/synth.hpp"

struct Fixture {
  hero::LingTree tree;
  hero::EmbeddingTable table;
  hero::ModelParams model;
};

// A random tree, table and model; the classifier bias is made non-zero.
inline Fixture make_fixture(std::uint64_t seed, hero::SharingMode mode,
                            hero::AblationMode ablation = hero::AblationMode::FULL, int d = 8,
                            int num_edus = 3) {
  hero::Rng rng(seed);
  hero::synth::TreeShape shape;
  shape.num_edus = num_edus;
  Fixture f{hero::synth::random_tree(rng, shape), hero::EmbeddingTable(d), {}};
  f.table = hero::synth::random_table(hero::synth::default_vocab(), d, rng);
  const hero::LingTree* trees[] = {&f.tree};
  f.model = hero::ModelParams::init({mode, ablation, d}, hero::build_attribute_vocab(trees), rng);
  f.model.params.classifier.b << rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5);
  return f;
}

// Every registry entry replaced by a copy of the first one.
inline void tie_registry(hero::ModelParams& m, const hero::BiGru& shared) {
  for (auto& [key, bi] : m.params.registry) bi = shared;
}
