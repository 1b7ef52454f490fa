#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fixtures.hpp"
#include "hero/checkpoint.hpp"
#include "hero/dataset.hpp"

using namespace hero;

namespace {

CheckpointError::Kind load_error(const std::string& text) {
  try {
    checkpoint_from_string(text);
  } catch (const CheckpointError& e) {
    return e.kind();
  }
  FAIL("no CheckpointError");
  return CheckpointError::Kind::Io;
}

}  // namespace

TEST_CASE("checkpoint round trip is exact in every mode") {
  for (SharingMode mode : kAllSharingModes)
    for (AblationMode ab : kAllAblationModes) {
      Fixture f = make_fixture(13, mode, ab);
      const std::string text = checkpoint_to_string(f.model);
      ModelParams back = checkpoint_from_string(text);
      CHECK(back.config.mode == mode);
      CHECK(back.config.ablation == ab);
      CHECK(back.config.d == 8);
      CHECK(back.vocab == f.model.vocab);
      CHECK(back.params == f.model.params);
      CHECK(checkpoint_to_string(back) == text);
      CHECK(predict(back, f.tree, f.table) == predict(f.model, f.tree, f.table));
    }
}

TEST_CASE("checkpoint on disk") {
  Fixture f = make_fixture(1, SharingMode::ATTRIBUTE_SPECIFIC);
  auto path = std::filesystem::temp_directory_path() / "hero_test_model.json";
  save_model(f.model, path);
  CHECK(load_model(path).params == f.model.params);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_model(path), CheckpointError);
}

TEST_CASE("bad checkpoints") {
  Fixture f = make_fixture(1, SharingMode::LEVEL_SPECIFIC);
  const std::string text = checkpoint_to_string(f.model);
  auto j = nlohmann::json::parse(text);

  auto version = j;
  version["version"] = 99;
  CHECK(load_error(version.dump()) == CheckpointError::Kind::VersionMismatch);

  CHECK(load_error(text.substr(0, text.size() / 2)) == CheckpointError::Kind::CorruptCheckpoint);
  CHECK(load_error("[]") == CheckpointError::Kind::CorruptCheckpoint);

  auto missing = j;
  missing["registry"].erase("syntax");
  CHECK(load_error(missing.dump()) == CheckpointError::Kind::CorruptCheckpoint);

  auto shape = j;
  shape["classifier"]["b"] = {1.0, 2.0, 3.0};
  CHECK(load_error(shape.dump()) == CheckpointError::Kind::CorruptCheckpoint);

  auto dim = j;
  dim["d"] = 6;
  CHECK(load_error(dim.dump()) == CheckpointError::Kind::CorruptCheckpoint);

  auto mode = j;
  mode["mode"] = "tied";
  CHECK(load_error(mode.dump()) == CheckpointError::Kind::CorruptCheckpoint);
}

TEST_CASE("dataset records") {
  LabeledDocument d = parse_record(R"j({"id": "a1", "label": 1, "tree": "(EDU (NNP Obama))"})j");
  CHECK(d.id == "a1");
  CHECK(d.y == 1);
  CHECK(d.tree.doc_id == "a1");
  CHECK(format_record(d) == R"j({"id":"a1","label":1,"tree":"(EDU (NNP Obama))"})j");
  CHECK(parse_record(format_record(d)).tree == d.tree);

  CHECK_THROWS_AS(parse_record("{"), std::invalid_argument);
  CHECK_THROWS_AS(parse_record(R"j({"id": "a", "label": 2, "tree": "(EDU (NN x))"})j"), std::invalid_argument);
  CHECK_THROWS_AS(parse_record(R"j({"id": "a", "tree": "(EDU (NN x))"})j"), std::invalid_argument);
  CHECK_THROWS_AS(parse_record(R"j({"id": "a", "label": 0, "tree": "(EDU x)"})j"), std::invalid_argument);

  std::istringstream in("{\"id\":\"a\",\"label\":0,\"tree\":\"(EDU (NN x))\"}\n\nnot json\n"
                        "{\"id\":\"b\",\"label\":1,\"tree\":\"(EDU (NN y))\"}\n");
  DatasetLoad load = read_dataset(in);
  CHECK(load.lines == 3);
  CHECK(load.docs.size() == 2);
  REQUIRE(load.errors.size() == 1);
  CHECK(load.errors[0].line == 3);

  std::ostringstream out;
  write_dataset(out, load.docs);
  std::istringstream again(out.str());
  CHECK(read_dataset(again).docs.size() == 2);
}
