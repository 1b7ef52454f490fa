#include "hero/cli.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "hero/checkpoint.hpp"
#include "hero/dataset.hpp"
#include "hero/embed.hpp"
#include "hero/model.hpp"
#include "hero/reference.hpp"
#include "hero/stats.hpp"
#include "hero/synth.hpp"
#include "hero/trainer.hpp"

namespace hero::cli {

namespace {

struct Options {
  std::string data, embeddings, config, model, tree, out_model = "model.json", report, csv, json;
  std::vector<double> grid;
  bool use_grid = false;
  bool as_json = false;
  std::string mode = "unified", ablation = "full";
  int d = 8;
  std::uint64_t seed = 7;
  int edus = 3;
};

// Output errors are I/O failures; anything else thrown here is handled by run().
void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path);
  f << text;
  if (!f) throw IoError("write failed for " + path);
}

EmbeddingTable load_embeddings(const std::string& path, int d, std::ostream& err) {
  LoadedTable t = load_table(path, d);
  if (t.duplicates) err << "warning: " << t.duplicates << " duplicate tokens in " << path << " (last wins)\n";
  return std::move(t.table);
}

std::vector<LabeledDocument> load_docs(const std::string& path) { return load_dataset_strict(path); }

int cmd_validate(const Options& o, std::ostream& out, std::ostream& err) {
  DatasetLoad load = load_dataset(o.data);
  for (const auto& e : load.errors) err << o.data << ":" << e.line << ": " << e.message << "\n";
  out << load.lines << " records, " << load.docs.size() << " valid, " << load.errors.size() << " invalid\n";
  return load.errors.empty() && load.lines > 0 ? kOk : kInvalid;
}

int cmd_train(const Options& o, std::ostream& out, std::ostream& err) {
  TrainConfig config = load_config(o.config);
  EmbeddingTable table = load_embeddings(o.embeddings, config.d, err);
  Split split = split_dataset(load_docs(o.data), config.seed);
  err << "split: " << split.train.size() << " train / " << split.val.size() << " val / " << split.test.size()
      << " test\n";

  TrainResult result;
  std::string report_json;
  if (o.use_grid) {
    GridResult g = grid_search_lr(split, config, o.grid, table);
    for (const auto& c : g.cells)
      err << "lr=" << c.lr << (c.failed ? " failed: " + c.error : std::string(" ok")) << "\n";
    err << "best lr=" << g.best_lr << "\n";
    report_json = grid_to_json(g);
    result = std::move(g.best);
  } else {
    result = train(split, config, table);
    report_json = report_to_json(result.report);
  }

  save_model(result.model, o.out_model);
  err << "checkpoint written to " << o.out_model << " (" << param_count(result.model) << " parameters)\n";
  if (o.report.empty()) {
    out << report_json;
  } else {
    write_file(o.report, report_json);
    if (result.report.test) out << metrics_table(*result.report.test, "test");
  }
  return kOk;
}

int cmd_eval(const Options& o, std::ostream& out, std::ostream& err) {
  ModelParams model = load_model(o.model);
  EmbeddingTable table = load_embeddings(o.embeddings, model.config.d, err);
  const auto docs = load_docs(o.data);
  MetricsReport m = evaluate(model, docs, table);
  out << (o.as_json ? metrics_to_json(m) : metrics_table(m));
  return kOk;
}

int cmd_predict(const Options& o, std::istream& in, std::ostream& out, std::ostream& err) {
  ModelParams model = load_model(o.model);
  EmbeddingTable table = load_embeddings(o.embeddings, model.config.d, err);
  std::ostringstream text;
  if (o.tree.empty() || o.tree == "-") {
    text << in.rdbuf();
  } else {
    std::ifstream f(o.tree);
    if (!f) throw IoError("cannot open tree file " + o.tree);
    text << f.rdbuf();
  }
  LingTree tree = parse_sexpr(text.str());
  const double p = predict(model, tree, table);
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, p, std::chars_format::fixed, 17);
  out << std::string(buf, end) << "\n";
  return kOk;
}

int cmd_gradcheck(const Options& o, std::ostream& out, std::ostream&) {
  ModelConfig config{parse_sharing_mode(o.mode), parse_ablation_mode(o.ablation), o.d};
  if (o.d <= 0 || o.d % 2 != 0) throw std::invalid_argument("--d must be a positive even integer");
  Rng rng(o.seed);
  synth::TreeShape shape;
  shape.num_edus = o.edus;
  LingTree tree = synth::random_tree(rng, shape);
  EmbeddingTable table = synth::random_table(synth::default_vocab(), o.d, rng);
  const LingTree* trees[] = {&tree};
  ModelParams model = ModelParams::init(config, build_attribute_vocab(trees), rng);
  model.params.classifier.b << rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5);
  const int y = static_cast<int>(rng.below(2));

  GradCheckResult r = reference::check_document_gradients(model, tree, table, y);
  out << "mode=" << o.mode << " ablation=" << o.ablation << " d=" << o.d << " params=" << param_count(model)
      << " max_rel_error=" << r.max_rel_error << "\n";
  return r.max_rel_error < 1e-4 ? kOk : kNumeric;
}

int cmd_stats(const Options& o, std::ostream& out, std::ostream&) {
  const auto docs = load_docs(o.data);
  CorpusReport report = corpus_report(docs);
  const std::string csv = report_to_csv(report);
  if (o.csv.empty())
    out << csv;
  else
    write_file(o.csv, csv);
  if (!o.json.empty()) write_file(o.json, report_to_json(report));
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hierarchical recursive network over discourse + syntax trees", "hero"};
  app.require_subcommand(1);
  Options o;

  auto* validate = app.add_subcommand("validate", "Check a JSONL dataset line by line");
  validate->add_option("--data", o.data, "JSONL dataset")->required();

  auto* train = app.add_subcommand("train", "Train a model (optionally with a learning-rate grid)");
  train->add_option("--data", o.data, "JSONL dataset")->required();
  train->add_option("--embeddings", o.embeddings, "Word-vector text file")->required();
  train->add_option("--config", o.config, "key=value training config")->required();
  auto* grid = train->add_option("--grid", o.grid, "Learning rates to search, e.g. 0.1,0.01")->delimiter(',');
  train->add_option("--out", o.out_model, "Checkpoint path")->capture_default_str();
  train->add_option("--report", o.report, "Write the JSON report here instead of stdout");

  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint on a dataset");
  eval->add_option("--model", o.model)->required();
  eval->add_option("--data", o.data)->required();
  eval->add_option("--embeddings", o.embeddings)->required();
  eval->add_flag("--json", o.as_json, "Emit JSON instead of a table");

  auto* predict = app.add_subcommand("predict", "Print p(fake) for one tree");
  predict->add_option("--model", o.model)->required();
  predict->add_option("--embeddings", o.embeddings)->required();
  predict->add_option("--tree", o.tree, "Tree file, or - for stdin (default)");

  auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference check on a random tree");
  gradcheck->add_option("--mode", o.mode)->capture_default_str();
  gradcheck->add_option("--ablation", o.ablation)->capture_default_str();
  gradcheck->add_option("--d", o.d)->capture_default_str();
  gradcheck->add_option("--seed", o.seed)->capture_default_str();
  gradcheck->add_option("--edus", o.edus)->capture_default_str();

  auto* stats = app.add_subcommand("stats", "Fake-vs-true tree statistics with Welch t-tests");
  stats->add_option("--data", o.data)->required();
  stats->add_option("--csv", o.csv, "Write CSV here instead of stdout");
  stats->add_option("--json", o.json, "Also write a JSON mirror here");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInvalid;
  }
  o.use_grid = grid->count() > 0;

  try {
    if (*validate) return cmd_validate(o, out, err);
    if (*train) return cmd_train(o, out, err);
    if (*eval) return cmd_eval(o, out, err);
    if (*predict) return cmd_predict(o, in, out, err);
    if (*gradcheck) return cmd_gradcheck(o, out, err);
    if (*stats) return cmd_stats(o, out, err);
  } catch (const IoError& e) {
    err << "io error: " << e.what() << "\n";
    return kIo;
  } catch (const EmbedError& e) {
    err << "embeddings: " << e.what() << "\n";
    return e.kind() == EmbedError::Kind::Io ? kIo : kInvalid;
  } catch (const CheckpointError& e) {
    err << "checkpoint: " << e.what() << "\n";
    return e.kind() == CheckpointError::Kind::Io ? kIo : kInvalid;
  } catch (const TrainError& e) {
    err << "training: " << e.what() << "\n";
    return e.kind() == TrainError::Kind::NonFiniteLoss ? kNumeric : kInvalid;
  } catch (const TreeError& e) {
    err << "tree (offset " << e.offset() << "): " << e.what() << "\n";
    return kInvalid;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInvalid;
  }
  return kInvalid;
}

}  // namespace hero::cli
