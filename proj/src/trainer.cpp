#include "hero/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <sstream>

#include <json.hpp>

namespace hero {

using ordered_json = nlohmann::ordered_json;

void TrainConfig::check() const {
  if (!(lr >= 0.0) || !std::isfinite(lr)) throw std::invalid_argument("lr must be a finite non-negative number");
  if (max_epochs < 1) throw std::invalid_argument("max_epochs must be at least 1");
  if (d <= 0 || d % 2 != 0) throw std::invalid_argument("d must be a positive even integer");
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::invalid_argument("config key '" + key + "' expects true/false, got '" + v + "'");
}

template <class T>
T parse_number(const std::string& v, const std::string& key) {
  std::istringstream in(v);
  T out{};
  in >> out;
  if (!in || !in.eof()) throw std::invalid_argument("config key '" + key + "' has a bad value '" + v + "'");
  return out;
}

}  // namespace

TrainConfig parse_config(std::istream& in) {
  TrainConfig c;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "lr")
        c.lr = parse_number<double>(value, key);
      else if (key == "max_epochs")
        c.max_epochs = parse_number<int>(value, key);
      else if (key == "seed")
        c.seed = parse_number<std::uint64_t>(value, key);
      else if (key == "d")
        c.d = parse_number<int>(value, key);
      else if (key == "mode")
        c.mode = parse_sharing_mode(value);
      else if (key == "ablation")
        c.ablation = parse_ablation_mode(value);
      else if (key == "shuffle")
        c.shuffle = parse_bool(value, key);
      else if (key == "zero_init_classifier")
        c.zero_init_classifier = parse_bool(value, key);
      else
        throw std::invalid_argument("unknown config key '" + key + "'");
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  c.check();
  return c;
}

TrainConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  return parse_config(in);
}

std::string format_config(const TrainConfig& c) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "lr=" << c.lr << "\nmax_epochs=" << c.max_epochs << "\nseed=" << c.seed << "\nd=" << c.d
      << "\nmode=" << to_string(c.mode) << "\nablation=" << to_string(c.ablation)
      << "\nshuffle=" << (c.shuffle ? "true" : "false")
      << "\nzero_init_classifier=" << (c.zero_init_classifier ? "true" : "false") << "\n";
  return out.str();
}

Split split_dataset(std::vector<LabeledDocument> docs, std::uint64_t seed) {
  const std::size_t q = docs.size();
  if (q < kMinSplitDocuments)
    throw TrainError(TrainError::Kind::TooFewDocuments, "need at least " + std::to_string(kMinSplitDocuments) +
                                                            " documents to split, got " + std::to_string(q));
  Rng rng(seed);
  rng.shuffle(docs);
  const std::size_t n_train = q * 7 / 10;
  const std::size_t n_val = q / 10;
  Split s;
  auto first = std::make_move_iterator(docs.begin());
  s.train.assign(first, first + static_cast<std::ptrdiff_t>(n_train));
  s.val.assign(first + static_cast<std::ptrdiff_t>(n_train), first + static_cast<std::ptrdiff_t>(n_train + n_val));
  s.test.assign(first + static_cast<std::ptrdiff_t>(n_train + n_val), std::make_move_iterator(docs.end()));
  return s;
}

namespace {

std::vector<const LingTree*> tree_ptrs(std::span<const LabeledDocument> docs) {
  std::vector<const LingTree*> out;
  out.reserve(docs.size());
  for (const auto& d : docs) out.push_back(&d.tree);
  return out;
}

std::vector<int> labels(std::span<const LabeledDocument> docs) {
  std::vector<int> out;
  out.reserve(docs.size());
  for (const auto& d : docs) out.push_back(d.y);
  return out;
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

MetricsReport evaluate(const ModelParams& model, std::span<const LabeledDocument> docs,
                       const EmbeddingTable& table) {
  if (docs.empty()) throw EvalError("EmptyEvalSet: no documents to evaluate");
  const auto trees = tree_ptrs(docs);
  const auto scores = predict_batch(model, trees, table);
  return compute_metrics(labels(docs), scores);
}

MetricsReport evaluate_serial(const ModelParams& model, std::span<const LabeledDocument> docs,
                              const EmbeddingTable& table) {
  if (docs.empty()) throw EvalError("EmptyEvalSet: no documents to evaluate");
  const auto trees = tree_ptrs(docs);
  const auto scores = predict_batch_serial(model, trees, table);
  return compute_metrics(labels(docs), scores);
}

TrainResult train(const Split& split, const TrainConfig& config, const EmbeddingTable& table) {
  config.check();
  if (split.train.empty()) throw TrainError(TrainError::Kind::TooFewDocuments, "training split is empty");
  if (table.dim() != config.d)
    throw TrainError(TrainError::Kind::DimMismatch, "embedding dimension " + std::to_string(table.dim()) +
                                                        " does not match d=" + std::to_string(config.d));

  Rng rng(config.seed);
  const auto train_trees = tree_ptrs(split.train);
  ModelParams model = ModelParams::init({config.mode, config.ablation, config.d},
                                        build_attribute_vocab(train_trees), rng, config.zero_init_classifier);

  TrainReport report;
  report.config = config;
  report.train_size = split.train.size();
  report.val_size = split.val.size();
  report.test_size = split.test.size();
  for (const auto& doc : split.train) report.oov_tokens += embed_leaves(table, doc.tree).oov;

  std::vector<double> flat = model.params.flatten();
  AdamState adam(flat.size(), config.lr);

  std::vector<std::size_t> order(split.train.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  std::optional<double> best_auc;
  ParamSet best_params;
  bool have_best = false;

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    if (config.shuffle) rng.shuffle(order);
    double loss_sum = 0.0;
    for (std::size_t idx : order) {
      const LabeledDocument& doc = split.train[idx];
      LossAndGrad lg = loss_and_gradients(model, doc.tree, table, doc.y);
      std::vector<double> grads = lg.grads.flatten();
      if (!std::isfinite(lg.loss) || !all_finite(grads))
        throw TrainError(TrainError::Kind::NonFiniteLoss,
                         "non-finite loss or gradient at epoch " + std::to_string(epoch) + ", document '" +
                             doc.id + "' (lr=" + std::to_string(config.lr) + ", loss=" +
                             std::to_string(lg.loss) + ")");
      loss_sum += lg.loss;
      adam_step(adam, flat, grads);
      model.params.unflatten(flat);
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(split.train.size());
    if (!split.val.empty()) rec.val = evaluate(model, split.val, table);
    if (rec.val.auc && (!best_auc || *rec.val.auc > *best_auc)) {
      best_auc = rec.val.auc;
      best_params = model.params;
      report.best_epoch = epoch;
      have_best = true;
    }
    report.epochs.push_back(rec);
  }

  // No epoch had a defined validation AUC: keep the final parameters.
  if (!have_best)
    report.best_epoch = config.max_epochs;
  else
    model.params = std::move(best_params);

  if (!split.test.empty()) report.test = evaluate(model, split.test, table);
  return {std::move(model), std::move(report)};
}

GridResult grid_search_lr(const Split& split, const TrainConfig& base, std::span<const double> grid,
                          const EmbeddingTable& table) {
  if (grid.empty()) throw std::invalid_argument("learning-rate grid is empty");
  GridResult out;
  std::optional<double> best_auc;
  bool have_best = false;

  for (double lr : grid) {
    TrainConfig cfg = base;
    cfg.lr = lr;
    GridCell cell;
    cell.lr = lr;
    try {
      TrainResult r = train(split, cfg, table);
      const auto& best_epoch = r.report.epochs[static_cast<std::size_t>(r.report.best_epoch - 1)];
      std::optional<double> auc = best_epoch.val.auc;
      cell.report = r.report;
      const bool better = !have_best || (auc && (!best_auc || *auc > *best_auc)) ||
                          (auc == best_auc && lr < out.best_lr);
      if (better) {
        best_auc = auc;
        out.best_lr = lr;
        out.best = std::move(r);
        have_best = true;
      }
    } catch (const TrainError& e) {
      if (e.kind() != TrainError::Kind::NonFiniteLoss) throw;
      cell.failed = true;
      cell.error = e.what();
    }
    out.cells.push_back(std::move(cell));
  }
  if (!have_best) throw TrainError(TrainError::Kind::NonFiniteLoss, "every learning rate in the grid diverged");
  return out;
}

namespace {

ordered_json metrics_json(const MetricsReport& m) {
  ordered_json j;
  j["macro_f1"] = m.macro_f1;
  j["micro_f1"] = m.micro_f1;
  j["auc"] = m.auc ? ordered_json(*m.auc) : ordered_json(nullptr);
  j["confusion"] = {{"tp", m.confusion.tp}, {"fp", m.confusion.fp}, {"tn", m.confusion.tn}, {"fn", m.confusion.fn}};
  return j;
}

ordered_json report_json(const TrainReport& r) {
  ordered_json j;
  j["config"] = {{"lr", r.config.lr},
                 {"max_epochs", r.config.max_epochs},
                 {"seed", r.config.seed},
                 {"d", r.config.d},
                 {"mode", to_string(r.config.mode)},
                 {"ablation", to_string(r.config.ablation)},
                 {"shuffle", r.config.shuffle},
                 {"zero_init_classifier", r.config.zero_init_classifier}};
  j["sizes"] = {{"train", r.train_size}, {"val", r.val_size}, {"test", r.test_size}};
  j["oov_tokens"] = r.oov_tokens;
  ordered_json epochs = ordered_json::array();
  for (const auto& e : r.epochs) {
    ordered_json ej;
    ej["epoch"] = e.epoch;
    ej["train_loss"] = e.train_loss;
    ej["val"] = r.val_size ? metrics_json(e.val) : ordered_json(nullptr);
    epochs.push_back(std::move(ej));
  }
  j["epochs"] = std::move(epochs);
  j["best_epoch"] = r.best_epoch;
  j["test"] = r.test ? metrics_json(*r.test) : ordered_json(nullptr);
  return j;
}

}  // namespace

std::string metrics_to_json(const MetricsReport& m) { return metrics_json(m).dump(2) + "\n"; }

std::string report_to_json(const TrainReport& report) { return report_json(report).dump(2) + "\n"; }

std::string grid_to_json(const GridResult& grid) {
  ordered_json j;
  j["best_lr"] = grid.best_lr;
  ordered_json cells = ordered_json::array();
  for (const auto& c : grid.cells) {
    ordered_json cj;
    cj["lr"] = c.lr;
    cj["failed"] = c.failed;
    if (c.failed) cj["error"] = c.error;
    cj["report"] = c.report ? report_json(*c.report) : ordered_json(nullptr);
    cells.push_back(std::move(cj));
  }
  j["cells"] = std::move(cells);
  return j.dump(2) + "\n";
}

std::string metrics_table(const MetricsReport& m, const std::string& title) {
  std::ostringstream out;
  if (!title.empty()) out << title << "\n";
  out << std::left << std::setw(10) << "metric" << std::right << std::setw(10) << "value" << "\n";
  out << std::fixed << std::setprecision(4);
  out << std::left << std::setw(10) << "macro_f1" << std::right << std::setw(10) << m.macro_f1 << "\n";
  out << std::left << std::setw(10) << "micro_f1" << std::right << std::setw(10) << m.micro_f1 << "\n";
  out << std::left << std::setw(10) << "auc" << std::right << std::setw(10);
  if (m.auc)
    out << *m.auc;
  else
    out << "n/a";
  out << "\n";
  out << std::left << std::setw(10) << "tp/fp" << std::right << std::setw(10)
      << (std::to_string(m.confusion.tp) + "/" + std::to_string(m.confusion.fp)) << "\n";
  out << std::left << std::setw(10) << "tn/fn" << std::right << std::setw(10)
      << (std::to_string(m.confusion.tn) + "/" + std::to_string(m.confusion.fn)) << "\n";
  return out.str();
}

}  // namespace hero
