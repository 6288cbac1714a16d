// altml: command-line front end for training, evaluation, cross-validated
// grid search, regret checks and synthetic data generation.
#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "altml/dataset.hpp"
#include "altml/errors.hpp"
#include "altml/harness.hpp"
#include "altml/learner.hpp"
#include "altml/metrics.hpp"

namespace {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double round6(double v) { return std::round(v * 1e6) / 1e6; }

struct DataFlags {
  bool zero_based_features = false;
  bool one_based_labels = false;
  bool compact_labels = false;
  std::optional<std::size_t> labels;
  std::optional<std::size_t> features;

  void add(CLI::App* app) {
    app->add_flag("--zero-based-features", zero_based_features,
                  "Feature indices in the files start at 0");
    app->add_flag("--one-based-labels", one_based_labels, "Label ids in the files start at 1");
    app->add_flag("--compact-labels", compact_labels,
                  "Map the distinct label ids of the training file onto 0..L-1");
    app->add_option("--labels", labels, "Declared label count L");
    app->add_option("--features", features, "Declared feature dimension d");
  }

  altml::ParseOptions options() const {
    altml::ParseOptions o;
    o.one_based_features = !zero_based_features;
    o.one_based_labels = one_based_labels;
    o.compact_labels = compact_labels;
    o.declared_labels = labels;
    o.declared_features = features;
    return o;
  }
};

struct HyperFlags {
  std::string algo = "falt";
  double eta = 1.0;
  double delta = 1.0;
  int max_learn = 1;
  double c = 1.0;
  std::string kernel = "rbf";
  double sigma2 = 1.0;

  void add(CLI::App* app) {
    app->add_option("--algo", algo, "falt|salt|falt-k|pa1-br|pa2-br|pa1k-br|pa2k-br")
        ->check(CLI::IsMember({"falt", "salt", "falt-k", "pa1-br", "pa2-br", "pa1k-br", "pa2k-br"}));
    app->add_option("--eta", eta, "Step size");
    app->add_option("--delta", delta, "SALT diagonal offset");
    app->add_option("--max-learn", max_learn, "Sub-updates per example (M)");
    app->add_option("--c", c, "PA aggressiveness");
    app->add_option("--kernel", kernel, "rbf|linear")->check(CLI::IsMember({"rbf", "linear"}));
    app->add_option("--sigma2", sigma2, "RBF width");
  }

  altml::LearnerConfig config() const {
    altml::LearnerConfig cfg;
    cfg.algo = altml::algo_from_string(algo);
    cfg.eta = eta;
    cfg.delta = delta;
    cfg.max_learn = max_learn;
    cfg.c = c;
    cfg.kernel.kind = altml::kernel_kind_from_string(kernel);
    cfg.kernel.sigma2 = sigma2;
    return cfg;
  }
};

json config_json(const altml::LearnerConfig& cfg) {
  json j;
  j["algo"] = altml::to_string(cfg.algo);
  switch (cfg.algo) {
    case altml::Algo::falt:
    case altml::Algo::falt_k:
      j["eta"] = cfg.eta;
      j["max_learn"] = cfg.max_learn;
      break;
    case altml::Algo::salt:
      j["eta"] = cfg.eta;
      j["delta"] = cfg.delta;
      j["max_learn"] = cfg.max_learn;
      break;
    default:
      j["c"] = cfg.c;
      break;
  }
  if (altml::is_kernel_algo(cfg.algo)) {
    j["kernel"] = altml::to_string(cfg.kernel.kind);
    if (cfg.kernel.kind == altml::KernelKind::rbf) j["sigma2"] = cfg.kernel.sigma2;
  }
  return j;
}

// Metric objects keep their fixed six-decimal text; the surrounding line is
// built with nlohmann and the object is spliced in at a placeholder.
std::string metrics_slot(const std::string& key) { return "@@" + key + "@@"; }

// Everything needed to read a test file the way the training file was read.
struct Preprocessing {
  std::vector<std::int64_t> label_ids;
  std::vector<double> scales;
};

std::string sidecar_path(const std::string& model_path) { return model_path + ".prep.json"; }

void write_sidecar(const std::string& model_path, const Preprocessing& p) {
  if (p.label_ids.empty() && p.scales.empty()) {
    std::filesystem::remove(sidecar_path(model_path));
    return;
  }
  json j;
  j["label_ids"] = p.label_ids;
  j["scales"] = p.scales;
  std::ofstream out(sidecar_path(model_path));
  if (!out) throw std::runtime_error("cannot write " + sidecar_path(model_path));
  out << j.dump() << '\n';
}

Preprocessing read_sidecar(const std::string& model_path) {
  Preprocessing p;
  std::ifstream in(sidecar_path(model_path));
  if (!in) return p;
  const auto j = json::parse(in);
  p.label_ids = j.at("label_ids").get<std::vector<std::int64_t>>();
  p.scales = j.at("scales").get<std::vector<double>>();
  return p;
}

// Loads a test split shaped like an existing model or training set.
altml::Dataset load_test(const std::string& path, const DataFlags& flags, std::size_t labels,
                         std::size_t dim, const Preprocessing& prep) {
  auto opts = flags.options();
  opts.declared_labels = labels;
  opts.declared_features = dim;
  if (!prep.label_ids.empty()) opts.label_dictionary = prep.label_ids;
  auto ds = altml::load_dataset(path, opts);
  if (!prep.scales.empty()) ds = altml::apply_scaling(ds, prep.scales);
  return ds;
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw std::runtime_error("cannot open " + path);
    }
  }
  void emit(json& j) {
    std::string text = j.dump();
    for (auto& [key, raw] : raw_) {
      const std::string quoted = '"' + metrics_slot(key) + '"';
      const auto pos = text.find(quoted);
      if (pos != std::string::npos) text.replace(pos, quoted.size(), raw);
    }
    raw_.clear();
    std::ostream& os = file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout;
    os << text << '\n';
    os.flush();
  }
  void put_metrics(json& j, const std::string& key, const altml::MetricsReport& r) {
    j[key] = metrics_slot(key);
    raw_.emplace_back(key, altml::to_json(r));
  }

 private:
  std::ofstream file_;
  std::vector<std::pair<std::string, std::string>> raw_;
};

std::vector<double> parse_list(const std::vector<std::string>& items) {
  std::vector<double> out;
  for (const auto& item : items) {
    std::size_t pos = 0;
    const double v = std::stod(item, &pos);
    if (pos != item.size()) throw std::invalid_argument("bad number '" + item + "'");
    out.push_back(v);
  }
  return out;
}

int run(int argc, char** argv) {
  CLI::App app{"Online multi-label learning with adaptive label thresholds"};
  app.require_subcommand(1);

  DataFlags data;
  HyperFlags hyper;
  std::string train_path, test_path, model_in, model_out, out_path;
  std::uint64_t seed = 0;
  bool seed_given = false;
  bool scale_maxabs = false;
  std::size_t folds = 10;
  unsigned threads = 1;

  // train
  auto* train = app.add_subcommand("train", "One pass over a training file");
  train->add_option("--train", train_path, "Training file")->required();
  train->add_option("--test", test_path, "Optional test file evaluated after training");
  train->add_option("--model-out", model_out, "Write the trained model here");
  train->add_option("--seed", seed, "Permute the training order with this seed");
  train->add_flag("--scale-maxabs", scale_maxabs, "Divide each feature by its max |value|");
  train->add_option("--out", out_path, "Write JSON lines here instead of stdout");
  data.add(train);
  hyper.add(train);

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "Evaluate a saved model");
  eval->add_option("--model-in", model_in, "Saved model")->required();
  eval->add_option("--test", test_path, "Test file")->required();
  eval->add_option("--out", out_path, "Write JSON lines here instead of stdout");
  data.add(eval);

  // cv-search
  std::vector<std::string> etas{"1"}, deltas{"1"}, mults{"1"}, cs{"1"}, sigmas{"1"};
  bool no_precompute = false;
  auto* cv = app.add_subcommand("cv-search", "k-fold grid search, single pass per fold");
  cv->add_option("--train", train_path, "Training file")->required();
  cv->add_option("--test", test_path, "Retrain the winner on all data and evaluate here");
  cv->add_option("--algo", hyper.algo, "Algorithm")
      ->check(CLI::IsMember({"falt", "salt", "falt-k", "pa1-br", "pa2-br", "pa1k-br", "pa2k-br"}));
  cv->add_option("--eta", etas, "Step sizes")->delimiter(',');
  cv->add_option("--delta", deltas, "SALT offsets")->delimiter(',');
  cv->add_option("--m-mult", mults, "M multipliers, M = max(1, round(m L))")->delimiter(',');
  cv->add_option("--c", cs, "PA aggressiveness values")->delimiter(',');
  cv->add_option("--sigma2", sigmas, "RBF widths")->delimiter(',');
  cv->add_option("--kernel", hyper.kernel, "rbf|linear")->check(CLI::IsMember({"rbf", "linear"}));
  cv->add_option("--folds", folds, "Number of folds")->check(CLI::Range(2, 1000000));
  cv->add_option("--seed", seed, "Fold permutation seed");
  cv->add_option("--threads", threads, "Worker threads over configurations")
      ->check(CLI::Range(1, 256));
  cv->add_flag("--no-precompute", no_precompute, "Compute kernel values on the fly");
  cv->add_flag("--scale-maxabs", scale_maxabs, "Divide each feature by its max |value|");
  cv->add_option("--model-out", model_out, "Write the retrained winner here (needs --test)");
  cv->add_option("--out", out_path, "Write JSON lines here instead of stdout");
  data.add(cv);

  // regret-check
  altml::SynthConfig synth_cfg;
  std::string regret_algo = "falt";
  std::optional<double> regret_eta;
  int regret_m = 1;
  double regret_delta = 1.0;
  auto* regret = app.add_subcommand("regret-check", "Replay the FALT regret bound on a synthetic stream");
  regret->add_option("--algo", regret_algo, "falt|salt")->check(CLI::IsMember({"falt", "salt"}));
  regret->add_option("--eta", regret_eta, "Step size (default balances the bound)");
  regret->add_option("--delta", regret_delta, "SALT diagonal offset");
  regret->add_option("--max-learn", regret_m, "Sub-updates per example");
  regret->add_option("--out", out_path, "Write JSON lines here instead of stdout");

  // synth
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "Write a synthetic stream");
  synth->add_option("--out", synth_out, "Output file (a .meta sidecar is written next to it)")
      ->required();
  for (auto* sub : {regret, synth}) {
    sub->add_option("--d", synth_cfg.d, "Feature dimension");
    sub->add_option("--num-labels", synth_cfg.labels, "Label count");
    sub->add_option("--T", synth_cfg.T, "Stream length");
    sub->add_option("--u-norm", synth_cfg.u_norm, "Norm of the generating classifier");
    sub->add_option("--density", synth_cfg.density, "Expected nonzeros per instance");
    sub->add_option("--noise", synth_cfg.noise_p, "Per-label flip probability");
    sub->add_option("--seed", synth_cfg.seed, "Generator seed");
  }
  bool no_rescale = false;
  synth->add_flag("--no-rescale", no_rescale, "Keep U as drawn instead of enforcing margin 1");

  CLI11_PARSE(app, argc, argv);

  Output output(out_path);

  if (*train) {
    seed_given = train->count("--seed") > 0;
    const auto cfg = hyper.config();
    auto ds = altml::load_dataset(train_path, data.options());
    Preprocessing prep;
    prep.label_ids = ds.label_ids;
    if (scale_maxabs) {
      prep.scales = altml::maxabs_scales(ds);
      ds = altml::apply_scaling(ds, prep.scales);
    }
    std::vector<std::size_t> order;
    if (seed_given) order = altml::seeded_permutation(ds.size(), seed);

    const auto t0 = Clock::now();
    auto model = altml::train_one_pass(cfg, ds, order);
    const double train_seconds = seconds_since(t0);

    json line;
    line["command"] = "train";
    line["config"] = config_json(cfg);
    line["train"] = train_path;
    line["n_train"] = ds.size();
    line["labels"] = ds.labels;
    line["features"] = ds.features;
    line["train_seconds"] = round6(train_seconds);
    if (altml::is_kernel_algo(cfg.algo)) line["support_size"] = model->support_size();
    if (!test_path.empty()) {
      const auto test = load_test(test_path, data, ds.labels, ds.features, prep);
      const auto t1 = Clock::now();
      output.put_metrics(line, "metrics", altml::evaluate(*model, test));
      line["test_seconds"] = round6(seconds_since(t1));
    }
    if (!model_out.empty()) {
      altml::save_learner(*model, model_out);
      write_sidecar(model_out, prep);
      line["model"] = model_out;
    }
    output.emit(line);
    return 0;
  }

  if (*eval) {
    const auto model = altml::load_learner(model_in);
    const auto prep = read_sidecar(model_in);
    const auto test = load_test(test_path, data, model->labels(), model->dim(), prep);
    const auto t0 = Clock::now();
    const auto report = altml::evaluate(*model, test);
    json line;
    line["command"] = "evaluate";
    line["model"] = model_in;
    line["algo"] = altml::to_string(model->algo());
    line["test"] = test_path;
    output.put_metrics(line, "metrics", report);
    line["test_seconds"] = round6(seconds_since(t0));
    if (altml::is_kernel_algo(model->algo())) line["support_size"] = model->support_size();
    output.emit(line);
    return 0;
  }

  if (*cv) {
    auto ds = altml::load_dataset(train_path, data.options());
    Preprocessing prep;
    prep.label_ids = ds.label_ids;
    if (scale_maxabs) {
      prep.scales = altml::maxabs_scales(ds);
      ds = altml::apply_scaling(ds, prep.scales);
    }
    altml::GridSpec spec;
    spec.algo = altml::algo_from_string(hyper.algo);
    spec.etas = parse_list(etas);
    spec.deltas = parse_list(deltas);
    spec.m_multipliers = parse_list(mults);
    spec.cs = parse_list(cs);
    spec.sigma2s = parse_list(sigmas);
    spec.kernel = altml::kernel_kind_from_string(hyper.kernel);
    spec.folds = folds;
    spec.seed = seed;
    spec.precompute_kernel = !no_precompute;
    spec.threads = threads;

    const auto t0 = Clock::now();
    const auto result = altml::cv_grid_search(ds, spec);
    const double cv_seconds = seconds_since(t0);
    for (std::size_t i = 0; i < result.configs.size(); ++i) {
      json line;
      line["command"] = "cv-search";
      line["index"] = i;
      line["config"] = config_json(result.configs[i]);
      line["folds"] = folds;
      output.put_metrics(line, "metrics", result.reports[i]);
      line["seconds"] = round6(result.seconds[i]);
      output.emit(line);
    }
    const auto& best_cfg = result.configs[result.best];
    json best;
    best["command"] = "cv-search";
    best["best_index"] = result.best;
    best["config"] = config_json(best_cfg);
    output.put_metrics(best, "cv_metrics", result.reports[result.best]);
    best["seconds"] = round6(cv_seconds);
    if (!test_path.empty()) {
      const auto t1 = Clock::now();
      auto model = altml::train_one_pass(best_cfg, ds);
      best["train_seconds"] = round6(seconds_since(t1));
      const auto test = load_test(test_path, data, ds.labels, ds.features, prep);
      output.put_metrics(best, "metrics", altml::evaluate(*model, test));
      if (altml::is_kernel_algo(best_cfg.algo)) best["support_size"] = model->support_size();
      if (!model_out.empty()) {
        altml::save_learner(*model, model_out);
        write_sidecar(model_out, prep);
        best["model"] = model_out;
      }
    }
    output.emit(best);
    return 0;
  }

  if (*regret) {
    synth_cfg.margin_rescale = true;
    const auto stream = altml::synth_stream(synth_cfg);
    const double R = stream.data.max_norm();
    const double u_norm = stream.reference.frobenius_norm();
    const double eta = regret_eta ? *regret_eta : altml::balanced_eta(u_norm, R, synth_cfg.T);
    json line;
    line["command"] = "regret-check";
    line["algo"] = regret_algo;
    line["T"] = synth_cfg.T;
    if (regret_algo == "falt") {
      altml::FaltLearner learner(synth_cfg.labels, synth_cfg.d, altml::FaltConfig{eta, regret_m});
      const auto trace = altml::run_online(stream.data, learner, &stream.reference);
      const auto check = altml::check_regret_bound(trace, stream.reference, R, eta);
      line["lhs"] = check.lhs;
      line["rhs"] = check.rhs;
      line["holds"] = check.holds;
    } else {
      const auto rep =
          altml::run_salt_with_bound(stream.data, eta, regret_delta, stream.reference, regret_m);
      const double lhs = rep.trace.regret_at(rep.trace.rounds());
      line["lhs"] = lhs;
      line["rhs"] = rep.rhs;
      line["holds"] = lhs <= rep.rhs * (1.0 + 1e-9);
      line["q"] = rep.q;
    }
    line["eta"] = eta;
    line["u_norm"] = u_norm;
    line["R"] = R;
    output.emit(line);
    return 0;
  }

  if (*synth) {
    synth_cfg.margin_rescale = !no_rescale;
    const auto stream = altml::synth_stream(synth_cfg);
    {
      std::ofstream out(synth_out);
      if (!out) throw std::runtime_error("cannot open " + synth_out);
      altml::write_multilabel_sparse(out, stream.data);
    }
    std::ofstream meta(synth_out + ".meta");
    meta << "labels=" << stream.data.labels << "\nfeatures=" << stream.data.features
         << "\none_based=true\n";
    json line;
    line["command"] = "synth";
    line["out"] = synth_out;
    line["T"] = stream.data.size();
    line["labels"] = stream.data.labels;
    line["features"] = stream.data.features;
    line["u_norm"] = stream.reference.frobenius_norm();
    line["R"] = stream.data.max_norm();
    std::cout << line.dump() << '\n';
    return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const altml::ParseError& e) {
    std::cerr << "altml: parse error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "altml: " << e.what() << '\n';
  }
  return 1;
}
