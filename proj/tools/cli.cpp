#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "qspike/checkpoint.hpp"
#include "qspike/config.hpp"
#include "qspike/csv.hpp"
#include "qspike/data.hpp"
#include "qspike/error.hpp"
#include "qspike/metrics.hpp"
#include "qspike/seed.hpp"

namespace qspike::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kMetricsHeader = "model,dataset,noise,acc,dsc,ppv,ss";
constexpr const char* kSignificanceHeader = "model_a,model_b,metric,w,p,n";

long long parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long long out = std::stoll(v, &used);
    if (used == v.size()) return out;
  } catch (const std::logic_error&) {
  }
  throw ArgumentError(key + ": expected an integer, got '" + v + "'");
}

std::size_t parse_positive(const std::string& key, const std::string& v) {
  const long long n = parse_int(key, v);
  if (n < 1) throw ArgumentError(key + " must be positive");
  return static_cast<std::size_t>(n);
}

double parse_real(const std::string& key, const std::string& v) {
  try {
    return csv::parse_double(v);
  } catch (const FormatError&) {
    throw ArgumentError(key + ": expected a number, got '" + v + "'");
  }
}

Command parse_command(const std::string& name) {
  if (name == "train") return Command::train;
  if (name == "eval") return Command::eval;
  if (name == "corrupt") return Command::corrupt;
  if (name == "report") return Command::report;
  throw ArgumentError("unknown command '" + name + "'");
}

// Resolves "section.key" settings into a spec. Unknown keys are rejected.
void apply_setting(ExperimentSpec& spec, const std::string& key, const std::string& v) {
  if (key == "data.dataset") {
    data::dataset_info(v);
    spec.dataset = v;
  } else if (key == "data.data_dir") {
    spec.data_dir = v;
  } else if (key == "data.classes") {
    spec.classes = data::parse_class_list(v);
  } else if (key == "data.train_size") {
    spec.train_size = parse_positive(key, v);
  } else if (key == "data.split") {
    if (v != "train" && v != "test") throw ArgumentError("split must be train or test");
    spec.split = v;
  } else if (key == "model.qubits") {
    spec.model.n_qubits = static_cast<int>(parse_positive(key, v));
  } else if (key == "model.layers") {
    spec.model.n_layers = static_cast<int>(parse_positive(key, v));
  } else if (key == "model.head") {
    spec.model.head = model::parse_head(v);
  } else if (key == "model.hidden") {
    spec.model.hidden = parse_positive(key, v);
  } else if (key == "model.features") {
    spec.model.features = parse_positive(key, v);
  } else if (key == "model.spike_steps") {
    spec.model.spike_steps = parse_positive(key, v);
  } else if (key == "model.dt") {
    spec.model.dt = parse_real(key, v);
  } else if (key == "model.vqc_init_scale") {
    spec.model.vqc_init_scale = parse_real(key, v);
  } else if (key == "optimizer.lr") {
    spec.train.adam.lr = parse_real(key, v);
  } else if (key == "optimizer.beta1") {
    spec.train.adam.beta1 = parse_real(key, v);
  } else if (key == "optimizer.beta2") {
    spec.train.adam.beta2 = parse_real(key, v);
  } else if (key == "optimizer.eps") {
    spec.train.adam.eps = parse_real(key, v);
  } else if (key == "train.epochs") {
    spec.train.epochs = static_cast<int>(parse_positive(key, v));
  } else if (key == "train.batch_size") {
    spec.train.batch_size = parse_positive(key, v);
  } else if (key == "train.folds") {
    spec.train.folds = static_cast<int>(parse_positive(key, v));
  } else if (key == "train.seed") {
    const long long s = parse_int(key, v);
    if (s < 0) throw ArgumentError("seed must be nonnegative");
    spec.seed = static_cast<std::uint64_t>(s);
  } else if (key == "train.mode") {
    spec.train.mode = model::parse_mode(v);
  } else if (key == "noise.noise") {
    spec.noise = noise::parse_noise_spec(v);
  } else if (key == "noise.sweep") {
    spec.sweep = parse_sweep(v);
  } else if (key == "output.out") {
    spec.out = v;
  } else if (key == "output.checkpoint") {
    spec.checkpoint = v;
  } else if (key == "output.name") {
    spec.name = v;
  } else {
    throw ArgumentError("unknown setting '" + key + "'");
  }
}

data::Dataset load_split(const ExperimentSpec& spec, data::Split split) {
  data::Dataset ds = data::load_named(spec.dataset, spec.data_dir, split);
  const auto keep = spec.classes.value_or(data::dataset_info(spec.dataset).default_classes);
  return data::filter_classes(ds, keep);
}

std::string model_name(const ExperimentSpec& spec, const model::RqnnModel& m) {
  if (!spec.name.empty()) return spec.name;
  return m.config.head == model::HeadKind::quantum ? "rqnn" : "classical";
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void run_train(const ExperimentSpec& spec, std::ostream& log) {
  data::Dataset ds = data::take_first(load_split(spec, data::Split::train), spec.train_size);
  if (spec.noise) {
    noise::Rng rng(derive_seed(spec.seed, {0x7a1e}));
    noise::corrupt_all(ds.images, *spec.noise, rng);
  }
  model::ModelConfig mc = spec.model;
  mc.input = ds.pixels();
  mc.n_classes = ds.n_classes;
  model::Rng init_rng(derive_seed(spec.seed, {0x1417}));
  const auto init = model::RqnnModel::create(mc, init_rng);

  train::TrainConfig tc = spec.train;
  tc.seed = spec.seed;
  log << "training " << model::to_string(mc.head) << " head on " << ds.size() << " " << spec.dataset
      << " samples, " << tc.folds << " fold(s) x " << tc.epochs << " epochs\n";
  const auto report = train::fit(init, ds, tc, [&](const train::EpochRecord& r) {
    log << "fold " << r.fold << " epoch " << r.epoch << " " << r.split << " loss " << r.loss << " acc " << r.accuracy
        << "\n";
  });

  ensure_dir(spec.out);
  train::write_report_csv(report, spec.out / "report.csv");
  const auto& best = report.best();
  const fs::path ckpt = spec.checkpoint.empty() ? spec.out / "model.ckpt" : spec.checkpoint;
  checkpoint::save_checkpoint(best.best_model, best.best_optimizer, spec.seed, ckpt);
  log << "best fold " << report.best_fold << " epoch " << best.best_epoch << " val acc " << best.best_val_accuracy
      << " -> " << ckpt.string() << "\n";
}

void run_eval(const ExperimentSpec& spec, std::ostream& log) {
  if (spec.checkpoint.empty()) throw ArgumentError("eval requires --checkpoint");
  std::vector<noise::NoiseSpec> points;
  if (spec.sweep) {
    points = spec.sweep->points();
  } else {
    points.push_back(spec.noise.value_or(noise::NoiseSpec{noise::None{}}));
  }

  ensure_dir(spec.out);
  const fs::path path = spec.out / "metrics.csv";
  std::ostringstream rows;
  rows << kMetricsHeader << "\n";
  if (!points.empty()) {
    const auto ck = checkpoint::load_checkpoint(spec.checkpoint);
    const data::Dataset test = load_split(spec, data::Split::test);
    if (test.pixels() != ck.model.config.input || test.n_classes != ck.model.config.n_classes) {
      throw ArgumentError("checkpoint shape does not match the evaluation dataset");
    }
    const std::string name = model_name(spec, ck.model);
    for (std::size_t i = 0; i < points.size(); ++i) {
      data::Dataset noisy = test;
      noise::Rng rng(derive_seed(spec.seed, {0xe7a1, static_cast<std::uint64_t>(i)}));
      noise::corrupt_all(noisy.images, points[i], rng);
      const auto preds = model::predict_batch(ck.model, noisy.images);
      const auto cm = metrics::confusion(preds, noisy.labels, noisy.n_classes);
      const auto b = metrics::bundle(cm);
      rows << name << ',' << spec.dataset << ',' << noise::to_string(points[i]) << ',' << csv::format(b.acc) << ','
           << csv::format(b.dsc) << ',' << csv::format(b.ppv) << ',' << csv::format(b.ss) << "\n";
      log << noise::to_string(points[i]) << ": acc " << b.acc << " dsc " << b.dsc << " ppv " << b.ppv << " ss "
          << b.ss << "\n";
    }
  }
  auto out = open_out(path);
  out << rows.str();
  if (!out) throw IoError("write failed for " + path.string());
}

void run_corrupt(const ExperimentSpec& spec, std::ostream& log) {
  const auto split = spec.split == "train" ? data::Split::train : data::Split::test;
  data::Dataset ds = data::load_named(spec.dataset, spec.data_dir, split);
  if (spec.classes) ds = data::filter_classes(ds, *spec.classes);
  const noise::NoiseSpec ns = spec.noise.value_or(noise::NoiseSpec{noise::None{}});
  noise::Rng rng(derive_seed(spec.seed, {0xc022}));
  noise::corrupt_all(ds.images, ns, rng);
  ensure_dir(spec.out);
  const std::string prefix = split == data::Split::train ? "train" : "t10k";
  data::write_idx(ds, spec.out / (prefix + "-images-idx3-ubyte"), spec.out / (prefix + "-labels-idx1-ubyte"));
  log << "wrote " << ds.size() << " " << noise::to_string(ns) << " images to " << spec.out.string() << "\n";
}

struct MetricRow {
  std::string model, dataset, noise;
  double values[4];
};

constexpr const char* kMetricNames[4] = {"acc", "dsc", "ppv", "ss"};

void write_plot(const std::vector<MetricRow>& rows, const fs::path& path) {
  // One panel per (dataset, noise kind); accuracy against intensity per model.
  std::map<std::string, std::map<std::string, std::vector<std::pair<double, double>>>> panels;
  for (const auto& r : rows) {
    const auto spec = noise::parse_noise_spec(r.noise);
    panels[r.dataset + " / " + noise::kind_name(spec)][r.model].emplace_back(noise::intensity(spec), r.values[0]);
  }
  const double pw = 320, ph = 220, margin = 40;
  const std::size_t cols = std::max<std::size_t>(1, std::min<std::size_t>(3, panels.size()));
  const std::size_t prow = (panels.size() + cols - 1) / cols;
  const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

  auto out = open_out(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << cols * pw << "\" height=\"" << std::max<std::size_t>(1, prow) * ph
      << "\" font-family=\"sans-serif\" font-size=\"10\">\n";
  std::size_t idx = 0;
  for (auto& [title, series] : panels) {
    const double ox = static_cast<double>(idx % cols) * pw + margin;
    const double oy = static_cast<double>(idx / cols) * ph + 20;
    const double w = pw - 1.5 * margin, h = ph - margin - 20;
    double xmin = 1e300, xmax = -1e300;
    for (auto& [m, pts] : series) {
      std::sort(pts.begin(), pts.end());
      for (auto& p : pts) {
        xmin = std::min(xmin, p.first);
        xmax = std::max(xmax, p.first);
      }
    }
    if (xmax <= xmin) xmax = xmin + 1;
    out << "<text x=\"" << ox << "\" y=\"" << oy - 6 << "\">" << title << "</text>\n";
    out << "<rect x=\"" << ox << "\" y=\"" << oy << "\" width=\"" << w << "\" height=\"" << h
        << "\" fill=\"none\" stroke=\"#444\"/>\n";
    out << "<text x=\"" << ox - 28 << "\" y=\"" << oy + 4 << "\">1.0</text><text x=\"" << ox - 28 << "\" y=\""
        << oy + h << "\">0.0</text>\n";
    out << "<text x=\"" << ox << "\" y=\"" << oy + h + 14 << "\">" << xmin << "</text><text x=\"" << ox + w - 20
        << "\" y=\"" << oy + h + 14 << "\">" << xmax << "</text>\n";
    std::size_t k = 0;
    for (auto& [m, pts] : series) {
      const char* colour = palette[k % std::size(palette)];
      out << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
      for (auto& [x, y] : pts) out << ox + (x - xmin) / (xmax - xmin) * w << ',' << oy + (1 - y) * h << ' ';
      out << "\"/>\n<text x=\"" << ox + 6 << "\" y=\"" << oy + h - 6 - 12.0 * static_cast<double>(k) << "\" fill=\""
          << colour << "\">" << m << "</text>\n";
      ++k;
    }
    ++idx;
  }
  out << "</svg>\n";
}

void run_report(const ExperimentSpec& spec, std::ostream& log) {
  if (spec.inputs.empty()) throw ArgumentError("report needs at least one metrics CSV");
  std::vector<MetricRow> rows;
  for (const auto& path : spec.inputs) {
    const auto t = csv::read(path);
    const std::size_t cm = t.column("model"), cd = t.column("dataset"), cn = t.column("noise");
    std::size_t cv[4];
    for (int k = 0; k < 4; ++k) cv[k] = t.column(kMetricNames[k]);
    for (const auto& r : t.rows) {
      MetricRow row{r[cm], r[cd], r[cn], {}};
      for (int k = 0; k < 4; ++k) {
        row.values[k] = csv::parse_double(r[cv[k]]);
        if (!(row.values[k] >= 0.0 && row.values[k] <= 1.0)) {
          throw FormatError(path.string() + ": metric outside [0, 1]");
        }
      }
      rows.push_back(std::move(row));
    }
  }

  ensure_dir(spec.out);
  {
    auto table = open_out(spec.out / "table.csv");
    table << kMetricsHeader << "\n";
    for (const auto& r : rows) {
      table << r.model << ',' << r.dataset << ',' << r.noise;
      for (double v : r.values) table << ',' << csv::format(v);
      table << "\n";
    }
  }

  std::vector<std::string> models;
  for (const auto& r : rows) {
    if (std::find(models.begin(), models.end(), r.model) == models.end()) models.push_back(r.model);
  }
  // Pairing unit: one (dataset, noise point) cell.
  std::map<std::string, std::map<std::string, const MetricRow*>> by_model;
  std::vector<std::string> cell_order;
  for (const auto& r : rows) {
    const std::string cell = r.dataset + "|" + r.noise;
    if (std::find(cell_order.begin(), cell_order.end(), cell) == cell_order.end()) cell_order.push_back(cell);
    by_model[r.model][cell] = &r;
  }

  auto sig = open_out(spec.out / "significance.csv");
  sig << kSignificanceHeader << "\n";
  for (std::size_t a = 0; a < models.size(); ++a) {
    for (std::size_t b = a + 1; b < models.size(); ++b) {
      for (int k = 0; k < 4; ++k) {
        std::vector<double> xa, xb;
        for (const auto& cell : cell_order) {
          const auto ia = by_model[models[a]].find(cell);
          const auto ib = by_model[models[b]].find(cell);
          if (ia == by_model[models[a]].end() || ib == by_model[models[b]].end()) continue;
          xa.push_back(ia->second->values[k]);
          xb.push_back(ib->second->values[k]);
        }
        if (xa.empty()) continue;
        const auto w = metrics::wilcoxon(xa, xb);
        sig << models[a] << ',' << models[b] << ',' << kMetricNames[k] << ',' << csv::format(w.w_statistic) << ','
            << csv::format(w.p_value) << ',' << w.n_effective << "\n";
        log << models[a] << " vs " << models[b] << " " << kMetricNames[k] << ": W=" << w.w_statistic
            << " p=" << w.p_value << " n=" << w.n_effective << "\n";
      }
    }
  }
  if (spec.plot) write_plot(rows, spec.out / "accuracy.svg");
}

}  // namespace

std::vector<noise::NoiseSpec> Sweep::points() const {
  std::vector<noise::NoiseSpec> out;
  for (double v : values) out.push_back(noise::with_parameter(base, param, v));
  return out;
}

Sweep parse_sweep(const std::string& text) {
  const auto colon = text.find(':');
  const auto eq = text.find('=', colon == std::string::npos ? 0 : colon);
  if (colon == std::string::npos || eq == std::string::npos) {
    throw ArgumentError("sweep must look like KIND:param=a,b,c, got '" + text + "'");
  }
  Sweep s;
  const std::string kind = text.substr(0, colon);
  s.param = text.substr(colon + 1, eq - colon - 1);
  // Any in-range value of the swept parameter yields a valid base spec.
  s.base = noise::parse_noise_spec(kind + ":" + s.param + "=1");
  std::stringstream ss(text.substr(eq + 1));
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    s.values.push_back(parse_real("sweep", item));
  }
  for (double v : s.values) noise::with_parameter(s.base, s.param, v);
  return s;
}

void run(const ExperimentSpec& spec, std::ostream& log) {
  switch (spec.command) {
    case Command::train: run_train(spec, log); break;
    case Command::eval: run_eval(spec, log); break;
    case Command::corrupt: run_corrupt(spec, log); break;
    case Command::report: run_report(spec, log); break;
  }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hybrid spiking / variational-circuit classifier experiments"};
  app.require_subcommand(1);

  // Flag values are collected as strings keyed like the config file and
  // resolved after the config file, so flags take precedence.
  std::map<std::string, std::string> flags;
  std::string config_path;
  std::vector<std::string> inputs;
  bool plot = false;

  struct FlagDef {
    const char* flag;
    const char* key;
    const char* help;
  };
  static constexpr FlagDef defs[] = {
      {"--dataset", "data.dataset", "mnist | fashion | kmnist"},
      {"--data-dir", "data.data_dir", "directory holding the IDX files"},
      {"--classes", "data.classes", "comma-separated class labels to keep, e.g. 6,7,8,9"},
      {"--train-size", "data.train_size", "number of filtered training samples used (default 954)"},
      {"--split", "data.split", "corrupt: train | test"},
      {"--noise", "noise.noise", "KIND:k=v[,k=v], e.g. gaussian:sigma=0.3"},
      {"--sweep", "noise.sweep", "KIND:param=a,b,c"},
      {"--checkpoint", "output.checkpoint", "checkpoint path"},
      {"--out", "output.out", "output directory"},
      {"--name", "output.name", "model name in metric rows"},
      {"--seed", "train.seed", "master seed"},
      {"--mode", "train.mode", "expected | stochastic"},
      {"--epochs", "train.epochs", "epochs per fold"},
      {"--batch-size", "train.batch_size", "mini-batch size"},
      {"--folds", "train.folds", "cross-validation folds (1 = no held-out fold)"},
      {"--qubits", "model.qubits", "circuit width"},
      {"--layers", "model.layers", "variational blocks"},
      {"--head", "model.head", "quantum | classical"},
      {"--lr", "optimizer.lr", "Adam learning rate"},
  };

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key=value config file with [data] [model] [optimizer] [train] [noise] [output] sections");
    for (const auto& d : defs) {
      sub->add_option_function<std::string>(
          d.flag, [&flags, key = std::string(d.key)](const std::string& v) { flags[key] = v; }, d.help);
    }
  };
  CLI::App* train_cmd = app.add_subcommand("train", "train a model with k-fold cross-validation");
  CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint on noisy test sets");
  CLI::App* corrupt_cmd = app.add_subcommand("corrupt", "write a corrupted copy of a dataset split as IDX");
  CLI::App* report_cmd = app.add_subcommand("report", "join metric CSVs and run paired Wilcoxon tests");
  for (auto* sub : {train_cmd, eval_cmd, corrupt_cmd, report_cmd}) add_common(sub);
  report_cmd->add_option("inputs", inputs, "metrics CSV files")->required();
  report_cmd->add_flag("--plot", plot, "also write accuracy.svg");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return static_cast<int>(ErrorKind::argument);
  }

  try {
    ExperimentSpec spec;
    spec.command = parse_command(app.get_subcommands().front()->get_name());
    if (!config_path.empty()) {
      const auto cfg = config::ConfigFile::load(config_path);
      for (const auto& [k, v] : cfg.entries()) apply_setting(spec, k, v);
    }
    for (const auto& [k, v] : flags) apply_setting(spec, k, v);
    for (const auto& p : inputs) spec.inputs.emplace_back(p);
    spec.plot = plot;
    run(spec, err);
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    if (e.kind() == ErrorKind::argument) err << "\n" << app.help();
    return static_cast<int>(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(ErrorKind::numeric);
  }
}

}  // namespace qspike::cli
