// scalefit: command-line front end for kernel quantile and scale-function
// estimation. Subcommands: gen, fit, curves, select, converge.
//
// Exit codes: 0 success, 2 validation error, 3 I/O error, 4 solver failure.
// stderr carries diagnostics; stdout carries data only with `--out -`.

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "scalefit/errors.hpp"
#include "scalefit/eval.hpp"
#include "scalefit/io.hpp"
#include "scalefit/select.hpp"

namespace {

using namespace scalefit;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

// Writes either to a file or to stdout when path is "-".
class OutputTarget {
 public:
  explicit OutputTarget(const std::string& path) {
    if (path != "-") {
      file_.open(path);
      if (!file_) throw IoError("cannot open '" + path + "' for writing");
      path_ = path;
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }
  void finish() {
    stream().flush();
    if (file_.is_open() && !file_) throw IoError("write to '" + path_ + "' failed");
  }

 private:
  std::ofstream file_;
  std::string path_;
};

struct CsvFlags {
  std::string data_path;
  std::string delimiter = ",";
  bool no_header = false;
  std::vector<Index> x_cols;
  Index y_col = -1;

  Dataset load() const {
    DatasetFile file;
    file.path = data_path;
    if (delimiter.size() != 1) throw InputError("--delimiter must be a single character");
    file.delimiter = delimiter[0];
    file.has_header = !no_header;
    file.x_columns = x_cols;
    file.y_column = y_col;
    return load_csv(file);
  }
};

void add_csv_flags(CLI::App* cmd, CsvFlags& flags) {
  cmd->add_option("--data", flags.data_path, "input CSV path")->required();
  cmd->add_option("--delimiter", flags.delimiter, "CSV delimiter (default ,)");
  cmd->add_flag("--no-header", flags.no_header, "input has no header line");
  cmd->add_option("--x-cols", flags.x_cols, "zero-based x column indices (default: all but y)")
      ->delimiter(',');
  cmd->add_option("--y-col", flags.y_col, "zero-based y column index (default: last)");
}

struct GeneratorFlags {
  std::string loc = "sine";
  std::string scale = "constant";
  std::string noise = "gaussian";
  std::vector<double> domain{0.0, 1.0};
  std::uint64_t seed = 0;
  double loc_value = 0.0;
  double loc_amplitude = 1.0;
  double scale_base = 1.0;
  double scale_slope = 1.0;

  GeneratorSpec spec() const {
    GeneratorSpec out;
    out.location = location_kind_from_string(loc);
    out.scale = scale_kind_from_string(scale);
    out.noise = noise_kind_from_string(noise);
    if (domain.size() != 2) throw InputError("--domain expects two values: lo,hi");
    out.domain_lo = domain[0];
    out.domain_hi = domain[1];
    out.seed = seed;
    out.loc_value = loc_value;
    out.loc_amplitude = loc_amplitude;
    out.scale_base = scale_base;
    out.scale_slope = scale_slope;
    validate(out);
    return out;
  }
};

void add_generator_flags(CLI::App* cmd, GeneratorFlags& flags) {
  cmd->add_option("--loc", flags.loc, "location: constant|sine|lidar_like");
  cmd->add_option("--scale", flags.scale, "scale: constant|linear|step");
  cmd->add_option("--noise", flags.noise, "noise: gaussian|laplace|skewed");
  cmd->add_option("--domain", flags.domain, "input interval lo,hi (default 0,1)")->delimiter(',');
  cmd->add_option("--seed", flags.seed, "generator seed");
  cmd->add_option("--loc-value", flags.loc_value, "constant location level");
  cmd->add_option("--loc-amplitude", flags.loc_amplitude, "sine amplitude / lidar drop");
  cmd->add_option("--scale-base", flags.scale_base, "scale at the left endpoint");
  cmd->add_option("--scale-slope", flags.scale_slope, "scale slope / step jump");
}

struct SolverFlags {
  double tol = 1e-8;
  double jitter = 1e-10;
  int max_iter = 0;
  std::uint64_t seed = 1;

  FitConfig config(double lambda) const {
    FitConfig out;
    out.lambda = lambda;
    out.tol = tol;
    out.jitter = jitter;
    out.max_iter = max_iter;
    out.seed = seed;
    return out;
  }
};

void add_solver_flags(CLI::App* cmd, SolverFlags& flags) {
  cmd->add_option("--tol", flags.tol, "solver stopping tolerance (default 1e-8)");
  cmd->add_option("--jitter", flags.jitter, "Gram diagonal jitter (default 1e-10)");
  cmd->add_option("--max-iter", flags.max_iter, "iteration cap (0 = family default)");
  cmd->add_option("--solver-seed", flags.seed, "coordinate sweep seed (default 1)");
}

struct KernelFlags {
  std::string kernel = "rbf";
  double gamma = 1.0;
  int degree = 2;
  double coef0 = 0.0;

  KernelSpec spec(std::optional<double> gamma_override = std::nullopt) const {
    KernelSpec out;
    out.family = kernel_family_from_string(kernel);
    out.gamma = gamma_override.value_or(gamma);
    out.degree = degree;
    out.coef0 = coef0;
    validate(out);
    return out;
  }
};

void add_kernel_flags(CLI::App* cmd, KernelFlags& flags) {
  cmd->add_option("--kernel", flags.kernel, "kernel family: rbf|linear|poly (default rbf)");
  cmd->add_option("--gamma", flags.gamma, "RBF width (default 1)");
  cmd->add_option("--degree", flags.degree, "polynomial degree");
  cmd->add_option("--coef0", flags.coef0, "polynomial offset (>= 0)");
}

void report_to_stderr(const std::string& label, const QuantileModel& model) {
  std::cerr << label << ": iterations=" << model.report.iterations
            << " residual=" << fmt_short(model.report.residual)
            << " converged=" << (model.report.converged ? "yes" : "no")
            << " objective=" << fmt_short(model.objective_value)
            << " seed=" << model.report.seed << "\n";
}

// --- gen -----------------------------------------------------------------

struct GenOptions {
  GeneratorFlags generator;
  Index n = 0;
  std::string out;
};

void run_gen(const GenOptions& opt) {
  const GeneratorSpec spec = opt.generator.spec();
  std::cerr << "gen: seed=" << spec.seed << "\n";
  const Dataset data = sample(spec, opt.n);
  OutputTarget target(opt.out);
  write_csv(target.stream(), data);
  target.finish();
  std::cerr << "gen: wrote " << data.n() << " rows\n";
}

// --- fit -----------------------------------------------------------------

struct FitOptions {
  std::string kind;
  CsvFlags csv;
  KernelFlags kernel;
  SolverFlags solver;
  std::vector<double> taus;
  std::vector<double> lambdas;
  double lambda1 = 0.05;
  double lambda2 = 0.05;
  double epsilon = 0.1;
  std::optional<double> gamma2;
  std::string out;
};

std::vector<double> expand_lambdas(std::vector<double> lambdas, std::size_t m, double fallback) {
  if (lambdas.empty()) lambdas.assign(m, fallback);
  if (lambdas.size() == 1) lambdas.assign(m, lambdas[0]);
  if (lambdas.size() != m) {
    throw InputError("--lambda expects 1 value or one per quantile level");
  }
  return lambdas;
}

void run_fit(const FitOptions& opt) {
  std::cerr << "fit " << opt.kind << ": solver seed=" << opt.solver.seed << "\n";
  Model model;
  if (opt.kind == "quantile") {
    const double tau = opt.taus.empty() ? 0.5 : opt.taus.at(0);
    const double lambda = opt.lambdas.empty() ? 0.1 : opt.lambdas.at(0);
    const Dataset data = opt.csv.load();
    QuantileModel q = fit_quantile(data, tau, opt.kernel.spec(), opt.solver.config(lambda));
    report_to_stderr("fit quantile tau=" + fmt_short(tau), q);
    model = std::move(q);
  } else if (opt.kind == "iqr" || opt.kind == "asym") {
    std::vector<double> taus = opt.taus;
    std::vector<double> weights;
    if (opt.kind == "iqr") {
      if (taus.empty()) taus = {0.25, 0.75};
      if (taus.size() != 2) throw InputError("fit iqr: --tau expects two levels");
      weights = {-1.0, 1.0};
    } else {
      if (taus.empty()) taus = {0.05, 0.5, 0.95};
      if (taus.size() != 3) throw InputError("fit asym: --tau expects three levels");
      weights = {1.0, -2.0, 1.0};
    }
    const auto lambdas = expand_lambdas(opt.lambdas, taus.size(), 0.1);
    std::vector<KernelSpec> kernels(taus.size(), opt.kernel.spec());
    std::vector<FitConfig> configs;
    for (const double l : lambdas) configs.push_back(opt.solver.config(l));
    const Dataset data = opt.csv.load();
    CombinationModel c = fit_combination(data, taus, weights, kernels, configs);
    for (std::size_t j = 0; j < c.parts.size(); ++j) {
      report_to_stderr("fit " + opt.kind + " part tau=" + fmt_short(taus[j]), c.parts[j]);
    }
    model = std::move(c);
  } else if (opt.kind == "mad") {
    const Dataset data = opt.csv.load();
    MadModel m = fit_mad(data, opt.kernel.spec(), opt.solver.config(opt.lambda1),
                         opt.kernel.spec(opt.gamma2), opt.solver.config(opt.lambda2),
                         opt.epsilon);
    report_to_stderr("fit mad stage1 (median)", m.median_model);
    report_to_stderr("fit mad stage2 (residual scale)", m.residual_model);
    model = std::move(m);
  } else {
    throw InputError("fit: kind must be one of quantile|iqr|asym|mad");
  }
  save_model(opt.out, model);
  std::cerr << "fit: model written to " << opt.out << "\n";
}

// --- curves ---------------------------------------------------------------

struct CurvesOptions {
  std::vector<std::string> model_paths;
  std::string grid;
  std::string out;
  bool double_mad = false;
};

Matrix parse_grid(const std::string& text) {
  double lo = 0.0, hi = 0.0;
  long count = -1;
  if (std::sscanf(text.c_str(), "%lf:%lf:%ld", &lo, &hi, &count) != 3) {
    throw InputError("--grid expects lo:hi:count");
  }
  if (count <= 0) throw InputError("curves: empty grid (count must be >= 1)");
  if (count > 1 && !(lo < hi)) throw InputError("--grid expects lo < hi");
  Matrix grid(count, 1);
  for (long i = 0; i < count; ++i) {
    grid(i, 0) = count == 1 ? lo
                            : lo + (hi - lo) * static_cast<double>(i) /
                                       static_cast<double>(count - 1);
  }
  return grid;
}

std::string curve_name(const Model& model, bool double_mad) {
  if (const auto* q = std::get_if<QuantileModel>(&model)) {
    return "q" + fmt_short(q->loss.tau);
  }
  if (const auto* c = std::get_if<CombinationModel>(&model)) {
    if (c->parts.size() == 2 && c->weights[0] == -1.0 && c->weights[1] == 1.0) return "iqr";
    if (c->parts.size() == 3) return "asym";
    return "comb";
  }
  return double_mad ? "2xmad" : "mad";
}

void run_curves(const CurvesOptions& opt) {
  const Matrix grid = parse_grid(opt.grid);
  std::vector<Model> models;
  std::vector<std::string> names;
  double train_lo = std::numeric_limits<double>::infinity();
  double train_hi = -std::numeric_limits<double>::infinity();
  for (const auto& path : opt.model_paths) {
    Model model = load_model(path);
    const auto track = [&](const QuantileModel& q) {
      if (q.train_inputs.cols() != 1) {
        throw InputError("curves: model '" + path + "' was trained on " +
                         std::to_string(q.train_inputs.cols()) + "-d inputs, need 1-d");
      }
      train_lo = std::min(train_lo, q.train_inputs.col(0).minCoeff());
      train_hi = std::max(train_hi, q.train_inputs.col(0).maxCoeff());
    };
    if (const auto* q = std::get_if<QuantileModel>(&model)) {
      track(*q);
    } else if (const auto* c = std::get_if<CombinationModel>(&model)) {
      for (const auto& part : c->parts) track(part);
    } else {
      const auto& m = std::get<MadModel>(model);
      track(m.median_model);
      track(m.residual_model);
    }
    std::string name = curve_name(model, opt.double_mad);
    int suffix = 2;
    std::string candidate = name;
    while (std::find(names.begin(), names.end(), candidate) != names.end()) {
      candidate = name + "_" + std::to_string(suffix++);
    }
    names.push_back(candidate);
    models.push_back(std::move(model));
  }
  if (grid(0, 0) < train_lo || grid(grid.rows() - 1, 0) > train_hi) {
    std::cerr << "curves: warning: grid [" << fmt_short(grid(0, 0)) << ", "
              << fmt_short(grid(grid.rows() - 1, 0)) << "] extends outside the training hull ["
              << fmt_short(train_lo) << ", " << fmt_short(train_hi) << "]\n";
  }

  OutputTarget target(opt.out);
  std::ostream& out = target.stream();
  out << "x";
  for (const auto& name : names) out << "," << name;
  out << "\n";
  for (Index i = 0; i < grid.rows(); ++i) {
    out << fmt(grid(i, 0));
    for (const auto& model : models) {
      double v = predict_any(model, grid.row(i));
      if (opt.double_mad && std::holds_alternative<MadModel>(model)) v *= 2.0;
      out << "," << fmt(v);
    }
    out << "\n";
  }
  target.finish();
  std::cerr << "curves: wrote " << grid.rows() << " rows x " << models.size() << " curves\n";
}

// --- select ---------------------------------------------------------------

struct SelectOptions {
  CsvFlags csv;
  SolverFlags solver;
  SelectConfig config;
  std::string loss_name = "pinball";
  std::string out = "-";
};

void run_select(const SelectOptions& opt) {
  SelectConfig config = opt.config;
  config.loss = loss_family_from_string(opt.loss_name);
  config.tol = opt.solver.tol;
  config.jitter = opt.solver.jitter;
  config.max_iter = opt.solver.max_iter;
  config.seed = opt.solver.seed;
  const Dataset data = opt.csv.load();
  std::cerr << "select: " << config.lambdas.size() << " x " << config.gammas.size()
            << " grid, " << config.folds << "-fold, seed=" << config.seed << "\n";
  const SelectResult result = cv_select(data, config);

  OutputTarget target(opt.out);
  std::ostream& out = target.stream();
  out << "lambda,gamma,mean_risk,status\n";
  for (const auto& cell : result.cells) {
    out << fmt(cell.lambda) << "," << fmt(cell.gamma) << ",";
    if (cell.ok) {
      out << fmt(cell.mean_risk) << ",ok\n";
    } else {
      out << ",error: " << cell.error << "\n";
    }
  }
  if (result.best < 0) {
    target.finish();
    throw ConvergenceError("select: every grid cell failed to fit", Vector(), 0.0, 0);
  }
  const auto& best = result.cells[static_cast<std::size_t>(result.best)];
  out << "# selected lambda=" << fmt(best.lambda) << " gamma=" << fmt(best.gamma)
      << " mean_risk=" << fmt(best.mean_risk) << "\n";
  target.finish();
  std::cerr << "select: lambda=" << fmt_short(best.lambda)
            << " gamma=" << fmt_short(best.gamma)
            << " mean_risk=" << fmt_short(best.mean_risk) << "\n";
}

// --- converge ---------------------------------------------------------------

struct ConvergeCliOptions {
  GeneratorFlags generator;
  double exponent1 = 0.2;
  double exponent2 = 0.2;
  std::vector<Index> sizes{200, 800, 3200};
  double epsilon = 0.1;
  double gamma = 1.0;
  std::uint64_t seed = 7;
  ConvergenceOptions run;
  std::string out;
};

void run_converge(const ConvergeCliOptions& opt) {
  const LambdaSchedule schedule(opt.exponent1, opt.exponent2);
  const GeneratorSpec spec = opt.generator.spec();
  std::cerr << "converge: seed=" << opt.seed << "\n";
  const ConvergenceReport report =
      run_convergence(spec, schedule, opt.sizes, opt.epsilon, KernelSpec::rbf(opt.gamma),
                      opt.seed, opt.run);
  OutputTarget target(opt.out);
  write_report_csv(target.stream(), report);
  target.finish();
  for (const auto& row : report.rows) {
    std::cerr << "converge: n=" << row.n;
    if (row.solver_ok) {
      std::cerr << " gap=" << fmt_short(row.risk_true_f - row.inf_risk)
                << " l1_median=" << fmt_short(row.l1_median);
    } else {
      std::cerr << " error: " << row.error;
    }
    std::cerr << " (" << fmt_short(row.wall_ms) << " ms)\n";
  }
}

// --- flat config files -------------------------------------------------------
//
// `--config file` supplies defaults as flat `key = value` lines with `#`
// comments, where each key is a long option name of the subcommand. The file
// is expanded into argument tokens before parsing; keys already present on
// the command line are dropped, so explicit flags always win.

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

struct ConfigEntry {
  std::string flag;
  std::optional<std::string> value;  // empty for boolean flags
};

std::vector<ConfigEntry> config_entries(CLI::App* sub, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::vector<ConfigEntry> entries;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw InputError("config: line " + std::to_string(line_no) + " is not 'key = value'");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw InputError("config: empty key or value on line " + std::to_string(line_no));
    }
    const std::string flag = "--" + key;
    const CLI::Option* option = sub->get_option_no_throw(flag);
    if (option == nullptr) {
      throw InputError("config: unknown key '" + key + "' for subcommand '" +
                       sub->get_name() + "'");
    }
    if (option->get_expected_min() == 0) {  // flag-like option
      if (value == "1" || value == "true" || value == "yes" || value == "on") {
        entries.push_back({flag, std::nullopt});
      } else if (!(value == "0" || value == "false" || value == "no" || value == "off")) {
        throw InputError("config: flag '" + key + "' expects a boolean value");
      }
    } else {
      entries.push_back({flag, value});
    }
  }
  return entries;
}

// Pulls `--config path` out of the raw arguments and splices the file's
// tokens in right after the subcommand name.
void expand_config(CLI::App& app, std::vector<std::string>& args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                 args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (path.empty()) return;
  if (args.empty()) throw InputError("--config requires a subcommand");
  CLI::App* sub = app.get_subcommand_no_throw(args[0]);
  if (sub == nullptr) throw InputError("unknown subcommand '" + args[0] + "'");

  const auto user_has = [&](const std::string& flag) {
    for (std::size_t i = 1; i < args.size(); ++i) {
      if (args[i] == flag || args[i].rfind(flag + "=", 0) == 0) return true;
    }
    return false;
  };

  std::vector<std::string> inserted;
  for (const ConfigEntry& entry : config_entries(sub, path)) {
    if (user_has(entry.flag)) continue;
    inserted.push_back(entry.flag);
    if (entry.value) inserted.push_back(*entry.value);
  }
  args.insert(args.begin() + 1, inserted.begin(), inserted.end());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scalefit: kernel-based quantile and scale-function estimation"};
  app.require_subcommand(1);
  std::string config_path;  // expanded before parsing; registered for --help

  GenOptions gen_opt;
  auto* gen_cmd = app.add_subcommand("gen", "generate a synthetic dataset as CSV");
  gen_cmd->add_option("--config", config_path,
                      "flat key = value defaults; flags override the file");
  add_generator_flags(gen_cmd, gen_opt.generator);
  gen_cmd->add_option("--n", gen_opt.n, "number of observations")->required();
  gen_cmd->add_option("--out", gen_opt.out, "output CSV path, or - for stdout")->required();
  gen_cmd->callback([&] { run_gen(gen_opt); });

  FitOptions fit_opt;
  auto* fit_cmd = app.add_subcommand("fit", "fit a quantile, iqr, asym or mad model");
  fit_cmd->add_option("--config", config_path,
                      "flat key = value defaults; flags override the file");
  fit_cmd->add_option("kind", fit_opt.kind, "quantile|iqr|asym|mad")->required();
  add_csv_flags(fit_cmd, fit_opt.csv);
  add_kernel_flags(fit_cmd, fit_opt.kernel);
  add_solver_flags(fit_cmd, fit_opt.solver);
  fit_cmd->add_option("--tau", fit_opt.taus, "quantile level(s)")->delimiter(',');
  fit_cmd->add_option("--lambda", fit_opt.lambdas, "regularization (one value or per level)")
      ->delimiter(',');
  fit_cmd->add_option("--lambda1", fit_opt.lambda1, "mad: stage-1 regularization");
  fit_cmd->add_option("--lambda2", fit_opt.lambda2, "mad: stage-2 regularization");
  fit_cmd->add_option("--eps", fit_opt.epsilon, "mad: smoothing epsilon (default 0.1)");
  double gamma2 = 0.0;
  auto* gamma2_opt = fit_cmd->add_option("--gamma2", gamma2, "mad: stage-2 RBF width");
  fit_cmd->add_option("--out", fit_opt.out, "output model path")->required();
  fit_cmd->callback([&] {
    if (gamma2_opt->count() > 0) fit_opt.gamma2 = gamma2;
    run_fit(fit_opt);
  });

  CurvesOptions curves_opt;
  auto* curves_cmd = app.add_subcommand("curves", "evaluate model curves on a grid as CSV");
  curves_cmd->add_option("--config", config_path,
                      "flat key = value defaults; flags override the file");
  curves_cmd->add_option("--model", curves_opt.model_paths, "model file(s)")
      ->required()
      ->delimiter(',');
  curves_cmd->add_option("--grid", curves_opt.grid, "evaluation grid lo:hi:count")->required();
  curves_cmd->add_flag("--double-mad", curves_opt.double_mad,
                       "emit 2x the MAD curve (interval-width scale)");
  curves_cmd->add_option("--out", curves_opt.out, "output CSV path, or - for stdout")
      ->required();
  curves_cmd->callback([&] { run_curves(curves_opt); });

  SelectOptions select_opt;
  auto* select_cmd =
      app.add_subcommand("select", "grid-search lambda/gamma by cross-validated pinball risk");
  select_cmd->add_option("--config", config_path,
                      "flat key = value defaults; flags override the file");
  add_csv_flags(select_cmd, select_opt.csv);
  add_solver_flags(select_cmd, select_opt.solver);
  select_cmd->add_option("--tau", select_opt.config.tau, "quantile level (default 0.5)");
  select_cmd->add_option("--loss", select_opt.loss_name, "fit loss: pinball|smoothed");
  select_cmd->add_option("--eps", select_opt.config.epsilon, "smoothing epsilon");
  select_cmd->add_option("--lambdas", select_opt.config.lambdas, "lambda grid")
      ->required()
      ->delimiter(',');
  select_cmd->add_option("--gammas", select_opt.config.gammas, "gamma grid")
      ->required()
      ->delimiter(',');
  select_cmd->add_option("--folds", select_opt.config.folds, "cross-validation folds");
  select_cmd->add_option("--out", select_opt.out, "report CSV path, or - for stdout");
  select_cmd->callback([&] { run_select(select_opt); });

  ConvergeCliOptions converge_opt;
  auto* converge_cmd =
      app.add_subcommand("converge", "run the mad-consistency convergence experiment");
  converge_cmd->add_option("--config", config_path,
                      "flat key = value defaults; flags override the file");
  add_generator_flags(converge_cmd, converge_opt.generator);
  converge_cmd->add_option("--e1", converge_opt.exponent1, "lambda1 exponent (default 0.2)");
  converge_cmd->add_option("--e2", converge_opt.exponent2, "lambda2 exponent (default 0.2)");
  converge_cmd->add_option("--sizes", converge_opt.sizes, "sample sizes (default 200,800,3200)")
      ->delimiter(',');
  converge_cmd->add_option("--eps", converge_opt.epsilon, "smoothing epsilon (default 0.1)");
  converge_cmd->add_option("--gamma", converge_opt.gamma, "RBF width (default 1)");
  converge_cmd->add_option("--exp-seed", converge_opt.seed, "experiment seed (default 7)");
  converge_cmd->add_option("--eval-points", converge_opt.run.eval_points,
                           "evaluation sample size (default 200000)");
  converge_cmd->add_option("--tol", converge_opt.run.tol, "solver tolerance");
  converge_cmd->add_option("--jitter", converge_opt.run.jitter, "Gram diagonal jitter");
  converge_cmd->add_option("--out", converge_opt.out, "report CSV path, or - for stdout")
      ->required();
  converge_cmd->callback([&] { run_converge(converge_opt); });

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    expand_config(app, args);
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
