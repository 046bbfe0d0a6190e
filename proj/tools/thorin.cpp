// Command-line front end: fit, project, sample, coeffs, check-wb, validate, bench.

#include <CLI11.hpp>
#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "thorin/cli/io.hpp"
#include "thorin/estimator/estimator.hpp"
#include "thorin/ggc/coeffs.hpp"
#include "thorin/numkit/errors.hpp"
#include "thorin/numkit/random.hpp"
#include "thorin/validate/validate.hpp"
#include "thorin/wb/wellbehaved.hpp"

namespace fs = std::filesystem;
using namespace thorin;
using nlohmann::json;

namespace {

constexpr int kExitData = 2;
constexpr int kExitConfig = 3;
constexpr int kExitNumeric = 4;

struct Options {
  std::string input;
  std::string output;
  std::string model;
  std::string dist;
  std::string params;
  std::string m;
  std::string config;
  std::size_t n = 1;
  unsigned bits = 256;
  std::optional<std::uint64_t> seed;
  std::size_t swarm = 0;
  std::size_t iters = 2000;
  std::size_t restarts = 3;
  unsigned threads = 0;
  std::size_t count = 0;
  std::size_t resamples = 50;
  std::size_t drop_tail = 0;
  double eps = 0.0;
  bool pseudo = false;
};

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(cell, &used));
      if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(cell);
    } catch (const std::logic_error&) {
      throw ConfigError(std::string("--") + what + ": '" + cell + "' is not a number");
    }
  }
  return out;
}

numkit::MultiIndex parse_m(const std::string& text) {
  std::vector<int> k;
  for (double v : parse_list(text, "m")) {
    if (v < 0 || v != std::floor(v) || v > 1e6) throw ConfigError("--m entries must be non-negative integers");
    k.push_back(static_cast<int>(v));
  }
  return numkit::MultiIndex(std::move(k));
}

std::uint64_t require_seed(const Options& o) {
  if (!o.seed) throw ConfigError("--seed is required for randomized commands");
  return *o.seed;
}

estimator::FitConfig fit_config(const Options& o, std::size_t d) {
  estimator::FitConfig cfg;
  cfg.n = o.n;
  if (!o.m.empty()) cfg.m = parse_m(o.m);
  cfg.swarm_size = o.swarm;
  cfg.max_iters = o.iters;
  cfg.seed = require_seed(o);
  cfg.precision_bits = o.bits;
  cfg.restarts = o.restarts;
  cfg.threads = o.threads;
  cfg.validate(d);
  if (cfg.m.values().empty()) cfg.m = estimator::default_truncation(cfg.n, d);
  return cfg;
}

ggc::GgcModel load_model(const std::string& path) {
  if (path.empty()) throw ConfigError("a model JSON file is required (--model)");
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open model file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
    return ggc::model_from_json(j.contains("model") ? j.at("model") : j);
  } catch (const json::exception& e) {
    throw DataError(path + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(path + ": " + e.what());
  }
}

fs::path output_dir(const Options& o) {
  if (o.output.empty()) throw ConfigError("--output directory is required");
  std::error_code ec;
  fs::create_directories(o.output, ec);
  if (ec || !fs::is_directory(o.output)) throw ConfigError("cannot create output directory '" + o.output + "'");
  return o.output;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
}

// Writes to --output when given, standard output otherwise.
void emit(const Options& o, const std::string& text) {
  if (o.output.empty()) {
    std::cout << text;
  } else {
    write_text(o.output, text);
  }
}

json dependence_json(const ggc::GgcModel& model) {
  const auto dep = wb::classify_dependence(model);
  return {{"kind", wb::to_string(dep.kind)}, {"rays", dep.rays}, {"singular", dep.singular}};
}

json model_coeffs_json(const ggc::GgcModel& model, const numkit::MultiIndex& m, unsigned bits) {
  return laguerre::to_json(laguerre::to_double(ggc::model_coeffs(model, m, numkit::PrecisionContext(bits)).a));
}

void write_fit_outputs(const fs::path& dir, const estimator::FitReport& rep, json report, json coeffs) {
  write_text(dir / "report.json", report.dump(2) + "\n");
  coeffs["model"] = model_coeffs_json(rep.model, rep.m, rep.bits_used);
  write_text(dir / "coeffs.json", coeffs.dump(2) + "\n");
}

int cmd_fit(const Options& o) {
  if (o.input.empty()) throw ConfigError("--input CSV is required");
  const auto samples = cli::read_csv_file(o.input);
  const auto cfg = fit_config(o, samples.dim());
  const fs::path dir = output_dir(o);
  const auto rep = estimator::fit_empirical(samples, cfg);
  json report = estimator::to_json(rep);
  report["samples"] = samples.rows();
  report["dependence"] = dependence_json(rep.model);
  json coeffs;
  coeffs["empirical"] = laguerre::to_json(laguerre::empirical_coeffs(samples, cfg.m, cfg.threads));
  write_fit_outputs(dir, rep, report, coeffs);
  std::cerr << "fit: loss " << rep.loss << ", w.b. " << (rep.wb.is_wb ? "yes" : "no") << "\n";
  return 0;
}

int cmd_project(const Options& o) {
  if (o.dist.empty()) throw ConfigError("--dist is required");
  const auto dist = validate::make_bench(o.dist, parse_list(o.params, "params"));
  const auto cfg = fit_config(o, dist.dim);
  if (dist.dim > 2) throw ConfigError("projection supports d <= 2");
  const fs::path dir = output_dir(o);
  const auto lower = validate::bench_support_lower(dist);
  const auto mu = estimator::theoretical_moments(validate::bench_density(dist), cfg.m, numkit::PrecisionContext(o.bits),
                                                 lower);
  json warnings = json::array();
  if (!mu.converged) {
    warnings.push_back("quadrature did not reach the requested tolerance; achieved relative change " +
                       cli::format_double(mu.achieved_rel_tol));
  }
  if (const auto w = validate::bench_warning(dist); !w.empty()) warnings.push_back(w);
  for (const auto& w : warnings) std::cerr << "warning: " << w.get<std::string>() << "\n";
  const auto rep = estimator::project_density(mu.mu, cfg);
  json report = estimator::to_json(rep);
  report["source"] = {{"dist", dist.name}, {"params", dist.params}};
  report["quadrature"] = {{"bits", o.bits}, {"converged", mu.converged}, {"achieved_rel_tol", mu.achieved_rel_tol}};
  report["warnings"] = warnings;
  report["dependence"] = dependence_json(rep.model);
  json coeffs;
  numkit::PrecisionScope scope(o.bits);
  coeffs["target"] = laguerre::to_json(laguerre::to_double(laguerre::coeffs_from_moments(mu.mu)));
  write_fit_outputs(dir, rep, report, coeffs);
  std::cerr << "project: loss " << rep.loss << "\n";
  return 0;
}

int cmd_sample(const Options& o) {
  const auto model = load_model(o.model.empty() ? o.input : o.model);
  if (o.count == 0) throw ConfigError("--count must be positive");
  const auto samples = ggc::sample(model, o.count, require_seed(o), o.threads);
  std::ostringstream out;
  cli::write_csv(out, samples);
  emit(o, out.str());
  return 0;
}

int cmd_coeffs(const Options& o) {
  json j;
  if (!o.model.empty()) {
    const auto model = load_model(o.model);
    const auto m = o.m.empty() ? estimator::default_truncation(o.n, model.d()) : parse_m(o.m);
    if (m.size() != model.d()) throw ConfigError("--m does not match the model dimension");
    j = model_coeffs_json(model, m, o.bits);
  } else {
    if (o.input.empty()) throw ConfigError("--input CSV or --model JSON is required");
    const auto samples = cli::read_csv_file(o.input);
    const auto m = o.m.empty() ? estimator::default_truncation(o.n, samples.dim()) : parse_m(o.m);
    if (m.size() != samples.dim()) throw ConfigError("--m does not match the data dimension");
    j = laguerre::to_json(laguerre::empirical_coeffs(samples, m, o.threads));
  }
  emit(o, j.dump(2) + "\n");
  return 0;
}

int cmd_check_wb(const Options& o) {
  const auto model = load_model(o.model.empty() ? o.input : o.model);
  json j;
  j["wb"] = wb::to_json(wb::best_eps(model));
  j["total_mass"] = model.total_mass();
  j["dependence"] = dependence_json(model);
  if (o.eps > 0.0) {
    const auto m = o.m.empty() ? numkit::MultiIndex::filled(model.d(), 40) : parse_m(o.m);
    if (m.size() != model.d()) throw ConfigError("--m does not match the model dimension");
    const auto a = laguerre::to_double(ggc::model_coeffs(model, m, numkit::PrecisionContext(o.bits)).a);
    const auto d = wb::decay_check(a, o.eps);
    j["decay"] = {{"eps_prime", o.eps}, {"ok", d.ok}, {"b_fit", d.b_fit}, {"profile", d.profile}};
  }
  emit(o, j.dump(2) + "\n");
  return 0;
}

int cmd_validate(const Options& o) {
  const auto model = load_model(o.model.empty() ? o.input : o.model);
  if (model.d() != 1) throw ConfigError("validate needs a univariate model");
  if (o.dist.empty()) throw ConfigError("--dist is required");
  const auto dist = validate::make_bench(o.dist, parse_list(o.params, "params"));
  if (dist.dim != 1) throw ConfigError("validate needs a univariate target distribution");
  const std::size_t n = o.count == 0 ? 10000 : o.count;
  if (o.resamples == 0) throw ConfigError("--resamples must be positive");
  const std::uint64_t seed = require_seed(o);
  const fs::path dir = output_dir(o);
  const auto cdf = validate::bench_marginal_cdf(dist, 0);
  const auto p = validate::resampled_pvalues(model, cdf, n, o.resamples, seed, o.threads);

  std::string csv = "replicate,p_value\n";
  for (std::size_t b = 0; b < p.size(); ++b) csv += std::to_string(b) + "," + cli::format_double(p[b]) + "\n";
  write_text(dir / "pvalues.csv", csv);

  const auto qs = ggc::sample(model, n, numkit::derive_seed(seed, o.resamples), o.threads);
  const std::size_t points = std::min<std::size_t>(n, 1000);
  if (o.drop_tail >= points) throw ConfigError("--drop-tail must be below the number of QQ points");
  std::string qq = "theoretical,empirical\n";
  for (const auto& pt : validate::qq_points(qs.column(0), validate::bench_marginal_quantile(dist, 0), points, o.drop_tail)) {
    qq += cli::format_double(pt.theoretical) + "," + cli::format_double(pt.empirical) + "\n";
  }
  write_text(dir / "qq.csv", qq);

  auto below = [&](double t) {
    return static_cast<double>(std::count_if(p.begin(), p.end(), [&](double v) { return v < t; })) /
           static_cast<double>(p.size());
  };
  double mean = 0.0;
  for (double v : p) mean += v / static_cast<double>(p.size());
  json summary = {{"schema_version", estimator::kReportSchemaVersion},
                  {"tool_version", THORIN_VERSION},
                  {"target", {{"dist", dist.name}, {"params", dist.params}}},
                  {"n", n},
                  {"resamples", o.resamples},
                  {"seed", seed},
                  {"fraction_below_0.05", below(0.05)},
                  {"fraction_below_0.01", below(0.01)},
                  {"mean_p_value", mean},
                  {"uniformity_ks_p_value",
                   validate::ks_exact(p, [](double u) { return std::clamp(u, 0.0, 1.0); }).p_value}};
  write_text(dir / "summary.json", summary.dump(2) + "\n");
  std::cerr << "validate: fraction of p-values below 0.05 = " << below(0.05) << "\n";
  return 0;
}

int cmd_bench(const Options& o) {
  if (o.dist.empty()) throw ConfigError("--dist is required");
  const auto dist = validate::make_bench(o.dist, parse_list(o.params, "params"));
  if (o.count == 0) throw ConfigError("--count must be positive");
  auto samples = validate::bench_sampler(dist, o.count, require_seed(o));
  if (o.pseudo) {
    std::vector<std::vector<double>> cols;
    for (std::size_t j = 0; j < samples.dim(); ++j) cols.push_back(validate::pseudo_observations(samples.column(j)));
    std::vector<double> flat;
    flat.reserve(samples.rows() * samples.dim());
    for (std::size_t i = 0; i < samples.rows(); ++i) {
      for (const auto& c : cols) flat.push_back(c[i]);
    }
    samples = laguerre::SampleMatrix(samples.dim(), std::move(flat));
  }
  std::ostringstream out;
  cli::write_csv(out, samples);
  emit(o, out.str());
  return 0;
}

// Settings from --config are inserted right after the command name so that
// flags given on the command line, which come later, take precedence. Keys
// belonging only to other commands are skipped.
std::vector<std::string> expand_config(int argc, char** argv, const CLI::App& app) {
  std::vector<std::string> args(argv, argv + argc);
  std::string path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty() || args.size() < 2) return args;
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream text;
  text << in.rdbuf();
  std::vector<std::string> inserted;
  for (const auto& [key, value] : cli::parse_config(text.str())) {
    if (key == "config") continue;
    if (key.find_first_not_of("abcdefghijklmnopqrstuvwxyz0123456789-_") != std::string::npos) {
      throw ConfigError("config key '" + key + "' is not an option name");
    }
    std::string name = key;
    std::replace(name.begin(), name.end(), '_', '-');
    const CLI::App* sub = nullptr;
    bool known = false;
    for (const auto* c : app.get_subcommands([](const CLI::App*) { return true; })) {
      if (c->get_name() == args[1]) sub = c;
      known = known || c->get_option_no_throw("--" + name) != nullptr;
    }
    if (!known) throw ConfigError("config key '" + key + "' is not an option of any command");
    if (sub == nullptr || sub->get_option_no_throw("--" + name) == nullptr) continue;
    if (value == "true" && name == "pseudo") {
      inserted.push_back("--pseudo");
    } else {
      inserted.push_back("--" + name + "=" + value);
    }
  }
  args.insert(args.begin() + 2, inserted.begin(), inserted.end());
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Gamma convolution density estimation on Laguerre coefficients"};
  app.set_version_flag("--version", std::string(THORIN_VERSION));
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  auto common = [&](CLI::App* c) {
    c->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    c->add_option("--config", o.config, "Settings file (key=value lines or a JSON object)");
    c->add_option("--input", o.input, "Input file");
    c->add_option("--output", o.output, "Output file or directory");
    c->add_option("--threads", o.threads, "Worker thread cap (0 = hardware)");
    c->add_option("--bits", o.bits, "Extended precision in bits")->check(CLI::Range(53u, 65536u));
  };
  auto fitting = [&](CLI::App* c) {
    c->add_option("--n", o.n, "Number of gamma atoms");
    c->add_option("--m", o.m, "Truncation, comma-separated per axis");
    c->add_option("--seed", o.seed, "Random seed");
    c->add_option("--swarm", o.swarm, "Swarm size (0 = 20 per parameter)");
    c->add_option("--iters", o.iters, "Maximum swarm iterations per restart");
    c->add_option("--restarts", o.restarts, "Independent swarms");
  };

  auto* fit = app.add_subcommand("fit", "Fit a gamma convolution to CSV samples");
  common(fit);
  fitting(fit);
  auto* project = app.add_subcommand("project", "Project a benchmark density onto gamma convolutions");
  common(project);
  fitting(project);
  project->add_option("--dist", o.dist, "Benchmark distribution name");
  project->add_option("--params", o.params, "Distribution parameters, comma-separated");
  auto* sample = app.add_subcommand("sample", "Sample a fitted model");
  common(sample);
  sample->add_option("--model", o.model, "Model or report JSON");
  sample->add_option("--count", o.count, "Number of samples");
  sample->add_option("--seed", o.seed, "Random seed");
  auto* coeffs = app.add_subcommand("coeffs", "Laguerre coefficients of CSV samples or of a model");
  common(coeffs);
  coeffs->add_option("--model", o.model, "Model or report JSON");
  coeffs->add_option("--n", o.n, "Atom count used for the default truncation");
  coeffs->add_option("--m", o.m, "Truncation, comma-separated per axis");
  auto* check = app.add_subcommand("check-wb", "Well-behavedness, dependence class and coefficient decay");
  common(check);
  check->add_option("--model", o.model, "Model or report JSON");
  check->add_option("--eps", o.eps, "Run the decay check at this eps'");
  check->add_option("--m", o.m, "Truncation for the decay check (default 40 per axis)");
  auto* val = app.add_subcommand("validate", "Resampled exact KS p-values and QQ data against a target law");
  common(val);
  val->add_option("--model", o.model, "Model or report JSON");
  val->add_option("--dist", o.dist, "Target distribution name");
  val->add_option("--params", o.params, "Target parameters, comma-separated");
  val->add_option("--count", o.count, "Sample size per resample (default 10000)");
  val->add_option("--resamples", o.resamples, "Number of resamples");
  val->add_option("--drop-tail", o.drop_tail, "QQ points removed from the upper tail");
  val->add_option("--seed", o.seed, "Random seed");
  auto* bench = app.add_subcommand("bench", "Sample a benchmark distribution");
  common(bench);
  bench->add_option("--dist", o.dist, "Distribution name");
  bench->add_option("--params", o.params, "Distribution parameters, comma-separated");
  bench->add_option("--count", o.count, "Number of samples");
  bench->add_option("--seed", o.seed, "Random seed");
  bench->add_flag("--pseudo", o.pseudo, "Emit pseudo-observations (ranks / (N + 1))");

  try {
    auto args = expand_config(argc, argv, app);
    std::vector<char*> cargv;
    for (auto& a : args) cargv.push_back(a.data());
    try {
      app.parse(static_cast<int>(cargv.size()), cargv.data());
    } catch (const CLI::CallForHelp& e) {
      return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
      return app.exit(e);
    } catch (const CLI::ParseError& e) {
      app.exit(e);
      return kExitConfig;
    }
    if (fit->parsed()) return cmd_fit(o);
    if (project->parsed()) return cmd_project(o);
    if (sample->parsed()) return cmd_sample(o);
    if (coeffs->parsed()) return cmd_coeffs(o);
    if (check->parsed()) return cmd_check_wb(o);
    if (val->parsed()) return cmd_validate(o);
    if (bench->parsed()) return cmd_bench(o);
    return kExitConfig;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
