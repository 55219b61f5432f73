// Command-line front end: TOML-configured simulation, certification,
// threshold analysis and parameter sweeps over the model catalog.
//
// Exit codes: 0 success (certify: certified), 1 not certified,
// 2 config/parse error, 3 integration failure.

#include <CLI11.hpp>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "epinet/certificate.hpp"
#include "epinet/json_out.hpp"
#include "epinet/models.hpp"
#include "epinet/propcheck.hpp"
#include "epinet/simulate.hpp"
#include "epinet/threshold.hpp"
#include "svg_plot.hpp"

namespace fs = std::filesystem;
using namespace epinet;

namespace {

// ---------------------------------------------------------------------------
// Logging, controlled by ISS_EPINET_LOG (off|error|info|debug).

enum class LogLevel { Off = 0, Error = 1, Info = 2, Debug = 3 };

LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("ISS_EPINET_LOG");
    if (!env) return LogLevel::Error;
    const std::string v(env);
    if (v == "off") return LogLevel::Off;
    if (v == "info") return LogLevel::Info;
    if (v == "debug") return LogLevel::Debug;
    return LogLevel::Error;
  }();
  return level;
}

void log_at(LogLevel lvl, const std::string& msg) {
  if (log_level() >= lvl) std::fprintf(stderr, "epinet: %s\n", msg.c_str());
}

// ---------------------------------------------------------------------------
// Raw-network configs for `certify`.

RateFunction rate_from_string(const std::string& desc, const std::string& path) {
  std::istringstream is(desc);
  std::string kind;
  std::getline(is, kind, ':');
  if (kind == "zero") return RateFunction::zero();
  if (kind == "linear") {
    double c;
    char sep;
    std::istringstream rest(desc.substr(desc.find(':') + 1));
    if (!(rest >> c)) throw ConfigError(path, "linear rate needs a coefficient");
    (void)sep;
    return RateFunction::linear(c);
  }
  if (kind == "bilinear") {
    const auto first = desc.find(':');
    const auto second = desc.find(':', first + 1);
    if (first == std::string::npos || second == std::string::npos)
      throw ConfigError(path, "bilinear rate needs coefficient and partner");
    const double c = std::stod(desc.substr(first + 1, second - first - 1));
    const int partner = std::stoi(desc.substr(second + 1));
    return RateFunction::bilinear(c, partner - 1);
  }
  throw ConfigError(path, "unknown rate descriptor '" + desc + "'");
}

ScalarFn scalar_from_string(const std::string& desc, const std::string& path) {
  if (desc == "zero") return ScalarFn::zero();
  const auto colon = desc.find(':');
  if (colon == std::string::npos)
    throw ConfigError(path, "unknown scalar descriptor '" + desc + "'");
  const std::string kind = desc.substr(0, colon);
  const double c = std::stod(desc.substr(colon + 1));
  if (kind == "linear") return ScalarFn::linear(c);
  if (kind == "saturating") return ScalarFn::saturating(c);
  throw ConfigError(path, "unknown scalar descriptor '" + desc + "'");
}

BalancedNetwork network_from_config(const toml::Table& t,
                                    const std::string& path) {
  toml::reject_unknown_keys(
      t, {"n", "theta", "kappa", "labels", "ell_default", "transfer"}, path);
  const int n = static_cast<int>(toml::get_int(t, "n", path));
  if (n < 2) throw ConfigError(path + ".n", "network needs at least two nodes");
  NetworkBuilder b(n);

  const auto fill_scalars = [&](const char* key, auto&& apply) {
    const toml::Value* v = toml::find(t, key);
    if (!v) return;
    if (!v->is_array() || static_cast<int>(v->as_array().size()) != n)
      throw ConfigError(path + "." + key, "expected one descriptor per node");
    for (int i = 0; i < n; ++i) {
      const auto& e = v->as_array()[i];
      if (!e.is_string())
        throw ConfigError(path + "." + key, "expected descriptor strings");
      apply(i, scalar_from_string(e.as_string(), path + "." + key));
    }
  };
  fill_scalars("theta", [&](int i, ScalarFn f) { b.dissipation(i, std::move(f)); });
  fill_scalars("kappa", [&](int i, ScalarFn f) { b.input(i, std::move(f)); });

  if (const toml::Value* v = toml::find(t, "labels")) {
    if (!v->is_array() || static_cast<int>(v->as_array().size()) != n)
      throw ConfigError(path + ".labels", "expected one label per node");
    for (int i = 0; i < n; ++i)
      b.label(i, v->as_array()[i].as_string());
  }

  std::optional<double> ell_default;
  if (toml::find(t, "ell_default"))
    ell_default = toml::get_number(t, "ell_default", path);

  std::vector<std::vector<bool>> declared(2, std::vector<bool>(n, false));
  if (const toml::Value* v = toml::find(t, "transfer")) {
    if (!v->is_array())
      throw ConfigError(path + ".transfer", "expected an array of tables");
    int idx = 0;
    for (const auto& entry : v->as_array()) {
      const std::string tpath =
          path + ".transfer[" + std::to_string(idx++) + "]";
      const auto& tt = entry.as_table();
      toml::reject_unknown_keys(tt, {"src", "dst", "eta", "sigma", "ell"},
                                tpath);
      const int src = static_cast<int>(toml::get_int(tt, "src", tpath)) - 1;
      const int dst = static_cast<int>(toml::get_int(tt, "dst", tpath)) - 1;
      if (src < 0 || src >= n || dst < 0 || dst >= n)
        throw ConfigError(tpath, "node index out of range");
      const double ell = toml::get_number(tt, "ell", tpath);
      RateFunction eta = toml::find(tt, "eta")
                             ? rate_from_string(
                                   toml::get_string(tt, "eta", tpath), tpath)
                             : RateFunction::zero();
      RateFunction sigma =
          toml::find(tt, "sigma")
              ? rate_from_string(toml::get_string(tt, "sigma", tpath), tpath)
              : RateFunction::zero();
      const int down_dst = (src + 1) % n;
      const int up_dst = (src + n - 1) % n;
      try {
        if (dst == down_dst) {
          b.transfer_down(src, std::move(eta), std::move(sigma), ell);
          declared[0][src] = true;
        } else if (dst == up_dst) {
          b.transfer_up(src, std::move(eta), std::move(sigma), ell);
          declared[1][src] = true;
        } else {
          throw ConfigError(tpath, "src and dst must be ring neighbors");
        }
      } catch (const ConfigError&) {
        throw;
      } catch (const Error& e) {
        throw ConfigError(tpath, e.what());
      }
    }
  }
  if (ell_default) {
    for (int i = 0; i < n; ++i) {
      if (!declared[0][i])
        b.transfer_down(i, RateFunction::zero(), RateFunction::zero(),
                        *ell_default);
      if (n > 2 && !declared[1][i])
        b.transfer_up(i, RateFunction::zero(), RateFunction::zero(),
                      *ell_default);
    }
  }
  return b.build();
}

// ---------------------------------------------------------------------------
// Shared run assembly.

struct RunSpec {
  EpidemicModel model;
  std::vector<double> x0;
  InputSignal input = InputSignal::constant(0.0);
  SimConfig sim;
};

toml::Table load_file(const std::string& config_path) {
  return toml::parse_file(config_path);
}

RunSpec run_from_config(const toml::Table& doc) {
  RunSpec spec;
  spec.model = model_from_config(toml::get_table(doc, "model", ""));
  spec.x0 = initial_state_from_config(spec.model,
                                      toml::get_table(doc, "initial", ""));
  spec.input = input_from_config(toml::get_table(doc, "input", ""));
  if (toml::find(doc, "sim"))
    spec.sim = sim_config_from_config(toml::get_table(doc, "sim", ""));
  return spec;
}

std::string stem_of(const std::string& config_path) {
  return fs::path(config_path).stem().string();
}

// ---------------------------------------------------------------------------
// Subcommands.

int cmd_simulate(const std::string& config_path, const std::string& out_dir) {
  const auto doc = load_file(config_path);
  for (const auto& [key, value] : doc)
    if (key != "model" && key != "initial" && key != "input" && key != "sim")
      throw ConfigError(key, "unknown section");
  const RunSpec spec = run_from_config(doc);
  const Partition part = partition_UL(spec.model);

  log_at(LogLevel::Info, "simulating " + std::string(to_string(
                             spec.model.family)) + " until t = " +
                             std::to_string(spec.sim.t_end));
  Trajectory traj;
  try {
    traj = integrate(spec.model.lower(), spec.x0, spec.input, spec.sim, &part);
  } catch (const IntegrationError& e) {
    std::cerr << "integration failure: " << e.what() << "\n";
    return 3;
  }
  if (const auto peak = detect_peak(traj, part.L.front()))
    traj.peaks.push_back(*peak);

  fs::create_directories(out_dir);
  const std::string stem = stem_of(config_path);
  const fs::path csv_path = fs::path(out_dir) / (stem + ".csv");
  {
    std::ofstream csv(csv_path, std::ios::binary);
    write_csv(traj, csv);
  }
  const fs::path svg_path = fs::path(out_dir) / (stem + ".svg");
  {
    std::ofstream svg(svg_path, std::ios::binary);
    svg << cli::render_svg(traj, stem);
  }
  log_at(LogLevel::Info, "wrote " + csv_path.string() + " and " +
                             svg_path.string());
  return 0;
}

int cmd_certify(const std::string& config_path, unsigned seed) {
  const auto doc = load_file(config_path);
  BalancedNetwork net = [&] {
    if (toml::find(doc, "network"))
      return network_from_config(toml::get_table(doc, "network", ""),
                                 "network");
    const auto model = model_from_config(toml::get_table(doc, "model", ""));
    return model.lower();
  }();

  // The certificate is only sound for networks that actually satisfy the
  // structure it assumes.
  const auto positivity = validate_positivity(net, 200, {}, seed);
  if (!positivity.passed)
    throw ConfigError("network", "positivity check failed: " +
                                     positivity.detail);
  const auto bounds = validate_gain_bounds(net, 500, {}, seed);
  if (!bounds.passed)
    throw ConfigError("network",
                      "declared gain bounds violated: " + bounds.detail);

  const auto cert = check_smallgain(net);
  std::cout << to_json(cert) << "\n";
  return cert.certified() ? 0 : 1;
}

int cmd_thresholds(const std::string& config_path) {
  const auto doc = load_file(config_path);
  const auto model = model_from_config(toml::get_table(doc, "model", ""));
  const auto input = input_from_config(toml::get_table(doc, "input", ""));
  if (input.kind() != InputSignal::Kind::Constant)
    throw ConfigError("input.B", "threshold analysis needs a constant input");
  const auto rep = analyze_thresholds(model, input.value(0.0));
  std::cout << to_json(rep) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// Sweeps.

struct SweepParameter {
  std::string name;
  std::vector<double> values;
};

SweepParameter sweep_parameter(const toml::Table& t, const std::string& path) {
  toml::reject_unknown_keys(t, {"name", "values", "from", "to", "steps"},
                            path);
  SweepParameter p;
  p.name = toml::get_string(t, "name", path);
  if (const toml::Value* v = toml::find(t, "values")) {
    for (const auto& e : v->as_array()) p.values.push_back(e.as_number());
  } else {
    const double from = toml::get_number(t, "from", path);
    const double to = toml::get_number(t, "to", path);
    const auto steps = toml::get_int(t, "steps", path);
    if (steps < 1) throw ConfigError(path + ".steps", "grid must be nonempty");
    for (std::int64_t i = 0; i < steps; ++i)
      p.values.push_back(steps == 1 ? from
                                    : from + (to - from) * i / (steps - 1.0));
  }
  if (p.values.empty()) throw ConfigError(path, "grid must be nonempty");
  return p;
}

struct SweepCell {
  EpidemicModel model;
  double B;
};

SweepCell apply_parameter(const SweepCell& base, const std::string& name,
                          double value) {
  SweepCell cell = base;
  if (name == "B") {
    cell.B = value;
    return cell;
  }
  auto& p = cell.model.params;
  if (name == "beta") p.beta = value;
  else if (name == "gamma") p.gamma = value;
  else if (name == "mu") p.mu = value;
  else if (name == "epsilon") p.epsilon = value;
  else if (name == "delta") p.delta = value;
  else if (name == "P") p.P = value;
  else if (name == "rho") p.rho = value;
  else
    throw ConfigError("sweep.parameter.name",
                      "unknown sweep parameter '" + name + "'");
  return cell;
}

int cmd_sweep(const std::string& config_path, const std::string& out_dir,
              int jobs) {
  const auto doc = load_file(config_path);
  const RunSpec spec = run_from_config(doc);
  if (spec.input.kind() != InputSignal::Kind::Constant)
    throw ConfigError("input.B", "sweeps need a constant baseline input");
  const auto& sweep_table = toml::get_table(doc, "sweep", "");
  toml::reject_unknown_keys(sweep_table, {"claim", "parameter"}, "sweep");
  const std::string claim = toml::get_string(sweep_table, "claim", "sweep");
  if (claim != "eradication" && claim != "r0")
    throw ConfigError("sweep.claim",
                      "supported claims are \"eradication\" and \"r0\"");

  const toml::Value* plist = toml::find(sweep_table, "parameter");
  if (!plist || !plist->is_array() || plist->as_array().empty())
    throw ConfigError("sweep.parameter", "at least one parameter is required");
  if (plist->as_array().size() > 2)
    throw ConfigError("sweep.parameter", "at most two parameters");
  std::vector<SweepParameter> params;
  for (std::size_t i = 0; i < plist->as_array().size(); ++i)
    params.push_back(sweep_parameter(
        plist->as_array()[i].as_table(),
        "sweep.parameter[" + std::to_string(i) + "]"));

  const SweepCell base{spec.model, spec.input.value(0.0)};
  const std::size_t rows = params[0].values.size();
  const std::size_t cols = params.size() == 2 ? params[1].values.size() : 1;
  std::vector<std::string> results(rows * cols);

  const auto evaluate = [&](std::size_t index) {
    const std::size_t r = index / cols;
    const std::size_t c = index % cols;
    SweepCell cell = apply_parameter(base, params[0].name,
                                     params[0].values[r]);
    if (params.size() == 2)
      cell = apply_parameter(cell, params[1].name, params[1].values[c]);
    cell.model.validate();
    std::ostringstream os;
    os.precision(17);
    if (claim == "r0") {
      os << reproduction_number(cell.model, cell.B);
    } else {
      const Partition part = partition_UL(cell.model);
      const auto traj = integrate(cell.model.lower(), spec.x0,
                                  InputSignal::constant(cell.B), spec.sim,
                                  &part);
      const std::vector<double> targets(part.L.size(), 0.0);
      const auto conv =
          detect_convergence(traj, part.L, targets, 1e-3, 100.0);
      os << (conv.converged ? 1 : 0);
    }
    results[index] = os.str();
  };

  const std::size_t total = rows * cols;
  const int workers = std::max(
      1, jobs > 0 ? jobs : static_cast<int>(std::thread::hardware_concurrency()));
  log_at(LogLevel::Info, "sweep over " + std::to_string(total) +
                             " cells with " + std::to_string(workers) +
                             " workers");
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::mutex error_mutex;
  std::string first_error;
  for (int wkr = 0; wkr < workers; ++wkr) {
    pool.emplace_back([&] {
      while (true) {
        const std::size_t index = next.fetch_add(1);
        if (index >= total) return;
        try {
          evaluate(index);
        } catch (const std::exception& e) {
          std::scoped_lock lock(error_mutex);
          if (first_error.empty()) first_error = e.what();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (!first_error.empty()) throw Error(first_error);

  fs::create_directories(out_dir);
  const fs::path csv_path =
      fs::path(out_dir) / (stem_of(config_path) + "_sweep.csv");
  std::ofstream csv(csv_path, std::ios::binary);
  csv << params[0].name;
  if (params.size() == 2) csv << "," << params[1].name;
  csv << "," << claim << "\n";
  std::ostringstream num;
  num.precision(17);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      num.str("");
      num << params[0].values[r];
      csv << num.str();
      if (params.size() == 2) {
        num.str("");
        num << params[1].values[c];
        csv << "," << num.str();
      }
      csv << "," << results[r * cols + c] << "\n";
    }
  }
  log_at(LogLevel::Info, "wrote " + csv_path.string());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"balancing-kinetics epidemic network toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  int jobs = 0;
  unsigned seed = 0x5eed;

  auto* sim = app.add_subcommand("simulate", "integrate a model config and "
                                             "write CSV + SVG");
  sim->add_option("config", config_path, "TOML config")->required();
  sim->add_option("--out", out_dir, "output directory");
  sim->add_option("--seed", seed, "sampling seed");

  auto* cert = app.add_subcommand("certify", "run the small-gain certificate "
                                             "and print JSON");
  cert->add_option("config", config_path, "TOML config")->required();
  cert->add_option("--seed", seed, "sampling seed");

  auto* thr = app.add_subcommand("thresholds", "print the threshold report "
                                               "JSON");
  thr->add_option("config", config_path, "TOML config")->required();

  auto* swp = app.add_subcommand("sweep", "evaluate a claim over a parameter "
                                          "grid");
  swp->add_option("config", config_path, "TOML config")->required();
  swp->add_option("--out", out_dir, "output directory");
  swp->add_option("--jobs", jobs, "worker count (default: cores)");
  swp->add_option("--seed", seed, "sampling seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(config_path, out_dir);
    if (cert->parsed()) return cmd_certify(config_path, seed);
    if (thr->parsed()) return cmd_thresholds(config_path);
    if (swp->parsed()) return cmd_sweep(config_path, out_dir, jobs);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const IntegrationError& e) {
    std::cerr << "integration failure: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
