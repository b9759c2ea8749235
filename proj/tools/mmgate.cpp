// Copyright 2026 The mmgate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// mmgate command line. Exit codes: 0 success, 1 numerical failure (or a
// failed reproduction), 2 usage error.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mmgate/bfgs.hpp"
#include "mmgate/cubic.hpp"
#include "mmgate/gridsim.hpp"
#include "mmgate/hamiltonian_parser.hpp"
#include "mmgate/nlsq.hpp"
#include "mmgate/optimizer.hpp"
#include "mmgate/record_io.hpp"
#include "mmgate/reference_states.hpp"

namespace {

using namespace mmgate;
using Complex = std::complex<double>;

// Every default and tolerance the commands use. Each field is a flag; the
// whole block can also be read from an INI/TOML file with --config.
struct Settings {
  OptimizerConfig optimizer;  // starts 2000, seed 1, max-iters 400, fd-step 1e-6, tolerance 1e-12,
                              // lambda in [0.05, 20], 48 benchmark starts, all cores
  std::string store = "mmgate-results";  // record files, V_G cache and index.csv
  int csv_digits = 10;
};

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

std::string num(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

// Comma-separated items, each a number or start:stop:count with an optional
// ":log" for geometric spacing.
std::vector<double> parse_values(const std::string& text) {
  auto to_double = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.empty()) throw UsageError("not a number: '" + s + "' in '" + text + "'");
    return v;
  };
  std::vector<double> out;
  std::stringstream items(text);
  for (std::string item; std::getline(items, item, ',');) {
    std::vector<std::string> parts;
    std::stringstream in(item);
    for (std::string p; std::getline(in, p, ':');) parts.push_back(p);
    if (parts.size() == 1) {
      out.push_back(to_double(parts[0]));
      continue;
    }
    if (parts.size() != 3 && !(parts.size() == 4 && parts[3] == "log")) {
      throw UsageError("range must be start:stop:count or start:stop:count:log, got '" + item + "'");
    }
    const double a = to_double(parts[0]), b = to_double(parts[1]);
    const double count = to_double(parts[2]);
    if (count < 1 || count != std::floor(count)) throw UsageError("range count must be a positive integer");
    const int n = static_cast<int>(count);
    const bool geometric = parts.size() == 4;
    if (geometric && !(a > 0.0 && b > 0.0)) throw UsageError("log range needs positive end points");
    for (int k = 0; k < n; ++k) {
      const double s = n == 1 ? 0.0 : static_cast<double>(k) / (n - 1);
      out.push_back(geometric ? a * std::pow(b / a, s) : a + (b - a) * s);
    }
  }
  if (out.empty()) throw UsageError("empty value list");
  return out;
}

struct AnsatzOptions {
  std::string family = "factorized";
  std::vector<int> dims{1, 0};
  std::string gaussian = "passive";
  bool real = false;
  bool symmetric = false;

  void add(CLI::App* cmd) {
    cmd->add_option("--ansatz", family, "simplified, factorized or entangled")
        ->check(CLI::IsMember({"simplified", "factorized", "entangled"}))
        ->capture_default_str();
    cmd->add_option("--dims", dims, "highest photon numbers M,N of the two core modes")
        ->delimiter(',')
        ->expected(2)
        ->capture_default_str();
    cmd->add_option("--gaussian", gaussian, "passive (one beam splitter) or full (BS, two squeezers, BS)")
        ->check(CLI::IsMember({"passive", "full"}))
        ->capture_default_str();
    cmd->add_flag("--real", real, "amplitudes real up to i^n");
    cmd->add_flag("--symmetric", symmetric, "entangled core symmetric under mode exchange");
  }

  AnsatzSpec spec() const {
    AnsatzSpec a;
    a.family = family == "simplified" ? AnsatzFamily::SimplifiedPassive
               : family == "entangled" ? AnsatzFamily::Entangled
                                       : AnsatzFamily::Factorized;
    a.m = dims.at(0);
    a.n = dims.at(1);
    a.layers = gaussian == "full" ? GaussianLayers::Full : GaussianLayers::PassiveOnly;
    a.real_up_to_phase = real;
    a.exchange_symmetric = symmetric;
    if (a.family == AnsatzFamily::SimplifiedPassive && a.layers == GaussianLayers::Full) {
      throw UsageError("the simplified ansatz has a passive Gaussian layer only; drop --gaussian full");
    }
    a.validate();
    return a;
  }
};

std::string summary(const OptimizationRecord& r) {
  std::ostringstream out;
  out << r.ansatz.label() << " kappa=" << num(r.kappa, 6) << " R_V=" << num(r.r_v, 6) << " V_NG=" << num(r.v_ng, 8)
      << " V_G=" << num(r.v_g, 8) << " theta1=" << num(r.gaussian.theta1, 6);
  if (r.ansatz.layers == GaussianLayers::Full) {
    out << " lambda1=" << num(r.gaussian.lambda1, 6) << " lambda2=" << num(r.gaussian.lambda2, 6)
        << " theta2=" << num(r.gaussian.theta2, 6) << " I1=" << num(r.i1, 6) << " I2=" << num(r.i2, 6);
  }
  out << " converged=" << r.converged_starts << '/' << r.starts << (r.bound_hit ? " bound_hit" : "");
  return out.str();
}

// Reuses a stored record for the same ansatz, kappa and search settings.
OptimizationRecord optimize_cached(ResultStore& store, const AnsatzSpec& ansatz, double kappa,
                                   const OptimizerConfig& config, bool* cached = nullptr) {
  if (auto hit = store.find(ansatz, kappa, config)) {
    if (cached) *cached = true;
    return *hit;
  }
  SearchExtras extras;
  extras.v_g = store.cached_benchmark(kappa, config);
  const auto record = minimize(ansatz, kappa, config, extras);
  if (!extras.v_g) store.cache_benchmark(kappa, config, record.v_g);
  store.save(record, config);
  if (cached) *cached = false;
  return record;
}

// --- commands --------------------------------------------------------------

int run_benchmark(const Settings& s, const std::string& kappas) {
  const auto values = parse_values(kappas);
  ResultStore store(s.store);
  std::cout << "kappa,v_g,theta1,lambda1,lambda2,theta2,bound_hit\n";
  for (double k : values) {
    const auto b = gaussian_benchmark(k, s.optimizer);
    if (!store.cached_benchmark(k, s.optimizer)) store.cache_benchmark(k, s.optimizer, b.report.total);
    const int d = s.csv_digits;
    std::cout << num(k, d) << ',' << num(b.report.total, d) << ',' << num(b.params.theta1, d) << ','
              << num(b.params.lambda1, d) << ',' << num(b.params.lambda2, d) << ',' << num(b.params.theta2, d) << ','
              << (b.bound_hit ? 1 : 0) << '\n';
  }
  return 0;
}

int run_optimize(const Settings& s, double kappa, const AnsatzOptions& a, const std::string& out_file) {
  const auto ansatz = a.spec();
  ResultStore store(s.store);
  bool cached = false;
  const auto record = optimize_cached(store, ansatz, kappa, s.optimizer, &cached);
  const auto path = store.record_path(ansatz, kappa, s.optimizer);
  if (!out_file.empty()) {
    std::ofstream out(out_file);
    if (!out) throw UsageError("cannot write " + out_file);
    write_record(out, record);
  }
  store.rebuild_index();
  std::cout << summary(record) << " record=" << path.string() << (cached ? " (cached)" : "") << '\n';
  return 0;
}

int run_sweep_kappa(const Settings& s, const std::string& kappas, const AnsatzOptions& a) {
  const auto ansatz = a.spec();
  const auto result = sweep(ansatz, parse_values(kappas), s.optimizer);
  ResultStore store(s.store);
  for (const auto& r : result.records)
    if (!store.find(ansatz, r.kappa, s.optimizer)) store.save(r, s.optimizer);
  store.rebuild_index();
  std::cout << result.to_csv();
  return 0;
}

int run_sweep_photons(const Settings& s, const std::string& resource, int max_n, double kappa, const std::string& gaussian) {
  if (max_n < 1) throw UsageError("--max must be >= 1");
  ResultStore store(s.store);
  std::cout << "total_photons,m,n,kappa,r_v\n";
  for (int n = 1; n <= max_n; ++n) {
    OptimizationRecord r;
    if (resource == "gamma-single") {
      r = single_cubic_scenario(n, s.optimizer).record;
    } else if (resource == "gamma-pair") {
      r = cubic_pair_scenario(n, s.optimizer).record;
    } else {
      AnsatzOptions a;
      a.gaussian = gaussian;
      if (resource == "single") {
        a.family = gaussian == "passive" ? "simplified" : "factorized";
        a.dims = {n, 0};
      } else {
        a.family = resource;
        a.dims = {n, n};
      }
      r = optimize_cached(store, a.spec(), kappa, s.optimizer);
    }
    std::cout << r.ansatz.m + r.ansatz.n << ',' << r.ansatz.m << ',' << r.ansatz.n << ',' << num(r.kappa, s.csv_digits)
              << ',' << num(r.r_v, s.csv_digits) << '\n';
  }
  store.rebuild_index();
  return 0;
}

int run_reproduce(const Settings& s, const std::string& target) {
  if (target != "appendix-b") throw UsageError("unknown reproduction target '" + target + "'");
  bool all = true;
  std::printf("%-15s %6s %9s %10s %10s  %-6s %s\n", "entry", "kappa", "R_V", "V_tab", "V_found", "result", "checks");
  for (const auto& entry : reference_states()) {
    const auto c = compare_reference(entry, s.optimizer);
    const auto checks = reference_checks(entry, c);
    bool pass = true;
    std::string detail;
    for (const auto& k : checks) {
      pass = pass && k.passed;
      detail += (detail.empty() ? "" : "; ") + std::string(k.passed ? "" : "FAIL ") + k.what + ": " + k.detail;
    }
    all = all && pass;
    std::printf("%-15s %6.3g %9.5f %10.6f %10.6f  %-6s %s\n", entry.name.c_str(), entry.kappa, c.found.r_v,
                c.tabulated_variance, c.found.v_ng, pass ? "pass" : "FAIL", detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%s\n", all ? "all entries pass" : "some entries fail");
  return all ? 0 : 1;
}

struct SimulateOptions {
  std::string hamiltonian;
  std::string ancilla = "vacuum";
  std::vector<double> grid{64, 10};
  std::string policy = "feedforward";
  std::vector<double> alpha;
  int samples = 5;
  std::string snapshot;
};

int run_simulate(const Settings& s, const SimulateOptions& o) {
  const auto v = parse_hamiltonian(o.hamiltonian).polynomial;
  const int modes = static_cast<int>(v.modes());
  if (o.grid[0] != std::floor(o.grid[0]) || o.grid[0] < 2) throw UsageError("--grid: L must be an integer >= 2");
  const grid::GridSpec g(static_cast<int>(o.grid[0]), o.grid[1]);

  grid::ProtocolOptions p;
  p.seed = s.optimizer.seed;
  if (o.policy == "feedforward") {
    p.policy = grid::FeedPolicy::Feedforward;
  } else if (o.policy == "none") {
    p.policy = grid::FeedPolicy::None;
  } else if (o.policy.rfind("postselect:", 0) == 0) {
    p.policy = grid::FeedPolicy::Postselect;
    p.epsilon = parse_values(o.policy.substr(11)).at(0);
    if (!(p.epsilon >= 0.0)) throw UsageError("post-selection window must be >= 0");
  } else {
    throw UsageError("--policy must be feedforward, none or postselect:EPS");
  }

  std::vector<Complex> alphas;
  if (o.alpha.empty()) {
    const std::vector<Complex> standard{{0.5, 0.3}, {-0.4, 0.2}};
    for (int j = 0; j < modes; ++j) alphas.push_back(j < 2 ? standard[static_cast<std::size_t>(j)] : Complex{});
  } else {
    if (o.alpha.size() != 2 * static_cast<std::size_t>(modes)) {
      throw UsageError("--alpha needs " + std::to_string(2 * modes) + " numbers (re,im per mode)");
    }
    for (int j = 0; j < modes; ++j) alphas.emplace_back(o.alpha[2 * static_cast<std::size_t>(j)], o.alpha[2 * static_cast<std::size_t>(j) + 1]);
  }

  grid::GridWavefunction ancilla(g, modes);
  if (o.ancilla == "vacuum") {
    ancilla = grid::coherent_state(g, std::vector<Complex>(static_cast<std::size_t>(modes)));
  } else if (o.ancilla.rfind("ideal:", 0) == 0) {
    const double width = parse_values(o.ancilla.substr(6)).at(0);
    if (!(width > 0.0)) throw UsageError("ideal ancilla width must be positive");
    ancilla = grid::ideal_ancilla(g, v, width);
  } else if (o.ancilla.rfind("record:", 0) == 0) {
    std::ifstream in(o.ancilla.substr(7));
    if (!in) throw UsageError("cannot read " + o.ancilla.substr(7));
    const auto record = read_record(in);
    if (modes != 2) throw UsageError("a record ancilla has two modes; the Hamiltonian has " + std::to_string(modes));
    ancilla = grid::fock_to_grid(record.core_state(), g, record.gaussian.transform());
  } else {
    throw UsageError("--ancilla must be vacuum, ideal:WIDTH or record:FILE");
  }

  const auto input = grid::coherent_state(g, alphas);
  const auto reference = grid::apply_phase(input, v);
  p.moments = false;
  const auto stats = grid::protocol_statistics(input, ancilla, v, p, &reference);
  std::printf("# hamiltonian %s\n# ancilla %s, grid %d points on [-%g, %g), policy %s, seed %llu\n",
              v.to_string().c_str(), o.ancilla.c_str(), g.points, g.half_width, g.half_width, o.policy.c_str(),
              static_cast<unsigned long long>(p.seed));
  std::printf("# outcome-averaged fidelity %.8f (root %.8f) over %zu outcomes, accepted weight %.8f\n", stats.fidelity,
              stats.root_fidelity, stats.outcomes, stats.accepted);

  std::printf("sample");
  for (int j = 1; j <= modes; ++j) std::printf(",q%d", j);
  std::printf(",acceptance,fidelity\n");
  std::optional<grid::GridWavefunction> last;
  const int samples = p.policy == grid::FeedPolicy::Postselect ? std::min(o.samples, 1) : o.samples;
  for (int k = 0; k < samples; ++k) {
    auto run = p;
    run.seed = p.seed + static_cast<std::uint64_t>(k);
    auto r = grid::run_protocol(input, ancilla, v, run);
    std::printf("%d", k);
    for (double q : r.outcome.q) std::printf(",%.10g", q);
    std::printf(",%.10g,%.10g\n", r.outcome.acceptance, grid::fidelity(reference, r.output));
    last = std::move(r.output);
  }
  if (!o.snapshot.empty()) {
    if (!last) throw UsageError("--snapshot needs at least one sample");
    std::ofstream out(o.snapshot, std::ios::binary);
    if (!out) throw UsageError("cannot write " + o.snapshot);
    grid::write_snapshot(out, *last);
  }
  return 0;
}

int run_cubic_limit(const Settings& s, int n, double t, const std::string& lambdas, std::optional<double> lambda2) {
  CubicLimitConfig c;
  c.n = n;
  c.t = t;
  c.lambda1 = parse_values(lambdas);
  if (lambda2) {
    c.constrained = false;
    c.lambda2 = *lambda2;
  }
  const auto curve = cubic_pair_limit(c, s.optimizer);
  std::cout << curve.to_csv();
  std::cerr << "gamma variance " << num(curve.gamma_variance, 10) << ", monotone over a " << num(curve.monotone_span(), 4)
            << "x reduction of lambda1\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Resource states and measurement-based simulation for multimode polynomial gates"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read option defaults from an INI/TOML file");
  app.set_version_flag("--version", "mmgate 1.0");

  Settings s;
  auto& o = s.optimizer;
  app.add_option("--seed", o.seed, "seed for every random draw")->capture_default_str();
  app.add_option("--starts", o.starts, "multistart count for resource-state searches")->capture_default_str();
  app.add_option("--benchmark-starts", o.benchmark_starts, "multistart count for V_G, gamma states and layer fits")
      ->capture_default_str();
  app.add_option("--threads", o.threads, "worker threads, 0 for all cores")->capture_default_str();
  app.add_option("--max-iters", o.max_iters, "BFGS iteration limit")->capture_default_str();
  app.add_option("--tolerance", o.tolerance, "relative objective change that ends a local search")->capture_default_str();
  app.add_option("--fd-step", o.fd_step, "finite-difference step")->capture_default_str();
  app.add_option("--lambda-min", o.lambda_min, "smallest squeezing factor")->capture_default_str();
  app.add_option("--lambda-max", o.lambda_max, "largest squeezing factor")->capture_default_str();
  app.add_option("--store", s.store, "directory for records and cached benchmarks")->capture_default_str();
  app.add_option("--digits", s.csv_digits, "significant digits in CSV output")->capture_default_str();

  std::function<int()> command;

  auto* bench = app.add_subcommand("benchmark", "Gaussian benchmark V_G(kappa) as CSV");
  std::string bench_kappa;
  bench->add_option("--kappa", bench_kappa, "list a,b,c or range start:stop:count[:log]")->required();
  bench->callback([&] { command = [&] { return run_benchmark(s, bench_kappa); }; });

  auto* opt = app.add_subcommand("optimize", "optimal resource state for one ansatz and kappa");
  double opt_kappa = 0.0;
  std::string opt_out;
  AnsatzOptions opt_ansatz;
  opt->add_option("--kappa", opt_kappa, "gate strength")->required()->check(CLI::NonNegativeNumber);
  opt_ansatz.add(opt);
  opt->add_option("--out", opt_out, "also write the record to this file");
  opt->callback([&] { command = [&] { return run_optimize(s, opt_kappa, opt_ansatz, opt_out); }; });

  auto* sw = app.add_subcommand("sweep", "R_V against kappa, or against core photon number");
  std::string sw_by = "kappa", sw_kappa = "0.05:2:12:log", sw_resource = "factorized";
  int sw_max = 3;
  AnsatzOptions sw_ansatz;
  sw->add_option("--by", sw_by, "kappa or photons")->check(CLI::IsMember({"kappa", "photons"}))->capture_default_str();
  sw->add_option("--kappa", sw_kappa, "kappa values (--by kappa), or the single kappa used with --by photons")
      ->capture_default_str();
  sw_ansatz.add(sw);
  sw->add_option("--resource", sw_resource,
                 "--by photons: single (M,0), factorized or entangled (N,N), gamma-single or gamma-pair (best kappa)")
      ->check(CLI::IsMember({"single", "factorized", "entangled", "gamma-single", "gamma-pair"}))
      ->capture_default_str();
  sw->add_option("--max", sw_max, "--by photons: largest cutoff N")->capture_default_str();
  sw->callback([&] {
    command = [&] {
      if (sw_by == "kappa") return run_sweep_kappa(s, sw_kappa, sw_ansatz);
      const auto k = parse_values(sw_kappa);
      if (k.size() != 1) throw UsageError("--by photons takes a single --kappa");
      return run_sweep_photons(s, sw_resource, sw_max, k[0], sw_ansatz.gaussian);
    };
  });

  auto* rep = app.add_subcommand("reproduce", "rerun the tabulated optimal states and compare");
  std::string rep_target;
  rep->add_option("target", rep_target, "appendix-b")->required();
  rep->callback([&] { command = [&] { return run_reproduce(s, rep_target); }; });

  auto* sim = app.add_subcommand("simulate", "grid simulation of the measurement-based gate");
  SimulateOptions sim_o;
  sim->add_option("--hamiltonian", sim_o.hamiltonian, "polynomial in x1, x2, ... e.g. 0.3*x1*x2^2")->required();
  sim->add_option("--ancilla", sim_o.ancilla, "vacuum, ideal:WIDTH or record:FILE")->capture_default_str();
  sim->add_option("--grid", sim_o.grid, "points per mode L and half-width X")->delimiter(',')->expected(2)->capture_default_str();
  sim->add_option("--policy", sim_o.policy, "feedforward, none or postselect:EPS")->capture_default_str();
  sim->add_option("--alpha", sim_o.alpha, "coherent input re,im per mode (default 0.5+0.3i, -0.4+0.2i)")->delimiter(',');
  sim->add_option("--samples", sim_o.samples, "sampled outcomes to log")->check(CLI::NonNegativeNumber)->capture_default_str();
  sim->add_option("--snapshot", sim_o.snapshot, "write the last sampled output wavefunction here");
  sim->callback([&] { command = [&] { return run_simulate(s, sim_o); }; });

  auto* lim = app.add_subcommand("cubic-limit", "two single-mode cubic resources squeezed toward the two-mode gate");
  int lim_n = 10;
  double lim_t = 0.1;
  std::string lim_lambda = "1:0.05:30:log";
  std::optional<double> lim_lambda2;
  lim->add_option("--n", lim_n, "Fock cutoff of the single-mode resources")->capture_default_str();
  lim->add_option("--t", lim_t, "cubic strength t")->capture_default_str();
  lim->add_option("--lambda1", lim_lambda, "lambda1 values, list or range")->capture_default_str();
  lim->add_option("--lambda2", lim_lambda2, "fixed lambda2; without it lambda1 lambda2^2 = 1");
  lim->callback([&] { command = [&] { return run_cubic_limit(s, lim_n, lim_t, lim_lambda, lim_lambda2); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  try {
    s.optimizer.validate();
    return command();
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const RecordFormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 1;
  }
}
