// Copyright 2026 the subsheet authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SUBSHEET_CLI_HPP
#define SUBSHEET_CLI_HPP

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "subsheet/branch.hpp"
#include "subsheet/measure.hpp"
#include "subsheet/sheet.hpp"
#include "subsheet/spectral.hpp"
#include "subsheet/verify.hpp"

namespace subsheet {

using json = nlohmann::json;

// Exit codes of the tool: 0 all gates pass, 1 a gate failed, 2 invalid
// config, 3 internal error.
enum ExitCode : int {
  kExitPass = 0,
  kExitGateFailure = 1,
  kExitInvalidConfig = 2,
  kExitInternalError = 3,
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Everything one experiment needs; round-trips losslessly through JSON.
// Fields irrelevant to a command keep their defaults and are ignored.
struct ExperimentConfig {
  std::string command = "verify-all";
  std::string branch = "homographic";

  std::vector<Atom> mu_atoms;
  std::vector<DensityPiece> mu_pieces;
  std::vector<double> lambdas{1.0};
  std::vector<double> ts{1.0};

  std::vector<double> a_levels;  // simulate-sheet lattice
  std::vector<double> t_grid;    // simulate-sheet grid
  bool brownian = false;         // simulate-sheet: also write B_{Y} lattice

  std::vector<double> epsilons{0.05, 0.2};        // verify-eq3
  std::vector<double> a_checkpoints{0.25, 0.5, 1.0};  // verify-martingale
  std::string compensator = "both";               // xi-at-zero | xi-at-a | both
  std::string variant = "plain";                  // plain | extinction | both

  std::vector<double> rk_a_points{0.3};  // verify-rayknight levels
  double rk_step = 1e-3;
  std::size_t rk_n = 10000;

  std::size_t n = 200000;
  std::uint64_t seed = 20260101;
  unsigned parallelism = 1;
  std::size_t chunk_size = 1 << 16;
  std::string out_dir = "results";

  BranchKind branch_kind() const {
    if (branch == "homographic") return BranchKind::Homographic;
    if (branch == "besq") return BranchKind::Besq;
    throw ConfigError("unknown branch '" + branch + "'");
  }
  HalfLineMeasure mu() const { return HalfLineMeasure(mu_atoms, mu_pieces); }
  McOptions mc_options(std::uint32_t check_id) const {
    return McOptions{seed, check_id, chunk_size, parallelism};
  }
};

inline const std::vector<std::string>& known_commands() {
  static const std::vector<std::string> cmds{
      "simulate-sheet", "eval-exponent",     "verify-laplace",
      "verify-eq3",     "verify-martingale", "verify-rayknight",
      "verify-all"};
  return cmds;
}

// ---- JSON (de)serialization ------------------------------------------------

inline void to_json(json& j, const Atom& a) {
  j = json{{"location", a.location}, {"weight", a.weight}};
}
inline void from_json(const json& j, Atom& a) {
  j.at("location").get_to(a.location);
  j.at("weight").get_to(a.weight);
}
inline void to_json(json& j, const DensityPiece& p) {
  j = json{{"lo", p.lo}, {"hi", p.hi}, {"density", p.density}};
}
inline void from_json(const json& j, DensityPiece& p) {
  j.at("lo").get_to(p.lo);
  j.at("hi").get_to(p.hi);
  j.at("density").get_to(p.density);
}

inline void to_json(json& j, const ExperimentConfig& c) {
  j = json{{"command", c.command},
           {"branch", c.branch},
           {"mu", json{{"atoms", c.mu_atoms}, {"pieces", c.mu_pieces}}},
           {"lambdas", c.lambdas},
           {"ts", c.ts},
           {"a_levels", c.a_levels},
           {"t_grid", c.t_grid},
           {"brownian", c.brownian},
           {"epsilons", c.epsilons},
           {"a_checkpoints", c.a_checkpoints},
           {"compensator", c.compensator},
           {"variant", c.variant},
           {"rk_a_points", c.rk_a_points},
           {"rk_step", c.rk_step},
           {"rk_n", c.rk_n},
           {"n", c.n},
           {"seed", c.seed},
           {"parallelism", c.parallelism},
           {"chunk_size", c.chunk_size},
           {"out_dir", c.out_dir}};
}

template <typename T>
void get_if_present(const json& j, const char* key, T& out) {
  if (j.contains(key)) j.at(key).get_to(out);
}

inline void from_json(const json& j, ExperimentConfig& c) {
  get_if_present(j, "command", c.command);
  get_if_present(j, "branch", c.branch);
  if (j.contains("mu")) {
    const json& m = j.at("mu");
    get_if_present(m, "atoms", c.mu_atoms);
    get_if_present(m, "pieces", c.mu_pieces);
  }
  get_if_present(j, "lambdas", c.lambdas);
  get_if_present(j, "ts", c.ts);
  get_if_present(j, "a_levels", c.a_levels);
  get_if_present(j, "t_grid", c.t_grid);
  get_if_present(j, "brownian", c.brownian);
  get_if_present(j, "epsilons", c.epsilons);
  get_if_present(j, "a_checkpoints", c.a_checkpoints);
  get_if_present(j, "compensator", c.compensator);
  get_if_present(j, "variant", c.variant);
  get_if_present(j, "rk_a_points", c.rk_a_points);
  get_if_present(j, "rk_step", c.rk_step);
  get_if_present(j, "rk_n", c.rk_n);
  get_if_present(j, "n", c.n);
  get_if_present(j, "seed", c.seed);
  get_if_present(j, "parallelism", c.parallelism);
  get_if_present(j, "chunk_size", c.chunk_size);
  get_if_present(j, "out_dir", c.out_dir);
}

// Output directory precedence: --out flag, then the SUBSHEET_OUT environment
// variable, then the config value.
inline std::string resolve_out_dir(const std::string& cli_out,
                                   const std::string& config_out) {
  if (!cli_out.empty()) return cli_out;
  if (const char* env = std::getenv("SUBSHEET_OUT"); env != nullptr && *env) {
    return env;
  }
  return config_out;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  try {
    return j.get<ExperimentConfig>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config has invalid fields: ") + e.what());
  }
}

// ---- validation -------------------------------------------------------------

// Every numeric field is checked against the module preconditions before any
// sampling starts; violations raise ConfigError (exit code 2).
inline void validate_config(const ExperimentConfig& c) {
  bool known = false;
  for (const std::string& cmd : known_commands()) known |= cmd == c.command;
  if (!known) throw ConfigError("unknown command '" + c.command + "'");
  c.branch_kind();

  try {
    (void)c.mu();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid mu: ") + e.what());
  }
  if (c.lambdas.empty()) throw ConfigError("lambdas must be nonempty");
  if (c.ts.empty()) throw ConfigError("ts must be nonempty");
  for (double l : c.lambdas) {
    if (!(l >= 0.0)) throw ConfigError("lambdas must be >= 0");
  }
  for (double t : c.ts) {
    if (!(t > 0.0)) throw ConfigError("ts must be > 0");
  }
  if (c.variant != "plain" && c.variant != "extinction" && c.variant != "both") {
    throw ConfigError("variant must be plain, extinction or both");
  }
  if (c.compensator != "xi-at-zero" && c.compensator != "xi-at-a" &&
      c.compensator != "both") {
    throw ConfigError("compensator must be xi-at-zero, xi-at-a or both");
  }
  if (c.chunk_size == 0) throw ConfigError("chunk_size must be > 0");
  if (c.parallelism == 0) throw ConfigError("parallelism must be > 0");

  if (c.command == "simulate-sheet") {
    if (c.a_levels.empty() || c.a_levels.front() != 0.0) {
      throw ConfigError("simulate-sheet: a_levels must start at 0");
    }
    for (std::size_t i = 1; i < c.a_levels.size(); ++i) {
      if (!(c.a_levels[i] > c.a_levels[i - 1])) {
        throw ConfigError("simulate-sheet: a_levels must be increasing");
      }
    }
    if (c.t_grid.empty() || !(c.t_grid.front() >= 0.0)) {
      throw ConfigError("simulate-sheet: t_grid must be nonempty, >= 0");
    }
    for (std::size_t j = 1; j < c.t_grid.size(); ++j) {
      if (!(c.t_grid[j] > c.t_grid[j - 1])) {
        throw ConfigError("simulate-sheet: t_grid must be increasing");
      }
    }
    for (const Atom& atom : c.mu_atoms) {
      bool on_lattice = false;
      for (double a : c.a_levels) {
        on_lattice |= std::abs(atom.location - a) <=
                      1e-12 * std::max(1.0, std::abs(atom.location));
      }
      if (!on_lattice) {
        throw ConfigError(
            "simulate-sheet: pairing atom off the a_levels lattice; add the "
            "level");
      }
    }
  }
  if (c.command == "verify-laplace" || c.command == "verify-eq3" ||
      c.command == "verify-martingale") {
    if (!c.mu_pieces.empty()) {
      throw ConfigError(c.command + ": mu must be atomic");
    }
    if (c.n < 2) throw ConfigError("n must be >= 2");
  }
  if (c.command == "verify-eq3") {
    const HalfLineMeasure mu = c.mu();
    if (!mu.empty()) {
      for (double eps : c.epsilons) {
        if (!(eps > 0.0) || !(eps < mu.support_min())) {
          throw ConfigError("verify-eq3: need 0 < eps < inf supp mu");
        }
      }
    }
  }
  if (c.command == "verify-martingale") {
    if (c.a_checkpoints.empty()) {
      throw ConfigError("verify-martingale: a_checkpoints must be nonempty");
    }
    for (double a : c.a_checkpoints) {
      if (!(a >= 0.0)) throw ConfigError("verify-martingale: checkpoints >= 0");
    }
    if (c.lambdas.empty()) throw ConfigError("verify-martingale: need lambda");
  }
  if (c.command == "verify-rayknight" || c.command == "verify-all") {
    if (!(c.rk_step > 0.0) || c.rk_step > 1e-3) {
      throw ConfigError("rk_step must satisfy 0 < rk_step <= 1e-3");
    }
    if (c.rk_n < 2) throw ConfigError("rk_n must be >= 2");
    for (double a : c.rk_a_points) {
      if (!(a >= 0.0)) throw ConfigError("rk_a_points must be >= 0");
    }
    if (c.ts.empty() || !(c.ts.front() > 0.0) || c.ts.front() > 2.0) {
      throw ConfigError("rayknight needs 0 < t <= 2");
    }
  }
}

// ---- output helpers ----------------------------------------------------------

namespace detail {

inline std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string iso_timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

inline void write_text_file(const std::filesystem::path& path,
                            const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

}  // namespace detail

inline json report_to_json(const CheckReport& report) {
  json items = json::array();
  for (const CheckItem& item : report.items) {
    items.push_back(json{{"label", item.label},
                         {"kind", item.kind},
                         {"analytic", item.analytic},
                         {"mean", item.estimate.mean},
                         {"std_error", item.estimate.std_error},
                         {"n", item.estimate.n},
                         {"z", item.z},
                         {"gate", item.gate},
                         {"pass", item.pass}});
  }
  return json{{"name", report.name},
              {"seed", report.seed},
              {"items", std::move(items)},
              {"pass", report.pass},
              {"runtime_seconds", report.runtime_seconds}};
}

inline std::string checks_csv(const std::vector<CheckReport>& reports) {
  std::ostringstream out;
  out << "check,label,kind,analytic,mean,std_error,n,z,gate,pass\n";
  for (const CheckReport& report : reports) {
    for (const CheckItem& item : report.items) {
      std::string label = item.label;
      for (char& ch : label) {
        if (ch == ',') ch = ';';
      }
      out << report.name << ',' << label << ',' << item.kind << ','
          << detail::fmt17(item.analytic) << ',' << detail::fmt17(item.estimate.mean)
          << ',' << detail::fmt17(item.estimate.std_error) << ','
          << item.estimate.n << ',' << detail::fmt17(item.z) << ','
          << detail::fmt17(item.gate) << ',' << (item.pass ? 1 : 0) << '\n';
    }
  }
  return out.str();
}

inline std::string matrix_csv(const std::vector<double>& a_levels,
                              const std::vector<double>& t_grid,
                              const std::vector<std::vector<double>>& values) {
  std::ostringstream out;
  out << "a_level";
  for (double t : t_grid) out << ",t=" << detail::fmt17(t);
  out << '\n';
  for (std::size_t i = 0; i < a_levels.size(); ++i) {
    out << detail::fmt17(a_levels[i]);
    for (double v : values[i]) out << ',' << detail::fmt17(v);
    out << '\n';
  }
  return out.str();
}

// ---- experiment runner -------------------------------------------------------

struct ExperimentResult {
  int exit_code = kExitPass;
  bool pass = true;
  std::vector<CheckReport> reports;
  std::filesystem::path result_path;
};

namespace detail {

inline std::vector<BoundaryVariant> variants_of(const ExperimentConfig& c) {
  if (c.variant == "plain") return {BoundaryVariant::Plain};
  if (c.variant == "extinction") return {BoundaryVariant::Extinction};
  return {BoundaryVariant::Plain, BoundaryVariant::Extinction};
}

inline std::vector<Compensator> compensators_of(const ExperimentConfig& c) {
  if (c.compensator == "xi-at-zero") return {Compensator::XiAtZero};
  if (c.compensator == "xi-at-a") return {Compensator::XiAtA};
  return {Compensator::XiAtZero, Compensator::XiAtA};
}

struct RunContext {
  const ExperimentConfig& config;
  std::filesystem::path out;
  std::vector<CheckReport> reports;
  json extra = json::object();
  std::uint32_t next_check_base = 0;

  std::uint32_t take_check_base() {
    // Every check gets a disjoint block of 256 stream namespaces.
    const std::uint32_t base = next_check_base;
    next_check_base += 256;
    return base;
  }
};

inline void run_simulate_sheet(RunContext& ctx) {
  const ExperimentConfig& c = ctx.config;
  RngStream rng(c.seed, 0);
  const SheetSample sheet =
      sample_sheet(c.branch_kind(), c.a_levels, c.t_grid, rng);
  write_text_file(ctx.out / "sheet.csv",
                  matrix_csv(sheet.a_levels, sheet.t_grid, sheet.values));
  if (c.brownian) {
    const auto bm = subordinate_brownian(sheet, rng);
    write_text_file(ctx.out / "brownian.csv",
                    matrix_csv(sheet.a_levels, sheet.t_grid, bm));
  }
  if (!c.mu_atoms.empty() || !c.mu_pieces.empty()) {
    const std::vector<double> paired = pair_against(sheet, c.mu());
    std::ostringstream csv;
    csv << "t,pairing\n";
    for (std::size_t j = 0; j < sheet.t_grid.size(); ++j) {
      csv << fmt17(sheet.t_grid[j]) << ',' << fmt17(paired[j]) << '\n';
    }
    write_text_file(ctx.out / "pairing.csv", csv.str());
  }
  ctx.extra["sheet"] = json{{"levels", sheet.levels()},
                            {"times", sheet.times()},
                            {"files", c.brownian
                                          ? json::array({"sheet.csv", "brownian.csv"})
                                          : json::array({"sheet.csv"})}};
}

inline void run_eval_exponent(RunContext& ctx) {
  const ExperimentConfig& c = ctx.config;
  const HalfLineMeasure mu = c.mu();
  const double theta = drift_theta(c.branch_kind());

  std::ostringstream exponent;
  exponent << "lambda,phi_plain,phi_extinction\n";
  std::ostringstream profile;
  profile << "lambda,x,xi_plain,xi_extinction\n";
  const double x_hi = std::max(mu.support_max() * 1.25, mu.support_max() + 0.5);
  for (double lambda : c.lambdas) {
    const SpectralSolution plain =
        riccati_solve(theta, mu, lambda, BoundaryVariant::Plain);
    const SpectralSolution ext =
        riccati_solve(theta, mu, lambda, BoundaryVariant::Extinction);
    exponent << fmt17(lambda) << ',' << fmt17(plain.phi) << ',' << fmt17(ext.phi)
             << '\n';
    constexpr int kProfilePoints = 201;
    for (int i = 0; i < kProfilePoints; ++i) {
      const double x = x_hi * i / (kProfilePoints - 1);
      profile << fmt17(lambda) << ',' << fmt17(x) << ','
              << fmt17(xi_profile(plain, x)) << ',' << fmt17(xi_profile(ext, x))
              << '\n';
    }
  }
  write_text_file(ctx.out / "exponent.csv", exponent.str());
  write_text_file(ctx.out / "xi_profile.csv", profile.str());
  ctx.extra["files"] = json::array({"exponent.csv", "xi_profile.csv"});
}

inline void run_verify_laplace(RunContext& ctx) {
  const ExperimentConfig& c = ctx.config;
  for (BoundaryVariant variant : variants_of(c)) {
    for (double t : c.ts) {
      for (double lambda : c.lambdas) {
        CheckReport report =
            check_laplace(c.branch_kind(), c.mu(), lambda, t, c.n, variant,
                          c.mc_options(ctx.take_check_base()));
        report.name += "-lambda=" + fmt17(lambda) + "-t=" + fmt17(t);
        ctx.reports.push_back(std::move(report));
      }
    }
  }
}

inline void run_verify_eq3(RunContext& ctx) {
  const ExperimentConfig& c = ctx.config;
  for (double t : c.ts) {
    CheckReport report = check_eq3(c.branch_kind(), c.mu(), c.epsilons, t,
                                   c.n, c.mc_options(ctx.take_check_base()));
    if (c.ts.size() > 1) report.name += "-t=" + fmt17(t);
    ctx.reports.push_back(std::move(report));
  }
}

inline void run_verify_martingale(RunContext& ctx) {
  const ExperimentConfig& c = ctx.config;
  for (Compensator comp : compensators_of(c)) {
    for (double t : c.ts) {
      for (double lambda : c.lambdas) {
        CheckReport report = check_martingale(
            c.branch_kind(), c.mu(), lambda, c.a_checkpoints, t, c.n, comp,
            c.mc_options(ctx.take_check_base()));
        if (c.ts.size() > 1 || c.lambdas.size() > 1) {
          report.name += "-lambda=" + fmt17(lambda) + "-t=" + fmt17(t);
        }
        ctx.reports.push_back(std::move(report));
      }
    }
  }
}

inline void run_verify_rayknight(RunContext& ctx) {
  const ExperimentConfig& c = ctx.config;
  ctx.reports.push_back(check_rayknight(c.ts.front(), c.rk_a_points, c.rk_step,
                                        c.rk_n,
                                        c.mc_options(ctx.take_check_base())));
}

// The desk-scale battery behind verify-all: one representative run of every
// verification against fixed parameters; n, seed, parallelism, chunk_size
// and rayknight settings come from the config.
inline void run_verify_all(RunContext& ctx) {
  const ExperimentConfig& c = ctx.config;
  const double kLn2 = std::log(2.0);
  const HalfLineMeasure two_atoms({Atom{0.4, 1.0}, Atom{kLn2, 0.5}}, {});
  const HalfLineMeasure eq3_mu({Atom{kLn2, 2.0}}, {});
  const HalfLineMeasure mart_mu({Atom{0.5, 1.0}}, {});
  const std::vector<double> checkpoints{0.25, 0.5, 1.0};

  ctx.reports.push_back(check_laplace(BranchKind::Homographic, two_atoms, 1.0,
                                      1.0, c.n, BoundaryVariant::Plain,
                                      c.mc_options(ctx.take_check_base())));
  ctx.reports.push_back(check_laplace(BranchKind::Homographic, two_atoms, 1.0,
                                      1.0, c.n, BoundaryVariant::Extinction,
                                      c.mc_options(ctx.take_check_base())));
  ctx.reports.push_back(check_laplace(BranchKind::Homographic, two_atoms, 0.0,
                                      1.0, c.n, BoundaryVariant::Extinction,
                                      c.mc_options(ctx.take_check_base())));
  ctx.reports.push_back(check_laplace(BranchKind::Besq, two_atoms, 1.0, 1.0,
                                      c.n, BoundaryVariant::Plain,
                                      c.mc_options(ctx.take_check_base())));
  const std::vector<double> epsilons{0.05, 0.2};
  ctx.reports.push_back(check_eq3(BranchKind::Homographic, eq3_mu, epsilons,
                                  1.0, c.n,
                                  c.mc_options(ctx.take_check_base())));
  ctx.reports.push_back(check_martingale(
      BranchKind::Homographic, mart_mu, 1.0, checkpoints, 1.0, c.n,
      Compensator::XiAtZero, c.mc_options(ctx.take_check_base())));
  ctx.reports.push_back(check_martingale(
      BranchKind::Homographic, mart_mu, 1.0, checkpoints, 1.0, c.n,
      Compensator::XiAtA, c.mc_options(ctx.take_check_base())));
  ctx.reports.push_back(check_rayknight(c.ts.front(), c.rk_a_points, c.rk_step,
                                        c.rk_n,
                                        c.mc_options(ctx.take_check_base())));
}

inline ExperimentResult error_result(const std::filesystem::path& out,
                                     int code, const char* message) {
  const json record{{"tool", "subsheet"},
                    {"error", json{{"code", code}, {"message", message}}}};
  if (code == kExitInvalidConfig) {
    std::error_code ec;
    std::filesystem::create_directories(out, ec);
    if (!ec) {
      std::ofstream err(out / "error.json", std::ios::binary);
      if (err) err << record.dump(2) << "\n";
    }
  }
  std::fprintf(stderr, "%s\n", record.dump().c_str());
  ExperimentResult result;
  result.pass = false;
  result.exit_code = code;
  return result;
}

}  // namespace detail

// Executes the configured command and persists a result record plus
// plot-ready CSVs under the output directory. Never throws for config or
// gate problems; the exit code carries the outcome.
inline ExperimentResult run_experiment(const ExperimentConfig& config) {
  ExperimentResult result;
  std::filesystem::path out(config.out_dir);
  try {
    validate_config(config);
    std::filesystem::create_directories(out);

    detail::RunContext ctx{config, out, {}, json::object(), 0};
    if (config.command == "simulate-sheet") {
      detail::run_simulate_sheet(ctx);
    } else if (config.command == "eval-exponent") {
      detail::run_eval_exponent(ctx);
    } else if (config.command == "verify-laplace") {
      detail::run_verify_laplace(ctx);
    } else if (config.command == "verify-eq3") {
      detail::run_verify_eq3(ctx);
    } else if (config.command == "verify-martingale") {
      detail::run_verify_martingale(ctx);
    } else if (config.command == "verify-rayknight") {
      detail::run_verify_rayknight(ctx);
    } else if (config.command == "verify-all") {
      detail::run_verify_all(ctx);
    }

    bool pass = true;
    json checks = json::array();
    double total_runtime = 0.0;
    for (const CheckReport& report : ctx.reports) {
      pass = pass && report.pass;
      checks.push_back(report_to_json(report));
      total_runtime += report.runtime_seconds;
    }

    json record{{"tool", "subsheet"},
                {"command", config.command},
                {"config", config},
                {"checks", std::move(checks)},
                {"pass", pass},
                {"timing", json{{"timestamp", detail::iso_timestamp()},
                                {"total_check_seconds", total_runtime}}}};
    for (auto& [key, value] : ctx.extra.items()) record[key] = value;

    result.result_path = out / "result.json";
    detail::write_text_file(result.result_path, record.dump(2) + "\n");
    if (!ctx.reports.empty()) {
      detail::write_text_file(out / "checks.csv", checks_csv(ctx.reports));
    }
    result.reports = std::move(ctx.reports);
    result.pass = pass;
    result.exit_code = pass ? kExitPass : kExitGateFailure;
    return result;
  } catch (const ConfigError& e) {
    return detail::error_result(out, kExitInvalidConfig, e.what());
  } catch (const std::invalid_argument& e) {
    // A module precondition the validator missed is still a config problem.
    return detail::error_result(out, kExitInvalidConfig, e.what());
  } catch (const std::exception& e) {
    return detail::error_result(out, kExitInternalError, e.what());
  }
}

}  // namespace subsheet

#endif  // SUBSHEET_CLI_HPP
