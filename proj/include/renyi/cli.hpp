#pragma once

/// Batch front-end behind the renyi_lab executable: configuration parsing
/// (flags plus an optional INI file, flags win), the constants / barenblatt /
/// evolve / verify / sweep experiments and their on-disk outputs.
///
/// Exit codes: 0 success, 1 configuration error, 2 solver instability,
/// 3 failed verdict.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "renyi/analytic_profiles.hpp"
#include "renyi/errors.hpp"
#include "renyi/functionals.hpp"
#include "renyi/grid.hpp"
#include "renyi/initial_data.hpp"
#include "renyi/io.hpp"
#include "renyi/pme_solver.hpp"
#include "renyi/verification.hpp"

namespace renyi::cli {

namespace fs = std::filesystem;

enum ExitCode : int { kOk = 0, kConfigError = 1, kStabilityError = 2, kVerdictFailure = 3 };

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string subcommand;
  double p = 2.0;
  int n = 1;
  std::string geometry = "auto";  ///< auto: cartesian1d for n = 1, radial otherwise
  std::size_t nodes = 2048;
  double radius = 0.0;            ///< 0: chosen from the Barenblatt envelope at t_end
  double t_start = 1.0;
  double t_end = 2.0;
  std::size_t snapshots = 33;
  std::string spacing = "uniform";
  std::string initial = "barenblatt";
  std::uint64_t seed = 1;
  double cfl = 0.9;
  double fixed_dt = 0.0;
  int max_rejections = 40;
  double floor = -1.0;            ///< mixture background; < 0 means 1e-6 for p < 1, else 0
  std::string convention = "section2";
  Tolerances tol;
  std::vector<std::string> verify;
  bool profiles = false;
  std::string out = "runs";
  std::string input;
  int workers = 1;
  std::vector<double> p_list;
  std::vector<int> n_list;
  std::size_t seeds = 5;
};

// ---------------------------------------------------------------------------
// configuration helpers

inline Geometry resolve_geometry(const RunConfig& cfg) {
  if (cfg.geometry == "auto") return cfg.n == 1 ? Geometry::cartesian1d : Geometry::radial;
  if (cfg.geometry == "cartesian1d") {
    if (cfg.n != 1) throw ConfigError("cli: geometry cartesian1d needs --dim 1");
    return Geometry::cartesian1d;
  }
  if (cfg.geometry == "radial") return Geometry::radial;
  throw ConfigError("cli: unknown geometry '" + cfg.geometry + "'");
}

/// Radius holding the Barenblatt envelope of the run at t_end.
inline double default_radius(const RunConfig& cfg) {
  if (cfg.radius > 0.0) return cfg.radius;
  if (cfg.p == 1.0) return 10.0 * std::sqrt(2.0 * cfg.t_end);
  const BarenblattSpec spec = barenblatt_spec(cfg.p, cfg.n, BarenblattConvention::section2);
  const double scale = std::pow(cfg.t_end, 1.0 / spec.coeffs.mu);
  if (cfg.p > 1.0) return std::max(6.0, 1.5 * barenblatt_support_radius(spec) * scale);
  const Grid probe = Grid::radial(cfg.n, 4, 1.0);
  return std::max(6.0, fast_diffusion_guard(cfg.p, probe, cfg.t_end, 1e-6).recommended_radius);
}

inline Grid make_grid(const RunConfig& cfg) {
  const double R = default_radius(cfg);
  return resolve_geometry(cfg) == Geometry::radial ? Grid::radial(cfg.n, cfg.nodes, R)
                                                   : Grid::cartesian_symmetric(cfg.nodes, R);
}

inline double mixture_floor(const RunConfig& cfg) {
  if (cfg.floor >= 0.0) return cfg.floor;
  return cfg.p < 1.0 ? 1e-6 : 0.0;
}

inline DensityField make_initial(const RunConfig& cfg, const Grid& grid) {
  if (cfg.initial == "barenblatt") {
    if (cfg.p == 1.0) return gaussian_initial(grid, cfg.t_start);
    return barenblatt_initial(grid, cfg.p, cfg.t_start);
  }
  if (cfg.initial == "gaussian") return gaussian_initial(grid, cfg.t_start);
  if (cfg.initial == "mixture") {
    MixtureOptions opts;
    opts.floor = mixture_floor(cfg);
    return gaussian_mixture(grid, cfg.seed, opts);
  }
  if (cfg.initial == "compact") return compact_two_bump(grid, cfg.seed);
  if (cfg.initial.rfind("file:", 0) == 0) {
    std::ifstream in(cfg.initial.substr(5));
    if (!in) throw ConfigError("cli: cannot open initial profile '" + cfg.initial.substr(5) + "'");
    return read_profile(in, cfg.n).field.normalized();
  }
  throw ConfigError("cli: unknown initial data '" + cfg.initial + "'");
}

inline DiffusionParams make_params(const RunConfig& cfg, int n) {
  DiffusionParams params;
  params.p = cfg.p;
  params.n = n;
  params.cfl_safety = cfg.cfl;
  params.fixed_dt = cfg.fixed_dt;
  params.max_rejections = cfg.max_rejections;
  params.t_start = cfg.t_start;
  params.t_end = cfg.t_end;
  if (cfg.snapshots < 1) throw ConfigError("cli: --snapshots must be >= 1");
  if (cfg.spacing == "uniform")
    params.snapshot_times = uniform_times(cfg.t_start, cfg.t_end, cfg.snapshots - 1 == 0 ? 1 : cfg.snapshots - 1);
  else if (cfg.spacing == "geometric")
    params.snapshot_times = geometric_times(cfg.t_start, cfg.t_end, cfg.snapshots - 1 == 0 ? 1 : cfg.snapshots - 1);
  else
    throw ConfigError("cli: unknown snapshot spacing '" + cfg.spacing + "'");
  params.compute_dissipation = std::find(cfg.verify.begin(), cfg.verify.end(), "dissipation") != cfg.verify.end();
  return params;
}

inline const std::vector<std::string>& known_checks() {
  static const std::vector<std::string> names{"concavity", "upsilon", "debruijn", "dissipation", "isoperimetric",
                                              "convergence"};
  return names;
}

/// Rejects a configuration before any computation, naming the violated
/// precondition and its module.
inline void validate_config(const RunConfig& cfg) {
  for (const auto& check : cfg.verify)
    if (std::find(known_checks().begin(), known_checks().end(), check) == known_checks().end())
      throw ConfigError("cli: unknown check '" + check + "'");
  if (cfg.workers < 1) throw ConfigError("cli: --workers must be >= 1");
  if (cfg.subcommand == "constants" || cfg.subcommand == "verify") return;
  if (cfg.subcommand == "sweep") {
    for (int n : cfg.n_list)
      if (n < 1) throw ConfigError("cli: sweep dimensions must be >= 1");
    return;
  }
  coefficients(cfg.p, cfg.n);
  if (cfg.subcommand == "barenblatt") {
    detail::require_not_linear(cfg.p);
    if (cfg.convention != "section2" && cfg.convention != "appendix")
      throw ConfigError("cli: unknown convention '" + cfg.convention + "'");
    make_grid(cfg);
    return;
  }
  RunConfig copy = cfg;
  const DiffusionParams params = make_params(copy, cfg.n);
  validate(params);
  resolve_geometry(cfg);
  if (cfg.initial.rfind("file:", 0) != 0) make_grid(cfg);
  if (cfg.initial == "barenblatt" || cfg.initial == "gaussian")
    detail::require(cfg.t_start > 0.0, "analytic_profiles: source-type initial data needs t_start > 0");
}

/// Canonical text of every setting that influences the outputs.
inline std::string canonical(const RunConfig& cfg) {
  std::ostringstream s;
  s << "subcommand=" << cfg.subcommand << ";p=" << format_double(cfg.p) << ";n=" << cfg.n
    << ";geometry=" << cfg.geometry << ";nodes=" << cfg.nodes << ";radius=" << format_double(cfg.radius)
    << ";t_start=" << format_double(cfg.t_start) << ";t_end=" << format_double(cfg.t_end)
    << ";snapshots=" << cfg.snapshots << ";spacing=" << cfg.spacing << ";initial=" << cfg.initial
    << ";seed=" << cfg.seed << ";cfl=" << format_double(cfg.cfl) << ";dt=" << format_double(cfg.fixed_dt)
    << ";max_rejections=" << cfg.max_rejections << ";floor=" << format_double(cfg.floor)
    << ";convention=" << cfg.convention << ";input=" << cfg.input << ";seeds=" << cfg.seeds << ";verify=";
  for (const auto& v : cfg.verify) s << v << ',';
  s << ";p_list=";
  for (double p : cfg.p_list) s << format_double(p) << ',';
  s << ";n_list=";
  for (int n : cfg.n_list) s << n << ',';
  s << ";tol=" << format_double(cfg.tol.concavity) << ',' << format_double(cfg.tol.upsilon) << ','
    << format_double(cfg.tol.debruijn) << ',' << format_double(cfg.tol.dissipation) << ','
    << format_double(cfg.tol.isoperimetric) << ',' << format_double(cfg.tol.convergence);
  return s.str();
}

inline fs::path experiment_dir(const RunConfig& cfg) {
  fs::path dir = fs::path(cfg.out) / (cfg.subcommand + "-" + hex64(fnv1a(canonical(cfg))));
  fs::create_directories(dir);
  return dir;
}

inline void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cli: cannot write " + path.string());
  out << text;
}

// ---------------------------------------------------------------------------
// verdict assembly shared by evolve, verify and sweep

inline std::vector<Verdict> evaluate(const Series& series, const std::vector<SnapshotRecord>* records, double p, int n,
                                     const std::vector<std::string>& checks, const Tolerances& tol) {
  auto wants = [&](const char* name) { return std::find(checks.begin(), checks.end(), name) != checks.end(); };
  CheckSelection sel;
  sel.concavity = wants("concavity");
  sel.upsilon = wants("upsilon");
  sel.debruijn = wants("debruijn");
  sel.dissipation = wants("dissipation");
  ExperimentReport rep = build_report(series, p, n, tol, sel);
  if (wants("isoperimetric")) {
    if (rep.isoperimetric_margins.empty()) {
      rep.verdicts.push_back({"isoperimetric", std::nan(""), tol.isoperimetric, true, "not applicable for this (p, n)"});
    } else {
      const double worst = *std::min_element(rep.isoperimetric_margins.begin(), rep.isoperimetric_margins.end());
      rep.verdicts.push_back({"isoperimetric", worst, tol.isoperimetric, worst >= -tol.isoperimetric,
                              "min (Upsilon_p - gamma)/gamma over snapshots"});
    }
  }
  if (wants("convergence")) {
    if (records == nullptr || records->empty())
      throw InsufficientData("verification: convergence needs the recorded profiles");
    const auto conv = barenblatt_convergence(*records, p, tol.convergence, tol.convergence_slack);
    rep.verdicts.push_back({"convergence", conv.final_distance, tol.convergence, conv.pass,
                            "final rescaled L1 distance to the Barenblatt profile; monotone=" +
                                std::string(conv.monotone ? "yes" : "no")});
  }
  return rep.verdicts;
}

inline bool all_pass(const std::vector<Verdict>& v) {
  return std::all_of(v.begin(), v.end(), [](const Verdict& x) { return x.pass; });
}

// ---------------------------------------------------------------------------
// subcommands

inline int run_constants(const RunConfig& cfg, std::ostream& log) {
  std::vector<double> ps = cfg.p_list.empty() ? std::vector<double>{2.0, 1.5, 0.9, 2.0 / 3.0 + 0.05} : cfg.p_list;
  std::vector<int> ns = cfg.n_list.empty() ? std::vector<int>{1, 2, 3} : cfg.n_list;
  std::ostringstream csv;
  csv << "p,n,mu,nu,A_p,C_p,Hp_B,Ip_B,gamma,error\n";
  for (double p : ps)
    for (int n : ns) {
      csv << format_double(p) << ',' << n << ',';
      try {
        const Coefficients c = coefficients(p, n);
        const BarenblattSpec spec = barenblatt_spec(p, n);
        const double H = barenblatt_entropy(spec);
        const double I = barenblatt_fisher(spec);
        const double g = gamma_const(p, n);
        csv << format_double(c.mu) << ',' << format_double(c.nu) << ',' << format_double(spec.A_p) << ','
            << format_double(spec.C_p) << ',' << format_double(H) << ',' << format_double(I) << ','
            << format_double(g) << ",\n";
      } catch (const std::exception& e) {
        csv << ",,,,,,,\"" << e.what() << "\"\n";
      }
    }
  std::ostringstream sob;
  sob << "n,p,S_n,gamma,relation_mismatch\n";
  for (int n : ns) {
    if (n <= 2) continue;
    const double p = (n - 1.0) / n;
    const double S = sobolev_constant(n);
    const double g = gamma_const(p, n);
    const double factor = (n - 2.0) / (2.0 * n - 2.0);
    sob << n << ',' << format_double(p) << ',' << format_double(S) << ',' << format_double(g) << ','
        << format_double(std::abs(S - factor * factor * g) / S) << '\n';
  }
  const fs::path dir = experiment_dir(cfg);
  write_text(dir / "constants.csv", csv.str());
  write_text(dir / "sobolev.csv", sob.str());
  log << csv.str() << sob.str() << "wrote " << dir.string() << '\n';
  return kOk;
}

inline int run_barenblatt(const RunConfig& cfg, std::ostream& log) {
  const BarenblattConvention conv =
      cfg.convention == "appendix" ? BarenblattConvention::appendix : BarenblattConvention::section2;
  const BarenblattSpec spec = barenblatt_spec(cfg.p, cfg.n, conv);
  RunConfig sized = cfg;
  if (sized.radius <= 0.0) {
    sized.radius = cfg.p > 1.0 ? 1.25 * barenblatt_support_radius(spec) * std::pow(cfg.t_start, 1.0 / spec.coeffs.mu)
                               : default_radius(cfg);
  }
  const Grid grid = make_grid(sized);
  const DensityField f =
      DensityField::sample(grid, [&](double x) { return barenblatt_self_similar(std::abs(x), cfg.t_start, spec); });
  const fs::path dir = experiment_dir(cfg);
  {
    std::ofstream out(dir / "profile.csv");
    write_profile(out, f, cfg.t_start);
  }
  nlohmann::json j;
  j["p"] = cfg.p;
  j["n"] = cfg.n;
  j["convention"] = to_string(conv);
  j["t"] = cfg.t_start;
  j["mu"] = spec.coeffs.mu;
  j["nu"] = spec.coeffs.nu;
  j["kappa"] = spec.kappa;
  j["constant"] = spec.constant;
  j["A_p"] = spec.A_p;
  j["C_p"] = spec.C_p;
  j["support_radius"] = barenblatt_support_radius(spec) * std::pow(cfg.t_start, 1.0 / spec.coeffs.mu);
  nlohmann::json analytic, quadrature;
  try {
    // closed forms hold for the profile itself (t = 1)
    analytic["p_integral"] = barenblatt_p_integral(spec);
    analytic["H_p"] = barenblatt_entropy(spec);
    analytic["N_p"] = barenblatt_entropy_power(spec);
    analytic["I_p"] = barenblatt_fisher(spec);
    analytic["second_moment"] = barenblatt_second_moment(spec);
    analytic["gamma"] = gamma_const(cfg.p, cfg.n);
  } catch (const DomainError& e) {
    analytic["error"] = e.what();
  }
  quadrature["mass"] = mass(f);
  quadrature["H_p"] = renyi_entropy(f, cfg.p);
  quadrature["N_p"] = entropy_power(f, cfg.p);
  quadrature["I_p"] = fisher_p(f, cfg.p).I;
  quadrature["upsilon"] = upsilon(f, cfg.p);
  j["analytic_profile"] = analytic;
  j["quadrature_at_t"] = quadrature;
  write_text(dir / "values.json", j.dump(2) + "\n");
  log << j.dump(2) << "\nwrote " << dir.string() << '\n';
  return kOk;
}

struct EvolveOutcome {
  int code = kOk;
  Series series;
  std::vector<Verdict> verdicts;
  std::vector<std::string> warnings;
  fs::path dir;
  std::string error;
};

/// Runs one evolution and writes its outputs under `dir`.
inline EvolveOutcome evolve_into(const RunConfig& cfg, const fs::path& dir) {
  EvolveOutcome out;
  out.dir = dir;
  const DensityField f0 = make_initial(cfg, make_grid(cfg));
  const Grid& grid = f0.grid();
  const int n = grid.dimension();
  if (n != cfg.n) throw ConfigError("cli: initial profile dimension does not match --dim");
  if (cfg.p < 1.0) {
    const auto guard = fast_diffusion_guard(cfg.p, grid, cfg.t_end);
    if (!guard.sufficient)
      out.warnings.push_back("fast diffusion: envelope tail mass " + format_double(guard.tail_mass_outside) +
                             " outside the domain; recommended radius " + format_double(guard.recommended_radius));
  }
  PorousMediumSolver solver(grid, make_params(cfg, n));
  EvolveResult result = solver.evolve(f0);
  for (auto& w : result.warnings) out.warnings.push_back(std::move(w));
  for (const auto& r : result.records) out.series.push_back(r.functionals);

  fs::create_directories(dir);
  {
    std::ofstream csv(dir / "snapshots.csv", std::ios::binary);
    write_snapshots_csv(csv, out.series);
  }
  {
    std::ofstream prof(dir / "final_profile.csv", std::ios::binary);
    write_profile(prof, result.records.back().field, result.records.back().functionals.t);
  }
  if (cfg.profiles) {
    fs::create_directories(dir / "profiles");
    for (std::size_t k = 0; k < result.records.size(); ++k) {
      char name[32];
      std::snprintf(name, sizeof name, "profile_%05zu.csv", k);
      std::ofstream prof(dir / "profiles" / name, std::ios::binary);
      write_profile(prof, result.records[k].field, result.records[k].functionals.t);
    }
  }
  nlohmann::json meta;
  meta["p"] = cfg.p;
  meta["n"] = n;
  meta["geometry"] = to_string(grid.geometry());
  meta["nodes"] = grid.size();
  meta["spacing"] = grid.spacing();
  meta["extent"] = grid.extent();
  meta["t_start"] = cfg.t_start;
  meta["t_end"] = cfg.t_end;
  meta["snapshots"] = out.series.size();
  meta["initial"] = cfg.initial;
  meta["seed"] = cfg.seed;
  meta["cfl"] = cfg.cfl;
  meta["steps"] = result.final_state.step_count;
  meta["rejections"] = result.final_state.rejections;
  meta["final_mass"] = state_mass(grid, result.final_state.u);
  meta["leak_estimate"] = result.final_state.leak_estimate;
  meta["warnings"] = out.warnings;
  meta["config"] = canonical(cfg);
  write_text(dir / "run_meta.json", meta.dump(2) + "\n");

  if (!cfg.verify.empty()) {
    out.verdicts = evaluate(out.series, &result.records, cfg.p, n, cfg.verify, cfg.tol);
    write_text(dir / "verdicts.json", verdicts_json(out.verdicts).dump(2) + "\n");
    if (!all_pass(out.verdicts)) out.code = kVerdictFailure;
  }
  return out;
}

inline int run_evolve(const RunConfig& cfg, std::ostream& log) {
  const fs::path dir = experiment_dir(cfg);
  EvolveOutcome out = evolve_into(cfg, dir);
  for (const auto& w : out.warnings) log << "warning: " << w << '\n';
  if (!out.verdicts.empty()) log << summary_table(out.verdicts);
  log << "wrote " << dir.string() << '\n';
  return out.code;
}

inline int run_verify(const RunConfig& cfg, std::ostream& log) {
  if (cfg.input.empty()) throw ConfigError("cli: verify needs --input DIR (an evolve output directory)");
  const fs::path in = cfg.input;
  std::ifstream meta_in(in / "run_meta.json");
  if (!meta_in) throw ConfigError("cli: no run_meta.json in " + in.string());
  const nlohmann::json meta = nlohmann::json::parse(meta_in);
  const double p = meta.at("p").get<double>();
  const int n = meta.at("n").get<int>();
  std::ifstream csv(in / "snapshots.csv");
  if (!csv) throw ConfigError("cli: no snapshots.csv in " + in.string());
  const Series series = read_snapshots_csv(csv);
  std::vector<SnapshotRecord> records;
  if (fs::is_directory(in / "profiles")) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(in / "profiles")) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& path : files) {
      std::ifstream pf(path);
      LoadedProfile lp = read_profile(pf);
      const double t = lp.t.value_or(0.0);
      FunctionalSnapshot s = snapshot(lp.field, p, t);
      records.push_back({std::move(lp.field), s});
    }
  }
  const std::vector<std::string> checks =
      cfg.verify.empty() ? std::vector<std::string>{"concavity", "upsilon"} : cfg.verify;
  const auto verdicts = evaluate(series, records.empty() ? nullptr : &records, p, n, checks, cfg.tol);
  const fs::path dir = cfg.out == "runs" ? in : experiment_dir(cfg);
  write_text(dir / "verdicts.json", verdicts_json(verdicts).dump(2) + "\n");
  log << summary_table(verdicts);
  return all_pass(verdicts) ? kOk : kVerdictFailure;
}

struct SweepRow {
  double p = 0.0;
  int n = 1;
  std::uint64_t seed = 0;
  std::string status = "ok";
  double concavity = std::nan("");
  double upsilon_increase = std::nan("");
  double iso_margin = std::nan("");
  bool pass = false;
  std::string message;
};

inline std::vector<SweepRow> sweep_rows(const RunConfig& cfg, const fs::path& dir) {
  const std::vector<double> ps = cfg.p_list.empty() ? std::vector<double>{0.8, 1.0, 1.5, 2.0} : cfg.p_list;
  const std::vector<int> ns = cfg.n_list.empty() ? std::vector<int>{1, 3} : cfg.n_list;
  std::vector<SweepRow> rows;
  for (double p : ps)
    for (int n : ns)
      for (std::size_t k = 0; k < cfg.seeds; ++k) {
        SweepRow row;
        row.p = p;
        row.n = n;
        row.seed = cfg.seed + k;
        rows.push_back(row);
      }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) {
      SweepRow& row = rows[i];
      RunConfig rc = cfg;
      rc.subcommand = "evolve";
      rc.p = row.p;
      rc.n = row.n;
      rc.seed = row.seed;
      rc.geometry = "auto";
      rc.initial = "mixture";
      rc.verify = {"concavity", "upsilon", "isoperimetric"};
      char name[96];
      std::snprintf(name, sizeof name, "row-p%s-n%d-seed%llu", format_double(row.p).c_str(), row.n,
                    static_cast<unsigned long long>(row.seed));
      try {
        validate_config(rc);
        const EvolveOutcome out = evolve_into(rc, dir / name);
        for (const auto& v : out.verdicts) {
          if (v.check == "concavity") row.concavity = v.value;
          if (v.check == "upsilon_monotone") row.upsilon_increase = v.value;
          if (v.check == "isoperimetric") row.iso_margin = v.value;
        }
        row.pass = out.code == kOk;
        row.status = row.pass ? "ok" : "verdict_failure";
        if (std::isnan(row.iso_margin)) row.message = "isoperimetric: N/A";
      } catch (const StabilityError& e) {
        row.status = "stability_error";
        row.message = e.what();
      } catch (const std::exception& e) {
        row.status = "error";
        row.message = e.what();
      }
    }
  };
  const int count = std::max(1, std::min<int>(cfg.workers, static_cast<int>(rows.size())));
  std::vector<std::thread> pool;
  for (int w = 1; w < count; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return rows;
}

inline int run_sweep(const RunConfig& cfg, std::ostream& log) {
  const fs::path dir = experiment_dir(cfg);
  const auto rows = sweep_rows(cfg, dir);
  std::ostringstream csv;
  csv << "p,n,seed,status,concavity,upsilon_increase,iso_margin,pass,message\n";
  int code = kOk;
  for (const auto& r : rows) {
    std::string msg = r.message;
    std::replace(msg.begin(), msg.end(), '"', '\'');
    csv << format_double(r.p) << ',' << r.n << ',' << r.seed << ',' << r.status << ','
        << format_double(r.concavity) << ',' << format_double(r.upsilon_increase) << ','
        << format_double(r.iso_margin) << ',' << (r.pass ? 1 : 0) << ",\"" << msg << "\"\n";
    if (r.status == "stability_error") code = std::max<int>(code, kStabilityError);
    else if (!r.pass) code = kVerdictFailure;
  }
  write_text(dir / "sweep.csv", csv.str());
  log << csv.str() << "wrote " << dir.string() << '\n';
  return code;
}

// ---------------------------------------------------------------------------
// command line

inline void add_run_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--p", cfg.p, "Renyi index / nonlinearity exponent p");
  sub->add_option("--dim", cfg.n, "space dimension n");
  sub->add_option("--geometry", cfg.geometry, "auto | cartesian1d | radial");
  sub->add_option("--nodes", cfg.nodes, "grid nodes");
  sub->add_option("--radius", cfg.radius, "domain half width / radius (0: automatic)");
  sub->add_option("--t-start", cfg.t_start, "initial time");
  sub->add_option("--t-end", cfg.t_end, "final time");
  sub->add_option("--snapshots", cfg.snapshots, "number of recorded snapshots");
  sub->add_option("--spacing", cfg.spacing, "snapshot spacing: uniform | geometric");
  sub->add_option("--initial", cfg.initial, "barenblatt | gaussian | mixture | compact | file:PATH");
  sub->add_option("--seed", cfg.seed, "mixture seed");
  sub->add_option("--cfl", cfg.cfl, "CFL safety factor in (0, 1)");
  sub->add_option("--dt", cfg.fixed_dt, "fixed time step overriding the CFL bound (diagnostics)");
  sub->add_option("--max-rejections", cfg.max_rejections, "step halvings allowed before a stability error");
  sub->add_option("--floor", cfg.floor, "mixture background relative to its peak (-1: automatic)");
  sub->add_flag("--profiles", cfg.profiles, "dump the profile at every snapshot");
}

inline void add_tolerance_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--verify", cfg.verify, "checks: concavity upsilon debruijn dissipation isoperimetric convergence")
      ->delimiter(',');
  sub->add_option("--tol-concavity", cfg.tol.concavity);
  sub->add_option("--tol-upsilon", cfg.tol.upsilon);
  sub->add_option("--tol-debruijn", cfg.tol.debruijn);
  sub->add_option("--tol-dissipation", cfg.tol.dissipation);
  sub->add_option("--tol-isoperimetric", cfg.tol.isoperimetric);
  sub->add_option("--tol-convergence", cfg.tol.convergence);
}

/// Parses argv and runs the selected subcommand. Diagnostics go to `err`.
inline int run(int argc, const char* const* argv, std::ostream& log = std::cout, std::ostream& err = std::cerr) {
  RunConfig cfg;
  CLI::App app{"Renyi entropy power along nonlinear heat flows", "renyi_lab"};
  app.set_config("--config", "", "INI configuration file; command-line flags take precedence");
  app.require_subcommand(1);
  app.add_option("--out", cfg.out, "output base directory");
  app.add_option("--workers", cfg.workers, "worker threads for sweeps");

  auto* constants = app.add_subcommand("constants", "tabulate mu, nu, A_p, C_p, H_p, I_p, gamma and S_n");
  constants->add_option("--p", cfg.p_list, "p values")->delimiter(',');
  constants->add_option("--dim", cfg.n_list, "dimensions")->delimiter(',');

  auto* baren = app.add_subcommand("barenblatt", "dump a Barenblatt profile and its closed-form values");
  baren->add_option("--p", cfg.p);
  baren->add_option("--dim", cfg.n);
  baren->add_option("--geometry", cfg.geometry);
  baren->add_option("--nodes", cfg.nodes);
  baren->add_option("--radius", cfg.radius);
  baren->add_option("--t-start", cfg.t_start, "time at which the source-type solution is sampled");
  baren->add_option("--convention", cfg.convention, "section2 | appendix");

  auto* evolve = app.add_subcommand("evolve", "run the nonlinear heat flow and record functionals");
  add_run_options(evolve, cfg);
  add_tolerance_options(evolve, cfg);

  auto* verify = app.add_subcommand("verify", "run checks on an existing evolve output directory");
  verify->add_option("--input", cfg.input, "evolve output directory")->required();
  add_tolerance_options(verify, cfg);

  auto* sweep = app.add_subcommand("sweep", "seeded mixture experiments over (p, n)");
  add_run_options(sweep, cfg);
  sweep->add_option("--p-list", cfg.p_list, "p values")->delimiter(',');
  sweep->add_option("--dim-list", cfg.n_list, "dimensions")->delimiter(',');
  sweep->add_option("--seeds", cfg.seeds, "seeds per (p, n), counted from --seed");
  add_tolerance_options(sweep, cfg);
  for (auto* sub : {constants, baren, evolve, verify, sweep}) {
    sub->add_option("--out", cfg.out, "output base directory");
    sub->add_option("--workers", cfg.workers, "worker threads for sweeps");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    log << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  }
  for (auto* sub : app.get_subcommands()) cfg.subcommand = sub->get_name();
  if (cfg.subcommand == "sweep" && sweep->count("--nodes") == 0) cfg.nodes = 256;

  try {
    validate_config(cfg);
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  }
  try {
    if (cfg.subcommand == "constants") return run_constants(cfg, log);
    if (cfg.subcommand == "barenblatt") return run_barenblatt(cfg, log);
    if (cfg.subcommand == "evolve") return run_evolve(cfg, log);
    if (cfg.subcommand == "verify") return run_verify(cfg, log);
    return run_sweep(cfg, log);
  } catch (const StabilityError& e) {
    err << "stability error: " << e.what() << '\n';
    return kStabilityError;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DomainError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const FormatError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "verdict error: " << e.what() << '\n';
    return kVerdictFailure;
  }
}

}  // namespace renyi::cli
