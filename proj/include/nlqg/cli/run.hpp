#pragma once

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>
#include <openssl/evp.h>

#include "nlqg/cli/config.hpp"
#include "nlqg/cosmo/integrate.hpp"
#include "nlqg/cosmo/reconstruct.hpp"
#include "nlqg/dg/evolve.hpp"
#include "nlqg/dg/pair.hpp"
#include "nlqg/epr/delta1.hpp"
#include "nlqg/epr/epr.hpp"
#include "nlqg/field/serialize.hpp"
#include "nlqg/table.hpp"

#ifndef NLQG_VERSION
#define NLQG_VERSION "0.0.0"
#endif

namespace nlqg::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

enum ExitCode : int {
  exit_ok = 0,
  exit_failure = 1,
  exit_validation = 2,
  exit_numerical_instability = 3,
  exit_unphysical = 4,
};

inline std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read input file '" + path.string() + "'");
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx) throw Error("sha256: cannot allocate digest context");
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i)
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return hex.str();
}

/// Writes `text` to a sibling temporary file, then renames it into place.
inline void write_atomic(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
    out << text;
    if (!out.flush()) throw Error("cannot write '" + tmp.string() + "'");
  }
  fs::rename(tmp, path);
}

inline json config_json(const Config& c) {
  json out = json::object();
  for (const auto& k : schema()) {
    const Value& v = c.values().at(k.key);
    std::visit([&](const auto& x) { out[k.key] = x; }, v);
  }
  return out;
}

/// Everything one run produces besides its data files.
struct RunContext {
  Config config;
  fs::path out_dir;
  std::vector<fs::path> inputs;
  std::vector<std::string> outputs;
  json summary = json::object();
  std::string termination = "completed";
  std::optional<std::size_t> aborting_step;
  std::optional<double> calibrated_threshold;
  int exit_code = exit_ok;

  fs::path output(const std::string& name) {
    outputs.push_back(name);
    return out_dir / name;
  }

  void write_summary() {
    summary["experiment"] = config.experiment();
    summary["version"] = NLQG_VERSION;
    summary["config"] = config_json(config);
    std::ofstream out(output("summary.json"), std::ios::binary | std::ios::trunc);
    out << summary.dump(2) << "\n";
  }
};

namespace detail {

inline GridSpec grid_from(const Config& c) {
  GridSpec g{static_cast<int>(c.integer("grid.dim")), static_cast<std::size_t>(c.integer("grid.points")),
             c.real("grid.length")};
  g.validate();
  return g;
}

inline Potential potential_from(const std::string& kind, double strength, double center) {
  Potential p;
  p.strength = strength;
  p.center = center;
  if (kind == "harmonic") p.kind = Potential::Kind::harmonic;
  else if (kind == "cosine") p.kind = Potential::Kind::cosine;
  else if (kind == "linear") p.kind = Potential::Kind::linear;
  else p.kind = Potential::Kind::none;
  return p;
}

inline DGParams dg_from(const Config& c) {
  DGParams p;
  p.hbar = c.real("dg.hbar");
  p.mass = c.real("dg.mass");
  p.D = c.real("dg.D");
  p.allow_negative_D = c.boolean("dg.allow_negative_D");
  p.r.c = {c.real("dg.r1"), c.real("dg.r2"), c.real("dg.r3"), c.real("dg.r4"), c.real("dg.r5")};
  p.floor = c.real("dg.floor");
  p.potential = potential_from(c.string("dg.potential"), c.real("dg.potential_strength"),
                               c.real("dg.potential_center"));
  p.validate();
  return p;
}

/// Species parameters for pair side `side` ("a", "b" or "alt_a").
inline DGParams species_from(const Config& c, const std::string& side) {
  DGParams p;
  p.hbar = c.real("dg.hbar");
  p.mass = c.real("dg.mass");
  p.floor = c.real("dg.floor");
  p.allow_negative_D = c.boolean("dg.allow_negative_D");
  p.D = c.real("pair." + side + ".D");
  p.potential = potential_from(c.string("pair." + side + ".potential"),
                               c.real("pair." + side + ".potential_strength"), 0.0);
  p.validate();
  return p;
}

/// Normalized gaussian (2 pi sigma^2)^{-1/4} exp(-(x - x0)^2 / 4 sigma^2 + i k0 x),
/// a product over both axes in 2D with the wavenumber on axis 0.
inline WaveField gaussian(const GridSpec& g, double x0, double sigma, double k0) {
  auto g1 = [&](double x, double k) {
    return std::exp(Complex{-(x - x0) * (x - x0) / (4.0 * sigma * sigma), k * x});
  };
  WaveField psi = g.dim == 1 ? sample_field(g, 1, [&](double x) { return g1(x, k0); })
                             : sample_field(g, 1, [&](double x, double y) { return g1(x, k0) * g1(y, 0.0); });
  psi.normalize();
  return psi;
}

inline WaveField read_field(const fs::path& path) {
  if (path.extension() == ".csv") {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open wave field '" + path.string() + "'");
    return io::read_field_csv(in);
  }
  return io::read_field_binary(path);
}

inline double resolve_dt(double configured, double scale, double suggested) {
  return configured > 0.0 ? configured : scale * suggested;
}

inline cosmo::CosmoParams cosmo_params_from(RunContext& ctx) {
  const Config& c = ctx.config;
  cosmo::CosmoParams p;
  p.kappa0 = c.real("cosmo.kappa0");
  p.w = c.real("cosmo.w");
  if (const auto& table = c.string("cosmo.b_table"); !table.empty()) {
    ctx.inputs.emplace_back(table);
    const Trajectory t = read_csv(table);
    p.b = cosmo::BModel::tabulated(t.column("t"), t.column("b"));
  } else {
    p.b = cosmo::BModel::constant(c.real("cosmo.b0"));
  }
  p.validate();
  return p;
}

inline cosmo::CosmoState cosmo_state_from(const Config& c) {
  return {c.real("cosmo.t0"), c.real("cosmo.a0"), c.real("cosmo.rho_m"), c.real("cosmo.rho_ph")};
}

inline cosmo::IntegrateOptions cosmo_options_from(const Config& c) {
  return {c.real("cosmo.t_final"), c.real("cosmo.sample_interval"), c.real("cosmo.rtol"),
          c.real("cosmo.atol"), c.real("cosmo.a_max")};
}

inline json intervals_json(const std::vector<cosmo::SignInterval>& iv) {
  json out = json::array();
  for (const auto& i : iv) out.push_back({{"t_start", i.t_start}, {"t_end", i.t_end}, {"sign", i.sign}});
  return out;
}

inline void record_cosmo_run(RunContext& ctx, const cosmo::CosmoRun& run) {
  ctx.termination = cosmo::to_string(run.reason);
  ctx.summary["termination"] = ctx.termination;
  ctx.summary["t_end"] = run.t_end;
  ctx.summary["steps"] = run.steps;
  const auto& last = run.trajectory.back();
  ctx.summary["final"] = {{"a", last[1]}, {"H", last[2]}, {"rho_m", last[3]},
                          {"rho_ph", last[4]}, {"omega_m", last[5]}};
  if (run.reason == cosmo::Termination::unphysical) ctx.exit_code = exit_unphysical;
}

}  // namespace detail

inline void run_evolve(RunContext& ctx) {
  const Config& c = ctx.config;
  const GridSpec g = detail::grid_from(c);
  const DGParams p = detail::dg_from(c);
  WaveField psi0 = c.string("init.kind") == "file"
                       ? [&] {
                           const fs::path f = c.string("init.file");
                           require(!f.empty(), "init.kind = file needs init.file");
                           ctx.inputs.push_back(f);
                           WaveField w = detail::read_field(f);
                           require(w.grid() == g && w.particle_count() == 1,
                                   "init.file does not match the configured one-particle grid");
                           return w;
                         }()
                       : detail::gaussian(g, c.real("init.x0"), c.real("init.sigma"), c.real("init.k0"));
  const double suggested = suggest_dt(g, p);
  const double dt = detail::resolve_dt(c.real("dg.dt"), c.real("dg.dt_scale"), suggested);
  ctx.summary["dt"] = dt;
  ctx.summary["suggested_dt"] = suggested;
  ctx.summary["steps"] = nlqg::detail::step_count(c.real("dg.t_final"), dt);

  const EvolveResult r = evolve(psi0, p, c.real("dg.t_final"), dt,
                                static_cast<std::size_t>(c.integer("dg.sample_every")));
  write_csv(r.diagnostics, ctx.output("diagnostics.csv"));
  if (c.boolean("output.write_field")) io::write_field_binary(r.final_field, ctx.output("final_field.bin"));
  const auto& first = r.diagnostics.rows.front();
  const auto& last = r.diagnostics.back();
  ctx.summary["initial_norm"] = first[1];
  ctx.summary["final_norm"] = last[1];
  ctx.summary["norm_drift"] = last[1] - first[1];
  ctx.summary["final_mean_x"] = last[2];
  ctx.summary["final_var_x"] = last[3];
}

namespace detail {

inline WaveField pair_initial(const Config& c, const GridSpec& g) {
  require(g.dim == 1, "two-particle experiments use grid.dim = 1 (one axis per particle)");
  if (c.string("pair.initial") == "product") {
    const WaveField f = gaussian(g, c.real("epr.center"), c.real("pair.product_sigma"), 0.0);
    return tensor_product(f, f);
  }
  EPRSpec spec{c.real("epr.sigma_c"), c.real("epr.sigma_env"), c.real("epr.center"), g};
  return make_epr(spec);
}

inline PairParams pair_from(const Config& c, const std::string& a_side) {
  PairParams pp{species_from(c, a_side), species_from(c, "b")};
  pp.validate();
  return pp;
}

}  // namespace detail

inline void run_evolve_pair(RunContext& ctx) {
  const Config& c = ctx.config;
  const GridSpec g = detail::grid_from(c);
  const WaveField phi = detail::pair_initial(c, g);
  const PairParams pp = detail::pair_from(c, "a");
  const double dt = detail::resolve_dt(c.real("pair.dt"), 1.0, suggest_dt(g, pp));
  ctx.summary["dt"] = dt;
  const PairEvolution r = evolve_pair(phi, pp, c.real("pair.t_final"), dt,
                                      static_cast<std::size_t>(c.integer("pair.sample_every")));
  Trajectory out({"t", "norm", "purity_b"});
  for (std::size_t i = 0; i < r.sample_times.size(); ++i)
    out.append({r.sample_times[i], r.diagnostics.rows[i][1], r.rho_b[i].purity()});
  write_csv(out, ctx.output("pair.csv"));
  ctx.summary["initial_purity_b"] = out.rows.front()[2];
  ctx.summary["final_purity_b"] = out.back()[2];
  ctx.summary["norm_drift"] = out.back()[1] - out.rows.front()[1];
}

inline void run_causal_channel(RunContext& ctx) {
  const Config& c = ctx.config;
  const GridSpec g = detail::grid_from(c);
  const WaveField phi = detail::pair_initial(c, g);
  const PairParams p1 = detail::pair_from(c, "a");
  const PairParams p2 = detail::pair_from(c, "alt_a");
  require(p1.b == p2.b, "causal-channel: the two parameter sets may differ on the a side only");
  const double dt =
      detail::resolve_dt(c.real("pair.dt"), 1.0, std::min(suggest_dt(g, p1), suggest_dt(g, p2)));
  const double t_final = c.real("pair.t_final");
  const auto every = static_cast<std::size_t>(c.integer("pair.sample_every"));
  const double threshold = c.real("pair.threshold");
  ctx.calibrated_threshold = threshold;

  auto job2 = std::async(std::launch::async, [&] { return evolve_pair(phi, p2, t_final, dt, every); });
  const PairEvolution r1 = evolve_pair(phi, p1, t_final, dt, every);
  const PairEvolution r2 = job2.get();

  Trajectory out({"t", "trace_distance"});
  double max_d = 0.0, t_max = 0.0;
  std::optional<double> crossing;
  for (std::size_t i = 0; i < r1.sample_times.size(); ++i) {
    const double d = trace_distance(r1.rho_b[i], r2.rho_b[i]);
    out.append({r1.sample_times[i], d});
    if (d > max_d) {
      max_d = d;
      t_max = r1.sample_times[i];
    }
    if (!crossing && d >= threshold) crossing = r1.sample_times[i];
  }
  write_csv(out, ctx.output("trace_distance.csv"));
  ctx.summary["dt"] = dt;
  ctx.summary["max_trace_distance"] = max_d;
  ctx.summary["t_at_max"] = t_max;
  ctx.summary["threshold"] = threshold;
  ctx.summary["threshold_exceeded"] = crossing.has_value();
  ctx.summary["first_crossing_t"] = crossing ? json(*crossing) : json(nullptr);
  ctx.summary["linear"] = p1.a.is_linear() && p1.b.is_linear() && p2.a.is_linear();
}

/// Log-spaced s values over one decade ending at the resolvable maximum.
inline std::vector<double> default_s_list(const GridSpec& g, std::size_t count) {
  const double hi = max_resolvable_sharpness(g);
  std::vector<double> s(count);
  for (std::size_t i = 0; i < count; ++i)
    s[i] = hi * std::pow(10.0, -1.0 + static_cast<double>(i) / static_cast<double>(count - 1));
  s.back() = hi;
  return s;
}

/// B = cos(2 pi m x / L) on the n-dimensional b grid.
inline Observable cosine_observable(const GridSpec& g1, int n, long long mode) {
  const double kk = 2.0 * std::numbers::pi * static_cast<double>(mode) / g1.length;
  if (n == 1) return Observable::position(g1, [&](double x) { return std::cos(kk * x); });
  GridSpec g2 = g1;
  g2.dim = 2;
  return Observable::position(g2, [&](double x, double) { return std::cos(kk * x); });
}

inline void run_epr_delta1(RunContext& ctx) {
  const Config& c = ctx.config;
  const GridSpec g = detail::grid_from(c);
  require(g.dim == 1, "epr-delta1 uses grid.dim = 1 (the n = 2 sweep builds its own product grid)");
  const EPRSpec spec{c.real("epr.sigma_c"), c.real("epr.sigma_env"), c.real("epr.center"), g};
  const WaveField phi = make_epr(spec);
  const int n = static_cast<int>(c.integer("epr.n"));
  const Observable B = cosine_observable(g, n, c.integer("epr.observable_mode"));
  DGParams pb;
  pb.hbar = c.real("dg.hbar");
  pb.mass = c.real("dg.mass");
  pb.floor = c.real("dg.floor");
  pb.allow_negative_D = c.boolean("dg.allow_negative_D");
  pb.D = c.real("epr.D_b");
  pb.validate();
  std::vector<double> s_list = c.list("epr.s_list");
  if (s_list.empty()) s_list = default_s_list(g, static_cast<std::size_t>(c.integer("epr.s_count")));
  const double k = 2.0 * std::numbers::pi * static_cast<double>(c.integer("epr.k_index")) / g.length;

  const Delta1Result r = delta1_sweep(phi, c.real("epr.q"), k, s_list, B, pb, n, c.boolean("epr.parallel"));
  Trajectory out({"s", "delta1"});
  for (std::size_t i = 0; i < r.s_values.size(); ++i) out.append({r.s_values[i], r.delta1_values[i]});
  write_csv(out, ctx.output("delta1.csv"));
  ctx.summary["fitted_slope"] = r.fitted_slope;
  ctx.summary["fit_intercept"] = r.fit_intercept;
  ctx.summary["fit_r2"] = r.fit_r2;
  ctx.summary["predicted_slope"] = r.predicted_slope;
  ctx.summary["expectation_b"] = r.expectation_b;
  ctx.summary["slope_ratio"] =
      r.predicted_slope != 0.0 ? json(r.fitted_slope / r.predicted_slope) : json(nullptr);
  ctx.summary["k"] = k;
}

inline void run_cosmo_integrate(RunContext& ctx) {
  const Config& c = ctx.config;
  const cosmo::CosmoParams p = detail::cosmo_params_from(ctx);
  const cosmo::CosmoRun run = cosmo::integrate(detail::cosmo_state_from(c), p, detail::cosmo_options_from(c));
  write_csv(run.trajectory, ctx.output("trajectory.csv"));
  detail::record_cosmo_run(ctx, run);
  const auto t = run.trajectory.column("t");
  std::vector<double> b(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) b[i] = p.b(t[i]);
  ctx.summary["b_sign_intervals"] = detail::intervals_json(cosmo::b_sign_intervals(t, b, c.real("cosmo.eta")));
}

inline void run_cosmo_reconstruct_b(RunContext& ctx) {
  const Config& c = ctx.config;
  const cosmo::CosmoParams p = detail::cosmo_params_from(ctx);
  Trajectory traj;
  bool known_b = false;
  if (const auto& path = c.string("cosmo.trajectory"); !path.empty()) {
    ctx.inputs.emplace_back(path);
    traj = read_csv(path);
    ctx.summary["source"] = "file";
  } else {
    const cosmo::CosmoRun run =
        cosmo::integrate(detail::cosmo_state_from(c), p, detail::cosmo_options_from(c));
    write_csv(run.trajectory, ctx.output("trajectory.csv"));
    detail::record_cosmo_run(ctx, run);
    if (run.reason == cosmo::Termination::unphysical) return;
    traj = run.trajectory;
    known_b = true;
    ctx.summary["source"] = "integrated";
  }
  const Trajectory bt = cosmo::reconstruct_b(traj, p);
  write_csv(bt, ctx.output("b_table.csv"));
  ctx.summary["b_sign_intervals"] = detail::intervals_json(cosmo::b_sign_intervals(bt, c.real("cosmo.eta")));
  if (known_b) {
    double err = 0.0;
    for (std::size_t i = 1; i + 1 < bt.rows.size(); ++i)
      err = std::max(err, std::abs(bt.rows[i][1] - p.b(bt.rows[i][0])));
    ctx.summary["max_interior_error"] = err;
  }
}

inline void run_energy_check(RunContext& ctx) {
  const Config& c = ctx.config;
  std::ofstream out(ctx.output("energy.csv"), std::ios::binary | std::ios::trunc);
  out << "case,rho,p,weak,dominant\n";
  json rows = json::array();
  auto emit = [&](const std::string& label, double rho, double p) {
    const auto r = cosmo::energy_conditions(rho, p);
    out << label << "," << format_number(rho) << "," << format_number(p) << ","
        << (r.weak ? "true" : "false") << "," << (r.dominant ? "true" : "false") << "\n";
    rows.push_back({{"case", label}, {"rho", rho}, {"p", p}, {"weak", r.weak}, {"dominant", r.dominant}});
  };
  emit("given", c.real("energy.rho"), c.real("energy.p"));
  for (double w : c.list("energy.w_list"))
    emit("w=" + format_number(w), c.real("energy.rho"), w * c.real("energy.rho"));
  ctx.summary["checks"] = rows;
}

inline void dispatch(RunContext& ctx) {
  const std::string& e = ctx.config.experiment();
  if (e == "evolve") run_evolve(ctx);
  else if (e == "evolve-pair") run_evolve_pair(ctx);
  else if (e == "epr-delta1") run_epr_delta1(ctx);
  else if (e == "causal-channel") run_causal_channel(ctx);
  else if (e == "cosmo-integrate") run_cosmo_integrate(ctx);
  else if (e == "cosmo-reconstruct-b") run_cosmo_reconstruct_b(ctx);
  else if (e == "energy-check") run_energy_check(ctx);
  else throw ValidationError("unknown experiment '" + e + "'");
}

inline const char* status_name(int code) {
  switch (code) {
    case exit_ok: return "ok";
    case exit_validation: return "validation_error";
    case exit_numerical_instability: return "numerical_instability";
    case exit_unphysical: return "unphysical";
    default: return "error";
  }
}

struct RunOutcome {
  int exit_code = exit_ok;
  std::string message;
  fs::path manifest;
};

/// Runs one experiment into `out_dir` and always finishes with manifest.json.
/// `config_file`, when given, is hashed along with the data inputs.
inline RunOutcome run(const Config& config, const fs::path& out_dir,
                      const std::optional<fs::path>& config_file = std::nullopt) {
  const auto wall_start = std::chrono::system_clock::now();
  const auto start = std::chrono::steady_clock::now();
  fs::create_directories(out_dir);
  RunContext ctx{config, out_dir};
  if (config_file) ctx.inputs.push_back(*config_file);

  RunOutcome outcome;
  try {
    dispatch(ctx);
    if (!ctx.summary.empty()) ctx.write_summary();
    outcome.exit_code = ctx.exit_code;
    if (ctx.exit_code == exit_unphysical) outcome.message = "integration stopped: unphysical state";
  } catch (const NumericalInstability& e) {
    outcome = {exit_numerical_instability, e.what(), {}};
    ctx.termination = "numerical_instability";
    ctx.aborting_step = e.step();
  } catch (const UnphysicalState& e) {
    outcome = {exit_unphysical, e.what(), {}};
    ctx.termination = "unphysical";
  } catch (const ValidationError& e) {
    outcome = {exit_validation, e.what(), {}};
    ctx.termination = "validation_error";
  } catch (const std::exception& e) {
    outcome = {exit_failure, e.what(), {}};
    ctx.termination = "error";
  }

  json m;
  m["tool"] = "nlqg";
  m["version"] = NLQG_VERSION;
  m["experiment"] = config.experiment();
  m["config"] = config_json(config);
  json inputs = json::array();
  for (const auto& p : ctx.inputs) {
    json entry{{"path", p.string()}};
    try {
      entry["sha256"] = sha256_file(p);
    } catch (const std::exception&) {
      entry["sha256"] = nullptr;
    }
    inputs.push_back(entry);
  }
  m["inputs"] = inputs;
  m["outputs"] = ctx.outputs;
  const std::time_t started = std::chrono::system_clock::to_time_t(wall_start);
  std::tm utc{};
  gmtime_r(&started, &utc);
  std::ostringstream stamp;
  stamp << std::put_time(&utc, "%Y-%m-%dT%H:%M:%SZ");
  m["started_utc"] = stamp.str();
  m["duration_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  m["status"] = status_name(outcome.exit_code);
  m["exit_code"] = outcome.exit_code;
  m["termination"] = ctx.termination;
  m["message"] = outcome.message;
  m["aborting_step"] = ctx.aborting_step ? json(*ctx.aborting_step) : json(nullptr);
  m["calibrated_threshold"] = ctx.calibrated_threshold ? json(*ctx.calibrated_threshold) : json(nullptr);
  outcome.manifest = out_dir / "manifest.json";
  write_atomic(outcome.manifest, m.dump(2) + "\n");
  return outcome;
}

/// --out wins; otherwise $NLQG_OUT/<experiment>; otherwise nlqg-out/<experiment>.
inline fs::path output_dir(const std::optional<std::string>& out, const std::string& experiment) {
  if (out && !out->empty()) return *out;
  if (const char* root = std::getenv("NLQG_OUT"); root && *root) return fs::path(root) / experiment;
  return fs::path("nlqg-out") / experiment;
}

}  // namespace nlqg::cli
