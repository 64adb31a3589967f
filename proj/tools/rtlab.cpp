// rtlab: configuration-driven runner for the slab inverse-transport studies.
// One study = one subcommand = one output table (CSV, 17 significant digits),
// accompanied by a manifest recording the config hash and wall time.

#include <CLI11.hpp>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "rtlab/diffusion.hpp"
#include "rtlab/errors.hpp"
#include "rtlab/grids.hpp"
#include "rtlab/inversion.hpp"
#include "rtlab/kernels.hpp"
#include "rtlab/moments.hpp"
#include "rtlab/peaked.hpp"
#include "rtlab/rng.hpp"
#include "rtlab/table.hpp"
#include "rtlab/transport.hpp"

namespace {

using nlohmann::json;
using rtlab::Table;
using namespace rtlab;

constexpr const char* kVersion = "0.1.0";

// ---------------------------------------------------------------------------
// config schema
// ---------------------------------------------------------------------------

enum class Kind { Num, Int, Str, NumList };

struct SchemaEntry {
  Kind kind;
  json def;
};

using Schema = std::map<std::string, SchemaEntry>;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void flatten(const json& j, const std::string& prefix, std::map<std::string, json>& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it)
      flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
  } else {
    out[prefix] = j;
  }
}

json merged_config(const Schema& schema, const std::string& config_path,
                   std::set<std::string>* user_keys = nullptr) {
  json cfg;
  for (const auto& [key, entry] : schema) cfg[key] = entry.def;
  if (config_path.empty()) return cfg;

  std::ifstream f(config_path);
  if (!f) throw ConfigError("cannot open config file '" + config_path + "'");
  json user;
  try {
    f >> user;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  std::map<std::string, json> flat;
  flatten(user, "", flat);
  for (const auto& [key, value] : flat) {
    const auto it = schema.find(key);
    if (it == schema.end()) throw ConfigError("unknown config key '" + key + "'");
    switch (it->second.kind) {
      case Kind::Num:
        if (!value.is_number()) throw ConfigError("config key '" + key + "' must be a number");
        break;
      case Kind::Int:
        if (!value.is_number_integer())
          throw ConfigError("config key '" + key + "' must be an integer");
        break;
      case Kind::Str:
        if (!value.is_string()) throw ConfigError("config key '" + key + "' must be a string");
        break;
      case Kind::NumList:
        if (!value.is_array()) throw ConfigError("config key '" + key + "' must be a list");
        for (const auto& v : value)
          if (!v.is_number()) throw ConfigError("config key '" + key + "' must hold numbers");
        break;
    }
    cfg[key] = value;
    if (user_keys) user_keys->insert(key);
  }
  return cfg;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// ---------------------------------------------------------------------------
// shared pieces
// ---------------------------------------------------------------------------

struct RunContext {
  std::string out_dir = "out";
  std::uint64_t seed = 12345;
  int threads = 1;
  std::string study;
  json cfg;
  std::set<std::string> user_keys;

  bool user_set(const std::string& key) const { return user_keys.count(key) > 0; }
};

int profile_id(const std::string& name) {
  if (name == "ramp") return 0;
  if (name == "bump") return 1;
  if (name == "step") return 2;
  if (name == "constant") return 3;
  throw std::invalid_argument("unknown inflow profile '" + name + "'");
}

transport::Side side_of(const std::string& s) {
  if (s == "left") return transport::Side::left;
  if (s == "right") return transport::Side::right;
  throw std::invalid_argument("unknown side '" + s + "'");
}

transport::Variant variant_of(const std::string& s) {
  if (s == "absorption") return transport::Variant::absorption;
  if (s == "scattering") return transport::Variant::scattering;
  throw std::invalid_argument("unknown variant '" + s + "'");
}

Schema grid_schema(int nx, int nt, double T, int nv) {
  return {
      {"grid.nx", {Kind::Int, nx}},
      {"grid.nt", {Kind::Int, nt}},
      {"grid.T", {Kind::Num, T}},
      {"grid.nv", {Kind::Int, nv}},
  };
}

grids::SlabGrid grid_from(const json& cfg) {
  return grids::SlabGrid(cfg.at("grid.nx").get<int>(), cfg.at("grid.nt").get<int>(),
                         cfg.at("grid.T").get<double>());
}

void merge(Schema& into, const Schema& from) {
  for (const auto& kv : from) into.insert(kv);
}

Schema suite_schema(const inversion::SuiteConfig& d) {
  Schema s = grid_schema(d.nx, d.nt, d.T, d.nv);
  merge(s, Schema{
               {"kn", {Kind::Num, 0.2}},
               {"sigma_s0", {Kind::Num, d.sigma_s0}},
               {"sigma_a0", {Kind::Num, d.sigma_a0}},
               {"tau_fracs", {Kind::NumList, json(d.tau_fracs)}},
               {"mask.lo", {Kind::Num, d.mask.lo}},
               {"mask.hi", {Kind::Num, d.mask.hi}},
               {"mask.blocks", {Kind::Int, d.mask.blocks}},
               {"sig.amp", {Kind::Num, d.sig_amp}},
               {"sig.center", {Kind::Num, d.sig_center}},
               {"sig.width", {Kind::Num, d.sig_width}},
           });
  return s;
}

// Suite parameters default per variant; a config value wins only when the
// user actually wrote it.
inversion::SuiteConfig suite_from(const RunContext& ctx, transport::Variant variant) {
  const json& cfg = ctx.cfg;
  inversion::SuiteConfig s = variant == transport::Variant::absorption
                                 ? inversion::SuiteConfig::absorption_default()
                                 : inversion::SuiteConfig::scattering_default();
  auto pick_i = [&](const char* key, int d) { return ctx.user_set(key) ? cfg.at(key).get<int>() : d; };
  auto pick_d = [&](const char* key, double d) {
    return ctx.user_set(key) ? cfg.at(key).get<double>() : d;
  };
  s.nx = pick_i("grid.nx", s.nx);
  s.nt = pick_i("grid.nt", s.nt);
  s.nv = pick_i("grid.nv", s.nv);
  s.T = pick_d("grid.T", s.T);
  s.sigma_s0 = pick_d("sigma_s0", s.sigma_s0);
  s.sigma_a0 = pick_d("sigma_a0", s.sigma_a0);
  if (ctx.user_set("tau_fracs")) s.tau_fracs = cfg.at("tau_fracs").get<std::vector<double>>();
  s.mask.lo = pick_d("mask.lo", s.mask.lo);
  s.mask.hi = pick_d("mask.hi", s.mask.hi);
  s.mask.blocks = pick_i("mask.blocks", s.mask.blocks);
  s.sig_amp = pick_d("sig.amp", s.sig_amp);
  s.sig_center = pick_d("sig.center", s.sig_center);
  s.sig_width = pick_d("sig.width", s.sig_width);
  return s;
}

// ---------------------------------------------------------------------------
// studies
// ---------------------------------------------------------------------------

Table run_forward(const RunContext& ctx) {
  const json& c = ctx.cfg;
  transport::TransportProblem p;
  p.grid = grid_from(c);
  p.quad = grids::gauss_legendre(c.at("grid.nv").get<int>());
  p.kn = c.at("kn").get<double>();
  p.optics = transport::OpticalField::background(p.grid.nx, c.at("sigma_s0").get<double>(),
                                                 c.at("sigma_a0").get<double>());
  const int pid = profile_id(c.at("profile").get<std::string>());
  const std::string in_side = c.at("inflow_side").get<std::string>();
  p.inflow = [pid, in_side](double t, transport::Side s) {
    if (in_side != "both" && s != side_of(in_side)) return 0.0;
    return inversion::inflow_profile(pid, t);
  };
  p.initial.assign(p.grid.nx, c.at("initial").get<double>());

  const auto f = transport::solve_forward(p);
  const auto m = transport::outflow(f, p.quad);
  Table t({"t", "m_left", "m_right"});
  for (int k = 0; k <= p.grid.nt; ++k)
    t.add_row({p.grid.time_level(k), m.at(k, transport::Side::left),
               m.at(k, transport::Side::right)});
  return t;
}

Table run_adjoint(const RunContext& ctx) {
  const json& c = ctx.cfg;
  transport::TransportProblem p;
  p.grid = grid_from(c);
  p.quad = grids::gauss_legendre(c.at("grid.nv").get<int>());
  p.kn = c.at("kn").get<double>();
  p.optics = transport::OpticalField::background(p.grid.nx, c.at("sigma_s0").get<double>(),
                                                 c.at("sigma_a0").get<double>());
  const int tau = static_cast<int>(std::lround(c.at("tau_frac").get<double>() * p.grid.nt));
  const auto g =
      transport::solve_adjoint(p, {tau, side_of(c.at("source_side").get<std::string>())});
  Table t({"t", "x", "g_avg"});
  for (int k = 0; k <= p.grid.nt; ++k)
    for (int i = 0; i < p.grid.nx; ++i) {
      double avg = 0.0;
      for (int j = 0; j < p.quad.size(); ++j) avg += p.quad.weights[j] * g.at(k, i, j);
      t.add_row({p.grid.time_level(k), p.grid.cell_center(i), avg});
    }
  return t;
}

Table run_diffusion_check(const RunContext& ctx) {
  const json& c = ctx.cfg;
  const auto kns = c.at("kn_list").get<std::vector<double>>();
  const double T = c.at("T").get<double>();
  const int nv = c.at("grid.nv").get<int>();
  const double sa0 = c.at("sigma_a0").get<double>();
  const double window = c.at("window").get<double>();
  const int cpm = c.at("cells_per_mfp").get<int>();
  const int ntf = c.at("nt_factor").get<int>();
  const int pid = profile_id(c.at("profile").get<std::string>());

  std::vector<double> errs;
  std::vector<long long> nxs;
  for (double kn : kns) {
    const int nx = static_cast<int>(std::lround(cpm / kn));
    const int nt = ntf * nx;
    transport::TransportProblem p;
    p.grid = grids::SlabGrid(nx, nt, T);
    p.quad = grids::gauss_legendre(nv);
    p.kn = kn;
    p.optics = transport::OpticalField::background(nx, 1.0, sa0);
    p.inflow = [pid](double tt, transport::Side s) {
      return s == transport::Side::left ? inversion::inflow_profile(pid, tt) : 0.0;
    };
    const auto f = transport::solve_forward(p);
    std::vector<double> ss(nx, 1.0), sa(nx, sa0), r0(nx, 0.0);
    const auto rho = diffusion::solve_heat(
        p.grid, ss, sa, 1.0 / 3.0, r0,
        [pid](double tt) { return inversion::inflow_profile(pid, tt); },
        [](double) { return 0.0; });
    errs.push_back(diffusion::diffusion_limit_error(p.grid, p.quad, f, rho, kn, window / kn));
    nxs.push_back(nx);
  }
  const double slope = kns.size() >= 2 ? inversion::loglog_slope(kns, errs) : 0.0;
  Table t({"kn", "nx", "nt", "error", "slope"});
  for (size_t i = 0; i < kns.size(); ++i)
    t.add_row({kns[i], nxs[i], static_cast<long long>(ntf * nxs[i]), errs[i], slope});
  return t;
}

Table run_gamma(const RunContext& ctx) {
  const json& c = ctx.cfg;
  const auto variant = variant_of(c.at("variant").get<std::string>());
  const auto cfg = suite_from(ctx, variant);
  const auto suite = inversion::build_suite(cfg, c.at("kn").get<double>());
  Table t({"experiment", "inflow", "inflow_side", "tau_index", "measure_side", "cell", "x",
           "gamma"});
  for (size_t r = 0; r < suite.rows.size(); ++r) {
    const auto& row = suite.rows[r];
    for (int i = 0; i < suite.grid.nx; ++i)
      t.add_row({static_cast<long long>(r), static_cast<long long>(row.meta.inflow_id),
                 std::string(row.meta.inflow_side == transport::Side::left ? "left" : "right"),
                 static_cast<long long>(row.meta.tau_index),
                 std::string(row.meta.measure_side == transport::Side::left ? "left" : "right"),
                 static_cast<long long>(i), suite.grid.cell_center(i), row.gamma[i]});
  }
  return t;
}

Table run_duality(const RunContext& ctx) {
  const json& c = ctx.cfg;
  transport::TransportProblem p;
  p.grid = grid_from(c);
  p.quad = grids::gauss_legendre(c.at("grid.nv").get<int>());
  p.kn = c.at("kn").get<double>();
  p.variant = variant_of(c.at("variant").get<std::string>());
  p.optics = transport::OpticalField::background(p.grid.nx, c.at("sigma_s0").get<double>(),
                                                 c.at("sigma_a0").get<double>());
  const int pid = profile_id(c.at("profile").get<std::string>());
  p.inflow = [pid](double t, transport::Side s) {
    return s == transport::Side::left ? inversion::inflow_profile(pid, t) : 0.0;
  };
  const int tau = static_cast<int>(std::lround(c.at("tau_frac").get<double>() * p.grid.nt));
  const auto side = side_of(c.at("side").get<std::string>());
  const double lo = c.at("pert.lo").get<double>(), hi = c.at("pert.hi").get<double>();

  Table t({"amplitude", "lhs", "rhs", "residual", "degenerate"});
  for (double amp : c.at("amp_list").get<std::vector<double>>()) {
    std::vector<double> tilde(p.grid.nx, 0.0);
    for (int i = 0; i < p.grid.nx; ++i) {
      const double x = p.grid.cell_center(i);
      if (x > lo && x < hi) tilde[i] = amp;
    }
    const auto rep = kernels::duality_residual(p, tilde, tau, side);
    t.add_row({amp, rep.lhs, rep.rhs, rep.residual,
               static_cast<long long>(rep.degenerate ? 1 : 0)});
  }
  return t;
}

Table run_invert(const RunContext& ctx) {
  const json& c = ctx.cfg;
  const auto variant = variant_of(c.at("variant").get<std::string>());
  const auto cfg = suite_from(ctx, variant);
  const auto suite = inversion::build_suite(cfg, c.at("kn").get<double>());
  auto sys = inversion::assemble_system(suite.rows, suite.b, suite.grid, cfg.mask);
  const auto dec = inversion::svd(sys.A);

  SplitMix64 rng(mix_seed(ctx.seed, 0));
  const double delta = c.at("delta").get<double>();
  for (Eigen::Index r = 0; r < sys.b.size(); ++r) sys.b[r] += rng.next_symmetric(delta);
  const auto shat = inversion::tikhonov_solve(sys, c.at("lambda_reg").get<double>());

  Table t({"kind", "index", "value"});
  for (Eigen::Index j = 0; j < dec.sv.size(); ++j)
    t.add_row({std::string("singular_value"), static_cast<long long>(j), dec.sv[j]});
  for (Eigen::Index j = 0; j < shat.size(); ++j)
    t.add_row({std::string("estimate"), static_cast<long long>(j), shat[j]});
  for (Eigen::Index j = 0; j < suite.sigma_true.size(); ++j)
    t.add_row({std::string("truth"), static_cast<long long>(j), suite.sigma_true[j]});
  t.add_row({std::string("kappa_fixed_b"), 0LL,
             inversion::distinguishability(dec, sys.b, delta, inversion::KappaMode::fixed_b)});
  t.add_row({std::string("kappa_worst_b"), 0LL,
             inversion::distinguishability(dec, sys.b, delta, inversion::KappaMode::worst_b)});
  return t;
}

Table run_sweep_kn(const RunContext& ctx) {
  const json& c = ctx.cfg;
  const auto variant = variant_of(c.at("variant").get<std::string>());
  const auto cfg = suite_from(ctx, variant);
  inversion::SweepOptions opt;
  opt.kn_list = c.at("kn_list").get<std::vector<double>>();
  opt.delta = c.at("delta").get<double>();
  opt.lambda_reg = c.at("lambda_reg").get<double>();
  opt.noise_draws = c.at("noise_draws").get<int>();
  opt.seed = ctx.seed;
  opt.threads = ctx.threads;
  const auto table = inversion::kn_sweep(cfg, opt);
  Table t({"kn", "max_gamma", "lambda1", "lambda_min", "kappa", "tik_err", "gamma_slope",
           "kappa_slope"});
  for (const auto& r : table.rows)
    t.add_row({r.kn, r.max_gamma, r.lambda1, r.lambda_min, r.kappa, r.tik_err,
               table.gamma_slope, table.kappa_slope});
  return t;
}

Table run_fp_spectrum(const RunContext& ctx) {
  const json& c = ctx.cfg;
  const auto table = peaked::fp_convergence_report(
      peaked::profile_from_name(c.at("profile").get<std::string>()),
      c.at("eps_list").get<std::vector<double>>(), c.at("N").get<int>());
  Table t({"eps", "E", "argmax_n", "fitted_order"});
  for (const auto& r : table.rows)
    t.add_row({r.eps, r.E, static_cast<long long>(r.argmax_n), table.fitted_order});
  return t;
}

Table run_xi_moments(const RunContext& ctx) {
  const json& c = ctx.cfg;
  const auto k = peaked::normalize_kernel(
      peaked::profile_from_name(c.at("profile").get<std::string>()), c.at("eps").get<double>());
  const int N = c.at("N").get<int>();
  const auto sig = peaked::legendre_moments(k, N);
  const auto xi = peaked::xi_moments(k, N);
  const auto lam = peaked::collision_eigenvalues(sig, k.eps);
  const auto lfp = peaked::fp_eigenvalues(xi.xi1(), N);
  Table t({"n", "sigma_n", "xi_n", "lambda_n", "lambda_fp"});
  for (int n = 0; n <= N; ++n)
    t.add_row({static_cast<long long>(n), sig.sigma_n[n], xi.xi[n], lam[n], lfp[n]});
  return t;
}

Table run_moment_invert(const RunContext& ctx) {
  const json& c = ctx.cfg;
  const int band = c.at("band").get<int>(), J = c.at("J").get<int>();
  const int m = c.at("experiments").get<int>();
  const auto quad = moments::sphere_quadrature(band);
  std::vector<moments::ManufacturedGamma> suite;
  for (int i = 0; i < m; ++i)
    suite.push_back(moments::random_gamma(band, 2, true, mix_seed(ctx.seed, 0x5017eULL, i)));
  const auto sys = moments::assemble_xi_system(suite, J, band, quad);

  const auto kern = peaked::normalize_kernel(
      peaked::profile_from_name(c.at("profile").get<std::string>()), c.at("eps").get<double>());
  const auto xiv = peaked::xi_moments(kern, J);
  Eigen::VectorXd xi_true(J);
  for (int j = 1; j <= J; ++j) xi_true[j - 1] = xiv.xi[j];
  const Eigen::VectorXd b = sys.a0 * xiv.xi[0] + sys.A * xi_true;
  const auto sol =
      moments::solve_xi(sys.A, b - sys.a0 * xiv.xi[0], c.at("delta").get<double>(), ctx.seed);

  Table t({"j", "xi_true", "xi_hat", "error_bar"});
  for (int j = 0; j < J; ++j)
    t.add_row({static_cast<long long>(j + 1), xi_true[j], sol.xi_hat[j], sol.error_bars[j]});
  return t;
}

Table run_kappa_epsilon(const RunContext& ctx) {
  const json& c = ctx.cfg;
  const auto table = moments::kappa_epsilon(
      peaked::profile_from_name(c.at("profile").get<std::string>()),
      c.at("eps_list").get<std::vector<double>>(), c.at("delta").get<double>(),
      c.at("N").get<int>(), ctx.seed);
  Table t({"eps", "kappa", "kappa_over_deps", "xi1_err_max", "recon_true_sup", "analytic_sup"});
  for (const auto& r : table.rows)
    t.add_row({r.eps, r.kappa, r.kappa_over_deps, r.xi1_err_max, r.recon_true_sup,
               r.analytic_sup});
  return t;
}

Table run_hermite_cond(const RunContext& ctx) {
  const json& c = ctx.cfg;
  const int M = c.at("M").get<int>(), Nh = c.at("Nh").get<int>();
  const auto rep = moments::hermite_conditioning_report(
      c.at("eps_list").get<std::vector<double>>(), M, Nh, c.at("delta").get<double>(), ctx.seed);
  Table t({"eps", "m", "row_norm", "row_norm_slope", "coeff_err"});
  for (const auto& r : rep.rows)
    for (int m = 0; m <= M; ++m)
      t.add_row({r.eps, static_cast<long long>(m), r.row_norms[m],
                 rep.row_norm_slopes.empty() ? 0.0 : rep.row_norm_slopes[m], r.coeff_err});
  return t;
}

Table run_recoverable_terms(const RunContext& ctx) {
  const json& c = ctx.cfg;
  const double delta = c.at("delta").get<double>(), eps = c.at("eps").get<double>();
  const int n0 = moments::recoverable_terms(delta, eps);
  std::cout << n0 << "\n";
  Table t({"delta", "eps", "n0"});
  t.add_row({delta, eps, static_cast<long long>(n0)});
  return t;
}

// ---------------------------------------------------------------------------

void write_outputs(const RunContext& ctx, const Table& table, double wall_ms) {
  namespace fs = std::filesystem;
  fs::create_directories(ctx.out_dir);
  table.write_csv(ctx.out_dir + "/" + ctx.study + ".csv");
  json manifest;
  manifest["study"] = ctx.study;
  manifest["version"] = kVersion;
  manifest["seed"] = ctx.seed;
  manifest["threads"] = ctx.threads;
  char hash[32];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(fnv1a(ctx.cfg.dump())));
  manifest["config_hash"] = hash;
  manifest["wall_ms"] = wall_ms;
  std::ofstream mf(ctx.out_dir + "/" + ctx.study + ".manifest.json");
  mf << manifest.dump(2) << "\n";
}

struct StudyDef {
  std::string name;
  Schema schema;
  Table (*run)(const RunContext&);
};

std::vector<StudyDef> study_definitions() {
  std::vector<StudyDef> defs;

  {
    Schema s = grid_schema(16, 16, 1.0, 2);
    merge(s, Schema{{"kn", {Kind::Num, 0.5}},
                    {"sigma_s0", {Kind::Num, 1.0}},
                    {"sigma_a0", {Kind::Num, 0.0}},
                    {"profile", {Kind::Str, "constant"}},
                    {"inflow_side", {Kind::Str, "both"}},
                    {"initial", {Kind::Num, 1.0}}});
    defs.push_back({"forward", s, run_forward});
  }
  {
    Schema s = grid_schema(64, 64, 1.0, 8);
    merge(s, Schema{{"kn", {Kind::Num, 0.2}},
                    {"sigma_s0", {Kind::Num, 1.0}},
                    {"sigma_a0", {Kind::Num, 1.0}},
                    {"tau_frac", {Kind::Num, 0.5}},
                    {"source_side", {Kind::Str, "right"}}});
    defs.push_back({"adjoint", s, run_adjoint});
  }
  {
    Schema s{{"kn_list", {Kind::NumList, json::array({0.4, 0.2, 0.1, 0.05})}},
             {"cells_per_mfp", {Kind::Int, 4}},
             {"nt_factor", {Kind::Int, 2}},
             {"T", {Kind::Num, 1.0}},
             {"grid.nv", {Kind::Int, 8}},
             {"sigma_a0", {Kind::Num, 1.0}},
             {"window", {Kind::Num, 0.3}},
             {"profile", {Kind::Str, "ramp"}}};
    defs.push_back({"diffusion-check", s, run_diffusion_check});
  }
  {
    Schema s = suite_schema(inversion::SuiteConfig::absorption_default());
    merge(s, Schema{{"variant", {Kind::Str, "absorption"}}});
    defs.push_back({"gamma", s, run_gamma});
  }
  {
    Schema s = grid_schema(64, 64, 1.0, 8);
    merge(s, Schema{{"kn", {Kind::Num, 0.2}},
                    {"variant", {Kind::Str, "absorption"}},
                    {"sigma_s0", {Kind::Num, 1.0}},
                    {"sigma_a0", {Kind::Num, 1.0}},
                    {"profile", {Kind::Str, "ramp"}},
                    {"tau_frac", {Kind::Num, 0.5}},
                    {"side", {Kind::Str, "right"}},
                    {"pert.lo", {Kind::Num, 0.4}},
                    {"pert.hi", {Kind::Num, 0.6}},
                    {"amp_list", {Kind::NumList, json::array({0.01, 0.005})}}});
    defs.push_back({"duality", s, run_duality});
  }
  {
    Schema s = suite_schema(inversion::SuiteConfig::absorption_default());
    merge(s, Schema{{"variant", {Kind::Str, "absorption"}},
                    {"delta", {Kind::Num, 1e-3}},
                    {"lambda_reg", {Kind::Num, 0.0}}});
    defs.push_back({"invert", s, run_invert});
  }
  {
    Schema s = suite_schema(inversion::SuiteConfig::absorption_default());
    s.erase("kn");
    merge(s, Schema{{"variant", {Kind::Str, "absorption"}},
                    {"kn_list", {Kind::NumList, json::array({0.4, 0.2, 0.1, 0.05})}},
                    {"delta", {Kind::Num, 1e-3}},
                    {"lambda_reg", {Kind::Num, 0.0}},
                    {"noise_draws", {Kind::Int, 20}}});
    defs.push_back({"sweep-kn", s, run_sweep_kn});
  }
  {
    Schema s{{"profile", {Kind::Str, "exponential"}},
             {"eps_list", {Kind::NumList, json::array({0.025, 0.0125, 0.00625, 0.003125})}},
             {"N", {Kind::Int, 10}}};
    defs.push_back({"fp-spectrum", s, run_fp_spectrum});
  }
  {
    Schema s{{"profile", {Kind::Str, "exponential"}},
             {"eps", {Kind::Num, 0.1}},
             {"N", {Kind::Int, 8}}};
    defs.push_back({"xi-moments", s, run_xi_moments});
  }
  {
    Schema s{{"profile", {Kind::Str, "exponential"}},
             {"eps", {Kind::Num, 0.1}},
             {"band", {Kind::Int, 3}},
             {"J", {Kind::Int, 3}},
             {"experiments", {Kind::Int, 8}},
             {"delta", {Kind::Num, 1e-3}}};
    defs.push_back({"moment-invert", s, run_moment_invert});
  }
  {
    Schema s{{"profile", {Kind::Str, "exponential"}},
             {"eps_list", {Kind::NumList, json::array({0.2, 0.1, 0.05})}},
             {"delta", {Kind::Num, 1e-3}},
             {"N", {Kind::Int, 4}}};
    defs.push_back({"kappa-epsilon", s, run_kappa_epsilon});
  }
  {
    Schema s{{"eps_list", {Kind::NumList, json::array({0.2, 0.1, 0.05, 0.025})}},
             {"M", {Kind::Int, 6}},
             {"Nh", {Kind::Int, 4}},
             {"delta", {Kind::Num, 1e-6}}};
    defs.push_back({"hermite-cond", s, run_hermite_cond});
  }
  {
    Schema s{{"delta", {Kind::Num, 1e-6}}, {"eps", {Kind::Num, 1e-2}}};
    defs.push_back({"recoverable-terms", s, run_recoverable_terms});
  }
  return defs;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rtlab: inverse radiative-transfer scaling laboratory"};
  app.require_subcommand(1);

  auto defs = study_definitions();
  struct PerSub {
    std::string config, out = "out";
    std::uint64_t seed = 12345;
    int threads = 1;
    double delta_flag = -1.0, eps_flag = -1.0;
  };
  std::vector<PerSub> opts(defs.size());

  for (size_t i = 0; i < defs.size(); ++i) {
    auto* sub = app.add_subcommand(defs[i].name, "run the " + defs[i].name + " study");
    sub->add_option("--config", opts[i].config, "JSON config file");
    sub->add_option("--out", opts[i].out, "output directory");
    sub->add_option("--seed", opts[i].seed, "RNG seed");
    sub->add_option("--threads", opts[i].threads, "worker threads for sweeps");
    if (defs[i].name == "recoverable-terms") {
      sub->add_option("--delta", opts[i].delta_flag, "measurement error level");
      sub->add_option("--eps", opts[i].eps_flag, "peaking parameter");
    }
  }

  CLI11_PARSE(app, argc, argv);

  for (size_t i = 0; i < defs.size(); ++i) {
    auto* sub = app.get_subcommand(defs[i].name);
    if (!sub->parsed()) continue;
    RunContext ctx;
    ctx.study = defs[i].name;
    ctx.out_dir = opts[i].out;
    ctx.seed = opts[i].seed;
    ctx.threads = opts[i].threads;
    if (const char* env = std::getenv("RTLAB_THREADS")) ctx.threads = std::atoi(env);

    try {
      ctx.cfg = merged_config(defs[i].schema, opts[i].config, &ctx.user_keys);
      if (opts[i].delta_flag > 0.0) ctx.cfg["delta"] = opts[i].delta_flag;
      if (opts[i].eps_flag > 0.0) ctx.cfg["eps"] = opts[i].eps_flag;
    } catch (const ConfigError& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return 2;
    }

    try {
      const auto start = std::chrono::steady_clock::now();
      const Table table = defs[i].run(ctx);
      const double wall_ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
              .count();
      write_outputs(ctx, table, wall_ms);
    } catch (const std::invalid_argument& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return 2;
    } catch (const rtlab::numerical_breakdown& e) {
      std::cerr << "numerical failure: " << e.what();
      if (e.step_index() >= 0) std::cerr << " (step " << e.step_index() << ")";
      std::cerr << "\n";
      return 3;
    } catch (const std::exception& e) {
      std::cerr << "failure: " << e.what() << "\n";
      return 3;
    }
  }
  return 0;
}
