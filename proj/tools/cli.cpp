#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "degmin/exact.hpp"
#include "degmin/mesh.hpp"
#include "degmin/potential.hpp"
#include "degmin/regularization.hpp"
#include "degmin/solver.hpp"
#include "degmin/viscosity.hpp"

using nlohmann::json;
namespace fs = std::filesystem;
using namespace degmin;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

uint64_t fnv1a(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed) {
      if (it.key() == k) {
        ok = true;
        break;
      }
    }
    if (!ok) throw ConfigError("unknown key '" + it.key() + "' in " + where);
  }
}

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json cfg;
  try {
    in >> cfg;
  } catch (const std::exception& e) {
    throw ConfigError("malformed JSON in '" + path + "': " + e.what());
  }
  if (!cfg.contains("schema") || cfg["schema"] != 1) {
    throw ConfigError("config must declare \"schema\": 1");
  }
  return cfg;
}

DomainSpec parse_domain(const json& d) {
  check_keys(d, {"shape", "R", "a", "b", "rho", "vertices", "H_star"},
             "domain");
  const std::string shape = d.at("shape");
  DomainSpec spec;
  if (shape == "disk") {
    spec = DomainSpec::disk(d.at("R").get<double>());
  } else if (shape == "rectangle") {
    spec = DomainSpec::rectangle(d.at("a").get<double>(),
                                 d.at("b").get<double>(),
                                 d.value("rho", 1.0));
  } else if (shape == "polygon") {
    std::vector<Vec2> verts;
    for (const auto& v : d.at("vertices")) {
      verts.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
    }
    spec = DomainSpec::polygon(std::move(verts), d.at("rho").get<double>());
  } else {
    throw ConfigError("unknown domain shape '" + shape + "'");
  }
  if (d.contains("H_star")) spec.mean_curvature_min = d["H_star"].get<double>();
  return spec;
}

std::vector<double> parse_eps_schedule(const json& cfg) {
  if (!cfg.contains("eps_schedule") || cfg["eps_schedule"] == "auto") {
    return default_eps_schedule();
  }
  return cfg["eps_schedule"].get<std::vector<double>>();
}

fs::path run_directory(const std::string& config_path,
                       const std::string& content) {
  char hex[32];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(fnv1a(content)));
  fs::path dir = fs::path(config_path).parent_path() / ("run_" + std::string(hex));
  fs::create_directories(dir);
  return dir;
}

void write_u_csv(const fs::path& path, const Mesh& mesh,
                 const ScalarField& u) {
  // Per-vertex gradient: area-weighted average over incident triangles.
  std::vector<double> gx(mesh.num_vertices(), 0.0), gy(mesh.num_vertices(), 0.0),
      w(mesh.num_vertices(), 0.0);
  for (const auto& t : mesh.triangles) {
    const Vec2& a = mesh.vertices[t[0]];
    const Vec2& b = mesh.vertices[t[1]];
    const Vec2& c = mesh.vertices[t[2]];
    const double det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
    const double area = 0.5 * det;
    const double gbx[3] = {(b.y - c.y) / det, (c.y - a.y) / det,
                           (a.y - b.y) / det};
    const double gby[3] = {(c.x - b.x) / det, (a.x - c.x) / det,
                           (b.x - a.x) / det};
    double tx = 0.0, ty = 0.0;
    for (int l = 0; l < 3; ++l) {
      tx += u.values[t[l]] * gbx[l];
      ty += u.values[t[l]] * gby[l];
    }
    for (int l = 0; l < 3; ++l) {
      gx[t[l]] += area * tx;
      gy[t[l]] += area * ty;
      w[t[l]] += area;
    }
  }
  std::ofstream out(path);
  out << "x,y,u,grad_norm\n";
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const double mag = std::hypot(gx[v] / w[v], gy[v] / w[v]);
    out << fmt(mesh.vertices[v].x) << ',' << fmt(mesh.vertices[v].y) << ','
        << fmt(u.values[v]) << ',' << fmt(mag) << '\n';
  }
}

json report_to_json(const SolveReport& r) {
  json hist = json::array();
  for (const auto& h : r.history) {
    hist.push_back({{"eps", h.eps},
                    {"iterations", h.iterations},
                    {"final_energy", h.final_energy},
                    {"gradient_norm", h.gradient_norm},
                    {"sup_delta", h.sup_delta}});
  }
  json out = {{"history", hist},
              {"max_grad", r.max_gradient_magnitude},
              {"sup_u", r.sup_u},
              {"min_u", r.min_u},
              {"deterministic", r.deterministic}};
  if (!r.deterministic) out["wall_time_seconds"] = r.wall_time_seconds;
  return out;
}

struct SolveOutput {
  DomainSpec domain;
  Mesh mesh;
  ScalarField u;
  SolveReport report;
  PotentialModel model;
};

SolveOutput run_solve(const json& cfg) {
  check_keys(cfg,
             {"schema", "domain", "potential", "eps_schedule", "h", "tol",
              "seed", "deterministic", "sigma_tilde", "field_dat"},
             "config");
  SolveOutput out;
  out.domain = parse_domain(cfg.at("domain"));
  out.model = make_potential_by_name(cfg.at("potential"));
  out.mesh = triangulate(out.domain, cfg.at("h").get<double>());
  MinimizeOptions opts;
  opts.tol = cfg.contains("tol") ? cfg["tol"].get<double>()
                                 : 1e-8 * out.domain.area();
  const double sigma_tilde = cfg.value("sigma_tilde", -1.0);
  auto [u, report] = continuation(out.model, out.mesh, parse_eps_schedule(cfg),
                                  opts, sigma_tilde);
  report.deterministic = cfg.value("deterministic", true);
  out.u = std::move(u);
  out.report = std::move(report);
  return out;
}

void write_field_dat(const fs::path& path, const Mesh& mesh,
                     const ScalarField& u) {
  // gnuplot splot-friendly scattered dump, blank line between triangles.
  std::ofstream out(path);
  for (const auto& t : mesh.triangles) {
    for (int l = 0; l < 4; ++l) {
      const int v = t[l % 3];
      out << fmt(mesh.vertices[v].x) << ' ' << fmt(mesh.vertices[v].y) << ' '
          << fmt(u.values[v]) << '\n';
    }
    out << '\n';
  }
}

int cmd_solve(const std::string& config_path) {
  const json cfg = load_config(config_path);
  std::ifstream raw(config_path);
  std::stringstream buf;
  buf << raw.rdbuf();
  const fs::path dir = run_directory(config_path, buf.str());
  SolveOutput out = run_solve(cfg);
  write_u_csv(dir / "u.csv", out.mesh, out.u);
  std::ofstream rep(dir / "report.json");
  rep << report_to_json(out.report).dump(2) << '\n';
  if (cfg.value("field_dat", false)) {
    write_field_dat(dir / "field.dat", out.mesh, out.u);
  }
  std::cout << "wrote " << (dir / "u.csv").string() << " and report.json\n";
  return 0;
}

int cmd_oracle(const std::string& pot_name, int N, double R, int samples,
               const std::string& out_prefix) {
  const PotentialModel m = make_potential_by_name(pot_name);
  RadialOracle oracle(m, N, R);
  json summary = {{"u0", oracle.value(0.0)},
                  {"max_grad", oracle.gradient_magnitude(R)},
                  {"N", N},
                  {"R", R},
                  {"potential", pot_name}};
  std::cout << summary.dump(2) << '\n';
  if (!out_prefix.empty()) {
    std::ofstream csv(out_prefix + "_profile.csv");
    csv << "r,u,grad_norm\n";
    for (int i = 0; i <= samples; ++i) {
      const double r = R * i / samples;
      csv << fmt(r) << ',' << fmt(oracle.value(r)) << ','
          << fmt(oracle.gradient_magnitude(r)) << '\n';
    }
    std::ofstream js(out_prefix + "_oracle.json");
    js << summary.dump(2) << '\n';
  }
  return 0;
}

int cmd_bounds(const std::string& pot_name, int N, double rho, double R_star,
               double H_star) {
  const PotentialModel m = make_potential_by_name(pot_name);
  const double M = gradient_bound_M(m, N, rho, R_star);
  json out = {{"M", M},
              {"sup_u", sup_bound_u(m, N, R_star, M)},
              {"potential", pot_name},
              {"N", N},
              {"rho", rho},
              {"R_star", R_star}};
  if (H_star > 0.0) {
    const CurvatureBounds cb = curvature_bounds(m, N, H_star);
    out["grad_bound_curvature"] = cb.grad_bound;
    out["sup_bound_curvature"] = cb.sup_bound;
  }
  std::cout << out.dump(2) << '\n';
  return 0;
}

int cmd_regularize_table(const std::string& pot_name,
                         const std::vector<double>& eps_list,
                         double sigma_tilde, const std::string& out_path) {
  const PotentialModel m = make_potential_by_name(pot_name);
  const double st = sigma_tilde > 0.0 ? sigma_tilde : m.sigma + 1.0;
  const FamilyReport report = validate_family(m, eps_list, st);
  std::ostringstream csv;
  csv << "eps,p_eps,q_eps,omega_eps,sup_a_gap,sup_limit1,sup_limit2\n";
  for (const auto& e : report.entries) {
    csv << fmt(e.eps) << ',' << fmt(e.p_eps) << ',' << fmt(e.q_eps) << ','
        << fmt(e.omega_eps) << ',' << fmt(e.sup_a_gap) << ','
        << fmt(e.sup_limit1) << ',' << fmt(e.sup_limit2) << '\n';
  }
  if (out_path.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream(out_path) << csv.str();
  }
  if (!report.ok) {
    std::cerr << "family validation failed: " << report.violation << '\n';
    return kExitNumeric;
  }
  return 0;
}

const char* branch_name(BranchTag b) {
  switch (b) {
    case BranchTag::PdeActive:
      return "pde";
    case BranchTag::ThresholdActive:
      return "threshold";
    case BranchTag::SubThreshold:
      return "sub";
  }
  return "?";
}

int cmd_residual(const std::string& config_path, const std::string& u_csv) {
  const json cfg = load_config(config_path);
  check_keys(cfg,
             {"schema", "domain", "potential", "h", "form", "delta", "a_star",
              "eps"},
             "config");
  const DomainSpec domain = parse_domain(cfg.at("domain"));
  const PotentialModel m = make_potential_by_name(cfg.at("potential"));
  const Mesh mesh = triangulate(domain, cfg.at("h").get<double>());

  std::ifstream in(u_csv);
  if (!in) throw ConfigError("cannot open field file '" + u_csv + "'");
  std::string line;
  std::getline(in, line);  // header
  ScalarField u(mesh);
  int row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (row >= mesh.num_vertices()) {
      throw ConfigError("field file has more rows than mesh vertices");
    }
    std::istringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');
    std::getline(ss, cell, ',');
    std::getline(ss, cell, ',');
    u.values[row++] = std::stod(cell);
  }
  if (row != mesh.num_vertices()) {
    throw ConfigError("field file rows (" + std::to_string(row) +
                      ") do not match mesh vertices (" +
                      std::to_string(mesh.num_vertices()) + ")");
  }

  const std::string form_name = cfg.value("form", "ab");
  const double delta = cfg.value("delta", 0.05);
  ResidualReport report;
  if (form_name == "Fn") {
    const double eps = cfg.at("eps").get<double>();
    report = residual_field(build_regularized(m, eps), mesh, u, delta);
  } else if (form_name == "C2") {
    report = residual_field(m, mesh, u, ResidualForm::C2, delta);
  } else if (form_name == "ab") {
    report = residual_field(m, mesh, u, ResidualForm::ab, delta);
  } else if (form_name == "astar") {
    report = residual_field(m, mesh, u, ResidualForm::astar, delta,
                            cfg.value("a_star", 1.0));
  } else {
    throw ConfigError("unknown residual form '" + form_name + "'");
  }

  const fs::path dir = fs::path(u_csv).parent_path();
  std::ofstream csv(dir / "residual.csv");
  csv << "x,y,grad_norm,branch,residual\n";
  for (const auto& s : report.samples) {
    csv << fmt(s.point.x) << ',' << fmt(s.point.y) << ',' << fmt(s.grad_norm)
        << ',' << branch_name(s.branch) << ',' << fmt(s.residual) << '\n';
  }
  json summary = {{"median_pde_active", report.median_pde_active},
                  {"q90_pde_active", report.q90_pde_active},
                  {"median_threshold", report.median_threshold},
                  {"sub_sigma_fraction", report.sub_sigma_fraction},
                  {"samples", report.samples.size()},
                  {"skipped", report.skipped_points}};
  std::ofstream(dir / "residual_summary.json") << summary.dump(2) << '\n';
  std::cout << summary.dump(2) << '\n';
  return 0;
}

int cmd_convergence_study(const std::string& config_path) {
  const json cfg = load_config(config_path);
  check_keys(cfg,
             {"schema", "domain", "potential", "h_list", "eps_schedule", "tol",
              "delta", "out"},
             "config");
  const DomainSpec domain = parse_domain(cfg.at("domain"));
  if (domain.kind != ShapeKind::Disk) {
    throw ConfigError("convergence-study compares against the radial oracle "
                      "and needs a disk domain");
  }
  const PotentialModel m = make_potential_by_name(cfg.at("potential"));
  const std::vector<double> h_list = cfg.at("h_list").get<std::vector<double>>();
  const std::vector<double> eps_schedule = parse_eps_schedule(cfg);
  const double delta = cfg.value("delta", 0.05);

  RadialOracle oracle(m, 2, domain.disk_radius);
  const double M =
      gradient_bound_M(m, 2, domain.exterior_sphere_rho, domain.diameter());

  std::ostringstream csv;
  csv << "h,eps,sup_error_vs_oracle,max_grad,bound_slack,residual_median\n";
  for (double h : h_list) {
    const Mesh mesh = triangulate(domain, h);
    MinimizeOptions opts;
    opts.tol =
        cfg.contains("tol") ? cfg["tol"].get<double>() : 1e-8 * domain.area();
    auto [u, report] = continuation(m, mesh, eps_schedule, opts);
    double sup_err = 0.0;
    for (int v = 0; v < mesh.num_vertices(); ++v) {
      const double r = std::hypot(mesh.vertices[v].x, mesh.vertices[v].y);
      sup_err = std::max(sup_err,
                         std::abs(u.values[v] - oracle.value(std::min(
                                                    r, domain.disk_radius))));
    }
    const ResidualReport res =
        residual_field(m, mesh, u, ResidualForm::ab, delta);
    csv << fmt(mesh.h) << ',' << fmt(eps_schedule.back()) << ','
        << fmt(sup_err) << ',' << fmt(report.max_gradient_magnitude) << ','
        << fmt(M - report.max_gradient_magnitude) << ','
        << fmt(res.median_pde_active) << '\n';
  }
  const std::string out_path = cfg.value("out", "");
  if (out_path.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream(fs::path(config_path).parent_path() / out_path) << csv.str();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Degenerate convex energy minimization toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  int threads = 0;
  bool deterministic = false;
  app.add_option("--threads", threads, "OpenMP thread count (0 = default)");
  app.add_flag("--deterministic", deterministic,
               "force deterministic reductions (assembly is gather-ordered "
               "and reproducible regardless; this pins the report format)");

  std::string config_path, u_csv, pot_name = "eikonal", out_path, out_prefix;
  int N = 2, samples = 200;
  double R = 1.0, rho = 1.0, R_star = 2.0, H_star = 0.0, sigma_tilde = -1.0;
  std::vector<double> eps_list;

  auto* solve = app.add_subcommand("solve", "minimize J_eps on a mesh");
  solve->add_option("--config", config_path, "JSON config")->required();

  auto* oracle = app.add_subcommand("oracle", "exact radial solution");
  oracle->add_option("--potential", pot_name);
  oracle->add_option("--N", N);
  oracle->add_option("--R", R);
  oracle->add_option("--samples", samples);
  oracle->add_option("--out", out_prefix, "output file prefix");

  auto* bounds = app.add_subcommand("bounds", "a-priori bounds");
  bounds->add_option("--potential", pot_name);
  bounds->add_option("--N", N);
  bounds->add_option("--rho", rho);
  bounds->add_option("--Rstar", R_star);
  bounds->add_option("--Hstar", H_star);

  auto* reg = app.add_subcommand("regularize-table",
                                 "regularized family coefficients");
  reg->add_option("--potential", pot_name);
  reg->add_option("--eps-list", eps_list, "strictly decreasing")->required();
  reg->add_option("--sigma-tilde", sigma_tilde);
  reg->add_option("--out", out_path);

  auto* residual = app.add_subcommand("residual", "pointwise residual report");
  residual->add_option("--config", config_path)->required();
  residual->add_option("--u", u_csv, "u.csv from a solve run")->required();

  auto* study = app.add_subcommand("convergence-study",
                                   "h-sweep against the radial oracle");
  study->add_option("--config", config_path)->required();

  CLI11_PARSE(app, argc, argv);

#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#endif

  try {
    if (solve->parsed()) return cmd_solve(config_path);
    if (oracle->parsed()) return cmd_oracle(pot_name, N, R, samples, out_prefix);
    if (bounds->parsed()) return cmd_bounds(pot_name, N, rho, R_star, H_star);
    if (reg->parsed()) {
      return cmd_regularize_table(pot_name, eps_list, sigma_tilde, out_path);
    }
    if (residual->parsed()) return cmd_residual(config_path, u_csv);
    if (study->parsed()) return cmd_convergence_study(config_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  }
  return 0;
}
