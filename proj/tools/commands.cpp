// SPDX-FileCopyrightText: 2026 The cellperm authors
// SPDX-License-Identifier: Apache-2.0
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "cellperm/simd.hpp"
#include "cellperm/spectral.hpp"
#include "cli.hpp"

namespace cellperm::cli {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "0.1.0";

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

/// Runs f(0..n-1) on up to `threads` workers; rethrows the first failure.
void parallel_for(int n, int threads, const std::function<void(int)>& f) {
  if (threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex m;
  auto worker = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(m);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < std::min(threads, n); ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

Json complex_json(cplx c) { return Json::array({c.real(), c.imag()}); }

Json tensor_json(const std::array<std::array<cplx, 2>, 2>& k) {
  Json out = Json::array();
  for (const auto& row : k) out.push_back(Json::array({complex_json(row[0]), complex_json(row[1])}));
  return out;
}

Json matrix_json(const Matrix2& m) {
  return Json::array({Json::array({m[0][0], m[0][1]}), Json::array({m[1][0], m[1][1]})});
}

Json geometry_json(const GeometryConfig& g) {
  return Json{{"inclusion_lo", Json::array({g.inclusion_lo.x, g.inclusion_lo.y})},
              {"inclusion_hi", Json::array({g.inclusion_hi.x, g.inclusion_hi.y})}};
}

Json config_json(const RunConfig& cfg) {
  Json settings = Json::object();
  for (const auto& [k, v] : cfg.assignments) settings[k] = v;
  Json levels = Json::array();
  for (int l : cfg.levels) levels.push_back(l);
  Json zs = Json::array();
  for (cplx z : cfg.z) zs.push_back(complex_json(z));
  return Json{{"settings", settings},
              {"case", to_string(cfg.kind)},
              {"levels", levels},
              {"z", zs},
              {"mu1", cfg.mu1},
              {"geometry", geometry_json(cfg.geometry)},
              {"residual_tol", cfg.residual_tol}};
}

std::string csv_complex_cell(std::optional<cplx> z, bool imag) {
  if (!z) return "";
  return fmt_g9(imag ? z->imag() : z->real());
}

/// Reads, updates and rewrites the manifest in the output directory.
class Manifest {
 public:
  Manifest(fs::path dir, bool deterministic) : path_(std::move(dir) / "manifest.json"), det_(deterministic) {
    std::ifstream in(path_);
    if (in) {
      try {
        data_ = Json::parse(in);
      } catch (const std::exception&) {
        data_ = Json::object();
      }
    }
    if (!data_.is_object()) data_ = Json::object();
    data_["tool"] = "cellperm";
    data_["version"] = kVersion;
    data_["kernels"] = simd::to_string(simd::active_isa());
    if (!data_.contains("commands")) data_["commands"] = Json::object();
    if (!data_.contains("runs")) data_["runs"] = Json::object();
  }

  Json& command(const std::string& name) { return data_["commands"][name]; }
  Json& run(const std::string& id) { return data_["runs"][id]; }
  void timing(Json& target, double secs) const {
    if (!det_) target["seconds"] = secs;
  }
  void write() const {
    std::ofstream out(path_);
    out << data_.dump(2) << "\n";
    if (!out) throw std::runtime_error("cannot write " + path_.string());
  }

 private:
  fs::path path_;
  bool det_;
  Json data_;
};

struct CsvFile {
  CsvFile(const fs::path& path, const std::string& header) : path_(path), out_(path) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
    out_ << header << "\n";
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << "\n";
    ++rows_;
  }
  void done(std::ostream& log) {
    out_.flush();
    if (!out_) throw std::runtime_error("cannot write " + path_.string());
    log << "wrote " << path_.string() << " (" << rows_ << " rows)\n";
  }

 private:
  fs::path path_;
  std::ofstream out_;
  int rows_ = 0;
};

struct Context {
  const RunConfig& cfg;
  std::ostream& out;
  std::ostream& err;
  fs::path dir;
  CellProblems problems;
  Manifest manifest;

  Context(const RunConfig& c, std::ostream& o, std::ostream& e)
      : cfg(c), out(o), err(e), dir(resolve_output_dir(c)),
        problems(ProblemSettings{c.geometry, c.mu1, c.residual_tol}),
        manifest((fs::create_directories(dir), dir), c.deterministic) {}
};

struct Job {
  int level;
  std::optional<cplx> z;
};

std::vector<Job> cell_jobs(const RunConfig& cfg, std::ostream& err) {
  std::vector<Job> jobs;
  if (cfg.kind == CaseKind::TwoFluid) {
    if (cfg.z.empty()) throw ConfigError("run.z", "two_fluid needs at least one viscosity ratio");
    for (int l : cfg.levels)
      for (cplx z : cfg.z) jobs.push_back({l, z});
  } else {
    if (!cfg.z.empty())
      err << "warning: run.z is ignored for case " << to_string(cfg.kind) << "\n";
    for (int l : cfg.levels) jobs.push_back({l, std::nullopt});
  }
  return jobs;
}

double symmetry_defect(const PermeabilityTensor& t) {
  const double scale = std::max(std::abs(t.k[0][0]), 1e-300);
  return std::max({std::abs(t.k[0][1]), std::abs(t.k[1][0]), std::abs(t.k[0][0] - t.k[1][1])}) /
         scale;
}

Json run_json(const Context& ctx, const Job& job, const CellPair& pair) {
  Json r{{"case", to_string(ctx.cfg.kind)},
         {"level", job.level},
         {"z", job.z ? complex_json(*job.z) : Json(nullptr)},
         {"mu1", ctx.cfg.mu1},
         {"geometry", geometry_json(ctx.cfg.geometry)},
         {"dofs", pair.sol[0].space().size()},
         {"residual", std::max(pair.sol[0].residual, pair.sol[1].residual)},
         {"pivot_growth", pair.report.pivot_growth},
         {"backend", pair.report.backend}};
  return r;
}

// ---------------------------------------------------------------------------

int cmd_solve(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const std::vector<Job> jobs = cell_jobs(cfg, ctx.err);
  struct Result {
    std::vector<PermeabilityTensor> tensors;
    std::optional<std::array<cplx, 2>> with_inner;
    Json run;
    double secs = 0.0;
  };
  std::vector<Result> results(jobs.size());
  parallel_for(static_cast<int>(jobs.size()), cfg.threads, [&](int i) {
    const auto t0 = Clock::now();
    const Job& job = jobs[i];
    const CellPair pair = solve_pair(ctx.problems, cfg.kind, job.level, job.z);
    Result& res = results[i];
    for (Method m : cfg.methods) res.tensors.push_back(permeability(pair, m));
    res.run = run_json(ctx, job, pair);
    if (cfg.kind == CaseKind::Bubble && cfg.bubble_inner) {
      const InnerRecovery rec = bubble_inner_recovery(ctx.problems, pair.sol[0]);
      res.with_inner = std::array<cplx, 2>{rec.outer_average[0] + rec.inner_average[0],
                                           rec.outer_average[1] + rec.inner_average[1]};
      res.run["inner_recovery"] =
          Json{{"inner_average", Json::array({complex_json(rec.inner_average[0]),
                                              complex_json(rec.inner_average[1])})},
               {"inner_energy", rec.inner_energy}};
    }
    res.secs = seconds_since(t0);
  });

  CsvFile csv(ctx.dir / "permeability.csv", "level,case,z_re,z_im,k11,k12,k21,k22,method,residual");
  Json runs = Json::array();
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const Job& job = jobs[i];
    Result& res = results[i];
    const std::string id = run_id(cfg.kind, job.level, job.z);
    Json tensors = Json::object();
    double defect = 0.0;
    for (const PermeabilityTensor& t : res.tensors) {
      csv.row({std::to_string(job.level), to_string(cfg.kind), csv_complex_cell(job.z, false),
               csv_complex_cell(job.z, true), fmt_g9(t.k[0][0].real()), fmt_g9(t.k[0][1].real()),
               fmt_g9(t.k[1][0].real()), fmt_g9(t.k[1][1].real()), to_string(t.method),
               fmt_g9(t.residual)});
      tensors[to_string(t.method)] = tensor_json(t.k);
      defect = std::max(defect, symmetry_defect(t));
    }
    if (res.with_inner) {
      csv.row({std::to_string(job.level), to_string(cfg.kind), "", "",
               fmt_g9((*res.with_inner)[0].real()), "", "", "", "velocity_avg_with_inner",
               fmt_g9(res.tensors.empty() ? 0.0 : res.tensors[0].residual)});
      tensors["k11_with_inner"] = complex_json((*res.with_inner)[0]);
    }
    res.run["tensors"] = tensors;
    res.run["symmetry_defect"] = defect;
    if (defect > 1e-8) ctx.err << "warning: " << id << " symmetry defect " << defect << "\n";
    ctx.manifest.timing(res.run, res.secs);
    ctx.manifest.run(id) = res.run;
    runs.push_back(id);
  }
  csv.done(ctx.out);
  Json& c = ctx.manifest.command("solve");
  c = Json{{"config", config_json(cfg)}, {"runs", runs}, {"csv", "permeability.csv"}};
  ctx.manifest.write();
  return kOk;
}

int cmd_energy(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const std::vector<Job> jobs = cell_jobs(cfg, ctx.err);
  struct Result {
    PermeabilityTensor avg, energy;
    double e_incl = 0.0, e_host = 0.0;
    Json run;
    double secs = 0.0;
  };
  std::vector<Result> results(jobs.size());
  parallel_for(static_cast<int>(jobs.size()), cfg.threads, [&](int i) {
    const auto t0 = Clock::now();
    const CellPair pair = solve_pair(ctx.problems, cfg.kind, jobs[i].level, jobs[i].z);
    Result& r = results[i];
    r.avg = permeability(pair, Method::VelocityAvg);
    r.energy = permeability(pair, Method::Energy);
    r.e_incl = region_energy(pair.sol[0], Region::Inclusion, pair.visc);
    r.e_host = region_energy(pair.sol[0], Region::Host, pair.visc);
    r.run = run_json(ctx, jobs[i], pair);
    r.secs = seconds_since(t0);
  });

  CsvFile csv(ctx.dir / "energy.csv", "level,z_re,z_im,k11_avg,k11_energy,E_Q2,E_ratio");
  Json runs = Json::array();
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    Result& r = results[i];
    const double total = r.e_incl + r.e_host;
    const double ratio = total > 0.0 ? r.e_incl / total : 0.0;
    csv.row({std::to_string(jobs[i].level), csv_complex_cell(jobs[i].z, false),
             csv_complex_cell(jobs[i].z, true), fmt_fortran(r.avg.k[0][0].real()),
             fmt_fortran(r.energy.k[0][0].real()), fmt_fortran(r.e_incl), fmt_fortran(ratio)});
    const std::string id = run_id(cfg.kind, jobs[i].level, jobs[i].z);
    r.run["tensors"] = Json{{"velocity_avg", tensor_json(r.avg.k)}, {"energy", tensor_json(r.energy.k)}};
    r.run["energies"] = Json{{"inclusion", r.e_incl}, {"host", r.e_host}, {"ratio", ratio}};
    r.run["symmetry_defect"] = std::max(symmetry_defect(r.avg), symmetry_defect(r.energy));
    ctx.manifest.timing(r.run, r.secs);
    ctx.manifest.run(id) = r.run;
    runs.push_back(id);
  }
  csv.done(ctx.out);
  ctx.manifest.command("energy") = Json{{"config", config_json(cfg)}, {"runs", runs}, {"csv", "energy.csv"}};
  ctx.manifest.write();
  return kOk;
}

struct SpectralLevel {
  std::unique_ptr<OperatorContext> op;
  PowerResult norm;
};

SpectralLevel spectral_level(Context& ctx, int level) {
  SpectralLevel s;
  s.op = std::make_unique<OperatorContext>(ctx.problems, level);
  s.norm = gamma_norm(*s.op, ctx.cfg.power_tol, ctx.cfg.power_max_iters);
  if (!s.norm.converged)
    ctx.err << "warning: power iteration stopped after " << s.norm.iterations
            << " iterations (relative change " << s.norm.last_change << ")\n";
  return s;
}

Json power_json(const PowerResult& p) {
  return Json{{"value", p.value}, {"iterations", p.iterations}, {"converged", p.converged},
              {"last_change", p.last_change}};
}

int cmd_moments(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  Json levels = Json::object();
  for (int level : cfg.levels) {
    SpectralLevel sl = spectral_level(ctx, level);
    const MomentSequence mom = moments(*sl.op, std::max(cfg.max_order, 1));
    CsvFile csv(ctx.dir / ("moments_L" + std::to_string(level) + ".csv"),
                "m,lambda_11,lambda_12,lambda_22");
    Json lam = Json::array();
    for (int m = 0; m <= cfg.max_order; ++m) {
      const Matrix2& l = mom.lambda[m];
      csv.row({std::to_string(m), fmt_g9(l[0][0]), fmt_g9(l[0][1]), fmt_g9(l[1][1])});
      lam.push_back(matrix_json(l));
    }
    csv.done(ctx.out);
    const MomentRelation rel = moment_relation_check(ctx.problems, *sl.op, mom);
    if (!rel.mu0_psd)
      ctx.err << "warning: level " << level << " mu0 has eigenvalue " << rel.mu0_eigenvalues[0] << "\n";
    levels["L" + std::to_string(level)] = Json{
        {"gamma_norm", power_json(sl.norm)},
        {"lambda", lam},
        {"relation",
         Json{{"k_one", matrix_json(rel.k_one)},
              {"k_darcy", matrix_json(rel.k_darcy)},
              {"mu0", matrix_json(rel.mu0)},
              {"mu0_eigenvalues", Json::array({rel.mu0_eigenvalues[0], rel.mu0_eigenvalues[1]})},
              {"mu0_psd", rel.mu0_psd},
              {"lambda0_mismatch", rel.lambda0_mismatch},
              {"lambda1_explicit", matrix_json(rel.lambda1_explicit)},
              {"lambda1_mismatch", rel.lambda1_mismatch},
              {"max_asymmetry", rel.max_asymmetry},
              {"min_moment_eigenvalue", rel.min_moment_eigenvalue}}}};
  }
  ctx.manifest.command("moments") = Json{{"config", config_json(cfg)}, {"max_order", cfg.max_order}, {"levels", levels}};
  ctx.manifest.write();
  return kOk;
}

int cmd_series(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  if (cfg.s.empty()) throw ConfigError("spectral.s", "series needs at least one contrast value s");
  Json levels = Json::object();
  for (int level : cfg.levels) {
    SpectralLevel sl = spectral_level(ctx, level);
    for (cplx s : cfg.s)
      if (!(std::abs(s) > sl.norm.value)) {
        std::ostringstream msg;
        msg << "|s| = " << std::abs(s) << " does not exceed the operator norm " << sl.norm.value
            << " at level " << level;
        throw NonConvergentSeries(msg.str());
      }
    const MomentSequence mom = moments(*sl.op, cfg.max_order);
    CsvFile csv(ctx.dir / ("series_L" + std::to_string(level) + ".csv"),
                "s_re,s_im,M,k11_series,k11_direct,abs_err");
    Json rows = Json::array();
    for (cplx s : cfg.s) {
      const SeriesEstimate est = series_K(mom, s, cfg.max_order, sl.norm.value);
      const PermeabilityTensor direct =
          permeability(solve_pair(ctx.problems, CaseKind::TwoFluid, level, z_from_s(s)), Method::VelocityAvg);
      const double err = std::abs(est.k[0][0] - direct.k[0][0]);
      csv.row({fmt_g9(s.real()), fmt_g9(s.imag()), std::to_string(cfg.max_order),
               fmt_g9(est.k[0][0].real()), fmt_g9(direct.k[0][0].real()), fmt_g9(err)});
      rows.push_back(Json{{"s", complex_json(s)},
                          {"z", complex_json(z_from_s(s))},
                          {"series", tensor_json(est.k)},
                          {"direct", tensor_json(direct.k)},
                          {"abs_err", err},
                          {"observed_ratio", est.observed_ratio},
                          {"truncation_bound", est.truncation_bound}});
    }
    csv.done(ctx.out);
    levels["L" + std::to_string(level)] = Json{{"gamma_norm", power_json(sl.norm)}, {"rows", rows}};
  }
  ctx.manifest.command("series") = Json{{"config", config_json(cfg)}, {"max_order", cfg.max_order}, {"levels", levels}};
  ctx.manifest.write();
  return kOk;
}

int cmd_asymptotics(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const bool large = cfg.expansion == "large_z";
  Json levels = Json::object();
  for (int level : cfg.levels) {
    const SeriesLedger led = large ? large_z_iteration(ctx.problems, level, cfg.kmax)
                                   : small_z_iteration(ctx.problems, level, cfg.kmax);
    const std::string tag = cfg.expansion + "_L" + std::to_string(level);
    CsvFile csv(ctx.dir / ("ledger_" + tag + ".csv"), "k,norm_in,norm_out,ratio");
    Json terms = Json::array();
    double prev = 0.0;
    for (const SeriesTerm& t : led.terms) {
      const double norm = std::hypot(t.norm_in, t.norm_out);
      const std::string ratio = t.k > 0 && prev > 0.0 ? fmt_g9(norm / prev) : "";
      csv.row({std::to_string(t.k), fmt_g9(t.norm_in), fmt_g9(t.norm_out), ratio});
      terms.push_back(Json{{"k", t.k}, {"norm_in", t.norm_in}, {"norm_out", t.norm_out}});
      prev = norm;
    }
    csv.done(ctx.out);
    Json evals = Json::array();
    if (!cfg.z.empty()) {
      CsvFile ev(ctx.dir / ("asymptotics_" + tag + ".csv"),
                 "z_re,z_im,kmax,k11_partial,k11_direct,abs_err,tail_bound");
      for (cplx z : cfg.z) {
        const auto partial = led.partial_sum(z);
        const PermeabilityTensor direct =
            permeability(solve_pair(ctx.problems, CaseKind::TwoFluid, level, z), Method::VelocityAvg);
        const double err = std::abs(partial[0][0] - direct.k[0][0]);
        const double tail = led.tail_bound(z);
        ev.row({fmt_g9(z.real()), fmt_g9(z.imag()), std::to_string(cfg.kmax),
                fmt_g9(partial[0][0].real()), fmt_g9(direct.k[0][0].real()), fmt_g9(err), fmt_g9(tail)});
        evals.push_back(Json{{"z", complex_json(z)},
                             {"partial", tensor_json(partial)},
                             {"direct", tensor_json(direct.k)},
                             {"abs_err", err},
                             {"tail_bound", std::isfinite(tail) ? Json(tail) : Json(nullptr)}});
      }
      ev.done(ctx.out);
    }
    levels["L" + std::to_string(level)] =
        Json{{"terms", terms},
             {"ratio", std::isfinite(led.ratio) ? Json(led.ratio) : Json(nullptr)},
             {"radius", std::isfinite(led.radius) ? Json(led.radius) : Json(nullptr)},
             {"evaluations", evals}};
  }
  ctx.manifest.command("asymptotics") = Json{{"config", config_json(cfg)},
                                            {"expansion", cfg.expansion},
                                            {"kmax", cfg.kmax},
                                            {"levels", levels}};
  ctx.manifest.write();
  return kOk;
}

std::string point_region(const GeometryConfig& g, Point2 p) {
  constexpr double eps = 1e-12;
  const bool in_x = p.x > g.inclusion_lo.x - eps && p.x < g.inclusion_hi.x + eps;
  const bool in_y = p.y > g.inclusion_lo.y - eps && p.y < g.inclusion_hi.y + eps;
  if (!in_x || !in_y) return "host";
  const bool edge = std::abs(p.x - g.inclusion_lo.x) < eps || std::abs(p.x - g.inclusion_hi.x) < eps ||
                    std::abs(p.y - g.inclusion_lo.y) < eps || std::abs(p.y - g.inclusion_hi.y) < eps;
  return edge ? "interface" : "inclusion";
}

int cmd_export_field(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  if (cfg.run_id.empty()) throw ConfigError("export.run_id", "no run id given");
  const fs::path mpath = ctx.dir / "manifest.json";
  Json manifest;
  {
    std::ifstream in(mpath);
    if (!in) throw UnknownRun("no manifest at " + mpath.string());
    manifest = Json::parse(in);
  }
  if (!manifest.contains("runs") || !manifest["runs"].contains(cfg.run_id))
    throw UnknownRun("run '" + cfg.run_id + "' is not in " + mpath.string());
  const Json& run = manifest["runs"][cfg.run_id];
  GeometryConfig geom;
  geom.inclusion_lo = {run["geometry"]["inclusion_lo"][0].get<double>(),
                       run["geometry"]["inclusion_lo"][1].get<double>()};
  geom.inclusion_hi = {run["geometry"]["inclusion_hi"][0].get<double>(),
                       run["geometry"]["inclusion_hi"][1].get<double>()};
  const CaseKind kind = parse_case(run["case"].get<std::string>());
  const int level = run["level"].get<int>();
  std::optional<cplx> z;
  if (!run["z"].is_null()) z = cplx(run["z"][0].get<double>(), run["z"][1].get<double>());

  CellProblems problems(ProblemSettings{geom, run["mu1"].get<double>(), cfg.residual_tol});
  const CellPair pair = solve_pair(problems, kind, level, z);
  const CellSolution& sol = pair.sol[cfg.direction - 1];

  const std::string file = "field_" + cfg.run_id + "_e" + std::to_string(cfg.direction) + ".csv";
  CsvFile csv(ctx.dir / file, "x,y,u1_re,u1_im,u2_re,u2_im,p_re,p_im,region,strain");
  const int m = cfg.samples;
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      const Point2 p{static_cast<double>(i) / (m - 1), static_cast<double>(j) / (m - 1)};
      const PointValue v = evaluate(sol, p);
      double strain = 0.0;
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d) strain += std::norm(0.5 * (v.grad[c][d] + v.grad[d][c]));
      csv.row({fmt_g9(p.x), fmt_g9(p.y), fmt_g9(v.u[0].real()), fmt_g9(v.u[0].imag()),
               fmt_g9(v.u[1].real()), fmt_g9(v.u[1].imag()), fmt_g9(v.p.real()), fmt_g9(v.p.imag()),
               point_region(geom, p), fmt_g9(std::sqrt(strain))});
    }
  }
  csv.done(ctx.out);
  ctx.manifest.command("export-field") =
      Json{{"run_id", cfg.run_id}, {"direction", cfg.direction}, {"samples", m}, {"csv", file}};
  ctx.manifest.write();
  return kOk;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"solve", "energy", "moments", "series", "asymptotics",
                                              "export-field"};
  return names;
}

int run_command(const std::string& command, const RunConfig& cfg, std::ostream& out,
                std::ostream& err) {
  try {
    Context ctx(cfg, out, err);
    if (command == "solve") return cmd_solve(ctx);
    if (command == "energy") return cmd_energy(ctx);
    if (command == "moments") return cmd_moments(ctx);
    if (command == "series") return cmd_series(ctx);
    if (command == "asymptotics") return cmd_asymptotics(ctx);
    if (command == "export-field") return cmd_export_field(ctx);
    err << "error: unknown command '" << command << "'\n";
    return kConfigError;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const UnresolvableGeometry& e) {
    err << "config error: geometry: " << e.what() << "\n";
    return kConfigError;
  } catch (const SingularSystem& e) {
    err << "solver failure: " << e.what() << "\n";
    return kSolverFailure;
  } catch (const NonConvergentSeries& e) {
    err << "non-convergent series: " << e.what() << "\n";
    return kNonConvergent;
  } catch (const UnknownRun& e) {
    err << "unknown run: " << e.what() << "\n";
    return kUnknownRun;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInternal;
  }
}

}  // namespace cellperm::cli
