// templev command-line front end: model validation, density tables,
// sampling, path simulation, and the benchmark harness comparing rejection
// sampling against the quantile-inversion baseline.
//
// Exit codes: 0 success, 1 validation failure, 2 numerical failure.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "templev/grid_io.hpp"
#include "templev/model_json.hpp"
#include "templev/sampler.hpp"
#include "templev/stats.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace templev;

namespace {

struct GlobalOpts {
  std::string model_path;
  std::uint64_t seed = 20240901;
  std::string out_dir = ".";
  int threads = 1;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

std::string iso_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&tt));
  return buf;
}

ModelSpec load_model(const GlobalOpts& g) {
  if (g.model_path.empty()) throw Error("--model is required for this command");
  std::ifstream in(g.model_path);
  if (!in) throw Error("cannot open model file " + g.model_path);
  json j;
  in >> j;
  return model_from_json(j);
}

std::ofstream open_out(const GlobalOpts& g, const std::string& name) {
  fs::create_directories(g.out_dir);
  const fs::path p = fs::path(g.out_dir) / name;
  std::ofstream out(p);
  if (!out) throw Error("cannot open output file " + p.string());
  return out;
}

void write_manifest(const GlobalOpts& g, const ModelSpec& spec, const std::string& command,
                    json extra) {
  json m;
  m["command"] = command;
  m["seed"] = g.seed;
  m["spec_hash"] = model_hash(spec);
  m["model"] = model_to_json(spec);
  m["created"] = iso_timestamp();
  m.update(extra);
  auto out = open_out(g, command + "_manifest.json");
  out << m.dump(2) << "\n";
}

// Grid cache keyed by model hash and t; rebuilt when absent.
DensityGrid grid_cached(const GlobalOpts& g, const ModelSpec& spec, bool tempered,
                        double t, int n_points = 512) {
  fs::create_directories(g.out_dir);
  char name[128];
  std::snprintf(name, sizeof(name), "grid_%s_%s_t%.6g_n%d.bin",
                tempered ? "tempered" : "stable", model_hash(spec).c_str(), t, n_points);
  const fs::path p = fs::path(g.out_dir) / name;
  if (fs::exists(p)) {
    try {
      DensityGrid grid = load_grid(p.string());
      if (grid.t == t && grid.model_hash == model_hash(spec)) return grid;
    } catch (const GridError&) {
      // fall through to rebuild
    }
  }
  const Exponent e = tempered ? tempered_exponent_auto(spec) : stable_exponent(spec.stable);
  GridSpec gs;
  gs.n_points = n_points;
  gs.threads = g.threads;
  DensityGrid grid = build_grid(e, t, gs);
  grid.model_hash = model_hash(spec);
  save_grid(grid, p.string());
  return grid;
}

// ---------------------------------------------------------------------- validate

int cmd_validate(const GlobalOpts& g, const std::vector<double>& z_probes) {
  const ModelSpec spec = load_model(g);
  const auto violations = validate(spec);
  for (const auto& v : violations)
    std::cout << "violation [" << v.code << "] " << v.message << "\n";
  if (!violations.empty()) return 1;

  std::cout << "valid, eta = " << fmt(eta(spec)) << "\n";
  std::cout << "sigma(+1) = " << fmt(spec.stable.sigma_plus)
            << ", sigma(-1) = " << fmt(spec.stable.sigma_minus) << "\n";

  const Exponent cs = stable_exponent(spec.stable);
  const Exponent ct = tempered_exponent(spec);
  auto table = open_out(g, "validate.csv");
  table << "z,C_re,C_im,Ctilde_re,Ctilde_im,rho_re,rho_im,defect\n";
  double worst = 0.0;
  for (double z : z_probes) {
    const auto c = cs(z);
    const auto c_t = ct(z);
    const auto rho = removed_jump_exponent(spec, z);
    const double defect = std::abs(c - c_t - rho);
    worst = std::max(worst, defect);
    table << fmt(z) << ',' << fmt(c.real()) << ',' << fmt(c.imag()) << ','
          << fmt(c_t.real()) << ',' << fmt(c_t.imag()) << ',' << fmt(rho.real()) << ','
          << fmt(rho.imag()) << ',' << fmt(defect) << "\n";
  }
  std::cout << "identity defect (max over probes) = " << fmt(worst) << "\n";
  return 0;
}

// ---------------------------------------------------------------------- pdf

int cmd_pdf(const GlobalOpts& g, double t, int n_points, double x_min, double x_max) {
  const ModelSpec spec = load_model(g);
  const auto violations = validate(spec);
  if (!violations.empty()) {
    for (const auto& v : violations)
      std::cerr << "violation [" << v.code << "] " << v.message << "\n";
    return 1;
  }
  const double eta_v = eta(spec);
  const Exponent cs = stable_exponent(spec.stable);
  const Exponent ct = tempered_exponent_auto(spec);
  GridSpec gs;
  gs.n_points = n_points;
  gs.threads = g.threads;
  if (!std::isnan(x_min)) gs.x_min = x_min;
  if (!std::isnan(x_max)) gs.x_max = x_max;
  const DensityGrid grid_s = build_grid(cs, t, gs);
  const DensityGrid grid_t = build_grid(ct, t, gs);

  auto out = open_out(g, "pdf.csv");
  out << "x,f_t,f_tilde_t,ratio,bound\n";
  const double bound = std::exp(t * eta_v);
  for (double x : grid_t.x) {
    const double f = grid_s.pdf_at(x);
    const double ft = grid_t.pdf_at(x);
    out << fmt(x) << ',' << fmt(f) << ',' << fmt(ft) << ','
        << fmt(f > 0 ? ft / f : 0.0) << ',' << fmt(bound) << "\n";
  }
  write_manifest(g, spec, "pdf",
                 json{{"t", t},
                      {"n_points", n_points},
                      {"grid_tolerance_stable", grid_s.tolerance_achieved},
                      {"grid_tolerance_tempered", grid_t.tolerance_achieved}});
  return 0;
}

// ---------------------------------------------------------------------- sample

int cmd_sample(const GlobalOpts& g, double t, std::size_t n, const std::string& method) {
  const ModelSpec spec = load_model(g);
  const auto violations = validate(spec);
  if (!violations.empty()) {
    for (const auto& v : violations)
      std::cerr << "violation [" << v.code << "] " << v.message << "\n";
    return 1;
  }
  SampleBatch batch;
  double precompute_time = 0.0, run_time = 0.0;
  if (method == "rejection") {
    const RejectionPlan plan = optimal_split(t, eta_or_throw(spec));
    double t0 = now_seconds();
    const DensityGrid gs = grid_cached(g, spec, false, plan.dt);
    const DensityGrid gt = grid_cached(g, spec, true, plan.dt);
    precompute_time = now_seconds() - t0;
    t0 = now_seconds();
    batch = sample_tempered_at_time(spec, t, n, g.seed, &gs, &gt);
    run_time = now_seconds() - t0;
  } else if (method == "inversion") {
    double t0 = now_seconds();
    const DensityGrid gt = grid_cached(g, spec, true, t);
    precompute_time = now_seconds() - t0;
    t0 = now_seconds();
    batch = inversion_sample(gt, n, g.seed);
    run_time = now_seconds() - t0;
  } else if (method == "tweedie") {
    const double t0 = now_seconds();
    batch = tweedie_sample_at_time(spec, t, n, g.seed);
    run_time = now_seconds() - t0;
  } else {
    throw Error("unknown method '" + method + "'");
  }

  auto out = open_out(g, "sample.csv");
  out << "index,value\n";
  for (std::size_t i = 0; i < batch.values.size(); ++i)
    out << i << ',' << fmt(batch.values[i]) << "\n";
  write_manifest(g, spec, "sample",
                 json{{"t", t},
                      {"n", n},
                      {"method", method},
                      {"proposals_used", batch.proposals_used},
                      {"accepted", batch.accepted},
                      {"wall_time_seconds", run_time},
                      {"precompute_seconds", precompute_time}});
  return 0;
}

// ---------------------------------------------------------------------- path

int cmd_path(const GlobalOpts& g, double dt, std::size_t n_steps) {
  const ModelSpec spec = load_model(g);
  const auto violations = validate(spec);
  if (!violations.empty()) {
    for (const auto& v : violations)
      std::cerr << "violation [" << v.code << "] " << v.message << "\n";
    return 1;
  }
  double t0 = now_seconds();
  const DensityGrid gs = grid_cached(g, spec, false, dt);
  const DensityGrid gt = grid_cached(g, spec, true, dt);
  const double precompute_time = now_seconds() - t0;
  t0 = now_seconds();
  const auto path = sample_path(spec, dt, n_steps, g.seed, &gs, &gt);
  const double run_time = now_seconds() - t0;

  auto out = open_out(g, "path.csv");
  out << "k,time,value\n";
  for (std::size_t k = 0; k < path.size(); ++k)
    out << (k + 1) << ',' << fmt((k + 1) * dt) << ',' << fmt(path[k]) << "\n";
  write_manifest(g, spec, "path",
                 json{{"dt", dt},
                      {"n_steps", n_steps},
                      {"wall_time_seconds", run_time},
                      {"precompute_seconds", precompute_time}});
  return 0;
}

// ---------------------------------------------------------------------- bench

struct BenchCell {
  double t = 1.0;
  ModelSpec spec;
  double alg1_time = 0.0, inv_time = 0.0;
  std::uint64_t iterations = 0;
  std::size_t alg1_obs = 0, inv_obs = 0;
  double precompute_time = 0.0;
};

void run_bench_cell(const GlobalOpts& g, BenchCell& cell, std::size_t observations,
                    std::uint64_t cell_seed) {
  const RejectionPlan plan = optimal_split(cell.t, eta_or_throw(cell.spec));
  double t0 = now_seconds();
  // heavy-tailed sweep corners need the finer resolution
  const DensityGrid gs_dt = grid_cached(g, cell.spec, false, plan.dt, 1024);
  const DensityGrid gt_dt = grid_cached(g, cell.spec, true, plan.dt, 1024);
  const DensityGrid gt_t = grid_cached(g, cell.spec, true, cell.t, 1024);
  cell.precompute_time = now_seconds() - t0;

  // sampling loops only; grids precomputed above
  t0 = now_seconds();
  const SampleBatch alg1 =
      sample_tempered_at_time(cell.spec, cell.t, observations, cell_seed, &gs_dt, &gt_dt);
  cell.alg1_time = now_seconds() - t0;
  cell.iterations = alg1.proposals_used;
  cell.alg1_obs = alg1.values.size();

  t0 = now_seconds();
  const SampleBatch inv = inversion_sample(gt_t, observations, cell_seed + 1);
  cell.inv_time = now_seconds() - t0;
  cell.inv_obs = inv.values.size();
}

int cmd_bench(const GlobalOpts& g, const std::vector<double>& t_list,
              const std::vector<double>& alpha_list, const std::vector<double>& ell_list,
              std::size_t observations, double scale) {
  const ModelSpec base = load_model(g);
  observations = std::max<std::size_t>(std::size_t(observations * scale), 10);

  // t sweep on the base model
  if (!t_list.empty()) {
    std::vector<BenchCell> cells;
    for (double t : t_list) {
      BenchCell c;
      c.t = t;
      c.spec = base;
      cells.push_back(c);
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
      Rng derive = Rng::substream(g.seed, i);
      run_bench_cell(g, cells[i], observations, derive.next_u64());
    }
    auto out = open_out(g, "bench_t.csv");
    out << "t,method,run_time,iterations,observations,ratio\n";
    for (const auto& c : cells) {
      const double ratio = c.inv_time > 0 ? c.alg1_time / c.inv_time : 0.0;
      out << fmt(c.t) << ",algorithm1," << fmt(c.alg1_time) << ',' << c.iterations << ','
          << c.alg1_obs << ',' << fmt(ratio) << "\n";
      out << fmt(c.t) << ",inversion," << fmt(c.inv_time) << ",," << c.inv_obs << ','
          << fmt(ratio) << "\n";
    }
  }

  // (alpha, ell) sweep at t = 1
  if (!alpha_list.empty() && !ell_list.empty()) {
    const auto* pl = std::get_if<PowerLawRosinski>(&base.tempering);
    if (!pl) throw Error("alpha/ell sweeps require a power_law_rosinski model");
    for (double a : alpha_list)
      if (a >= pl->p)
        throw Error("sweep pair alpha=" + std::to_string(a) +
                    " violates alpha < p for p=" + std::to_string(pl->p));
    auto out = open_out(g, "bench_alpha_ell.csv");
    out << "alpha,ell,method,run_time,iterations,observations,ratio\n";
    std::size_t idx = 1000;
    for (double a : alpha_list) {
      for (double l : ell_list) {
        PowerLawRosinski fam = *pl;
        fam.alpha = a;
        fam.ell = l;
        BenchCell c;
        c.t = 1.0;
        c.spec = make_model(fam, base.stable.b);
        Rng derive = Rng::substream(g.seed, idx++);
        run_bench_cell(g, c, observations, derive.next_u64());
        const double ratio = c.inv_time > 0 ? c.alg1_time / c.inv_time : 0.0;
        out << fmt(a) << ',' << fmt(l) << ",algorithm1," << fmt(c.alg1_time) << ','
            << c.iterations << ',' << c.alg1_obs << ',' << fmt(ratio) << "\n";
        out << fmt(a) << ',' << fmt(l) << ",inversion," << fmt(c.inv_time) << ",,"
            << c.inv_obs << ',' << fmt(ratio) << "\n";
      }
    }
  }
  write_manifest(g, base, "bench",
                 json{{"observations", observations}, {"scale", scale}});
  return 0;
}

// ---------------------------------------------------------------------- reproduce7

int cmd_reproduce7(const GlobalOpts& g, double scale) {
  const ModelSpec spec = make_model(PowerLawRosinski{0.75, 1.0, 1.0, 1.0});
  const double eta_v = eta(spec);
  const double s = spec.stable.sigma_plus;
  json summary;
  summary["s"] = s;
  summary["eta"] = eta_v;

  const DensityGrid gs1 = grid_cached(g, spec, false, 1.0);
  const DensityGrid gt1 = grid_cached(g, spec, true, 1.0);
  const RejectionContext ctx = make_rejection_context(spec, 1.0, &gs1, &gt1);

  const std::size_t proposals = std::max<std::size_t>(std::size_t(3000 * scale), 100);

  // fixed-proposal screen; the accepted values double as path increments
  Rng derive = Rng::substream(g.seed, 0);
  const SampleBatch screen = rejection_screen(ctx, proposals, derive.next_u64());
  summary["proposals_t1"] = screen.proposals_used;
  summary["accepted_t1"] = screen.accepted;

  // KDE of the accepted sample vs the smoothed tempered pdf, with the
  // replication envelope
  {
    std::vector<double> grid;
    for (int i = 0; i <= 240; ++i) grid.push_back(-1.2 + 2.4 * i / 240.0);
    const double h = 0.02463;
    const auto est = kde(screen.values, h, grid).density_estimates;
    const auto smooth = smooth_pdf(tempered_exponent_auto(spec), 1.0, h, grid);
    const auto env = kde_envelope(ctx, std::max<std::size_t>(std::size_t(100 * scale), 20),
                                  proposals, h, grid, g.seed + 1);
    auto out = open_out(g, "kde_tempered.csv");
    out << "x,estimate,smoothed_true,band_lo,band_hi\n";
    for (std::size_t i = 0; i < grid.size(); ++i)
      out << fmt(grid[i]) << ',' << fmt(est[i]) << ',' << fmt(smooth[i]) << ','
          << fmt(env.lo[i]) << ',' << fmt(env.hi[i]) << "\n";
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
      if (env.sd[i] > 0)
        worst = std::max(worst, std::fabs(est[i] - smooth[i]) / env.sd[i]);
    summary["kde_tempered_max_deviation_sigmas"] = worst;
  }

  // KDE of the stable proposals vs the smoothed stable pdf
  {
    const SampleBatch stable_props =
        sample_stable(spec.stable, 1.0, proposals, Rng::substream(g.seed, 2).next_u64());
    std::vector<double> grid;
    for (int i = 0; i <= 240; ++i) grid.push_back(-1.2 + 2.4 * i / 240.0);
    const double h = 0.006565;
    const auto est = kde(stable_props.values, h, grid).density_estimates;
    const auto smooth = smooth_pdf(stable_exponent(spec.stable), 1.0, h, grid);
    auto out = open_out(g, "kde_stable.csv");
    out << "x,estimate,smoothed_true,band_lo,band_hi\n";
    for (std::size_t i = 0; i < grid.size(); ++i)
      out << fmt(grid[i]) << ',' << fmt(est[i]) << ',' << fmt(smooth[i]) << ",,\n";
  }

  // tempered path from the accepted increments
  {
    auto out = open_out(g, "path.csv");
    out << "k,time,value\n";
    double sum = 0.0;
    for (std::size_t k = 0; k < screen.values.size(); ++k) {
      sum += screen.values[k];
      out << (k + 1) << ',' << fmt(double(k + 1)) << ',' << fmt(sum) << "\n";
    }
  }

  // 500-replication acceptance-count experiment
  {
    const std::size_t reps = std::max<std::size_t>(std::size_t(500 * scale), 50);
    const auto acc = acceptance_summary(reps, proposals, ctx, g.seed + 3);
    auto out = open_out(g, "acceptance_counts.csv");
    out << "replication,accepted\n";
    for (std::size_t r = 0; r < acc.counts.size(); ++r)
      out << r << ',' << acc.counts[r] << "\n";
    summary["acceptance"] = {{"replications", reps},
                             {"proposals", proposals},
                             {"mean", acc.mean},
                             {"sd", acc.sd},
                             {"min", acc.min},
                             {"max", acc.max},
                             {"theoretical_mean", proposals * std::exp(-eta_v)},
                             {"binomial_sd",
                              std::sqrt(proposals * std::exp(-eta_v) *
                                        (1.0 - std::exp(-eta_v)))}};
  }

  // t = 10 aggregation: screen 30000 proposals at dt = 1, sum in tens
  {
    const std::size_t props10 = std::max<std::size_t>(std::size_t(30000 * scale), 1000);
    const SampleBatch screen10 =
        rejection_screen(ctx, props10, Rng::substream(g.seed, 4).next_u64());
    const std::size_t n_sums = screen10.values.size() / 10;
    std::vector<double> sums(n_sums, 0.0);
    for (std::size_t i = 0; i < n_sums * 10; ++i) sums[i / 10] += screen10.values[i];
    summary["t10"] = {{"proposals", props10},
                      {"accepted", screen10.accepted},
                      {"sums", n_sums}};
    const DensityGrid gt10 = grid_cached(g, spec, true, 10.0);
    const double h10 = 0.1863;
    std::vector<double> grid;
    for (int i = 0; i <= 240; ++i) grid.push_back(-8.0 + 16.0 * i / 240.0);
    const auto est = kde(sums, h10, grid).density_estimates;
    const auto smooth = smooth_pdf(tempered_exponent_auto(spec), 10.0, h10, grid);
    auto out = open_out(g, "kde_t10.csv");
    out << "x,estimate,smoothed_true,band_lo,band_hi\n";
    for (std::size_t i = 0; i < grid.size(); ++i)
      out << fmt(grid[i]) << ',' << fmt(est[i]) << ',' << fmt(smooth[i]) << ",,\n";
    if (!sums.empty()) {
      const auto ks10 =
          ks_statistic(sums, [&](double x) { return gt10.cdf_at(x); });
      summary["t10"]["ks"] = ks10.d;
      summary["t10"]["ks_critical_1pct"] = ks10.critical_1pct;
    }
  }

  // distributional check of the t = 1 rejection sample
  {
    const auto ks1 = ks_statistic(screen.values,
                                  [&](double x) { return gt1.cdf_at(x); });
    summary["t1_ks"] = ks1.d;
    summary["t1_ks_critical_1pct"] = ks1.critical_1pct;
  }

  auto out = open_out(g, "summary.json");
  out << summary.dump(2) << "\n";
  std::cout << summary.dump(2) << "\n";
  write_manifest(g, spec, "reproduce7", json{{"scale", scale}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tempered Levy process simulation by rejection sampling"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--model", g.model_path, "model spec JSON file")->envname("TEMPLEV_MODEL");
  app.add_option("--seed", g.seed, "master RNG seed");
  app.add_option("--out", g.out_dir, "output directory");
  app.add_option("--threads", g.threads, "worker threads for sweeps");

  auto* validate_cmd = app.add_subcommand("validate", "check assumptions and identities");
  std::vector<double> z_probes{0.5, 1.0, 2.0, 5.0};
  validate_cmd->add_option("--z-probes", z_probes, "probe frequencies for the identity");

  auto* pdf_cmd = app.add_subcommand("pdf", "density table for plotting");
  double pdf_t = 1.0;
  int pdf_n = 512;
  double pdf_xmin = std::numeric_limits<double>::quiet_NaN();
  double pdf_xmax = std::numeric_limits<double>::quiet_NaN();
  pdf_cmd->add_option("--t", pdf_t, "time horizon");
  pdf_cmd->add_option("--n-points", pdf_n, "grid resolution");
  pdf_cmd->add_option("--x-min", pdf_xmin, "grid lower bound");
  pdf_cmd->add_option("--x-max", pdf_xmax, "grid upper bound");

  auto* sample_cmd = app.add_subcommand("sample", "draw from the tempered law");
  double sample_t = 1.0;
  std::size_t sample_n = 1000;
  std::string method = "rejection";
  sample_cmd->add_option("--t", sample_t, "time horizon");
  sample_cmd->add_option("--n", sample_n, "observations");
  sample_cmd->add_option("--method", method, "rejection | inversion | tweedie")
      ->check(CLI::IsMember({"rejection", "inversion", "tweedie"}));

  auto* path_cmd = app.add_subcommand("path", "simulate the tempered process on a mesh");
  double path_dt = 1.0;
  std::size_t path_steps = 1000;
  path_cmd->add_option("--dt", path_dt, "mesh spacing");
  path_cmd->add_option("--n-steps", path_steps, "mesh points");

  auto* bench_cmd = app.add_subcommand("bench", "rejection vs inversion comparison");
  std::vector<double> t_list{1.0, 2.0, 5.0, 10.0, 20.0};
  std::vector<double> alpha_list, ell_list;
  std::size_t observations = 1000;
  double bench_scale = 1.0;
  bench_cmd->add_option("--t-list", t_list, "time horizons for the t sweep");
  bench_cmd->add_option("--alpha-list", alpha_list, "alpha values for the pair sweep");
  bench_cmd->add_option("--ell-list", ell_list, "ell values for the pair sweep");
  bench_cmd->add_option("--observations", observations, "target observations per cell");
  bench_cmd->add_option("--scale", bench_scale, "shrink factor for CI runs");

  auto* repro_cmd = app.add_subcommand("reproduce7", "fixed-seed reproduction pipeline");
  double repro_scale = 1.0;
  repro_cmd->add_option("--scale", repro_scale, "shrink factor for CI runs");

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate_cmd->parsed()) return cmd_validate(g, z_probes);
    if (pdf_cmd->parsed()) return cmd_pdf(g, pdf_t, pdf_n, pdf_xmin, pdf_xmax);
    if (sample_cmd->parsed()) return cmd_sample(g, sample_t, sample_n, method);
    if (path_cmd->parsed()) return cmd_path(g, path_dt, path_steps);
    if (bench_cmd->parsed())
      return cmd_bench(g, t_list, alpha_list, ell_list, observations, bench_scale);
    if (repro_cmd->parsed()) return cmd_reproduce7(g, repro_scale);
  } catch (const DivergentEta& e) {
    std::cerr << "validation failure: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
