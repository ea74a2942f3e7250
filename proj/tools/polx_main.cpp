// polx: command-line driver for the transport library.
#include <omp.h>

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <json.hpp>

#include "polx/config.hpp"
#include "polx/geometry.hpp"
#include "polx/hflimit.hpp"
#include "polx/kernel.hpp"
#include "polx/mcoracle.hpp"
#include "polx/output.hpp"
#include "polx/rtbridge.hpp"
#include "polx/source.hpp"
#include "polx/transport.hpp"

using namespace polx;
using json = nlohmann::ordered_json;

namespace {

struct Context {
  RunConfig cfg;
  std::string out;
  std::string path(const std::string& name) const {
    return (std::filesystem::path(out) / name).string();
  }
};

// Raised when a verification check fails; the report is already written.
struct CheckFailed {};

json base_report(const Context& c, const std::string& cmd) {
  json j;
  j["command"] = cmd;
  j["config"] = json::parse(c.cfg.to_json());
  return j;
}

void write_report(const Context& c, const std::string& name, const json& j) {
  write_text(c.path(name), j.dump(2) + "\n");
}

KernelQuadrature kernel_quad(const RunConfig& cfg) {
  KernelQuadrature q;
  q.n_phi = cfg.kernel.n_phi;
  q.n_window = cfg.kernel.n_window;
  q.n_middle = cfg.kernel.n_middle;
  q.n_outer = cfg.kernel.n_outer;
  q.radius = cfg.kernel.radius;
  return q;
}

std::shared_ptr<const DirectionGrid> make_grid(const RunConfig& cfg) {
  if (cfg.grid.layout == "polar")
    return std::make_shared<const DirectionGrid>(
        DirectionGrid::polar(cfg.grid.n_radial, cfg.grid.n_angular, cfg.grid.kappa_max));
  return std::make_shared<const DirectionGrid>(
      DirectionGrid::cartesian(cfg.grid.spacing, cfg.grid.kappa_max));
}

ScatteringKernelField kernel_field(const SpectralMedium& m, const RunConfig& cfg,
                                   std::shared_ptr<const DirectionGrid> grid) {
  KernelFieldOptions o;
  o.quad = kernel_quad(cfg);
  const bool iso = m.model() != MediumModel::Tabulated;
  o.reuse_rings = iso && grid->layout == GridLayout::PolarIsotropic;
  o.radial_table = iso && grid->layout != GridLayout::PolarIsotropic ? 64 : 0;
  return assemble_kernel_field(m, grid, o);
}

size_t innermost(const DirectionGrid& g) {
  size_t best = 0;
  for (size_t i = 1; i < g.size(); ++i)
    if (g.nodes[i].norm() < g.nodes[best].norm()) best = i;
  return best;
}

int cmd_kernel(const Context& c) {
  const SpectralMedium m = c.cfg.make_medium();
  auto grid = make_grid(c.cfg);
  const ScatteringKernelField kf = kernel_field(m, c.cfg, grid);
  CsvWriter csv(c.path("kernel.csv"),
                {"kappa_r", "kappa_theta", "ReQ11", "ImQ11", "ReQ12", "ImQ12", "ReQ22",
                 "ImQ22", "lambda1", "lambda2", "mfp_tm", "mfp_te"});
  double sym = 0.0, min_l2 = 1e300;
  for (size_t i = 0; i < kf.size(); ++i) {
    const Mat2c& Q = kf.Q[i];
    csv << grid->radius(i) << grid->angle(i) << Q(0, 0).real() << Q(0, 0).imag()
        << Q(0, 1).real() << Q(0, 1).imag() << Q(1, 1).real() << Q(1, 1).imag()
        << kf.lambda1[i] << kf.lambda2[i] << kf.mfp_tm[i] << kf.mfp_te[i];
    csv.end_row();
    sym = std::max(sym, std::abs(Q(0, 1) - Q(1, 0)) / Q.norm());
    min_l2 = std::min(min_l2, kf.lambda2[i]);
  }
  json j = base_report(c, "kernel");
  j["nodes"] = kf.size();
  j["symmetry_residual"] = sym;
  j["min_lambda2"] = min_l2;
  const size_t i0 = innermost(*grid);
  j["innermost"] = {{"kappa_r", grid->radius(i0)}, {"mfp_tm", kf.mfp_tm[i0]},
                    {"mfp_te", kf.mfp_te[i0]}};
  const bool ok = sym < 1e-12 && min_l2 > 0.0;
  j["status"] = ok ? "pass" : "fail";
  if (!ok) j["failing"] = sym >= 1e-12 ? "symmetry_residual" : "min_lambda2";
  write_report(c, "kernel.json", j);
  if (!ok) throw CheckFailed{};
  return 0;
}

int cmd_mfp(const Context& c) {
  const SpectralMedium m = c.cfg.make_medium();
  const KernelQuadrature q = kernel_quad(c.cfg);
  const int n = c.cfg.mfp.n_points;
  std::vector<std::array<double, 3>> rows(n);
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    const double r = c.cfg.mfp.kappa_max * (i + 1) / n;
    const MeanFreePaths mf = mean_free_paths(m, Vec2(r, 0.0), q);
    rows[i] = {r, mf.tm, mf.te};
  }
  CsvWriter csv(c.path("mfp.csv"), {"kappa_r", "mfp_tm", "mfp_te"});
  bool mono = true;
  for (int i = 0; i < n; ++i) {
    csv << rows[i][0] << rows[i][1] << rows[i][2];
    csv.end_row();
    if (i > 0 && !(rows[i][1] < rows[i - 1][1] && rows[i][2] < rows[i - 1][2])) mono = false;
  }
  json j = base_report(c, "mfp");
  j["monotone_decreasing"] = mono;
  j["status"] = "pass";
  write_report(c, "mfp.json", j);
  return 0;
}

int cmd_evolve(const Context& c) {
  const SpectralMedium m = c.cfg.make_medium();
  const SourceSpec src = c.cfg.make_source();
  auto grid = make_grid(c.cfg);
  const ScatteringKernelField kf = kernel_field(m, c.cfg, grid);
  TransportOptions to;
  to.cutoff_sigma = c.cfg.evolve.cutoff_sigma;
  to.reduced = src.kind == SourceKind::GaussianTMPower;
  const TransportOperator op(m, kf, to);
  const double mfp0 = kf.mfp_tm[innermost(*grid)];
  const double unit = c.cfg.evolve.z_units == "mfp" ? mfp0 : 1.0;
  const double z_end = c.cfg.evolve.z_end * unit;
  const double dz = c.cfg.evolve.dz > 0 ? c.cfg.evolve.dz * unit : default_step(kf);
  EvolveOptions eo;
  for (double s : c.cfg.evolve.snapshots) eo.snapshots.push_back(s * unit);
  eo.record_every = c.cfg.evolve.record_every;
  const CoherenceField P0 = initial_field(grid, src);
  const EvolveResult r = evolve(op, P0, z_end, dz, eo);

  json snaps = json::array();
  for (size_t s = 0; s < r.snapshots.size(); ++s) {
    const CoherenceField& f = r.snapshots[s];
    const std::string name = "snapshot_" + std::to_string(s) + ".csv";
    CsvWriter csv(c.path(name), {"kappa_r", "kappa_theta", "P11", "P22", "ReP12", "ImP12",
                                 "S1", "S2", "S3", "S4", "pol"});
    for (size_t i = 0; i < f.P.size(); ++i) {
      const Stokes4 st = stokes(f.P[i]);
      csv << grid->radius(i) << grid->angle(i) << f.P[i](0, 0).real() << f.P[i](1, 1).real()
          << f.P[i](0, 1).real() << f.P[i](0, 1).imag() << st.s1 << st.s2 << st.s3 << st.s4
          << st.pol;
      csv.end_row();
    }
    snaps.push_back({{"file", name}, {"z", f.z}, {"c_p", power_coefficient(f)}});
  }
  CsvWriter tr(c.path("trajectory.csv"), {"z", "energy", "min_eig", "C_P"});
  for (const TrajectoryRow& row : r.trajectory) {
    tr << row.z << row.energy << row.min_eig << row.c_p;
    tr.end_row();
  }
  json j = base_report(c, "evolve");
  j["grid"] = {{"layout", c.cfg.grid.layout}, {"nodes", grid->size()},
               {"state_size", op.state_size()}, {"couplings", op.n_couplings()}};
  j["mfp_innermost"] = mfp0;
  j["z_end"] = z_end;
  j["dz"] = dz;
  j["max_energy_drift"] = r.max_drift;
  j["worst_min_eig_ratio"] = r.worst_min_eig;
  j["max_p12_ratio"] = r.max_p12_ratio;
  j["final_c_p"] = power_coefficient(r.final);
  j["snapshots"] = snaps;
  j["status"] = "pass";
  write_report(c, "evolve.json", j);
  return 0;
}

double fitted_order(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

int cmd_hf(const Context& c) {
  const SpectralMedium base = c.cfg.make_medium();
  const KernelQuadrature q = kernel_quad(c.cfg);
  CsvWriter csv(c.path("hf_convergence.csv"),
                {"gamma", "mfp_full", "mfp_hf", "rel_err", "kernel_err"});
  std::vector<double> gs, errs;
  for (double g : c.cfg.hf.gammas) {
    const SpectralMedium m = base.with_gamma(g);
    const Vec2 kap(g * c.cfg.hf.kappa, 0.0);
    const Mat2c Q = q_matrix(m, kap, q);
    const double full = mean_free_paths_from_q(Q, 1e-6).tm;
    const double hf = g * hf_mfp(m);
    const double kerr = (g * Q - q_hf(m) * Mat2c::Identity()).norm() / std::abs(q_hf(m));
    csv << g << full << hf << std::abs(full - hf) / hf << kerr;
    csv.end_row();
    gs.push_back(g);
    errs.push_back(kerr);
  }
  const HFLattice lat = make_hf_lattice(base.k(), c.cfg.hf.lattice_radius);
  const HFCoherenceField P0 = hf_initial_x1(lat, c.cfg.hf.kbar_j, base.k());
  const double z_end = c.cfg.hf.z_end * hf_mfp(base);
  const HFEvolveResult r = evolve_p_tilde(base, P0, z_end, z_end / c.cfg.hf.n_steps);
  CsvWriter pc(c.path("hf_polarization.csv"), {"z", "energy", "max_cross"});
  double cross = 0.0;
  for (const HFTrajectoryRow& row : r.trajectory) {
    pc << row.z << row.energy << row.max_cross;
    pc.end_row();
    cross = std::max(cross, row.max_cross);
  }
  json j = base_report(c, "hf");
  j["q_hf"] = q_hf(base);
  j["q_hf_quadrature"] = q_hf_quadrature(base);
  j["kernel_order"] = gs.size() > 1 ? fitted_order(gs, errs) : 0.0;
  j["lattice_side"] = lat.n;
  j["max_cross_polarized"] = cross;
  const bool ok = cross < 1e-12;
  j["status"] = ok ? "pass" : "fail";
  if (!ok) j["failing"] = "max_cross_polarized";
  write_report(c, "hf.json", j);
  if (!ok) throw CheckFailed{};
  return 0;
}

int cmd_rt_check(const Context& c) {
  const SpectralMedium m = c.cfg.make_medium();
  const double tol = c.cfg.rt.tolerance;
  json j = base_report(c, "rt-check");
  json nodes = json::array();
  bool ok = true;
  std::string failing;
  for (double r : c.cfg.rt.kappas) {
    const Vec2 kap(r, 0.0);
    const Mat2 disk = re_q_psd(m, kap);
    const Mat2 sphere = re_q_sphere(m, kap);
    const double b = beta(kap);
    const double sig = 0.5 * sigma_matrix(m, kap).trace();
    const double r_route = (disk - sphere).norm() / sphere.norm();
    const double r_iso = std::max(std::abs(disk(0, 0) - disk(1, 1)), std::abs(disk(0, 1))) /
                         std::abs(disk(0, 0));
    const double r_sigma = std::abs(sig + 2.0 * b * disk(0, 0)) / sig;
    nodes.push_back({{"kappa_r", r},
                     {"disk_vs_sphere", r_route},
                     {"isotropy", r_iso},
                     {"sigma_vs_q", r_sigma}});
    auto flag = [&](double v, double t, const char* name) {
      if (!(v < t) && ok) {
        ok = false;
        failing = std::string(name) + " at kappa_r=" + format_double(r);
      }
    };
    flag(r_route, tol, "disk_vs_sphere");
    flag(r_iso, 1e-8, "isotropy");
    flag(r_sigma, tol, "sigma_vs_q");
  }
  j["nodes"] = nodes;
  j["status"] = ok ? "pass" : "fail";
  if (!ok) j["failing"] = failing;
  write_report(c, "rt_check.json", j);
  if (!ok) throw CheckFailed{};
  return 0;
}

int cmd_mc_verify(const Context& c) {
  const SpectralMedium m = c.cfg.make_medium();
  const MCReport r = mc_verify(m, c.cfg.make_ensemble());
  CsvWriter csv(c.path("mc_decay.csv"), {"z", "node", "abs_mean_a", "stderr", "predicted"});
  for (size_t t = 0; t < r.z.size(); ++t)
    for (int i = 0; i < r.n_nodes; ++i) {
      csv << r.z[t] << i << r.abs_mean[i][t] << r.abs_se[i][t] << r.abs_pred[i][t];
      csv.end_row();
    }
  json j = base_report(c, "mc-verify");
  j["epsilon"] = r.epsilon;
  j["nodes"] = r.n_nodes;
  j["realizations"] = r.n_realizations;
  j["dz"] = r.dz;
  j["z_end"] = r.z_end;
  json decay = json::array();
  double worst = 0.0;
  for (const NodeDecay& d : r.decay) {
    const double zs = (d.rate_mc - d.rate_pred) / d.rate_se;
    worst = std::max(worst, std::abs(zs));
    decay.push_back({{"node", d.node}, {"rate_mc", d.rate_mc}, {"rate_se", d.rate_se},
                     {"rate_pred", d.rate_pred}, {"minus_re_q11", d.re_q11}});
  }
  json pairs = json::array();
  for (const PairCorrelation& p : r.pairs)
    pairs.push_back({{"i", p.i}, {"j", p.j}, {"re", p.value.real()}, {"im", p.value.imag()},
                     {"se_re", p.se_re}, {"se_im", p.se_im}});
  j["checks"] = {
      {"energy_drift", {{"value", r.max_drift}, {"limit", 1e-5}, {"pass", r.drift_ok}}},
      {"coherent_decay", {{"worst_z_score", worst}, {"limit", 3.0}, {"pass", r.decay_ok}, {"nodes", decay}}},
      {"coherence_l2", {{"p11", r.l2_p11}, {"p22", r.l2_p22}, {"limit", 0.15}, {"pass", r.coherence_ok}}},
      {"decorrelation", {{"pairs", pairs}, {"limit_sigma", 3.0}, {"pass", r.decorrelation_ok}}}};
  j["status"] = r.ok() ? "pass" : "fail";
  if (!r.ok())
    j["failing"] = !r.drift_ok ? "energy_drift"
                   : !r.decay_ok ? "coherent_decay"
                   : !r.coherence_ok ? "coherence_l2"
                                     : "decorrelation";
  write_report(c, "mc_verify.json", j);
  if (!r.ok()) throw CheckFailed{};
  return 0;
}

int cmd_field(const Context& c) {
  const SourceSpec src = c.cfg.make_source();
  FieldQuadrature fq;
  fq.n_radial = c.cfg.field.n_radial;
  fq.n_angular = c.cfg.field.n_angular;
  fq.kappa_max = c.cfg.field.kappa_max;
  CsvWriter csv(c.path("field.csv"),
                {"x", "y", "z", "ReE1", "ImE1", "ReE2", "ImE2", "ReE3", "ImE3", "ReH1", "ImH1",
                 "ReH2", "ImH2", "ReH3", "ImH3"});
  const auto& p = c.cfg.field.points;
  for (size_t i = 0; i + 2 < p.size(); i += 3) {
    const FieldSample s = homogeneous_field(src, Vec3(p[i], p[i + 1], p[i + 2]), fq);
    csv << p[i] << p[i + 1] << p[i + 2];
    for (int d = 0; d < 3; ++d) csv << s.e(d).real() << s.e(d).imag();
    for (int d = 0; d < 3; ++d) csv << s.h(d).real() << s.h(d).imag();
    csv.end_row();
  }
  json j = base_report(c, "field");
  j["source_energy"] = source_energy(src, fq);
  j["status"] = "pass";
  write_report(c, "field.json", j);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polarized wave transport in random media"};
  app.require_subcommand(1);
  std::string config_path, out_dir;
  long long seed = -1;
  int threads = -1;
  app.add_option("--config", config_path, "INI run configuration")->required()->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory (overrides POLX_OUT_DIR and the config)");
  app.add_option("--seed", seed, "random seed")->check(CLI::NonNegativeNumber);
  app.add_option("--threads", threads, "worker threads, 0 = auto")->check(CLI::NonNegativeNumber);
  app.fallthrough();

  const std::vector<std::pair<std::string, int (*)(const Context&)>> cmds = {
      {"kernel", cmd_kernel},   {"mfp", cmd_mfp},           {"evolve", cmd_evolve},
      {"hf", cmd_hf},           {"rt-check", cmd_rt_check}, {"mc-verify", cmd_mc_verify},
      {"field", cmd_field}};
  std::vector<CLI::App*> subs;
  for (const auto& [name, fn] : cmds) subs.push_back(app.add_subcommand(name));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  Context ctx;
  std::string cmd;
  try {
    ctx.cfg = load_config(config_path);
    if (seed >= 0) ctx.cfg.seed = static_cast<std::uint64_t>(seed);
    if (threads >= 0) ctx.cfg.threads = threads;
    if (const char* env = std::getenv("POLX_OUT_DIR"); env && *env) ctx.cfg.out_dir = env;
    if (!out_dir.empty()) ctx.cfg.out_dir = out_dir;
    ctx.out = ctx.cfg.out_dir;
    if (ctx.cfg.threads > 0) omp_set_num_threads(ctx.cfg.threads);
    ensure_dir(ctx.out);
    for (size_t i = 0; i < subs.size(); ++i)
      if (subs[i]->parsed()) {
        cmd = cmds[i].first;
        return cmds[i].second(ctx);
      }
  } catch (const CheckFailed&) {
    std::cerr << "polx " << cmd << ": verification failed, see report in " << ctx.out << "\n";
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "polx: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "polx " << cmd << ": " << e.what() << "\n";
    if (!ctx.out.empty() && !cmd.empty()) {
      json j = base_report(ctx, cmd);
      j["status"] = "fail";
      j["failing"] = e.what();
      write_text((std::filesystem::path(ctx.out) / (cmd + "_error.json")).string(), j.dump(2) + "\n");
    }
    return 2;
  }
  return 1;
}
