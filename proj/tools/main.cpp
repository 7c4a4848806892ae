// misanthrope: command-line driver for the experiments.
#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>

#include "misanthrope/errors.hpp"
#include "misanthrope/experiment.hpp"

namespace fs = std::filesystem;
using namespace misanthrope;

namespace {

struct Common {
  std::string config;
  std::string out = ".";
  std::optional<std::size_t> threads;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* sub, Common& c, const char* what = "JSON config file") {
  sub->add_option("config", c.config, what)->required();
  sub->add_option("--out", c.out, "output directory");
  sub->add_option("--threads", c.threads, "worker threads");
  sub->add_option("--seed", c.seed, "base seed (overrides the config)");
}

RunConfig load(const Common& c) {
  auto cfg = load_run_config(c.config);
  if (c.threads) cfg.exp.threads = std::max<std::size_t>(1, *c.threads);
  if (c.seed) cfg.exp.seed = *c.seed;
  return cfg;
}

fs::path out_dir(const Common& c) {
  fs::create_directories(c.out);
  return c.out;
}

void require_scalar_axes(const RunConfig& cfg) {
  if (!cfg.sweep_N.empty() || !cfg.sweep_beta.empty())
    throw ConfigError("N and beta must be scalars here; lists are for the sweep subcommand");
}

int cmd_validate(const Common& c, int window) {
  std::ifstream in(c.config);
  if (!in) throw ConfigError("cannot open " + c.config);
  const Json j = Json::parse(in);
  const RateModel model = j.contains("kind") ? parse_model(j) : parse_run_config(j, fs::path(c.config).parent_path()).model;
  const auto report = validate_conditions(model, window);
  std::cout << "model: " << model.name() << '\n' << report.to_text();
  std::cout << (report.all_passed() ? "all-pass\n" : "FAILED\n");
  return report.all_passed() ? 0 : 1;
}

int cmd_flux(const Common& c) {
  const auto cfg = load(c);
  const auto family = EquilibriumFamily::build(cfg.model);
  std::vector<double> grid = cfg.flux_grid;
  if (grid.empty()) {
    auto [lo, hi] = family.density_range();
    if (!cfg.model.bounds().z_max) hi = std::min(hi, std::max(2.0 * cfg.exp.v0, cfg.exp.v0 + 2.0));
    const double pad = 0.025 * (hi - lo);
    for (int i = 0; i <= 20; ++i) grid.push_back(lo + pad + (hi - lo - 2 * pad) * i / 20.0);
  }
  const auto curve = family.flux_curve(cfg.exp.v0, grid);
  CsvWriter w(out_dir(c) / "flux.csv", {"v", "flux_hat", "b", "c"});
  for (std::size_t i = 0; i < curve.v.size(); ++i) {
    w.cell(curve.v[i]).cell(curve.flux[i]).cell(curve.b[i]).cell(curve.c[i]);
    w.end_row();
  }
  w.close();
  const auto& a = curve.at_v0;
  std::cout << "v0 = " << a.v0 << ": a0 = " << a.a0 << ", b0 = " << a.b0 << ", c0 = " << a.c0
            << (a.degenerate ? " (degenerate)" : "") << '\n';
  return 0;
}

int cmd_simulate(const Common& c) {
  const auto cfg = load(c);
  require_scalar_axes(cfg);
  const auto family = EquilibriumFamily::build(cfg.model);
  const double b0 = family.flux_derivatives(cfg.exp.v0).b0;
  const auto start = std::chrono::steady_clock::now();
  const auto reps = run_replicas(cfg.model, family, cfg.exp, b0);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const auto dir = out_dir(c);
  write_density_profile(dir / "density_profile.csv", reps);
  write_events(dir / "events.json", cfg.exp, reps, wall);
  std::uint64_t total = 0;
  for (const auto& r : reps) total += r.events;
  std::cout << reps.size() << " replicas, " << total << " events, " << wall << " s\n";
  return 0;
}

int cmd_burgers(const Common& c) {
  const auto cfg = load(c);
  const auto family = EquilibriumFamily::build(cfg.model);
  const auto flux = family.flux_derivatives(cfg.exp.v0);
  if (flux.degenerate) throw ConfigError("c0 is degenerate at this v0: no Burgers limit");
  const auto& u0 = cfg.exp.u0;
  const double ts = shock_time(Profile::sample([&](double x) { return u0(x); }, 4096), flux.c0);
  if (cfg.exp.T >= 0.95 * ts) {
    std::ostringstream os;
    os << "T = " << cfg.exp.T << " is not below 0.95 T* (shock time T* = " << ts << ")";
    throw HorizonError(os.str());
  }
  write_burgers(out_dir(c) / "burgers.csv", cfg.exp.times, burgers_profiles(cfg, flux, cfg.burgers_grid));
  std::cout << "c0 = " << flux.c0 << ", T* = " << ts << '\n';
  return 0;
}

void write_compare_outputs(const fs::path& dir, const CompareResult& r) {
  fs::create_directories(dir);
  write_corollary(dir / "corollary.csv", r);
  write_density_profile(dir / "density_profile.csv", r.replicas);
  write_burgers(dir / "burgers.csv", r.cfg.exp.times, r.burgers);
  write_events(dir / "events.json", r.cfg.exp, r.replicas, r.wall_seconds);
  write_json(dir / "summary.json", summary_json(r));
}

void print_compare(const CompareResult& r) {
  std::cout << "N = " << r.cfg.exp.N << ", beta = " << r.cfg.exp.beta << ", l = " << r.block << ", T* = " << r.shock_time
            << ", events = " << r.total_events << ", wall = " << r.wall_seconds << " s\n";
  for (const auto& t : r.times) {
    std::cout << "  t = " << t.t << "  L2(u_hat - u) = " << t.profile_l2_error << '\n';
    for (const auto& p : t.phis)
      std::cout << "    " << p.id << ": S_N = " << p.mean_S << " +- " << p.se_S << ", target = " << p.target
                << ", z = " << p.z_score << '\n';
  }
}

int cmd_compare(const Common& c) {
  const auto cfg = load(c);
  require_scalar_axes(cfg);
  const auto r = run_compare(cfg);
  write_compare_outputs(out_dir(c), r);
  print_compare(r);
  return 0;
}

int cmd_sweep(const Common& c) {
  const auto base = load(c);
  if (base.sweep_N.empty() && base.sweep_beta.empty()) throw ConfigError("sweep needs N or beta given as a list");
  if (base.sweep_N.size() == 1 || base.sweep_beta.size() == 1)
    throw ConfigError("sweep lists must have at least two entries");
  const std::vector<std::size_t> ns = base.sweep_N.empty() ? std::vector<std::size_t>{base.exp.N} : base.sweep_N;
  const std::vector<double> betas = base.sweep_beta.empty() ? std::vector<double>{base.exp.beta} : base.sweep_beta;
  const auto dir = out_dir(c);
  CsvWriter w(dir / "sweep_summary.csv", {"cell", "N", "beta", "l", "t", "phi_id", "mean_abs_error", "stderr_abs_error",
                                          "mean_S_N", "target_integral", "profile_l2_error"});
  std::uint32_t cell = 0;
  for (const auto n : ns)
    for (const double beta : betas) {
      RunConfig cfg = base;
      cfg.exp.N = n;
      cfg.exp.beta = beta;
      cfg.exp.cell = cell;
      cfg.echo["N"] = n;
      cfg.echo["beta"] = beta;
      const auto r = run_compare(cfg);
      write_compare_outputs(dir / ("cell_" + std::to_string(cell)), r);
      print_compare(r);
      for (const auto& t : r.times)
        for (const auto& p : t.phis) {
          w.cell(static_cast<long long>(cell)).cell(n).cell(beta).cell(r.block).cell(t.t).cell(p.id);
          w.cell(p.mean_abs_error).cell(p.se_abs_error).cell(p.mean_S).cell(p.target).cell(t.profile_l2_error);
          w.end_row();
        }
      ++cell;
    }
  w.close();
  return 0;
}

int cmd_gap(const Common& c) {
  const auto cfg = load(c);
  const auto family = EquilibriumFamily::build(cfg.model);
  const auto rows = gap_sweep(cfg.model, family, cfg.gap_l, cfg.clip);
  CsvWriter w(out_dir(c) / "gap.csv", {"model", "l", "k", "sector_size", "gap", "gap_times_l2"});
  for (const auto& r : rows) {
    w.cell(cfg.model.name()).cell(r.l).cell(r.k).cell(r.sector_size).cell(r.gap).cell(r.gap_times_l2);
    w.end_row();
  }
  w.close();
  for (int l : cfg.gap_l) {
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& r : rows)
      if (r.l == l) worst = std::min(worst, r.gap_times_l2);
    if (std::isfinite(worst)) std::cout << "l = " << l << ": min_k gap*l^2 = " << worst << '\n';
  }
  return 0;
}

int cmd_ensembles(const Common& c) {
  const auto cfg = load(c);
  const auto family = EquilibriumFamily::build(cfg.model);
  const auto sw = equivalence_sweep(cfg.model, family, Cylinder::flux(cfg.model), cfg.ensembles_density,
                                    cfg.ensembles_l, cfg.clip);
  CsvWriter w(out_dir(c) / "ensembles.csv", {"model", "l", "density", "psi", "abs_error", "fitted_slope"});
  for (const auto& p : sw.points) {
    w.cell(cfg.model.name()).cell(p.l).cell(sw.density).cell(p.psi).cell(p.abs_error).cell(sw.fitted_slope);
    w.end_row();
  }
  w.close();
  std::cout << "psi_hat = " << sw.psi_hat << ", fitted slope = " << sw.fitted_slope << '\n';
  return 0;
}

int cmd_kurschak(const Common& c) {
  const auto cfg = load(c);
  CsvWriter w(out_dir(c) / "kurschak.csv", {"l", "gamma", "estimate", "stderr", "limit_formula"});
  std::uint32_t idx = 0;
  for (const auto l : cfg.kurschak_l) {
    KurschakSpec spec;
    spec.gamma = cfg.kurschak_gamma;
    spec.l = l;
    spec.samples = cfg.kurschak_samples;
    spec.seed = seed_plan(cfg.exp.seed, idx++, 0);
    const auto est = kurschak_probe(spec);
    w.cell(l).cell(spec.gamma).cell(est.estimate).cell(est.stderr_).cell(est.limit);
    w.end_row();
    std::cout << "l = " << l << ": " << est.estimate << " +- " << est.stderr_ << " (limit " << est.limit << ")\n";
  }
  w.close();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"misanthrope-class particle systems: simulation and verification"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  Common c;
  int window = 64;
  auto* validate = app.add_subcommand("validate-model", "check conditions A-D on a model spec");
  validate->add_option("spec", c.config, "model spec or run config (JSON)")->required();
  validate->add_option("--window", window, "spin window for the finite checks");

  struct Entry {
    const char* name;
    const char* help;
    int (*run)(const Common&);
  };
  const Entry entries[] = {
      {"flux", "write flux.csv (flux and its derivatives on a density grid)", cmd_flux},
      {"simulate", "run replicas and write density_profile.csv, events.json", cmd_simulate},
      {"burgers", "write the Burgers solution burgers.csv", cmd_burgers},
      {"compare", "flagship corollary experiment", cmd_compare},
      {"sweep", "compare over lists of N and/or beta", cmd_sweep},
      {"gap", "spectral gaps of canonical blocks (gap.csv)", cmd_gap},
      {"ensembles", "equivalence-of-ensembles sweep (ensembles.csv)", cmd_ensembles},
      {"kurschak", "exponential-moment probe (kurschak.csv)", cmd_kurschak},
  };
  std::vector<std::pair<CLI::App*, const Entry*>> subs;
  for (const auto& e : entries) {
    auto* sub = app.add_subcommand(e.name, e.help);
    add_common(sub, c);
    subs.emplace_back(sub, &e);
  }

  CLI11_PARSE(app, argc, argv);
  try {
    if (validate->parsed()) return cmd_validate(c, window);
    for (const auto& [sub, e] : subs)
      if (sub->parsed()) return e->run(c);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
