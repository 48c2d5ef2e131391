// inlsc: command-line front end for the experiment drivers.
//
// Exit codes: 0 report produced (verify: every check passed), 1 refused run
// (verify: a check failed), 2 usage, input or internal error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "inlsc/experiments.hpp"
#include "inlsc/verification.hpp"

namespace {

struct Overrides {
  std::optional<int> d;
  std::optional<double> b, sigma, c, omega, r_max, dt, t_end, mu0, lambda0, eps_pert, tol;
  std::optional<std::size_t> n;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> grid_scheme, out_dir, input;
  std::optional<int> sample_every;
};

void add_common(CLI::App* sub, std::string& config, Overrides& o) {
  sub->add_option("--config", config, "key = value config file");
  sub->add_option("--d", o.d, "spatial dimension");
  sub->add_option("--b", o.b, "weight exponent b");
  sub->add_option("--sigma", o.sigma, "nonlinearity power");
  sub->add_option("--c", o.c, "inverse-square coupling");
  sub->add_option("--omega", o.omega, "frequency");
  sub->add_option("--r-max", o.r_max, "outer radius");
  sub->add_option("--n", o.n, "grid nodes");
  sub->add_option("--grid-scheme", o.grid_scheme, "uniform | graded");
  sub->add_option("--tol", o.tol, "ground-state residual tolerance");
  sub->add_option("--seed", o.seed, "random seed");
  sub->add_option("--out-dir", o.out_dir, "directory for manifest, trace and field files");
}

void add_evolution(CLI::App* sub, Overrides& o) {
  sub->add_option("--dt", o.dt, "time step");
  sub->add_option("--t-end", o.t_end, "final time");
  sub->add_option("--sample-every", o.sample_every, "steps between trace rows");
}

inlsc::ExperimentSpec build_spec(inlsc::ExperimentKind kind, const std::string& config, const Overrides& o) {
  using inlsc::ExperimentKind;
  inlsc::io::ConfigMap cfg;
  if (!config.empty()) cfg = inlsc::io::parse_config_file(config);
  auto spec = inlsc::spec_from_config(cfg, kind);
  // Regime defaults for keys the config leaves out.
  if (!cfg.count("sigma")) {
    if (kind == ExperimentKind::Stability) spec.params.sigma = 0.5;
    if (kind == ExperimentKind::IntercriticalInstability) spec.params.sigma = 1.5;
  }
  if (kind == ExperimentKind::MassCriticalBlowup || kind == ExperimentKind::IntercriticalInstability) {
    if (!cfg.count("sample_every")) spec.evolution.sample_every = 20;
  }
  if (!config.empty()) spec.input_hashes["config"] = inlsc::io::file_hash(config);

  if (o.d) spec.params.d = *o.d;
  if (o.b) spec.params.b = *o.b;
  if (o.sigma) spec.params.sigma = *o.sigma;
  if (o.c) spec.params.c = *o.c;
  if (o.omega) spec.params.omega = *o.omega;
  if (o.r_max) spec.r_max = *o.r_max;
  if (o.n) spec.n = *o.n;
  if (o.grid_scheme) {
    auto g = inlsc::parse_grid_scheme(*o.grid_scheme);
    if (!g) throw CLI::ValidationError("--grid-scheme", "expected uniform or graded");
    spec.grid_scheme = *g;
  }
  if (o.tol) spec.ground_state.tol = *o.tol;
  if (o.seed) spec.seed = *o.seed;
  if (o.out_dir) spec.output_dir = *o.out_dir;
  if (o.dt) spec.evolution.dt = *o.dt;
  if (o.t_end) spec.evolution.t_end = *o.t_end;
  if (o.sample_every) spec.evolution.sample_every = *o.sample_every;
  if (o.mu0) spec.mu0 = *o.mu0;
  if (o.lambda0) spec.lambda0 = *o.lambda0;
  if (o.eps_pert) spec.eps_pert = *o.eps_pert;
  if (o.input) spec.input_field = *o.input;
  if (spec.input_field) spec.input_hashes["input_field"] = inlsc::io::file_hash(*spec.input_field);
  return spec;
}

void print_summary(const inlsc::ExperimentReport& rep) {
  for (const auto& [k, v] : rep.headline) std::printf("%s = %s\n", k.c_str(), v ? "true" : "false");
  for (const char* key : {"E_u0", "S_u0", "G_u0", "action_level", "C_GN", "sup_distance_rel", "outcome_time"})
    if (auto it = rep.scalars.find(key); it != rep.scalars.end())
      std::printf("%s = %.12g\n", key, it->second);
  if (rep.trace) std::printf("outcome = %s (%s)\n", std::string(inlsc::to_string(rep.trace->outcome.kind)).c_str(),
                             rep.trace->outcome.reason.c_str());
  if (auto it = rep.paths.find("manifest"); it != rep.paths.end())
    std::printf("manifest = %s\n", it->second.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radial inhomogeneous NLS with inverse-square potential: ground states and dynamics"};
  app.require_subcommand(1);

  std::string config;
  Overrides o;
  bool json = false;
  app.add_flag("--json", json, "print the full report as JSON instead of a summary");

  struct Cmd {
    const char* name;
    const char* help;
    inlsc::ExperimentKind kind;
  };
  const Cmd cmds[] = {
      {"groundstate", "solve and certify the ground state", inlsc::ExperimentKind::GroundStateOnly},
      {"evolve", "evolve mu0 * phi dilated by lambda0 (or --input) and trace it", inlsc::ExperimentKind::Evolve},
      {"stability", "perturbed ground state, orbit distance over time", inlsc::ExperimentKind::Stability},
      {"blowup-critical", "mass-critical blow-up from scaled ground state",
       inlsc::ExperimentKind::MassCriticalBlowup},
      {"instability", "intercritical blow-up from the dilated ground state",
       inlsc::ExperimentKind::IntercriticalInstability},
      {"gn", "sharp Gagliardo-Nirenberg constant estimate", inlsc::ExperimentKind::GNConstant},
  };
  std::vector<std::pair<CLI::App*, inlsc::ExperimentKind>> subs;
  for (const auto& c : cmds) {
    auto* sub = app.add_subcommand(c.name, c.help);
    add_common(sub, config, o);
    switch (c.kind) {
      case inlsc::ExperimentKind::Evolve:
        add_evolution(sub, o);
        sub->add_option("--mu0", o.mu0, "amplitude factor");
        sub->add_option("--lambda0", o.lambda0, "dilation factor");
        sub->add_option("--eps-pert", o.eps_pert, "perturbation size (units of ||phi||_H1)");
        sub->add_option("--input", o.input, "initial field file");
        break;
      case inlsc::ExperimentKind::Stability:
        add_evolution(sub, o);
        sub->add_option("--eps-pert", o.eps_pert, "perturbation size (units of ||phi||_H1)");
        break;
      case inlsc::ExperimentKind::MassCriticalBlowup:
        add_evolution(sub, o);
        sub->add_option("--mu0", o.mu0, "amplitude factor (> 1)");
        sub->add_option("--lambda0", o.lambda0, "dilation factor (> 1)");
        break;
      case inlsc::ExperimentKind::IntercriticalInstability:
        add_evolution(sub, o);
        sub->add_option("--lambda0", o.lambda0, "dilation factor");
        break;
      default:
        break;
    }
    subs.emplace_back(sub, c.kind);
  }
  auto* verify = app.add_subcommand("verify", "run the full invariant suite");
  verify->add_option("--config", config, "key = value config file (r_max and n are used)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (verify->parsed()) {
      inlsc::VerifyOptions vo;
      if (!config.empty()) {
        const auto spec = inlsc::spec_from_config(inlsc::io::parse_config_file(config),
                                                  inlsc::ExperimentKind::GroundStateOnly);
        vo.r_max = spec.r_max;
        vo.n = spec.n;
      }
      vo.on_result = [](const inlsc::CheckResult& r) {
        std::printf("%s\n", inlsc::format_check(r).c_str());
        std::fflush(stdout);
      };
      int failed = 0;
      for (const auto& r : inlsc::run_verification(vo)) failed += r.passed ? 0 : 1;
      std::printf("%d check(s) failed\n", failed);
      return failed == 0 ? 0 : 1;
    }
    for (const auto& [sub, kind] : subs) {
      if (!sub->parsed()) continue;
      const auto spec = build_spec(kind, config, o);
      const auto rep = inlsc::run_experiment(spec);
      if (json) {
        std::cout << inlsc::to_json(rep).dump(2) << '\n';
      } else {
        print_summary(rep);
      }
      return 0;
    }
  } catch (const inlsc::RefusesRun& e) {
    std::fprintf(stderr, "refused: %s\n", e.what());
    return 1;
  } catch (const inlsc::ValidationError& e) {
    std::fprintf(stderr, "invalid parameter '%s': %s\n", e.constraint().c_str(), e.what());
    return 2;
  } catch (const inlsc::io::IoError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return 2;
  } catch (const CLI::ValidationError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
