#include <cmath>
#include <filesystem>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "inlsc/experiments.hpp"
#include "inlsc/io.hpp"

using namespace inlsc;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  auto d = fs::temp_directory_path() / ("inlsc_exp_" + name);
  fs::remove_all(d);
  return d;
}

ExperimentSpec base_spec(ExperimentKind kind, double sigma) {
  ExperimentSpec s;
  s.kind = kind;
  s.params = ModelParams{3, 0.5, sigma, 0.1, 1.0};
  s.n = 2048;
  s.evolution.sample_every = 20;
  return s;
}

bool dir_empty_or_missing(const fs::path& d) { return !fs::exists(d) || fs::is_empty(d); }

}  // namespace

TEST(Refusals, WriteNothing) {
  const auto dir = scratch_dir("refuse");

  auto s = base_spec(ExperimentKind::IntercriticalInstability, 1.5);
  s.output_dir = dir.string();
  s.lambda0 = 1.0;  // S(u0) = S(phi): not strictly below the ground state
  EXPECT_THROW(run_experiment(s), RefusesRun);
  EXPECT_TRUE(dir_empty_or_missing(dir));

  auto w = base_spec(ExperimentKind::Stability, 1.0);  // mass-critical, not subcritical
  w.output_dir = dir.string();
  EXPECT_THROW(run_experiment(w), RefusesRun);
  EXPECT_TRUE(dir_empty_or_missing(dir));

  auto m = base_spec(ExperimentKind::MassCriticalBlowup, 1.0);
  m.output_dir = dir.string();
  m.mu0 = 1.0;
  m.lambda0 = 1.0;
  EXPECT_THROW(run_experiment(m), RefusesRun);
  m.mu0 = 0.9;
  m.lambda0 = 1.2;
  EXPECT_THROW(run_experiment(m), RefusesRun);
  EXPECT_TRUE(dir_empty_or_missing(dir));

  auto bad = base_spec(ExperimentKind::GroundStateOnly, 3.0);  // sigma above the energy-critical bound
  EXPECT_THROW(run_experiment(bad), ValidationError);
}

TEST(MassCriticalBlowup, DeterministicOutputsAndRecomputableHeadline) {
  const auto d1 = scratch_dir("det1");
  const auto d2 = scratch_dir("det2");
  auto s = base_spec(ExperimentKind::MassCriticalBlowup, 1.0);
  s.mu0 = 1.2;
  s.lambda0 = 1.2;
  s.evolution.t_end = 5.0;
  s.output_dir = d1.string();
  const auto r1 = run_experiment(s);
  s.output_dir = d2.string();
  const auto r2 = run_experiment(s);

  EXPECT_TRUE(r1.headline.at("blowup_indicated"));
  EXPECT_TRUE(r1.checks.at("negative_energy"));
  EXPECT_TRUE(r1.checks.at("closed_form_energy"));
  EXPECT_LT(r1.scalars.at("E_u0"), 0.0);

  for (const char* f : {"trace.csv", "ground_state.bin"})
    EXPECT_EQ(io::file_hash(d1 / f), io::file_hash(d2 / f)) << f;

  // manifest lists hashes of the files next to it
  const auto man = nlohmann::json::parse(io::read_text(d1 / "manifest.json"));
  EXPECT_EQ(man.at("outputs").at("trace.csv").get<std::string>(), io::file_hash(d1 / "trace.csv"));
  EXPECT_EQ(man.at("headline").at("blowup_indicated").get<bool>(), true);

  // headline from the persisted trace: the last sampled norm reached the threshold
  const auto cols = io::read_csv_columns(d1 / "trace.csv");
  const double first = std::stod(cols.at("h1_norm").front());
  const double last = std::stod(cols.at("h1_norm").back());
  EXPECT_GE(last, s.evolution.blowup_factor * first);

  const auto ff = io::read_field(d1 / "ground_state.bin");
  EXPECT_EQ(ff.field.size(), s.n);
  EXPECT_EQ(ff.params.sigma, 1.0);
}

// mu = lambda = 1 + 1/k approaches phi in H^1 and every member blows up.
TEST(MassCriticalBlowup, SequenceApproachingGroundState) {
  double prev = INFINITY;
  for (int k : {4, 8, 16}) {
    auto s = base_spec(ExperimentKind::MassCriticalBlowup, 1.0);
    s.mu0 = s.lambda0 = 1.0 + 1.0 / k;
    s.evolution.t_end = 20.0;
    const auto r = run_experiment(s);
    const double dist = r.scalars.at("distance_u0_phi");
    EXPECT_LT(dist, prev) << k;
    prev = dist;
    EXPECT_TRUE(r.headline.at("blowup_indicated")) << k;
  }
}

TEST(Stability, SmallRun) {
  auto s = base_spec(ExperimentKind::Stability, 0.5);
  s.eps_pert = 0.01;
  s.evolution.dt = 2e-3;
  s.evolution.t_end = 2.0;
  const auto r = run_experiment(s);
  EXPECT_TRUE(r.headline.at("stable"));
  EXPECT_TRUE(r.headline.at("invariants_held"));
  EXPECT_NEAR(r.scalars.at("initial_distance_rel"), 0.01, 2e-3);
  EXPECT_LE(r.scalars.at("sup_distance_rel"), 0.1);
}

TEST(Instability, EntersAndBlowsUp) {
  auto s = base_spec(ExperimentKind::IntercriticalInstability, 1.5);
  s.lambda0 = 1.1;
  s.evolution.sample_every = 5;
  const auto r = run_experiment(s);
  EXPECT_TRUE(r.checks.at("entry_conditions"));
  EXPECT_TRUE(r.checks.at("b_omega_membership"));
  EXPECT_TRUE(r.checks.at("virial_bound"));
  EXPECT_TRUE(r.checks.at("g_criterion"));
  EXPECT_TRUE(r.headline.at("blowup_indicated"));
  EXPECT_GT(r.scalars.at("delta"), 0.0);
}

TEST(GNConstant, ResetsOmegaAndCertifies) {
  auto s = base_spec(ExperimentKind::GNConstant, 1.0);
  s.params.omega = 3.0;
  s.gn_trials = 30;
  const auto r = run_experiment(s);
  EXPECT_EQ(r.spec.params.omega, 1.0);
  EXPECT_FALSE(r.notes.empty());
  EXPECT_TRUE(r.headline.at("invariants_held"));
  EXPECT_GE(r.scalars.at("margin"), -1e-6);
  EXPECT_GT(r.scalars.at("C_GN"), 0.0);
}

TEST(GroundStateOnly, CertifiedAndPersisted) {
  const auto dir = scratch_dir("gs");
  auto s = base_spec(ExperimentKind::GroundStateOnly, 0.5);
  s.gn_trials = 10;
  s.output_dir = dir.string();
  const auto r = run_experiment(s);
  ASSERT_TRUE(r.certificate);
  EXPECT_TRUE(r.certificate->passed());
  EXPECT_TRUE(fs::exists(dir / "ground_state.json"));
  const auto side = nlohmann::json::parse(io::read_text(dir / "ground_state.json"));
  EXPECT_EQ(side.at("grid_scheme").get<std::string>(), "graded");
}
