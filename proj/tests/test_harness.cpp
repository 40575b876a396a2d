#include "cylsp/config.hpp"
#include "cylsp/errors.hpp"
#include "cylsp/harness.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace cylsp;

namespace {

const char* kFlagship = CYLSP_CONFIG_DIR "/flagship.cfg";

SweepConfig flagship_sweep() { return SweepConfig::from(load_config(kFlagship)); }

std::shared_ptr<const CylGrid> fine_grid() {
  return std::make_shared<CylGrid>(CylGrid::uniform(0, 0.02, 150, 0.02, 200, true));
}

} // namespace

TEST(Config, FlagshipFile) {
  const ProblemConfig c = load_config(kFlagship);
  EXPECT_EQ(c.problem.p, 4.0);
  EXPECT_EQ(c.problem.region.r0, 2.0);
  EXPECT_DOUBLE_EQ(c.problem.spec.V(0, 2.5), 2.0);
  ASSERT_EQ(c.sweep.eps.size(), 3u);
  EXPECT_EQ(c.sweep.eps.back(), 0.05);
  EXPECT_NO_THROW(SweepConfig::from(c).validate());
}

TEST(Config, Malformed) {
  EXPECT_THROW(parse_config("{ \"p\": 4,"), ConfigError);
  EXPECT_THROW(parse_config("[1, 2]"), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/x.cfg"), ConfigError);
}

TEST(Config, UnknownKeys) {
  std::ifstream is(kFlagship);
  std::stringstream ss;
  ss << is.rdbuf();
  std::string text = ss.str();
  text.insert(text.find('{') + 1, "\"pp\": 1,");
  EXPECT_THROW(parse_config(text), ConfigError);
  std::string inner = ss.str();
  inner.insert(inner.find("\"kappa\""), "\"kapa\": 0.1, ");
  EXPECT_THROW(parse_config(inner), ConfigError);
}

TEST(Config, UnknownEnvelope) {
  ProblemConfig c = load_config(kFlagship);
  c.sweep.envelope = "diagonal";
  EXPECT_THROW(SweepConfig::from(c), ConfigError);
}

TEST(SweepConfigTest, Validation) {
  SweepConfig c = flagship_sweep();
  c.eps = {0.1, 0.1};
  EXPECT_THROW(c.validate(), ConfigError);
  c.eps = {0.05, 0.1};
  EXPECT_THROW(c.validate(), ConfigError);
  c.eps = {0.1, -0.05};
  EXPECT_THROW(c.validate(), ConfigError);
  c = flagship_sweep();
  c.problem.grid.cells_per_eps = 6;
  EXPECT_THROW(c.validate(), ConfigError);
  c = flagship_sweep();
  c.threads = 0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Sweep, EmptyEpsList) {
  SweepConfig c = flagship_sweep();
  c.eps.clear();
  c.out_dir.clear();
  const SweepReport r = run_sweep(c);
  EXPECT_TRUE(r.rows.empty());
  EXPECT_TRUE(r.interior);
  EXPECT_NEAR(r.r_target, 1.897, 1e-3);
  const std::string csv = r.to_csv();
  EXPECT_EQ(csv,
            "eps,c_eps_over_eps2,J_over_eps2,r_star,s_star,u_max,lambda_hat,penal_active,"
            "target_pi_infM,target_r_star\n");
}

TEST(Profile, SelfCheckIsExact) {
  const auto g = fine_grid();
  const GroundState2D w = shoot_radial_ground_state(1, 1, 4);
  const double eps = 0.2;
  const CylPoint c{g->s(0), g->r(100)};
  CylField u(g);
  for (std::size_t i = 0; i < g->ns(); ++i)
    for (std::size_t j = 0; j < g->nr(); ++j) {
      const double d =
          std::min(std::hypot(g->s(i) - c.s, g->r(j) - c.r), std::hypot(g->s(i) + c.s, g->r(j) - c.r));
      u(i, j) = w.value(d / eps);
    }
  EXPECT_EQ(rescaled_profile_check(u, c, eps, w, 3), 0.0);
  EXPECT_EQ(rescaled_profile_check(u, c, eps, w, 0), 0.0);
  CylField v = u;
  v(0, 100) += 0.25;
  EXPECT_NEAR(rescaled_profile_check(v, c, eps, w, 0), 0.25, 1e-14);
}

TEST(Profile, WindowOutsideGrid) {
  const auto g = fine_grid();
  const GroundState2D w = shoot_radial_ground_state(1, 1, 4);
  EXPECT_THROW(rescaled_profile_check(CylField(g), {0, 0.3}, 0.2, w, 3), DomainError);
  EXPECT_THROW(rescaled_profile_check(CylField(g), {0, 2}, 0.2, w, 12), DomainError);
}

TEST(DecayFitTest, RecoversBaseEnvelope) {
  const auto g = fine_grid();
  const CylPoint c{0, 2};
  const RegionLambda L{2, 1, 1};
  const double eps = 0.1;
  const EnvelopeConstants k{1.7, 0.6, 0.0, 0.0};
  CylField u(g);
  for (std::size_t i = 0; i < g->ns(); ++i)
    for (std::size_t j = 0; j < g->nr(); ++j)
      u(i, j) = decay_envelope(EnvelopeCase::Base, k, eps, {g->s(i), g->r(j)}, c);
  const DecayFit f = fit_decay(u, c, eps, L);
  EXPECT_NEAR(f.C, 1.7, 1e-6);
  EXPECT_NEAR(f.lambda, 0.6, 1e-6);
  EXPECT_NEAR(f.lambda_hat, 6.0, 1e-5);
  EXPECT_LT(f.rms, 1e-8);
  EXPECT_GT(f.samples, 100u);
}

TEST(DecayFitTest, RecoversQuadraticEnvelope) {
  const auto g = fine_grid();
  const CylPoint c{0, 2};
  const RegionLambda L{2, 1, 1};
  const double eps = 0.1;
  const EnvelopeConstants k{0.9, 0.4, 0.05, 0.0};
  CylField u(g);
  for (std::size_t i = 0; i < g->ns(); ++i)
    for (std::size_t j = 0; j < g->nr(); ++j)
      u(i, j) = decay_envelope(EnvelopeCase::InfinityQuadratic, k, eps, {g->s(i), g->r(j)}, c);
  const DecayFit f = fit_decay(u, c, eps, L, EnvelopeCase::InfinityQuadratic);
  EXPECT_NEAR(f.C, 0.9, 1e-6);
  EXPECT_NEAR(f.lambda, 0.4, 1e-6);
  EXPECT_NEAR(f.nu, 0.05, 1e-6);
}

TEST(DecayFitTest, TooFewSamples) {
  const auto g = fine_grid();
  EXPECT_THROW(fit_decay(CylField(g), {0, 2}, 0.1, RegionLambda{2, 1, 1}), SolverError);
}

TEST(Tail, MaxOutsideBall) {
  const auto g = fine_grid();
  CylField u(g, 0.5);
  u(0, 100) = 3.0;
  EXPECT_EQ(tail_max(u, {g->s(0), g->r(100)}, 0.1, 1), 0.5);
  EXPECT_EQ(tail_max(u, {g->s(0), g->r(100)}, 0.1, 100), 0.0);
}

TEST(AtomicWrite, ReplacesWholeFile) {
  const std::string dir = ::testing::TempDir() + "/cylsp_atomic";
  const std::string path = dir + "/a.txt";
  write_text_atomic(path, "first\nsecond\n");
  write_text_atomic(path, "x\n");
  std::ifstream is(path);
  std::stringstream ss;
  ss << is.rdbuf();
  EXPECT_EQ(ss.str(), "x\n");
  EXPECT_FALSE(std::filesystem::exists(path + ".tmp"));
}
