#include "cylsp/errors.hpp"
#include "cylsp/poisson.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace cylsp;

namespace {

std::shared_ptr<const CylGrid> square(double h, std::size_t n, bool even = true) {
  return std::make_shared<CylGrid>(CylGrid::uniform(0, h, n, h, n, even));
}

CylField bump(std::shared_ptr<const CylGrid> g, double s0, double r0, double w) {
  CylField f(g);
  for (std::size_t i = 0; i < g->ns(); ++i)
    for (std::size_t j = 0; j < g->nr(); ++j) {
      const double q = (std::pow(g->s(i) - s0, 2) + std::pow(g->r(j) - r0, 2)) / (w * w);
      f(i, j) = q < 1 ? std::exp(-1 / (1 - q)) : 0.0;
    }
  return f;
}

} // namespace

TEST(EllipticK, Endpoints) {
  EXPECT_NEAR(elliptic_K(0), std::numbers::pi / 2, 1e-15);
  // K(m) ~ ln(4/sqrt(1-m)) near m = 1
  const double m1 = 1e-12;
  EXPECT_NEAR(elliptic_K_complement(m1), std::log(4 / std::sqrt(m1)), 1e-9);
}

TEST(RingKernel, AxisLimit) {
  for (double ds : {0.0, 0.7})
    EXPECT_NEAR(ring_kernel(2.0, 0.0, ds), 1 / (4 * std::numbers::pi * std::hypot(2.0, ds)),
                1e-15);
}

TEST(RingKernel, SymmetryAndEvenness) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0.1, 3);
  for (int k = 0; k < 100; ++k) {
    const double r = U(rng), rp = U(rng), ds = U(rng) - 1.5;
    EXPECT_NEAR(ring_kernel(r, rp, ds), ring_kernel(rp, r, ds), 1e-15);
    EXPECT_EQ(ring_kernel(r, rp, ds), ring_kernel(r, rp, -ds));
  }
}

TEST(RingKernel, UnitRingAgainstTrapezoid) {
  // periodic trapezoid with 512 points over the angle
  const int n = 512;
  double acc = 0;
  for (int k = 0; k < n; ++k) {
    const double psi = 2 * std::numbers::pi * k / n;
    acc += 1 / std::sqrt(4 + 1 - 4 * std::cos(psi));
  }
  const double want = acc / n / (4 * std::numbers::pi);
  EXPECT_NEAR(ring_kernel(2, 1, 0), want, 1e-8 * want);
}

TEST(RingKernel, AgainstAngularQuadrature) {
  for (double ds : {0.0, 0.3})
    for (int k = 0; k <= 24; ++k) {
      // 1 - m from 1 down to 1e-6, log spaced
      const double m1 = std::pow(10.0, -6.0 * k / 24);
      const double q = std::sqrt(m1);
      double rp = (1 - q) / (1 + q);
      if (ds > 0) {
        // solve ((1-rp)^2 + ds^2) / ((1+rp)^2 + ds^2) = m1 for rp near 1
        const double A = 1 - m1, B = 2 * (1 + m1), C = (1 - m1) * (1 + ds * ds);
        const double disc = B * B - 4 * A * C;
        if (disc < 0) continue;
        rp = (B - std::sqrt(disc)) / (2 * A);
        if (!(rp > 0) || A == 0) continue;
      }
      const double want = oracle::ring_average(1.0, rp, ds);
      EXPECT_NEAR(ring_kernel(1.0, rp, ds), want, 1e-8 * want) << "m1 " << m1 << " ds " << ds;
    }
}

TEST(RingKernel, CoincidentPoint) {
  EXPECT_THROW(ring_kernel(1, 1, 0), DomainError);
  EXPECT_THROW(ring_kernel(-1, 1, 0.5), DomainError);
}

TEST(Oracle3D, ClassicalBall) {
  EXPECT_NEAR(oracle::unit_ball_potential(0.0), 0.5, 1e-10);
  EXPECT_NEAR(oracle::unit_ball_potential(2.0), 1.0 / 6, 1e-10);
}

TEST(Newtonian, ZeroSource) {
  const auto g = square(0.1, 10);
  const CylField phi = newtonian_potential(CylField(g));
  for (double v : phi.values()) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(poisson_residual(phi, CylField(g)), 0.0);
}

TEST(Newtonian, NegativeSourceRejected) {
  const auto g = square(0.1, 10);
  CylField f(g, 1.0);
  f(3, 3) = -1e-3;
  EXPECT_THROW(newtonian_potential(f), DomainError);
}

TEST(Newtonian, PositivityAndFarField) {
  const auto g = square(1.0 / 32, 40);
  const CylField f = bump(g, 0.0, 0.5, 0.4);
  const CylField phi = newtonian_potential(f);
  for (double v : phi.values()) EXPECT_GE(v, 0.0);
  const double mass = f.integral();
  // support radius ~0.9; 10x beyond
  const double x = 9.0;
  EXPECT_NEAR(4 * std::numbers::pi * x * potential_at(f, 0, x) / mass, 1.0, 1e-2);
  double prev = potential_at(f, 0, 1.0);
  for (double d = 1.5; d < 10; d += 0.5) {
    const double v = potential_at(f, d * 0.6, d * 0.8);
    EXPECT_LT(v, prev);
    prev = v;
  }
}

TEST(Newtonian, GaussianAgainstOracle) {
  const auto g = square(1.0 / 32, 224);
  CylField f(g);
  for (std::size_t i = 0; i < g->ns(); ++i)
    for (std::size_t j = 0; j < g->nr(); ++j)
      f(i, j) = std::exp(-(std::pow(g->s(i), 2) + std::pow(g->r(j), 2)));
  for (double x : {0.5, 1.5, 3.0}) {
    const double want = oracle::gaussian_potential(x);
    EXPECT_NEAR(potential_at(f, 0, x), want, 1e-3 * want);
  }
}

TEST(Newtonian, ResidualRefinement) {
  // smooth compact bump, potential on the grid, discrete Laplacian residual
  double prev = 0;
  for (int level = 0; level < 3; ++level) {
    const double h = 1.0 / (16 << level);
    const auto g = square(h, static_cast<std::size_t>(1.6 / h));
    const CylField f = bump(g, 0.0, 0.6, 0.5);
    const double res = poisson_residual(newtonian_potential(f), f);
    if (level == 2) {
      EXPECT_LT(res, 1e-2);
    }
    if (level > 0) {
      EXPECT_GT(prev / res, 2.5) << "h " << h;
    }
    prev = res;
  }
}

TEST(Newtonian, HarmonicFarField) {
  // 1/(4π|x|) away from the origin, zero source there
  const double h = 1.0 / 64;
  auto g = std::make_shared<CylGrid>(CylGrid::uniform(-1.0, h, 128, h, 64, false));
  CylField phi(g), src(g);
  for (std::size_t i = 0; i < g->ns(); ++i)
    for (std::size_t j = 0; j < g->nr(); ++j)
      phi(i, j) = 1 / (4 * std::numbers::pi * std::hypot(g->s(i) - 10.0, g->r(j)));
  EXPECT_LT(poisson_residual(phi, src), 1e-6);
}

TEST(Interaction, Relations) {
  const auto g = square(1.0 / 16, 24);
  const CylField f = bump(g, 0.2, 0.7, 0.5);
  const CylField z(g);
  EXPECT_EQ(interaction_energy(f, z), 0.0);
  const CylField phi = newtonian_potential(f);
  CylField prod(g);
  for (std::size_t k = 0; k < prod.values().size(); ++k)
    prod.values()[k] = phi.values()[k] * f.values()[k];
  const double D = interaction_energy(f, f);
  EXPECT_NEAR(D, 4 * std::numbers::pi * prod.integral(), 1e-12 * D);
}

TEST(Interaction, CauchySchwarz) {
  const auto g = square(1.0 / 12, 18);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(0, 1);
  for (int k = 0; k < 30; ++k) {
    CylField f(g), h(g);
    for (auto& v : f.values()) v = U(rng);
    for (auto& v : h.values()) v = U(rng) * U(rng);
    const double fg = interaction_energy(f, h);
    EXPECT_NEAR(fg, interaction_energy(h, f), 1e-13 * fg);
    EXPECT_LE(fg * fg, interaction_energy(f, f) * interaction_energy(h, h) * (1 + 1e-12));
  }
}

TEST(KernelMatrixTest, MatchesDirectSummation) {
  const auto g = square(1.0 / 16, 20);
  const CylField f = bump(g, 0.3, 0.6, 0.5);
  const KernelMatrix K(g);
  const auto a = K.potential(f.values());
  const CylField b = newtonian_potential(f);
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(a[k], b.values()[k], 1e-14);
  EXPECT_EQ(K(3, 7), K(7, 3));
}

TEST(FieldIO, RoundTrip) {
  const auto g = std::make_shared<CylGrid>(CylGrid::uniform(0, 0.1, 5, 0.2, 4, true));
  CylField f(g);
  for (std::size_t k = 0; k < f.values().size(); ++k) f.values()[k] = 0.1 * k + 1e-17;
  const std::string path = ::testing::TempDir() + "/f.grid";
  write_field(path, f);
  const CylField back = read_field(path);
  ASSERT_EQ(back.values().size(), f.values().size());
  for (std::size_t k = 0; k < f.values().size(); ++k) EXPECT_EQ(back.values()[k], f.values()[k]);
  EXPECT_EQ(back.grid().even_in_s, true);
}
