#include <gtest/gtest.h>

#include <random>

#include "supershift/greens.hpp"

using namespace supershift;

namespace {

const cplx I(0.0, 1.0);

// omega = 1 oscillator kernel in closed form.
cplx mehler(double t, double x, cplx y) {
  const cplx pre = 1.0 / std::sqrt(2.0 * I * kPi * std::sin(2.0 * t));
  const cplx d = y - x;
  return pre * std::exp(-d * d / (2.0 * I * std::tan(2.0 * t)) - I * x * y * std::tan(t));
}

cplx free_kernel(double t, double x, cplx y) {
  const cplx d = y - x;
  return std::exp(I * d * d / (4.0 * t)) / std::sqrt(4.0 * kPi * I * t);
}

}  // namespace

TEST(GreensKernel, FreeClosedForm) {
  const auto k = make_kernel(Free{});
  EXPECT_NEAR(k->a(0.25), 1.0, 1e-15);
  const cplx g = greens_value(*k, 0.25, 0.0, 0.0);
  EXPECT_NEAR(g.real(), 0.3989422804014327, 1e-14);
  EXPECT_NEAR(g.imag(), -0.3989422804014327, 1e-14);
  for (cplx z : {cplx(1.0, 0.0), cplx(-0.5, 0.3), cplx(2.0, -1.0)})
    EXPECT_LT(std::abs(greens_value(*k, 0.7, 0.2, z) - free_kernel(0.7, 0.2, z)), 1e-14);
}

TEST(GreensKernel, HarmonicMatchesClosedForm) {
  const auto k = make_kernel(Harmonic{TimeProfile::constant(1.0)});
  EXPECT_NEAR(k->kernel_horizon(), kPi / 2.0, 1e-8);
  EXPECT_NEAR(k->horizon(), kPi / 4.0, 1e-8);
  const cplx z(-0.2, 0.0);
  EXPECT_LT(std::abs(greens_value(*k, 0.3, 0.7, z) - mehler(0.3, 0.7, z)), 1e-9);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> ut(0.02, kPi / 4.0), ux(-2.0, 2.0), uy(-0.5, 0.5);
  for (int i = 0; i < 40; ++i) {
    const double t = ut(rng), x = ux(rng);
    const cplx y(ux(rng), uy(rng));
    const cplx exact = mehler(t, x, y);
    EXPECT_LT(std::abs(greens_value(*k, t, x, y) - exact), 1e-9 * std::max(1.0, std::abs(exact)))
        << t << " " << x << " " << y;
  }
}

TEST(GreensKernel, InvertedOscillatorHasNoHorizon) {
  const auto k = make_kernel(Harmonic{TimeProfile::constant(-1.0)});
  EXPECT_TRUE(std::isinf(k->horizon()));
  const double t = 0.6, x = 0.3;
  const cplx y(0.8, 0.1);
  const cplx pre = 1.0 / std::sqrt(2.0 * I * kPi * std::sinh(2.0 * t));
  const cplx d = y - x;
  const cplx exact =
      pre * std::exp(-d * d / (2.0 * I * std::tanh(2.0 * t)) + I * x * y * std::tanh(t));
  EXPECT_LT(std::abs(greens_value(*k, t, x, y) - exact), 1e-9);
}

TEST(GreensKernel, PoschlTellerReferenceValues) {
  const auto k1 = make_kernel(PoschlTeller{1});
  const cplx g = greens_value(*k1, 0.5, 0.0, 1.0);
  EXPECT_LT(std::abs(g - cplx(0.37442610434654313, 0.18779544935733517)), 1e-12);
  EXPECT_LT(std::abs(k1->gtilde(0.5, 0.0, 1.0) - cplx(0.41862375434663008, -0.014703425185451002)),
            1e-12);
  const auto k2 = make_kernel(PoschlTeller{2});
  EXPECT_LT(std::abs(k2->gtilde(0.3, 0.4, {-0.5, 0.2}) -
                     cplx(0.35593846913804639, 0.44019917566181304)),
            1e-12);
  EXPECT_LE(k1->sector_angle(), kPi / 3.0);
  EXPECT_THROW(make_kernel(PoschlTeller{0}), domain_error);
}

TEST(GreensKernel, ContourAngleKeepsPoleMargin) {
  const auto k = make_kernel(PoschlTeller{2});
  for (double x : {0.0, 0.5, 2.0, 6.0}) {
    const double th = k->contour_angle(x);
    EXPECT_GT(th, 0.0);
    EXPECT_LE(th, k->sector_angle());
    EXPECT_GE(kPi / 2.0 * std::cos(th) - std::abs(x) * std::sin(th), k->pole_margin() * 0.999);
  }
  const auto f = make_kernel(Free{});
  EXPECT_DOUBLE_EQ(f->contour_angle(5.0), kPi / 4.0);
}

TEST(GreensKernel, HorizonIsEnforced) {
  const auto k = make_kernel(Harmonic{TimeProfile::constant(1.0)});
  EXPECT_THROW(k->gtilde(1.6, 0.0, 0.0), horizon_error);
  EXPECT_THROW(k->gtilde(0.0, 0.0, 0.0), domain_error);
  try {
    k->gtilde(2.0, 0.0, 0.0);
  } catch (const horizon_error& e) {
    EXPECT_NEAR(e.horizon(), kPi / 2.0, 1e-8);
  }
  const auto e = make_kernel(Electric{TimeProfile::constant(1.0)}, {.t_max = 1.0});
  EXPECT_THROW(e->gtilde(1.5, 0.0, 0.0), horizon_error);
}

TEST(GreensKernel, PdeResidualSmall) {
  const Potential ps[] = {Free{}, Electric{TimeProfile::sinusoid(1.0, 0.5, 2.0)},
                          Harmonic{TimeProfile::constant(1.0)}, PoschlTeller{1}, PoschlTeller{2}};
  for (const auto& p : ps) {
    const auto k = make_kernel(p);
    for (double t : {0.1, 0.4})
      for (cplx z : {cplx(0.3, 0.0), cplx(-1.0, 0.5)})
        EXPECT_LT(pde_residual(*k, t, 0.4, z), 1e-5) << k->label() << " t=" << t << " z=" << z;
  }
}

TEST(GreensKernel, GrowthWitnessHolds) {
  const auto k = make_kernel(PoschlTeller{2});
  for (double t : {0.1, 0.5})
    for (double x : {-1.0, 0.0, 1.5}) {
      const auto w = k->growth(t, x);
      for (cplx z : sector_samples(k->sector_angle(), 6.0, 13))
        EXPECT_LE(std::abs(k->gtilde(t, x, z)), w.A * std::exp(w.B * std::abs(z)) * (1 + 1e-9));
    }
}

TEST(AssumptionAudit, AllPotentialsPass) {
  const Potential ps[] = {Free{}, Electric{TimeProfile::constant(1.0)},
                          Harmonic{TimeProfile::constant(1.0)}, PoschlTeller{1}};
  for (const auto& p : ps) {
    const auto k = make_kernel(p);
    const auto rep = assumption_audit(*k);
    EXPECT_TRUE(rep.pass) << rep.to_json().dump(2);
    EXPECT_EQ(rep.checks.size(), 5u);
    EXPECT_EQ(rep.to_json()["potential"], k->label());
  }
}
