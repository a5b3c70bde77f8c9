#include <gtest/gtest.h>

#include <cmath>

#include "fverify/decomposition.hpp"
#include "fverify/discrimination.hpp"
#include "fverify/inference.hpp"
#include "fverify/simulate.hpp"

using namespace fverify;

TEST(Law, Parsing) {
  const auto u = std::get<simulate::UniformLaw>(simulate::parse_law("uniform:0.05,0.95"));
  EXPECT_EQ(u.lo, 0.05);
  EXPECT_EQ(u.hi, 0.95);
  const auto b = std::get<simulate::BetaLaw>(simulate::parse_law("beta:2,3.5"));
  EXPECT_EQ(b.b, 3.5);
  EXPECT_EQ(simulate::to_string(simulate::parse_law("beta:2,2")), "beta:2,2");
  for (const char* bad : {"beta:0,2", "uniform:0.5,0.2", "gauss:0,1", "beta:2", "uniform:-0.1,0.5"}) {
    try {
      simulate::parse_law(bad);
      ADD_FAILURE() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kBadLaw);
    }
  }
}

TEST(Generate, Deterministic) {
  simulate::GeneratorConfig cfg;
  cfg.n = 300;
  cfg.seed = 17;
  const auto a = simulate::generate(cfg);
  const auto b = simulate::generate(cfg);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a.forecast(i), b.forecast(i));
    EXPECT_EQ(a.outcome(i), b.outcome(i));
  }
  cfg.seed = 18;
  const auto c = simulate::generate(cfg);
  EXPECT_NE(a.forecast(0), c.forecast(0));
}

TEST(Generate, CalibratedBaseRate) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    simulate::GeneratorConfig cfg;
    cfg.n = 4000;
    cfg.seed = seed;
    const auto s = simulate::generate(cfg);
    double pbar = 0.0;
    for (double p : s.forecasts()) pbar += p;
    pbar /= static_cast<double>(s.size());
    EXPECT_LT(std::abs(s.base_rate() - pbar), 3.0 * std::sqrt(0.25 / cfg.n));
  }
}

TEST(Generate, IndependentOutcomesWhenSlopeIsZero) {
  double c = 0.0, dis = 0.0;
  const int reps = 100;
  for (int r = 0; r < reps; ++r) {
    simulate::GeneratorConfig cfg;
    cfg.n = 1000;
    cfg.beta = 0.0;
    cfg.seed = 5;
    cfg.stream = static_cast<std::uint64_t>(r);
    const auto s = simulate::generate(cfg);
    c += discrimination::c_statistic(s);
    dis += decomposition::lb_decompose(s).component("DIS");
  }
  EXPECT_NEAR(c / reps, 0.5, 0.01);
  EXPECT_NEAR(dis / reps, 0.0, 1e-3);
}

TEST(Generate, CoxRecoveryOfOverForecasting) {
  double a = 0.0, b = 0.0;
  const int reps = 200;
  for (int r = 0; r < reps; ++r) {
    simulate::GeneratorConfig cfg;
    cfg.n = 10000;
    cfg.alpha = -0.26;
    cfg.beta = 1.11;
    cfg.law = simulate::UniformLaw{0.05, 0.95};
    cfg.seed = 2718;
    cfg.stream = static_cast<std::uint64_t>(r);
    const auto fit = inference::fit_cox_calibration(simulate::generate(cfg));
    ASSERT_TRUE(fit.converged);
    a += fit.alpha;
    b += fit.beta;
  }
  EXPECT_NEAR(a / reps, -0.26, 0.05);
  EXPECT_NEAR(b / reps, 1.11, 0.05);
}

TEST(Generate, CalibratedEstimatesWithinThreeSe) {
  int inside = 0;
  const int reps = 1000;
  for (int r = 0; r < reps; ++r) {
    simulate::GeneratorConfig cfg;
    cfg.n = 5000;
    cfg.seed = 99;
    cfg.stream = static_cast<std::uint64_t>(r);
    const auto fit = inference::fit_cox_calibration(simulate::generate(cfg));
    inside += std::abs(fit.alpha) <= 3 * fit.se_alpha && std::abs(fit.beta - 1) <= 3 * fit.se_beta;
  }
  EXPECT_GE(inside, 0.99 * reps - 1e-9);
}
