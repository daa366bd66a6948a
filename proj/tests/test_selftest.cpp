#include <subjtime/selftest.hpp>

#include <gtest/gtest.h>

using namespace subjtime;

// Integral representation against an MPFR series value (alpha = 0.8, x = 1)
TEST(SelfTest, IntegralOracleMatchesSeries) {
  EXPECT_NEAR(selftest::ml_alpha_alpha_integral(0.8, 1.0), 0.25574384475824187, 1e-12);
  const double x = 3.0;
  EXPECT_NEAR(selftest::ml_alpha_alpha_integral(0.6, x), mittag_leffler(0.6, 0.6, -x), 1e-10);
}

TEST(SelfTest, EveryInvariantPasses) {
  const auto all = selftest::invariants();
  ASSERT_GE(all.size(), 20u);
  for (const auto& inv : all) {
    const auto o = selftest::run(inv);
    EXPECT_TRUE(o.passed) << o.module << "." << o.name << " = " << o.m.value << " (threshold " << o.m.threshold
                          << ") " << o.error;
  }
}
