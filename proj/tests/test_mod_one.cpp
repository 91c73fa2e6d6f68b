#include <gtest/gtest.h>

#include <random>

#include "prequant/mod_one.hpp"

using prequant::ModOne;

TEST(ModOne, FromRealWrapsIntoUnitInterval) {
  EXPECT_NEAR(ModOne::from_real(2.25).value(), 0.25, 1e-15);
  EXPECT_NEAR(ModOne::from_real(-0.25).value(), 0.75, 1e-15);
  EXPECT_EQ(ModOne::from_real(3.0).value(), 0.0);
  EXPECT_EQ(ModOne::from_real(-1e-20).value(), 0.0);
}

TEST(ModOne, CenteredRepresentative) {
  EXPECT_NEAR(ModOne::from_real(0.75).centered(), -0.25, 1e-15);
  EXPECT_EQ(ModOne::from_real(0.5).centered(), 0.5);
  EXPECT_EQ(ModOne::from_real(-0.5).centered(), 0.5);
}

TEST(ModOne, WrapAroundDistance) {
  const ModOne a = ModOne::from_real(0.99), b = ModOne::from_real(0.01);
  EXPECT_NEAR(a.distance(b), 0.02, 1e-12);
  EXPECT_NEAR(b.distance(a), 0.02, 1e-12);
  EXPECT_TRUE(a.near(b, 0.03));
  EXPECT_FALSE(a.near(b, 0.01));
  EXPECT_EQ(ModOne::from_real(0.5).distance(ModOne{}), 0.5);
}

TEST(ModOne, IntegerScaling) {
  EXPECT_TRUE(ModOne::from_real(0.5).scaled(2).near_zero(1e-15));
  EXPECT_NEAR(ModOne::from_real(0.3).scaled(-3).value(), 0.1, 1e-12);
}

TEST(ModOneProperty, AdditiveInverseIsExact) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int i = 0; i < 1000; ++i) {
    const ModOne a = ModOne::from_real(u(rng));
    EXPECT_EQ(a + (-a), ModOne{});
    EXPECT_EQ(a - a, ModOne{});
  }
}

TEST(ModOneProperty, AdditionIsAssociativeAndCommutative) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int i = 0; i < 500; ++i) {
    const ModOne a = ModOne::from_real(u(rng)), b = ModOne::from_real(u(rng)), c = ModOne::from_real(u(rng));
    EXPECT_EQ((a + b) + c, a + (b + c));
    EXPECT_EQ(a + b, b + a);
  }
}

TEST(ModOneProperty, AdditionMatchesRealArithmetic) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int i = 0; i < 500; ++i) {
    const double x = u(rng), y = u(rng);
    EXPECT_LT((ModOne::from_real(x) + ModOne::from_real(y)).distance(ModOne::from_real(x + y)), 1e-14);
  }
}
