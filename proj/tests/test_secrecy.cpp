#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "swipt/secrecy.hpp"

using namespace swipt;

TEST(InfoRate, Examples) {
    EXPECT_EQ(info_rate(1.0, 0.0, 0.0, 1.0), 0.0);
    EXPECT_NEAR(info_rate(1.0, 1.0, 0.0, 1.0), 1.0, 1e-15);
    EXPECT_EQ(info_rate(3.0, 7.0, 1.0, 1.0), 0.0);
    EXPECT_THROW(info_rate(1.0, 1.0, 0.0, 0.0), std::domain_error);
}

TEST(EveRate, Examples) {
    EXPECT_EQ(eve_rate(2.0, 0.0, 0.3, 1.0), 0.0);
    EXPECT_NEAR(eve_rate(4.0, 1.5, 0.5, 1.0), std::log2(1.75), 1e-15);
    EXPECT_NEAR(eve_rate(4.0, 1.5, 0.5, 1.0), 0.8074, 1e-4);
    EXPECT_EQ(eve_rate(4.0, 9.0, 1.0, 1.0), 0.0);
    EXPECT_THROW(eve_rate(1.0, 1.0, 0.0, -1.0), std::domain_error);
}

TEST(EveRate, InterferenceCeiling) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 10000; ++i) {
        const double a = 0.01 + 0.99 * u(rng);
        const double b = std::pow(10.0, 12.0 * u(rng) - 6.0), p = std::pow(10.0, 12.0 * u(rng) - 6.0);
        EXPECT_LE(eve_rate(b, p, a, 1.0), std::log2(1.0 + (1.0 - a) / a) * (1.0 + 1e-12));
    }
}

TEST(SecrecyRate, Examples) {
    EXPECT_NEAR(secrecy_rate(4.0, 1.0, 1.0, 0.0, 1.0), std::log2(5.0) - 1.0, 1e-15);
    EXPECT_NEAR(secrecy_rate(4.0, 1.0, 1.0, 0.0, 1.0), 1.3219, 1e-4);
    EXPECT_EQ(secrecy_rate(1.0, 4.0, 1.5, 0.5, 1.0), 0.0);
    EXPECT_EQ(secrecy_rate(5.0, 1.0, 0.0, 0.2, 1.0), 0.0);
    EXPECT_THROW(secrecy_rate(1.0, 1.0, 1.0, 0.0, 0.0), std::domain_error);
}

TEST(SecrecyRate, NoEavesdropperIsInfoRate) {
    for (double a : {0.0, 0.3, 0.9})
        EXPECT_NEAR(secrecy_rate(2.0, 0.0, 3.0, a, 0.5), info_rate(2.0, 3.0, a, 0.5), 1e-14);
}

TEST(SecrecyRate, MatchesRateDifference) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 10000; ++i) {
        const double h = std::pow(10.0, 6.0 * u(rng) - 3.0), b = std::pow(10.0, 6.0 * u(rng) - 3.0);
        const double p = std::pow(10.0, 6.0 * u(rng) - 3.0), a = u(rng), s = std::pow(10.0, 2.0 * u(rng) - 1.0);
        const double direct = std::max(0.0, info_rate(h, p, a, s) - eve_rate(b, p, a, s));
        EXPECT_NEAR(secrecy_rate(h, b, p, a, s), direct, 1e-12);
    }
}

TEST(SecrecyRate, MonotoneInGains) {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 5000; ++i) {
        const double h = std::pow(10.0, 4.0 * u(rng) - 2.0), b = std::pow(10.0, 4.0 * u(rng) - 2.0);
        const double a = 0.95 * u(rng), s = 1.0;
        const Threshold x = threshold_x(h, b, a, s);
        if (x.unbounded) continue;
        const double p = (x.watts + 1e-3) * (1.0 + 10.0 * u(rng));
        const double r = secrecy_rate(h, b, p, a, s);
        EXPECT_GE(secrecy_rate(h * 1.5, b, p, a, s), r);
        EXPECT_LE(secrecy_rate(h, b * 1.5, p, a, s), r);
    }
}

TEST(ThresholdX, Examples) {
    const Threshold x = threshold_x(1.0, 4.0, 0.5, 1.0);
    EXPECT_FALSE(x.unbounded);
    EXPECT_DOUBLE_EQ(x.watts, 1.5);
    EXPECT_EQ(threshold_x(4.0, 1.0, 0.3, 1.0), Threshold::finite(0.0));
    EXPECT_EQ(threshold_x(2.0, 2.0, 0.3, 1.0), Threshold::finite(0.0));
    // With no AN the rate is positive for every p > 0 exactly when the IR
    // out-hears the eavesdropper.
    EXPECT_EQ(threshold_x(2.0, 1.0, 0.0, 1.0), Threshold::finite(0.0));
    EXPECT_TRUE(threshold_x(1.0, 2.0, 0.0, 1.0).unbounded);
    EXPECT_TRUE(threshold_x(1.0, 1.0, 0.0, 1.0).unbounded);
    EXPECT_TRUE(threshold_x(3.0, 1.0, 1.0, 1.0).unbounded);
    EXPECT_EQ(threshold_x(3.0, 0.0, 0.0, 1.0), Threshold::finite(0.0));
    EXPECT_THROW(threshold_x(0.0, 0.0, 0.5, 1.0), std::domain_error);
    EXPECT_THROW(threshold_x(1.0, 1.0, 0.5, 0.0), std::domain_error);
}

TEST(ThresholdX, SentinelBehaviour) {
    const Threshold inf = Threshold::infinite();
    EXPECT_TRUE(inf.covers(1e300));
    EXPECT_EQ(inf.capped(7.0), 7.0);
    EXPECT_EQ(Threshold::finite(-2.0).watts, 0.0);
    EXPECT_EQ(Threshold::finite(3.0).capped(2.0), 2.0);
    EXPECT_FALSE(Threshold::finite(3.0).covers(3.5));
}

TEST(ThresholdX, SignClassificationProperty) {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 10000; ++i) {
        double h = std::pow(10.0, 8.0 * u(rng) - 4.0), b = std::pow(10.0, 8.0 * u(rng) - 4.0);
        const double a = i % 10 == 0 ? 0.0 : u(rng), s = std::pow(10.0, 4.0 * u(rng) - 2.0);
        const Threshold x = threshold_x(h, b, a, s);
        if (b > h) {
            if (a == 0.0) {
                EXPECT_TRUE(x.unbounded);
                EXPECT_EQ(secrecy_rate(h, b, 10.0 * u(rng), a, s), 0.0);
                continue;
            }
            ASSERT_FALSE(x.unbounded);
            EXPECT_EQ(secrecy_rate(h, b, x.watts * u(rng) * (1.0 - 1e-9), a, s), 0.0);
            // At the boundary itself only rounding separates the rates.
            EXPECT_LE(secrecy_rate(h, b, x.watts, a, s), 1e-12);
            EXPECT_GT(secrecy_rate(h, b, x.watts * (1.0 + 1e-9 + 9.0 * u(rng)), a, s), 0.0);
        } else {
            EXPECT_EQ(x, Threshold::finite(0.0));
            EXPECT_GT(secrecy_rate(h, b, std::pow(10.0, 6.0 * u(rng) - 3.0), a, s), 0.0);
        }
    }
}

TEST(JointThreshold, IsAlphaOneLimit) {
    const double h = 0.5, b = 2.0, s = 1.0;
    const Threshold j = joint_threshold(h, b, s);
    EXPECT_DOUBLE_EQ(j.watts, s * (1.0 / h - 1.0 / b));
    EXPECT_NEAR(threshold_x(h, b, 1.0 - 1e-9, s).watts, j.watts, 1e-8);
    EXPECT_EQ(joint_threshold(2.0, 0.5, s), Threshold::finite(0.0));
}

namespace {

Instance one_cell(double h, double b, double er_gain) {
    Instance inst;
    inst.config.num_subcarriers = 1;
    inst.config.resize_receivers(1, 1);
    inst.config.noise_power = 1.0;
    inst.channels.gains = Matrix<double>(2, 1);
    inst.channels.gains(0, 0) = h;
    inst.channels.gains(1, 0) = er_gain;
    inst.channels.eve_gains = Matrix<double>(1, 1, b);
    return inst;
}

}  // namespace

TEST(HarvestedPower, Examples) {
    Allocation a = Allocation::zeros(1, 1);
    const std::vector<double> row{0.1};
    EXPECT_EQ(harvested_power(row, 0.5, a), 0.0);
    a.assign(0, 0) = 1;
    a.power(0, 0) = 2.0;
    EXPECT_NEAR(harvested_power(row, 0.5, a), 0.1, 1e-15);
    a.power(0, 0) = 4.0;
    EXPECT_NEAR(harvested_power(row, 0.5, a), 0.2, 1e-15);
    // Unassigned power does not radiate.
    a.assign(0, 0) = 0;
    EXPECT_EQ(harvested_power(row, 0.5, a), 0.0);
}

TEST(HarvestedPower, SumsAcrossSubcarriersAndOwners) {
    Allocation a = Allocation::zeros(2, 3);
    a.assign(0, 0) = a.assign(1, 1) = a.assign(0, 2) = 1;
    a.power(0, 0) = 1.0, a.power(1, 1) = 2.0, a.power(0, 2) = 3.0;
    const std::vector<double> g{1.0, 10.0, 100.0};
    EXPECT_NEAR(harvested_power(g, 0.25, a), 0.25 * (1.0 + 20.0 + 300.0), 1e-12);
    EXPECT_NEAR(total_power(a), 6.0, 1e-15);
    EXPECT_TRUE(a.valid(3.0));
    EXPECT_FALSE(a.valid(2.5));
}

TEST(WeightedSumRate, Examples) {
    Instance inst = one_cell(4.0, 1.0, 1.0);
    Allocation a = Allocation::zeros(1, 1);
    a.power(0, 0) = 1.0;
    EXPECT_EQ(weighted_sum_rate(inst, a), 0.0);
    a.assign(0, 0) = 1;
    EXPECT_NEAR(weighted_sum_rate(inst, a), secrecy_rate(4.0, 1.0, 1.0, 0.0, 1.0), 1e-15);
    inst.config.weights = {3.0};
    EXPECT_NEAR(weighted_sum_rate(inst, a), 3.0 * secrecy_rate(4.0, 1.0, 1.0, 0.0, 1.0), 1e-14);
}

TEST(Allocation, Validity) {
    Allocation a = Allocation::zeros(2, 2);
    EXPECT_TRUE(a.valid(1.0));
    a.power(0, 0) = 0.5;
    EXPECT_FALSE(a.valid(1.0));  // power without assignment
    a.assign(0, 0) = 1;
    EXPECT_TRUE(a.valid(1.0));
    a.assign(1, 0) = 1;
    EXPECT_FALSE(a.valid(1.0));  // two owners
    a.assign(1, 0) = 0;
    a.split(0, 0) = 1.5;
    EXPECT_FALSE(a.valid(1.0));
    EXPECT_EQ(a.owner(1), 2u);
}
