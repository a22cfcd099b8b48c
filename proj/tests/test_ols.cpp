#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "trendcause/ols.hpp"
#include "trendcause/random.hpp"

using namespace tc;

TEST(Ols, ConstantTarget) {
    const Eigen::MatrixXd x = Eigen::MatrixXd::Ones(12, 1);
    const Eigen::VectorXd y = Eigen::VectorXd::Constant(12, 3.25);
    const auto fit = ols(x, y);
    EXPECT_NEAR(fit.coeffs(0), 3.25, 1e-14);
    EXPECT_NEAR(fit.ssr, 0.0, 1e-24);
}

TEST(Ols, ExactLinearRecovery) {
    Eigen::MatrixXd x(20, 2);
    Eigen::VectorXd y(20);
    for (int i = 0; i < 20; ++i) {
        x(i, 0) = 1.0 + 0.1 * i;
        x(i, 1) = std::sin(i);
        y(i) = 2.0 * x(i, 0) - 7.5 * x(i, 1);
    }
    const auto fit = ols(x, y);
    EXPECT_NEAR(fit.coeffs(0), 2.0, 1e-12);
    EXPECT_NEAR(fit.coeffs(1), -7.5, 1e-12);
    EXPECT_LT(fit.residuals.cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Ols, DuplicatedColumnIsSingular) {
    Eigen::MatrixXd x(10, 3);
    for (int i = 0; i < 10; ++i) x.row(i) << 1.0, i * 0.5, i * 0.5;
    try {
        ols(x, Eigen::VectorXd::LinSpaced(10, 0, 1));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::SingularDesign);
    }
}

TEST(Ols, ScaleDisparityIsNotRankDeficiency) {
    // Columns differ by ~1e8 in magnitude but are independent.
    Eigen::MatrixXd x(30, 2);
    Eigen::VectorXd y(30);
    for (int i = 0; i < 30; ++i) {
        x(i, 0) = 1e-4 * (i + 1);
        x(i, 1) = 1e4 * std::cos(i);
        y(i) = 3.0 * x(i, 0) + 1e-3 * x(i, 1);
    }
    const auto fit = ols(x, y);
    EXPECT_NEAR(fit.coeffs(0), 3.0, 1e-8);
    EXPECT_NEAR(fit.coeffs(1), 1e-3, 1e-12);
}

TEST(Ols, TooFewRows) {
    EXPECT_THROW(ols(Eigen::MatrixXd::Ones(2, 2), Eigen::VectorXd::Ones(2)), Error);
}

TEST(Ols, StandardErrorsMatchNormalEquations) {
    Rng rng(5);
    Eigen::MatrixXd x(50, 3);
    Eigen::VectorXd y(50);
    for (int i = 0; i < 50; ++i) {
        x.row(i) << 1.0, rng.normal(), rng.normal();
        y(i) = 0.5 + x(i, 1) - 2.0 * x(i, 2) + rng.normal();
    }
    const auto fit = ols(x, y);
    const Eigen::MatrixXd xtx_inv = (x.transpose() * x).inverse();
    const double s2 = fit.ssr / (50 - 3);
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(fit.std_errors(k), std::sqrt(s2 * xtx_inv(k, k)), 1e-10);
    EXPECT_NEAR((x.transpose() * fit.residuals).cwiseAbs().maxCoeff(), 0.0, 1e-10);
}
