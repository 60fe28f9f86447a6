// Copyright 2026 The qillum Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qillum/illumination.hpp"

#include <cmath>
#include <random>
#include <set>

#include "gtest/gtest.h"

#include "qillum/symplectic.hpp"
#include "test_util.hpp"

using namespace qillum;
using qillum::testing::max_abs;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

long double cubic(long double s, long double x) {
    long double s2 = s * s;
    return 4 * x * x * x - 9 * s2 * x * x + 6 * s2 * s2 * x - (s2 * s2 * s2 - 1);
}

// Smallest symplectic eigenvalue of the partial transpose over every
// nonempty proper subset of three modes.
double min_pt_eigenvalue(const CovarianceMatrix &cov) {
    double out = INFINITY;
    for (std::set<std::size_t> part : {std::set<std::size_t>{0}, {1}, {2}}) {
        auto nu = symplectic_eigenvalues(partial_transpose(cov, Bipartition(part, 3)));
        out = std::min(out, nu.back());
    }
    return out;
}

}  // namespace

TEST(tmsv_cov, examples) {
    ASSERT_EQ(tmsv_cov(0.0).matrix(), Eigen::MatrixXd::Identity(4, 4));
    auto m = tmsv_cov(1.0).matrix();
    EXPECT_EQ(m(0, 0), 3.0);
    EXPECT_EQ(m(3, 3), 3.0);
    EXPECT_NEAR(m(0, 2), 2.8284271247461903, 1e-15);
    EXPECT_NEAR(m(1, 3), -2.8284271247461903, 1e-15);
    EXPECT_EQ(m(0, 1), 0.0);
    for (double ns : {0.0, 1e-3, 0.3, 1.0, 50.0}) {
        auto nu = symplectic_eigenvalues(tmsv_cov(ns));
        EXPECT_NEAR(nu[0], 1.0, 1e-9 * (2 * ns + 1)) << ns;
        EXPECT_NEAR(nu[1], 1.0, 1e-9 * (2 * ns + 1)) << ns;
    }
}

TEST(cq2, examples) {
    EXPECT_EQ(cq2(0.0), 0.0);
    EXPECT_NEAR(cq2(1.0), 2.8284271247461903, 1e-15);
    EXPECT_NEAR(cq2(0.295), 1.2362, 5e-5);
}

TEST(solve_cq3, frozen_high_precision_roots) {
    EXPECT_EQ(solve_cq3(0.0), 0.0);
    struct Case {
        double ns, root;
    };
    // Bisection of the cubic at 60 digits.
    for (auto [ns, root] : {Case{1e-4, 0.014142135529468905967}, Case{1e-3, 0.044721329795493692687},
                            Case{1e-2, 0.14141212010042825294}, Case{0.1, 0.44491146061821287336},
                            Case{0.5, 0.98626598272419211722}, Case{1.0, 1.4981728627893523604},
                            Case{100.0, 100.49999999999864532}, Case{1000.0, 1000.5}}) {
        EXPECT_LT(rel(solve_cq3(ns), root), 1e-14) << ns;
    }
}

TEST(solve_cq3, residual_and_bracket_on_log_grid) {
    for (int i = 0; i <= 70; ++i) {
        double ns = std::pow(10.0, -4.0 + i / 10.0);
        long double s = 2.0L * ns + 1.0L;
        long double c = solve_cq3(ns);
        long double x = c * c;
        EXPECT_LT(std::abs(cubic(s, x)), 1e-12L * s * s * s * s * s * s) << ns;
        EXPECT_GT(x, 0.0L) << ns;
        EXPECT_LT(x, s * s / 2) << ns;
    }
}

TEST(solve_cq3, matches_series_limits) {
    for (double ns : {1e-4, 1e-3, 1e-2}) {
        double series = std::sqrt(2 * ns) * (1 - 2.0 / 3.0 * ns * ns + 4.0 / 3.0 * ns * ns * ns);
        EXPECT_LT(rel(solve_cq3(ns), series), 10 * std::pow(ns, 4)) << ns;
    }
    for (double ns : {100.0, 1000.0}) {
        double series = ns * (1 + 1 / (2 * ns) - 1 / (72 * std::pow(ns, 6)));
        EXPECT_LT(rel(solve_cq3(ns), series), 1e-6) << ns;
    }
}

TEST(cc3, examples) {
    EXPECT_EQ(cc3(0.0), 0.0);
    EXPECT_NEAR(cc3(1.0), std::sqrt(5.0) - 1.0, 1e-14);
    for (double ns : {0.1, 0.5, 1.0, 5.0}) {
        EXPECT_LT(cc3(ns), solve_cq3(ns)) << ns;
    }
}

TEST(cc3, is_the_ppt_threshold) {
    for (double ns : {0.1, 0.5, 1.0, 5.0}) {
        auto at = three_mode_cov(ns, cc3(ns));
        EXPECT_GE(min_pt_eigenvalue(at), 1.0 - 1e-12) << ns;
        for (std::set<std::size_t> part : {std::set<std::size_t>{0}, {1}, {2}}) {
            EXPECT_LT(log_negativity(at, Bipartition(part, 3)), 1e-12) << ns;
        }
    }
    for (double ns : {0.1, 1.0}) {
        auto above = three_mode_cov(ns, 1.05 * cc3(ns));
        EXPECT_GT(log_negativity(above, Bipartition({1}, 3)), 0.0) << ns;
    }
}

TEST(three_mode_cov, structure_and_limits) {
    auto product = three_mode_cov(0.5, 0.0);
    EXPECT_EQ(product.matrix(), 2.0 * Eigen::MatrixXd::Identity(6, 6));

    double c = 0.4;
    auto m = three_mode_cov(0.5, c).matrix();
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            if (i == j) continue;
            EXPECT_EQ(m(2 * i, 2 * j), c);
            EXPECT_EQ(m(2 * i + 1, 2 * j + 1), -c);
            EXPECT_EQ(m(2 * i, 2 * j + 1), 0.0);
        }
    }
    double limit = solve_cq3(0.5);
    EXPECT_NO_THROW(three_mode_cov(0.5, limit));
    EXPECT_THROW(three_mode_cov(0.5, 1.01 * limit), std::invalid_argument);
    EXPECT_THROW(three_mode_cov(-0.1, 0.0), std::invalid_argument);
}

TEST(three_mode_cov, beyond_limit_is_not_bona_fide) {
    double ns = 0.5;
    double c = 1.01 * solve_cq3(ns);
    Eigen::MatrixXd m = (2 * ns + 1) * Eigen::MatrixXd::Identity(6, 6);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            if (i == j) continue;
            m(2 * i, 2 * j) = c;
            m(2 * i + 1, 2 * j + 1) = -c;
        }
    }
    EXPECT_FALSE(is_bona_fide(CovarianceMatrix(m)));
}

TEST(scenario, validation) {
    EXPECT_THROW(rho_cov(IlluminationScenario{-1, 1, 0.1, 1, 0}), std::invalid_argument);
    EXPECT_THROW(sigma_cov(IlluminationScenario{0.1, -1, 0.1, 1, 0}), std::invalid_argument);
    EXPECT_THROW(sigma_cov(IlluminationScenario{0.1, 1, 1.5, 1, 0}), std::invalid_argument);
    EXPECT_THROW(sigma_cov(IlluminationScenario{0.1, 1, 0.1, 0, 0}), std::invalid_argument);
    EXPECT_THROW(sigma2_cov(IlluminationScenario{0.1, 1, 0.1, 1, 1.01 * cq2(0.1)}), std::invalid_argument);
}

TEST(rho_cov, examples) {
    IlluminationScenario a{0.3, 2.0, 0.0, 1, 0.5};
    IlluminationScenario b = a;
    b.kappa = 0.7;
    EXPECT_EQ(rho_cov(a), rho_cov(b));

    auto nu = symplectic_eigenvalues(rho_cov(a));
    EXPECT_NEAR(nu[0], 5.0, 1e-12);
    EXPECT_NEAR(nu[1], std::sqrt(1.6 * 1.6 - 0.25), 1e-12);
    EXPECT_NEAR(nu[2], std::sqrt(1.6 * 1.6 - 0.25), 1e-12);

    Eigen::VectorXd d(6);
    d << 1, 1, 1.6, 1.6, 1.6, 1.6;
    EXPECT_EQ(rho_cov(IlluminationScenario{0.3, 0.0, 0.2, 1, 0.0}).matrix(), Eigen::MatrixXd(d.asDiagonal()));
}

TEST(rho_symplectic_analytic, examples) {
    auto omega = symplectic_form(3);
    IlluminationScenario product{0.3, 2.0, 0.1, 1, 0.0};
    auto w0 = rho_symplectic_analytic(product);
    EXPECT_LT(max_abs(w0.symplectic * w0.symplectic.transpose() - Eigen::MatrixXd::Identity(6, 6)), 1e-15);
    EXPECT_LT(max_abs(w0.reconstruct() - rho_cov(product).matrix()), 1e-15);

    IlluminationScenario scn{0.3, 2.0, 0.1, 1, solve_cq3(0.3)};
    auto w = rho_symplectic_analytic(scn);
    EXPECT_LT(max_abs(w.reconstruct() - rho_cov(scn).matrix()), 1e-9);
    EXPECT_LT(max_abs(w.symplectic * omega * w.symplectic.transpose() - omega), 1e-9);
    auto numeric = symplectic_eigenvalues(rho_cov(scn));
    for (std::size_t j = 0; j < 3; ++j) {
        EXPECT_NEAR(w.nu[j], numeric[j], 1e-10);
    }
}

TEST(sigma_cov, examples) {
    IlluminationScenario scn{0.3, 2.0, 0.0, 1, 0.6};
    EXPECT_EQ(sigma_cov(scn), rho_cov(scn));

    double c = solve_cq3(0.3);
    auto m = sigma_cov(IlluminationScenario{0.3, 0.0, 1.0, 1, c}).matrix();
    EXPECT_EQ(m(0, 0), 1.6);
    EXPECT_EQ(m(0, 2), c);
    EXPECT_EQ(m(1, 3), -c);
    EXPECT_EQ(m(0, 4), c);

    auto lossy = sigma_cov(IlluminationScenario{0.3, 2.0, 0.25, 1, c}).matrix();
    EXPECT_NEAR(lossy(0, 0), 2 * 0.25 * 0.3 + 5, 1e-15);
    EXPECT_NEAR(lossy(0, 2), 0.5 * c, 1e-15);
    EXPECT_NEAR(lossy(3, 5), -c, 1e-15);
}

TEST(sigma_symplectic_analytic, identities_and_reconstruction) {
    IlluminationScenario scn{0.1, 20.0, 0.01, 1, solve_cq3(0.1)};
    auto d = sigma_symplectic_analytic(scn);
    double s = 1.2;
    double a = 2 * 0.01 * 0.1 + 41;
    double c = scn.c;
    EXPECT_LT(rel(d.mu2Plus - d.mu2Minus, 2 * d.xi), 1e-10);
    EXPECT_LT(rel(d.mu2Plus * d.mu2Minus, 8 * 0.01 * c * c * (a - s + c) * (a - s - c)), 1e-10);

    auto cov = sigma_cov(scn);
    auto w = d.williamson();
    auto omega = symplectic_form(3);
    EXPECT_LT(max_abs(w.reconstruct() - cov.matrix()), 1e-9);
    EXPECT_LT(max_abs(w.symplectic * omega * w.symplectic.transpose() - omega), 1e-9);
    auto numeric = symplectic_eigenvalues(cov);
    for (std::size_t j = 0; j < 3; ++j) {
        EXPECT_LT(rel(w.nu[j], numeric[j]), 1e-9);
    }
    EXPECT_NEAR(d.beta1, std::sqrt(s * s - c * c), 1e-12);
}

TEST(sigma_symplectic_analytic, weak_reflectivity_limit) {
    double kappa = 1e-6;
    IlluminationScenario scn{0.1, 100.0, kappa, 1, solve_cq3(0.1)};
    auto d = sigma_symplectic_analytic(scn);
    double a = 2 * kappa * 0.1 + 201;
    double idle = std::sqrt(1.44 - scn.c * scn.c);
    EXPECT_LT(std::abs(d.betaPlus - a), 10 * kappa);
    EXPECT_LT(std::abs(d.betaMinus - idle), 10 * kappa);
}

TEST(sigma_symplectic_analytic, out_of_domain_is_reported) {
    for (auto scn : {IlluminationScenario{1.0, 0.1, 0.9, 1, solve_cq3(1.0)},
                     IlluminationScenario{0.5, 0.0, 1.0, 1, solve_cq3(0.5)},
                     IlluminationScenario{0.1, 0.3, 0.1, 1, solve_cq3(0.1)}}) {
        EXPECT_THROW(sigma_symplectic_analytic(scn), AnalyticDomainError) << scn.nS << " " << scn.nB;
    }
}

TEST(sigma_symplectic_analytic, randomized_agreement_with_numeric) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto omega = symplectic_form(3);
    int checked = 0;
    for (int trial = 0; trial < 50; ++trial) {
        double ns = std::pow(10.0, -2.0 + 2.0 * u(rng));
        double nb = std::pow(10.0, 1.0 + 3.0 * u(rng));
        double kappa = std::pow(10.0, -3.0 + 2.0 * u(rng));
        IlluminationScenario scn{ns, nb, kappa, 1, solve_cq3(ns) * u(rng)};
        SigmaSymplecticData d;
        try {
            d = sigma_symplectic_analytic(scn);
        } catch (const AnalyticDomainError &) {
            continue;
        }
        ++checked;
        auto cov = sigma_cov(scn);
        auto w = d.williamson();
        double scale = std::max(1.0, cov.matrix().cwiseAbs().maxCoeff());
        EXPECT_LT(max_abs(w.reconstruct() - cov.matrix()), 1e-9 * scale) << trial;
        double smax = std::max(1.0, max_abs(w.symplectic));
        EXPECT_LT(max_abs(w.symplectic * omega * w.symplectic.transpose() - omega), 1e-9 * smax * smax) << trial;
        auto numeric = symplectic_eigenvalues(cov);
        for (std::size_t j = 0; j < 3; ++j) {
            EXPECT_LT(rel(w.nu[j], numeric[j]), 1e-9) << trial;
        }
        double a = 2 * kappa * ns + 2 * nb + 1;
        double s = 2 * ns + 1;
        double c = scn.c;
        if (c > 0) {
            EXPECT_LT(rel(d.mu2Plus * d.mu2Minus, 8 * kappa * c * c * (a - s + c) * (a - s - c)), 1e-10) << trial;
            EXPECT_LT(std::abs(d.mu2Plus - d.mu2Minus - 2 * d.xi), 1e-10 * std::abs(2 * d.xi)) << trial;
        }
    }
    // Background of at least 10 photons keeps almost every draw in domain.
    EXPECT_GE(checked, 45);
}
