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

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

namespace qillum {

namespace {

constexpr double kCorrelationSlack = 1e-12;
constexpr double kAnalyticCheckTolerance = 1e-9;

void require_nonnegative(double v, const char *name) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
        std::ostringstream msg;
        msg << name << " must be a finite nonnegative number, got " << v;
        throw std::invalid_argument(msg.str());
    }
}

void validate_common(const IlluminationScenario &scn) {
    require_nonnegative(scn.nS, "nS");
    require_nonnegative(scn.nB, "nB");
    require_nonnegative(scn.c, "c");
    if (!(scn.kappa >= 0.0 && scn.kappa <= 1.0)) {
        throw std::invalid_argument("kappa must lie in [0, 1]");
    }
    if (scn.copies < 1) {
        throw std::invalid_argument("copies must be at least 1");
    }
}

// Fills the symmetric (x,x: +c, p,p: -c) correlation between modes i and j.
void correlate(Eigen::MatrixXd &m, Eigen::Index i, Eigen::Index j, double c) {
    m(2 * i, 2 * j) = m(2 * j, 2 * i) = c;
    m(2 * i + 1, 2 * j + 1) = m(2 * j + 1, 2 * i + 1) = -c;
}

Eigen::MatrixXd diagonal_variances(std::initializer_list<double> per_mode) {
    Eigen::VectorXd d(static_cast<Eigen::Index>(2 * per_mode.size()));
    Eigen::Index k = 0;
    for (double v : per_mode) {
        d(k++) = v;
        d(k++) = v;
    }
    return d.asDiagonal();
}

WilliamsonDecomposition sort_blocks(const Eigen::MatrixXd &symplectic, const std::vector<double> &nu) {
    std::vector<std::size_t> order(nu.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return nu[a] > nu[b]; });
    WilliamsonDecomposition out;
    out.symplectic.resize(symplectic.rows(), symplectic.cols());
    for (std::size_t j = 0; j < order.size(); ++j) {
        out.symplectic.middleCols(static_cast<Eigen::Index>(2 * j), 2) =
            symplectic.middleCols(static_cast<Eigen::Index>(2 * order[j]), 2);
        out.nu.push_back(nu[order[j]]);
    }
    return out;
}

}  // namespace

void validate_three_mode(const IlluminationScenario &scn) {
    validate_common(scn);
    double limit = solve_cq3(scn.nS);
    if (scn.c > limit + kCorrelationSlack) {
        std::ostringstream msg;
        msg << "c = " << scn.c << " exceeds the maximal three-mode correlation " << limit;
        throw std::invalid_argument(msg.str());
    }
}

void validate_two_mode(const IlluminationScenario &scn) {
    validate_common(scn);
    double limit = cq2(scn.nS);
    if (scn.c > limit + kCorrelationSlack) {
        std::ostringstream msg;
        msg << "c = " << scn.c << " exceeds the two-mode physical limit " << limit;
        throw std::invalid_argument(msg.str());
    }
}

CovarianceMatrix thermal_cov(double nbar) {
    require_nonnegative(nbar, "nbar");
    return CovarianceMatrix(diagonal_variances({thermal_variance(nbar)}));
}

double cq2(double nS) {
    require_nonnegative(nS, "nS");
    return 2.0 * std::sqrt(nS * (1.0 + nS));
}

CovarianceMatrix tmsv_cov(double nS) {
    double s = thermal_variance(nS);
    Eigen::MatrixXd m = diagonal_variances({s, s});
    correlate(m, 0, 1, cq2(nS));
    return CovarianceMatrix(std::move(m));
}

double solve_cq3(double nS) {
    require_nonnegative(nS, "nS");
    if (nS == 0.0) {
        return 0.0;
    }
    const double s = thermal_variance(nS);
    const double rhs = -std::expm1(-6.0 * std::log1p(2.0 * nS));  // 1 - S^-6
    auto residual = [rhs](double t) { return t * (6.0 + t * (-9.0 + 4.0 * t)) - rhs; };
    auto slope = [](double t) { return 6.0 + t * (-18.0 + 12.0 * t); };

    double lo = 0.0;
    double hi = 0.5;
    double t = std::min(rhs / 6.0, 0.25);
    for (int iter = 0; iter < 200; ++iter) {
        double f = residual(t);
        if (f == 0.0) {
            break;
        }
        if (f < 0.0) {
            lo = t;
        } else {
            hi = t;
        }
        double next = t - f / slope(t);
        if (!(next > lo && next < hi)) {
            next = 0.5 * (lo + hi);
        }
        double step = std::abs(next - t);
        t = next;
        if (step < 1e-15 || step <= 4.0 * std::numeric_limits<double>::epsilon() * t) {
            // One more Newton step polishes the relative accuracy for tiny t.
            t -= residual(t) / slope(t);
            break;
        }
    }
    return s * std::sqrt(t);
}

double cc3(double nS) {
    require_nonnegative(nS, "nS");
    double a = 2.0 + 5.0 * nS + 5.0 * nS * nS;
    double b = std::sqrt((1.0 + 3.0 * nS) * (2.0 + 3.0 * nS) * (2.0 + nS + nS * nS));
    return std::sqrt(std::max(0.0, (a - b) / 2.0));
}

CovarianceMatrix three_mode_cov(double nS, double c) {
    require_nonnegative(nS, "nS");
    require_nonnegative(c, "c");
    double limit = solve_cq3(nS);
    if (c > limit + kCorrelationSlack) {
        std::ostringstream msg;
        msg << "c = " << c << " exceeds the maximal three-mode correlation " << limit;
        throw std::invalid_argument(msg.str());
    }
    double s = thermal_variance(nS);
    Eigen::MatrixXd m = diagonal_variances({s, s, s});
    correlate(m, 0, 1, c);
    correlate(m, 0, 2, c);
    correlate(m, 1, 2, c);
    return CovarianceMatrix(std::move(m));
}

CovarianceMatrix rho_cov(const IlluminationScenario &scn) {
    validate_three_mode(scn);
    double s = thermal_variance(scn.nS);
    Eigen::MatrixXd m = diagonal_variances({thermal_variance(scn.nB), s, s});
    correlate(m, 1, 2, scn.c);
    return CovarianceMatrix(std::move(m));
}

CovarianceMatrix sigma_cov(const IlluminationScenario &scn) {
    validate_three_mode(scn);
    double s = thermal_variance(scn.nS);
    double a = 2.0 * scn.kappa * scn.nS + thermal_variance(scn.nB);
    Eigen::MatrixXd m = diagonal_variances({a, s, s});
    double return_corr = std::sqrt(scn.kappa) * scn.c;
    correlate(m, 0, 1, return_corr);
    correlate(m, 0, 2, return_corr);
    correlate(m, 1, 2, scn.c);
    return CovarianceMatrix(std::move(m));
}

CovarianceMatrix rho2_cov(const IlluminationScenario &scn) {
    validate_two_mode(scn);
    return CovarianceMatrix(diagonal_variances({thermal_variance(scn.nB), thermal_variance(scn.nS)}));
}

CovarianceMatrix sigma2_cov(const IlluminationScenario &scn) {
    validate_two_mode(scn);
    double a = 2.0 * scn.kappa * scn.nS + thermal_variance(scn.nB);
    Eigen::MatrixXd m = diagonal_variances({a, thermal_variance(scn.nS)});
    correlate(m, 0, 1, std::sqrt(scn.kappa) * scn.c);
    return CovarianceMatrix(std::move(m));
}

WilliamsonDecomposition rho_symplectic_analytic(const IlluminationScenario &scn) {
    validate_three_mode(scn);
    const double s = thermal_variance(scn.nS);
    const double c = scn.c;
    if (!(c < s)) {
        throw std::invalid_argument("rho_symplectic_analytic: requires c < S");
    }
    const double z = std::pow((s - c) / (s + c), 0.25);
    const double h = 1.0 / std::sqrt(2.0);
    Eigen::MatrixXd sym = Eigen::MatrixXd::Zero(6, 6);
    sym(0, 0) = 1.0;
    sym(1, 1) = 1.0;
    // Rows I1: (Z1, -Z2); rows I2: (Z1, Z2).
    for (Eigen::Index r : {2, 4}) {
        double sign = (r == 2) ? -1.0 : 1.0;
        sym(r, 2) = h / z;
        sym(r + 1, 3) = h * z;
        sym(r, 4) = sign * h * z;
        sym(r + 1, 5) = sign * h / z;
    }
    double nu = std::sqrt((s - c) * (s + c));
    return sort_blocks(sym, {thermal_variance(scn.nB), nu, nu});
}

WilliamsonDecomposition SigmaSymplecticData::williamson() const {
    return sort_blocks(symplectic, {beta1, betaPlus, betaMinus});
}

SigmaSymplecticData sigma_symplectic_analytic(const IlluminationScenario &scn) {
    validate_three_mode(scn);
    const double s = thermal_variance(scn.nS);
    const double c = scn.c;
    const double k = scn.kappa;
    const double a = 2.0 * k * scn.nS + thermal_variance(scn.nB);
    const double kc2 = k * c * c;
    const double amsp = a - s + c;  // A - S + C
    const double amsm = a - s - c;  // A - S - C

    std::vector<std::string> violations;
    auto root = [&violations](double radicand, const char *name) {
        if (!(radicand >= 0.0) || !std::isfinite(radicand)) {
            violations.emplace_back(name);
            return 0.0;
        }
        return std::sqrt(radicand);
    };

    SigmaSymplecticData d;
    const double w = a * a - s * s + c * c;
    const double prod = 8.0 * kc2 * amsp * amsm;
    d.xi = root(w * w - prod, "xi");
    if (w >= 0.0) {
        d.mu2Plus = w + d.xi;
        d.mu2Minus = d.mu2Plus != 0.0 ? prod / d.mu2Plus : w - d.xi;
    } else {
        d.mu2Minus = w - d.xi;
        d.mu2Plus = d.mu2Minus != 0.0 ? prod / d.mu2Minus : w + d.xi;
    }
    const double lin = (a - s) * (a - s) - c * c;
    d.mu1Plus = (d.xi - 2.0 * a * c) + lin;
    d.mu1Minus = (d.xi - 2.0 * a * c) - lin;

    d.beta1 = root((s - c) * (s + c), "beta1");
    const double trace_part = a * a + s * s - (1.0 + 4.0 * k) * c * c;
    const double plus_sq = 0.5 * (trace_part + d.xi);
    d.betaPlus = root(plus_sq, "betaPlus");
    const double product_sq = (a * (s - c) - 2.0 * kc2) * (a * (s + c) - 2.0 * kc2);
    d.betaMinus = root(plus_sq > 0.0 ? product_sq / plus_sq : 0.5 * (trace_part - d.xi), "betaMinus");

    const double xi = d.xi;
    const double bp = d.betaPlus;
    const double bm = d.betaMinus;
    auto &e = d.blockEntries;
    e.xPlus = 0.5 * root(d.mu1Plus * d.mu2Plus / (amsm * xi * bp), "xPlus");
    e.xMinus = -0.5 * root(d.mu1Minus * d.mu2Minus / (amsp * xi * bm), "xMinus");
    e.yPlus = root(amsm * d.mu2Plus * bp / (d.mu1Plus * xi), "yPlus");
    e.yMinus = root(amsp * d.mu2Minus * bm / (d.mu1Minus * xi), "yMinus");
    e.uPlus = root(d.mu1Plus * d.mu2Minus / (8.0 * amsp * xi * bp), "uPlus");
    e.uMinus = root(d.mu1Minus * d.mu2Plus / (8.0 * amsm * xi * bm), "uMinus");
    e.vPlus = -root(amsp * d.mu2Minus * bp / (2.0 * d.mu1Plus * xi), "vPlus");
    e.vMinus = root(amsm * d.mu2Plus * bm / (2.0 * d.mu1Minus * xi), "vMinus");
    e.z = root(root((s - c) / (s + c), "z"), "z");

    if (!violations.empty()) {
        std::ostringstream msg;
        msg << "analytic target-present decomposition out of domain:";
        for (const auto &v : violations) {
            msg << ' ' << v;
        }
        throw AnalyticDomainError(msg.str());
    }

    const double h = 1.0 / std::sqrt(2.0);
    Eigen::MatrixXd sym = Eigen::MatrixXd::Zero(6, 6);
    // Row block R: (0, X1, X2) with X1 = diag(x+, y+), X2 = diag(y-, x-).
    sym(0, 2) = e.xPlus;
    sym(1, 3) = e.yPlus;
    sym(0, 4) = e.yMinus;
    sym(1, 5) = e.xMinus;
    // Row blocks I1, I2: (+-Z2, Y1, Y2) with Y1 = diag(u+, v+), Y2 = diag(v-, u-).
    for (Eigen::Index r : {2, 4}) {
        double sign = (r == 2) ? 1.0 : -1.0;
        sym(r, 0) = sign * h * e.z;
        sym(r + 1, 1) = sign * h / e.z;
        sym(r, 2) = e.uPlus;
        sym(r + 1, 3) = e.vPlus;
        sym(r, 4) = e.vMinus;
        sym(r + 1, 5) = e.uMinus;
    }
    d.symplectic = std::move(sym);
    if (!d.symplectic.allFinite()) {
        throw AnalyticDomainError("analytic target-present decomposition produced non-finite entries");
    }

    // Nonnegative radicands are necessary but not sufficient: away from
    // nB >> nS the square-root branches stop matching the covariance.
    const Eigen::MatrixXd target = sigma_cov(scn).matrix();
    Eigen::VectorXd spectrum(6);
    spectrum << d.beta1, d.beta1, d.betaPlus, d.betaPlus, d.betaMinus, d.betaMinus;
    const double recon = (d.symplectic * spectrum.asDiagonal() * d.symplectic.transpose() - target).cwiseAbs().maxCoeff();
    const Eigen::MatrixXd omega = symplectic_form(3);
    const double sympl = (d.symplectic * omega * d.symplectic.transpose() - omega).cwiseAbs().maxCoeff();
    const double entry_scale = std::max(1.0, d.symplectic.cwiseAbs().maxCoeff());
    if (recon > kAnalyticCheckTolerance * std::max(1.0, target.cwiseAbs().maxCoeff()) ||
        sympl > kAnalyticCheckTolerance * entry_scale * entry_scale) {
        std::ostringstream msg;
        msg << "analytic target-present decomposition out of domain: reconstruction residual " << recon
            << ", symplectic residual " << sympl;
        throw AnalyticDomainError(msg.str());
    }
    return d;
}

}  // namespace qillum
