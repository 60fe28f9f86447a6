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

#include "qillum/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace qillum {

namespace {

constexpr double kPhysicalTolerance = 1e-9;
constexpr double kEndpoint = 1e-6;
constexpr int kScanPoints = 33;
constexpr double kGoldenTolerance = 1e-10;

void require_power_args(double x, double p) {
    if (!(x >= 1.0)) {
        std::ostringstream msg;
        msg << "symplectic eigenvalue " << x << " is below 1";
        throw std::invalid_argument(msg.str());
    }
    if (!(p > 0.0 && p <= 1.0)) {
        throw std::invalid_argument("power must lie in (0, 1]");
    }
}

// ((x-1)/(x+1))^p
double power_ratio(double x, double p) { return std::exp(p * std::log1p(-2.0 / (x + 1.0))); }

// 1 - ((x-1)/(x+1))^p
double one_minus_power_ratio(double x, double p) { return -std::expm1(p * std::log1p(-2.0 / (x + 1.0))); }

double physical_nu(double nu) {
    if (nu < 1.0 - kPhysicalTolerance) {
        std::ostringstream msg;
        msg << "state is not bona fide: symplectic eigenvalue " << nu;
        throw std::invalid_argument(msg.str());
    }
    return std::max(nu, 1.0);
}

std::vector<double> physical_spectrum(const WilliamsonDecomposition &w) {
    std::vector<double> out;
    out.reserve(w.nu.size());
    for (double nu : w.nu) {
        out.push_back(physical_nu(nu));
    }
    return out;
}

struct OverlapProblem {
    const GaussianState &a;
    const WilliamsonDecomposition &wa;
    const GaussianState &b;
    const WilliamsonDecomposition &wb;
};

BoundResult make_result(const OverlapResult &q, double s, std::int64_t copies) {
    if (copies < 1) {
        throw std::invalid_argument("copies must be at least 1");
    }
    BoundResult r;
    r.qAtS = q.value;
    r.logQ = q.logValue;
    r.sUsed = s;
    r.copies = copies;
    r.diagnostics = q.diagnostics;
    r.value = 0.5 * std::exp(static_cast<double>(copies) * q.logValue);
    return r;
}

BoundResult minimize_overlap(const OverlapProblem &pr, std::int64_t copies) {
    auto eval = [&pr](double s) { return q_s(pr.a, pr.wa, pr.b, pr.wb, s); };

    std::vector<double> grid(kScanPoints);
    std::vector<double> logs(kScanPoints);
    const double span = 1.0 - 2.0 * kEndpoint;
    int best = 0;
    for (int i = 0; i < kScanPoints; ++i) {
        grid[i] = (i == kScanPoints / 2) ? 0.5 : kEndpoint + span * i / (kScanPoints - 1);
        logs[i] = eval(grid[i]).logValue;
        if (logs[i] < logs[best]) {
            best = i;
        }
    }

    double lo = grid[std::max(best - 1, 0)];
    double hi = grid[std::min(best + 1, kScanPoints - 1)];
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = eval(x1).logValue;
    double f2 = eval(x2).logValue;
    while (hi - lo > kGoldenTolerance) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = eval(x1).logValue;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = eval(x2).logValue;
        }
    }
    double s_best = 0.5 * (lo + hi);
    OverlapResult refined = eval(s_best);
    // The scan point can still win if the refined bracket missed a kink.
    if (logs[best] < refined.logValue) {
        s_best = grid[best];
        refined = eval(s_best);
    }
    return make_result(refined, s_best, copies);
}

}  // namespace

double lambda_p(double x, double p) {
    require_power_args(x, p);
    if (p == 1.0) {
        return x;
    }
    double r = power_ratio(x, p);
    return (1.0 + r) / one_minus_power_ratio(x, p);
}

double log_g_p(double x, double p) {
    require_power_args(x, p);
    if (p == 1.0) {
        return 0.0;
    }
    // G_p = (2/(x+1))^p / (1 - ((x-1)/(x+1))^p)
    return p * std::log(2.0 / (x + 1.0)) - std::log(one_minus_power_ratio(x, p));
}

double g_p(double x, double p) {
    if (p == 1.0) {
        require_power_args(x, p);
        return 1.0;
    }
    return std::exp(log_g_p(x, p));
}

OverlapResult q_s(const GaussianState &a, const WilliamsonDecomposition &wa, const GaussianState &b,
                  const WilliamsonDecomposition &wb, double s) {
    if (a.modes() != b.modes() || wa.modes() != a.modes() || wb.modes() != b.modes()) {
        throw std::invalid_argument("q_s: mode count mismatch");
    }
    if (!(s > 0.0 && s < 1.0)) {
        throw std::invalid_argument("q_s: s must lie in (0, 1)");
    }
    const auto alpha = physical_spectrum(wa);
    const auto beta = physical_spectrum(wb);

    OverlapResult out;
    // Tr[rho^s rho^(1-s)] = 1 exactly; the general route would only reach it
    // through cancelling logarithms.
    if (a.cov == b.cov && a.mean == b.mean) {
        return out;
    }
    auto &diag = out.diagnostics;
    diag.logPrefactor = static_cast<double>(a.modes()) * std::numbers::ln2;
    std::vector<double> la(alpha.size());
    std::vector<double> lb(beta.size());
    for (std::size_t k = 0; k < alpha.size(); ++k) {
        diag.logPrefactor += log_g_p(alpha[k], s) + log_g_p(beta[k], 1.0 - s);
        la[k] = lambda_p(alpha[k], s);
        lb[k] = lambda_p(beta[k], 1.0 - s);
    }

    Eigen::MatrixXd sum = wa.reconstruct(la) + wb.reconstruct(lb);
    sum = 0.5 * (sum + sum.transpose()).eval();
    Eigen::LLT<Eigen::MatrixXd> llt(sum);
    if (llt.info() != Eigen::Success) {
        throw NumericalBreakdown("q_s: V_a(s) + V_b(1-s) has a nonpositive pivot");
    }
    Eigen::VectorXd pivots = llt.matrixLLT().diagonal();
    if ((pivots.array() <= 0.0).any() || !pivots.allFinite()) {
        throw NumericalBreakdown("q_s: V_a(s) + V_b(1-s) has a nonpositive pivot");
    }
    diag.logDeterminant = -pivots.array().log().sum();  // -1/2 log det

    Eigen::VectorXd d = a.mean - b.mean;
    if (d.squaredNorm() > 0.0) {
        diag.displacement = -0.5 * d.dot(llt.solve(d));
    }

    out.logValue = diag.logPrefactor + diag.logDeterminant + diag.displacement;
    out.value = std::exp(out.logValue);
    return out;
}

OverlapResult q_s(const GaussianState &a, const GaussianState &b, double s) {
    return q_s(a, williamson_decompose(a.cov), b, williamson_decompose(b.cov), s);
}

BoundResult chernoff_bound(const GaussianState &a, const WilliamsonDecomposition &wa, const GaussianState &b,
                           const WilliamsonDecomposition &wb, std::int64_t copies) {
    return minimize_overlap(OverlapProblem{a, wa, b, wb}, copies);
}

BoundResult chernoff_bound(const GaussianState &a, const GaussianState &b, std::int64_t copies) {
    return chernoff_bound(a, williamson_decompose(a.cov), b, williamson_decompose(b.cov), copies);
}

BoundResult bhattacharyya_bound(const GaussianState &a, const WilliamsonDecomposition &wa, const GaussianState &b,
                                const WilliamsonDecomposition &wb, std::int64_t copies) {
    return make_result(q_s(a, wa, b, wb, 0.5), 0.5, copies);
}

BoundResult bhattacharyya_bound(const GaussianState &a, const GaussianState &b, std::int64_t copies) {
    return bhattacharyya_bound(a, williamson_decompose(a.cov), b, williamson_decompose(b.cov), copies);
}

double gamma2(double nS) {
    if (!(nS >= 0.0)) {
        throw std::invalid_argument("gamma2: nS must be nonnegative");
    }
    double r = std::sqrt(nS * (1.0 + nS));
    return nS * (1.0 + nS) * (1.0 + nS - r) / (1.0 + nS + r);
}

namespace {

// 1/2 C^2 S (1 - sqrt(nu^2 - 1)/nu), nu^2 = S^2 - C^2.
double three_mode_rate(double nS, double c) {
    double s = thermal_variance(nS);
    double nu_sq = (s - c) * (s + c);
    double excess = 4.0 * nS * (1.0 + nS) - c * c;  // nu^2 - 1 without cancellation
    return 0.5 * c * c * s * (1.0 - std::sqrt(std::max(excess, 0.0) / nu_sq));
}

}  // namespace

double gamma3(double nS) {
    if (!(nS >= 0.0)) {
        throw std::invalid_argument("gamma3: nS must be nonnegative");
    }
    return three_mode_rate(nS, solve_cq3(nS));
}

double gamma2_asymptotic(double nS) { return nS * (1.0 - 2.0 * std::sqrt(nS)); }

double gamma3_asymptotic(double nS) { return nS * (1.0 - std::sqrt(2.0 * nS)); }

BoundResult coherent_qb(double nS, double nB, double kappa, std::int64_t copies) {
    if (!(nS >= 0.0) || !(nB >= 0.0) || !(kappa >= 0.0 && kappa <= 1.0)) {
        throw std::invalid_argument("coherent_qb: invalid parameters");
    }
    if (copies < 1) {
        throw std::invalid_argument("copies must be at least 1");
    }
    // Equal covariances: prefactor and determinant cancel exactly, leaving
    // -1/2 d^2 / (2 Lambda_1/2(x)) with d^2 = 4 kappa nS. Summing the two
    // logs numerically would cost ~1e-15 absolute against a tiny exponent.
    double x = thermal_variance(nB);
    double lam = lambda_p(x, 0.5);
    BoundResult out;
    out.copies = copies;
    out.sUsed = 0.5;
    out.diagnostics.logPrefactor = std::log(2.0) + 2.0 * log_g_p(x, 0.5);
    out.diagnostics.logDeterminant = -std::log(2.0 * lam);
    out.diagnostics.displacement = -kappa * nS / lam;
    out.logQ = out.diagnostics.displacement;
    out.qAtS = std::exp(out.logQ);
    out.value = 0.5 * std::exp(static_cast<double>(copies) * out.logQ);
    return out;
}

std::vector<ExponentComparison> ratio_sweep(const std::vector<double> &nSGrid) {
    std::vector<ExponentComparison> out;
    out.reserve(nSGrid.size());
    for (double nS : nSGrid) {
        if (!(nS > 0.0)) {
            throw std::invalid_argument("ratio_sweep: grid values must be positive");
        }
        ExponentComparison row;
        row.nS = nS;
        row.gamma2 = gamma2(nS);
        row.gamma3 = gamma3(nS);
        if (row.gamma2 > 0.0) {
            row.ratio = row.gamma3 / row.gamma2;
        }
        out.push_back(row);
    }
    return out;
}

double find_crossover() {
    auto gap = [](double nS) { return gamma3(nS) - gamma2(nS); };
    double lo = 0.05;
    double hi = 1.0;
    double flo = gap(lo);
    double fhi = gap(hi);
    if (!(flo > 0.0 && fhi < 0.0) && !(flo < 0.0 && fhi > 0.0)) {
        throw NumericalBreakdown("find_crossover: gamma3 - gamma2 has no sign change on [0.05, 1]");
    }
    for (int iter = 0; iter < 200; ++iter) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        double fmid = gap(mid);
        if (fmid == 0.0) {
            return mid;
        }
        if ((fmid > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

ScenarioBounds evaluate_scenario(const IlluminationScenario &scn, Model model, bool withChernoff) {
    ScenarioBounds out;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double rate_scale = scn.nB > 0.0 ? scn.kappa / scn.nB : nan;

    if (model == Model::Coherent) {
        if (scn.copies < 1) {
            throw std::invalid_argument("copies must be at least 1");
        }
        out.bhattacharyya = coherent_qb(scn.nS, scn.nB, scn.kappa, scn.copies);
        if (withChernoff) {
            GaussianState absent(thermal_cov(scn.nB));
            Eigen::VectorXd mean(2);
            mean << 2.0 * std::sqrt(scn.kappa * scn.nS), 0.0;
            GaussianState present(thermal_cov(scn.nB), mean);
            out.chernoff = chernoff_bound(absent, present, scn.copies);
        }
        out.asymptoticRate = rate_scale * scn.nS / 4.0;
        return out;
    }

    if (model == Model::TwoMode) {
        GaussianState absent(rho2_cov(scn));
        GaussianState present(sigma2_cov(scn));
        auto wa = williamson_decompose(absent.cov);
        auto wb = williamson_decompose(present.cov);
        out.bhattacharyya = bhattacharyya_bound(absent, wa, present, wb, scn.copies);
        if (withChernoff) {
            out.chernoff = chernoff_bound(absent, wa, present, wb, scn.copies);
        }
        bool maximal = std::abs(scn.c - cq2(scn.nS)) <= 1e-12 * std::max(1.0, scn.c);
        out.asymptoticRate = maximal ? rate_scale * gamma2(scn.nS) : nan;
        return out;
    }

    GaussianState absent(rho_cov(scn));
    GaussianState present(sigma_cov(scn));
    WilliamsonDecomposition wa = rho_symplectic_analytic(scn);
    WilliamsonDecomposition wb;
    try {
        wb = sigma_symplectic_analytic(scn).williamson();
    } catch (const AnalyticDomainError &e) {
        out.analyticFallback = true;
        out.fallbackReason = e.what();
        wb = williamson_decompose(present.cov);
    }
    out.bhattacharyya = bhattacharyya_bound(absent, wa, present, wb, scn.copies);
    if (withChernoff) {
        out.chernoff = chernoff_bound(absent, wa, present, wb, scn.copies);
    }
    out.asymptoticRate = rate_scale * three_mode_rate(scn.nS, scn.c);
    return out;
}

}  // namespace qillum
