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

#ifndef QILLUM_BOUNDS_HPP
#define QILLUM_BOUNDS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qillum/illumination.hpp"
#include "qillum/symplectic.hpp"

namespace qillum {

/// [(x+1)^p + (x-1)^p] / [(x+1)^p - (x-1)^p], evaluated through
/// r = ((x-1)/(x+1))^p so that large x neither overflows nor cancels.
double lambda_p(double x, double p);
/// 2^p / [(x+1)^p - (x-1)^p].
double g_p(double x, double p);
/// log(g_p(x, p)) without forming the power.
double log_g_p(double x, double p);

/// Factors of log Q_s.
struct OverlapDiagnostics {
    double logPrefactor = 0.0;     // log(2^n prod G_s(alpha_k) G_{1-s}(beta_k))
    double logDeterminant = 0.0;   // -1/2 log det[V_a(s) + V_b(1-s)]
    double displacement = 0.0;     // -1/2 d^T [V_a(s) + V_b(1-s)]^{-1} d
};

struct OverlapResult {
    double value = 1.0;
    double logValue = 0.0;
    OverlapDiagnostics diagnostics;
};

/// Tr[a^s b^{1-s}] for Gaussian a, b.
///
/// Williamson data may be supplied when a closed form is available; it must
/// describe the covariance of the corresponding state. Throws
/// NumericalBreakdown on a nonpositive pivot of V_a(s) + V_b(1-s).
OverlapResult q_s(const GaussianState &a, const GaussianState &b, double s);
OverlapResult q_s(const GaussianState &a, const WilliamsonDecomposition &wa, const GaussianState &b,
                  const WilliamsonDecomposition &wb, double s);

struct BoundResult {
    double value = 0.5;  // qAtS^copies / 2
    double qAtS = 1.0;
    double logQ = 0.0;
    double sUsed = 0.5;
    std::int64_t copies = 1;
    OverlapDiagnostics diagnostics;

    /// -log(2 value), so value = exp(-exponent) / 2.
    double exponent() const { return -static_cast<double>(copies) * logQ; }
};

/// Minimizes Q_s over [1e-6, 1 - 1e-6]: 33-point scan then golden section
/// to |ds| < 1e-10.
BoundResult chernoff_bound(const GaussianState &a, const GaussianState &b, std::int64_t copies);
BoundResult chernoff_bound(const GaussianState &a, const WilliamsonDecomposition &wa, const GaussianState &b,
                           const WilliamsonDecomposition &wb, std::int64_t copies);

BoundResult bhattacharyya_bound(const GaussianState &a, const GaussianState &b, std::int64_t copies);
BoundResult bhattacharyya_bound(const GaussianState &a, const WilliamsonDecomposition &wa, const GaussianState &b,
                                const WilliamsonDecomposition &wb, std::int64_t copies);

/// Two-mode exponent, exact closed form.
double gamma2(double nS);
/// Three-mode exponent, exact closed form at C = solve_cq3(nS).
double gamma3(double nS);
/// Leading small-nS series, for comparisons only.
double gamma2_asymptotic(double nS);
double gamma3_asymptotic(double nS);

/// Coherent-state baseline: thermal(nB) against thermal(nB) displaced by
/// amplitude sqrt(kappa nS).
BoundResult coherent_qb(double nS, double nB, double kappa, std::int64_t copies);

struct ExponentComparison {
    double nS = 0.0;
    double gamma2 = 0.0;
    double gamma3 = 0.0;
    std::optional<double> ratio;  // empty when gamma2 == 0
};

std::vector<ExponentComparison> ratio_sweep(const std::vector<double> &nSGrid);

/// Root of gamma3 - gamma2 on [0.05, 1], bisected to machine precision.
/// Throws NumericalBreakdown if the bracket shows no sign change.
double find_crossover();

enum class Model { TwoMode, ThreeMode, Coherent };

struct ScenarioBounds {
    BoundResult bhattacharyya;
    std::optional<BoundResult> chernoff;
    /// kappa gamma / nB (or kappa nS / (4 nB) for the coherent baseline);
    /// the large-nB prediction of exponent() / copies.
    double asymptoticRate = 0.0;
    bool analyticFallback = false;
    std::string fallbackReason;
};

/// Bounds for one scenario. The three-mode path uses the closed-form
/// Williamson data and falls back to the numeric decomposition (recording
/// the reason) when the target-present form is out of domain.
ScenarioBounds evaluate_scenario(const IlluminationScenario &scn, Model model, bool withChernoff = true);

}  // namespace qillum

#endif
