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

#ifndef QILLUM_ILLUMINATION_HPP
#define QILLUM_ILLUMINATION_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

#include "qillum/symplectic.hpp"

namespace qillum {

/// The closed-form target-present decomposition has a negative radicand or a
/// vanishing denominator at this parameter point.
class AnalyticDomainError : public std::domain_error {
   public:
    using std::domain_error::domain_error;
};

struct IlluminationScenario {
    double nS = 0.0;  // mean signal photons
    double nB = 0.0;  // mean background photons
    double kappa = 0.0;
    std::int64_t copies = 1;
    double c = 0.0;  // signal-idler correlation amplitude
};

/// Quadrature variance of a thermal mode, 2 nbar + 1.
inline double thermal_variance(double nbar) { return 2.0 * nbar + 1.0; }

/// Throws std::invalid_argument on negative photon numbers, kappa outside
/// [0, 1], copies < 1 or c above the bona fide limit of the chosen model.
void validate_three_mode(const IlluminationScenario &scn);
void validate_two_mode(const IlluminationScenario &scn);

CovarianceMatrix thermal_cov(double nbar);

/// Two-mode squeezed vacuum with mean signal photons nS.
CovarianceMatrix tmsv_cov(double nS);
/// TMSV correlation 2 sqrt(nS (1 + nS)).
double cq2(double nS);

/// Maximal correlation C of the symmetric three-mode state: sqrt of the
/// unique root in (0, S^2/2) of 4x^3 - 9S^2x^2 + 6S^4x - (S^6 - 1).
///
/// Solved in t = x / S^2, where the cubic reads t(6 - 9t + 4t^2) = 1 - S^-6,
/// by bracketed Newton with bisection fallback. The right-hand side is taken
/// through expm1/log1p so the root keeps full relative precision at small nS.
double solve_cq3(double nS);

/// Separability threshold of the symmetric three-mode state.
double cc3(double nS);

/// Symmetric three-mode state, modes (S, I1, I2). Rejects c > solve_cq3(nS).
///
/// Symplectic eigenvalues are sqrt(S^2 - 4c^2) and sqrt(S^2 - c^2) (twice),
/// so the matrix is a bona fide state only for c <= sqrt(nS (1 + nS)). At
/// solve_cq3 the determinant is 1 but the state is not physical; the reduced
/// rho_cov and sigma_cov built from it can still be.
CovarianceMatrix three_mode_cov(double nS, double c);

/// Target absent, modes (R, I1, I2).
CovarianceMatrix rho_cov(const IlluminationScenario &scn);
/// Target present, modes (R, I1, I2), return variance A = 2 kappa nS + B.
CovarianceMatrix sigma_cov(const IlluminationScenario &scn);

/// Two-mode analogues (R, I) built on the TMSV with correlation scn.c.
CovarianceMatrix rho2_cov(const IlluminationScenario &scn);
CovarianceMatrix sigma2_cov(const IlluminationScenario &scn);

/// Closed-form Williamson data of rho_cov. Requires c < S.
WilliamsonDecomposition rho_symplectic_analytic(const IlluminationScenario &scn);

struct SigmaBlockEntries {
    double xPlus = 0, xMinus = 0;
    double yPlus = 0, yMinus = 0;
    double uPlus = 0, uMinus = 0;
    double vPlus = 0, vMinus = 0;
    double z = 0;
};

struct SigmaSymplecticData {
    double beta1 = 0, betaPlus = 0, betaMinus = 0;
    double xi = 0;
    double mu1Plus = 0, mu1Minus = 0;
    double mu2Plus = 0, mu2Minus = 0;
    SigmaBlockEntries blockEntries;
    /// Block columns ordered (beta1, betaPlus, betaMinus).
    Eigen::MatrixXd symplectic;

    /// Same data with block columns sorted by descending eigenvalue.
    WilliamsonDecomposition williamson() const;
};

/// Closed-form Williamson data of sigma_cov.
///
/// mu2Minus and betaMinus are obtained from the products
///   mu2+ mu2- = 8 kappa C^2 (A-S+C)(A-S-C)
///   beta+^2 beta-^2 = (A(S-C) - 2 kappa C^2)(A(S+C) - 2 kappa C^2)
/// instead of the differences, which cancel catastrophically once A >> S.
///
/// Throws AnalyticDomainError when a radicand is negative, a denominator
/// vanishes, or the assembled matrix fails to be symplectic or to reproduce
/// sigma_cov to 1e-9 (relative to the largest entry). In practice the form
/// holds for nB well above nS.
SigmaSymplecticData sigma_symplectic_analytic(const IlluminationScenario &scn);

}  // namespace qillum

#endif
