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

#ifndef QILLUM_FOCK_HPP
#define QILLUM_FOCK_HPP

#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace qillum::fock {

using Complex = std::complex<double>;

/// Requested Hilbert-space dimension is above the desk-scale cap of 4096.
class ResourceCapExceeded : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// The analytic truncation tail of some input exceeds what the caller allows.
class TruncationBudgetExceeded : public std::runtime_error {
   public:
    TruncationBudgetExceeded(const std::string &what, double budget) : std::runtime_error(what), budget_(budget) {}
    double budget() const { return budget_; }

   private:
    double budget_;
};

inline constexpr std::size_t kDimensionCap = 4096;

/// Dense operator on modeCount modes, each truncated to photon numbers
/// 0..cutoff. Basis index is n_0 (cutoff+1)^(modes-1) + ... + n_{modes-1}.
struct FockOperator {
    int modeCount = 1;
    int cutoff = 0;
    Eigen::MatrixXcd entries;
    /// Upper bound on the trace lost to truncation.
    double truncationBudget = 0.0;

    std::size_t dimension() const { return static_cast<std::size_t>(entries.rows()); }
};

/// (nbar/(nbar+1))^(cutoff+1), the weight a thermal state puts above cutoff.
double thermal_tail(double nbar, int cutoff);

FockOperator thermal_fock(double nbar, int cutoff);
/// |psi> = sum_n sqrt(nS^n / (1+nS)^(n+1)) |n, n>.
FockOperator tmsv_fock(double nS, int cutoff);

/// Return mode and idler after the signal of a TMSV meets thermal background
/// nB/(1-kappa) on a beamsplitter exp[theta(a_S^dag a_B - a_S a_B^dag)],
/// cos(theta) = sqrt(kappa), with the background port traced out. The
/// unitary is exponentiated exactly inside each fixed-total-photon block.
FockOperator beamsplitter_sigma_fock(double nS, double nB, double kappa, int cutoff);

/// Target-absent counterpart: thermal(nB) (x) thermal(nS).
FockOperator product_rho_fock(double nS, double nB, int cutoff);

/// Eigendecomposition of a density operator with the negativity check and
/// the floor at zero already applied.
class Spectrum {
   public:
    explicit Spectrum(const FockOperator &rho);

    const Eigen::VectorXd &values() const { return values_; }
    const Eigen::MatrixXcd &vectors() const { return vectors_; }

   private:
    Eigen::VectorXd values_;
    Eigen::MatrixXcd vectors_;
};

/// Tr[a^s b^(1-s)] for each s, sharing the two eigendecompositions.
std::vector<double> trace_power_product(const Spectrum &a, const Spectrum &b, const std::vector<double> &s);
double trace_power_product(const FockOperator &a, const FockOperator &b, double s);

/// (1 - ||a - b||_1 / 2) / 2.
double helstrom_single_copy(const FockOperator &a, const FockOperator &b);

struct OracleValue {
    double value = 1.0;
    double truncationBudget = 0.0;
};

/// Brute-force Tr[rho^s sigma^(1-s)] for the two-mode illumination pair.
/// Throws TruncationBudgetExceeded when the combined tail exceeds 1e-8 and
/// ResourceCapExceeded above the dimension cap.
std::vector<OracleValue> oracle_qs_two_mode(double nS, double nB, double kappa, const std::vector<double> &s,
                                            int cutoff);
OracleValue oracle_qs_two_mode(double nS, double nB, double kappa, double s, int cutoff);

/// Quadrature means (x = a + a^dag, p = -i(a - a^dag)) and symmetrized
/// covariance in the vacuum-variance-1 convention.
struct QuadratureMoments {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
};
QuadratureMoments quadrature_moments(const FockOperator &rho);

}  // namespace qillum::fock

#endif
