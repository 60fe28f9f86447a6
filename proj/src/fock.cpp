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

#include "qillum/fock.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Sparse>
#include <unsupported/Eigen/MatrixFunctions>

namespace qillum::fock {

namespace {

constexpr double kHermitianTolerance = 1e-12;
constexpr double kNegativityFloor = -1e-10;
constexpr double kOracleTailLimit = 1e-8;

using SparseC = Eigen::SparseMatrix<Complex>;

std::size_t checked_dimension(int cutoff, int modes) {
    if (cutoff < 0) {
        throw std::invalid_argument("cutoff must be nonnegative");
    }
    std::size_t dim = 1;
    for (int m = 0; m < modes; ++m) {
        dim *= static_cast<std::size_t>(cutoff + 1);
        if (dim > kDimensionCap) {
            std::ostringstream msg;
            msg << "Fock dimension (" << cutoff + 1 << ")^" << modes << " exceeds the cap of " << kDimensionCap;
            throw ResourceCapExceeded(msg.str());
        }
    }
    return dim;
}

void require_nbar(double nbar) {
    if (!(nbar >= 0.0) || !std::isfinite(nbar)) {
        throw std::invalid_argument("mean photon number must be finite and nonnegative");
    }
}

// nbar^n / (nbar+1)^(n+1) for n = 0..cutoff.
Eigen::VectorXd thermal_weights(double nbar, int cutoff) {
    Eigen::VectorXd w(cutoff + 1);
    double q = nbar / (nbar + 1.0);
    w(0) = 1.0 / (nbar + 1.0);
    for (int n = 1; n <= cutoff; ++n) {
        w(n) = w(n - 1) * q;
    }
    return w;
}

// Lowering operator on `mode` of a `modes`-mode register.
SparseC lowering(int mode, int modes, int cutoff) {
    const int side = cutoff + 1;
    int dim = 1;
    for (int m = 0; m < modes; ++m) {
        dim *= side;
    }
    int stride = 1;
    for (int m = mode + 1; m < modes; ++m) {
        stride *= side;
    }
    std::vector<Eigen::Triplet<Complex>> trips;
    for (int idx = 0; idx < dim; ++idx) {
        int n = (idx / stride) % side;
        if (n > 0) {
            trips.emplace_back(idx - stride, idx, Complex(std::sqrt(static_cast<double>(n)), 0.0));
        }
    }
    SparseC a(dim, dim);
    a.setFromTriplets(trips.begin(), trips.end());
    return a;
}

// Tr[rho_times_r * s] with s sparse.
Complex trace_product(const Eigen::MatrixXcd &dense, const SparseC &sparse) {
    Complex total = 0.0;
    for (int col = 0; col < sparse.outerSize(); ++col) {
        for (SparseC::InnerIterator it(sparse, col); it; ++it) {
            total += dense(it.col(), it.row()) * it.value();
        }
    }
    return total;
}

void require_hermitian(const Eigen::MatrixXcd &m) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument("density operator must be square");
    }
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > kHermitianTolerance) {
        throw std::invalid_argument("density operator is not Hermitian");
    }
}

void require_floor(double min_eigenvalue) {
    if (min_eigenvalue < kNegativityFloor) {
        std::ostringstream msg;
        msg << "density operator has eigenvalue " << min_eigenvalue << " below " << kNegativityFloor;
        throw std::invalid_argument(msg.str());
    }
}

void require_density(const FockOperator &rho) {
    require_hermitian(rho.entries);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho.entries, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("density operator eigendecomposition failed");
    }
    require_floor(es.eigenvalues().minCoeff());
}

}  // namespace

double thermal_tail(double nbar, int cutoff) {
    require_nbar(nbar);
    if (nbar == 0.0) {
        return 0.0;
    }
    return std::exp((cutoff + 1) * std::log(nbar / (nbar + 1.0)));
}

FockOperator thermal_fock(double nbar, int cutoff) {
    require_nbar(nbar);
    checked_dimension(cutoff, 1);
    FockOperator op;
    op.modeCount = 1;
    op.cutoff = cutoff;
    op.entries = thermal_weights(nbar, cutoff).cast<Complex>().asDiagonal();
    op.truncationBudget = thermal_tail(nbar, cutoff);
    return op;
}

FockOperator tmsv_fock(double nS, int cutoff) {
    require_nbar(nS);
    checked_dimension(cutoff, 2);
    const int side = cutoff + 1;
    Eigen::VectorXd amps = thermal_weights(nS, cutoff).cwiseSqrt();
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(side * side);
    for (int n = 0; n < side; ++n) {
        psi(n * side + n) = amps(n);
    }
    FockOperator op;
    op.modeCount = 2;
    op.cutoff = cutoff;
    op.entries = psi * psi.adjoint();
    op.truncationBudget = thermal_tail(nS, cutoff);
    return op;
}

FockOperator product_rho_fock(double nS, double nB, int cutoff) {
    require_nbar(nS);
    require_nbar(nB);
    checked_dimension(cutoff, 2);
    const int side = cutoff + 1;
    Eigen::VectorXd ret = thermal_weights(nB, cutoff);
    Eigen::VectorXd idler = thermal_weights(nS, cutoff);
    Eigen::VectorXcd diag(side * side);
    for (int k = 0; k < side; ++k) {
        for (int n = 0; n < side; ++n) {
            diag(k * side + n) = ret(k) * idler(n);
        }
    }
    FockOperator op;
    op.modeCount = 2;
    op.cutoff = cutoff;
    op.entries = diag.asDiagonal();
    op.truncationBudget = thermal_tail(nB, cutoff) + thermal_tail(nS, cutoff);
    return op;
}

FockOperator beamsplitter_sigma_fock(double nS, double nB, double kappa, int cutoff) {
    require_nbar(nS);
    require_nbar(nB);
    if (!(kappa >= 0.0 && kappa <= 1.0)) {
        throw std::invalid_argument("kappa must lie in [0, 1]");
    }
    checked_dimension(cutoff, 2);
    const int side = cutoff + 1;

    // Perfect reflection leaves the background port disconnected.
    const double background = kappa < 1.0 ? nB / (1.0 - kappa) : 0.0;
    const double theta = std::acos(std::sqrt(kappa));
    const Eigen::VectorXd psi = thermal_weights(nS, cutoff).cwiseSqrt();
    const Eigen::VectorXd bath = thermal_weights(background, cutoff);

    // Beamsplitter restricted to the (N+1)-dimensional block of N photons
    // shared by signal and background; block index = signal photons.
    std::vector<Eigen::MatrixXd> blocks;
    blocks.reserve(2 * side);
    for (int total = 0; total <= 2 * cutoff; ++total) {
        Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(total + 1, total + 1);
        for (int k = 0; k < total; ++k) {
            double amp = std::sqrt(static_cast<double>(k + 1) * (total - k));
            gen(k + 1, k) += amp;  // a_S^dag a_B
            gen(k, k + 1) -= amp;  // a_S a_B^dag
        }
        blocks.emplace_back((theta * gen).exp());
    }

    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(side * side, side * side);
    for (int m = 0; m < side; ++m) {
        if (bath(m) == 0.0) {
            continue;
        }
        for (int n = 0; n < side; ++n) {
            const Eigen::MatrixXd &un = blocks[n + m];
            for (int np = 0; np < side; ++np) {
                const Eigen::MatrixXd &unp = blocks[np + m];
                const double weight = bath(m) * psi(n) * psi(np);
                if (weight == 0.0) {
                    continue;
                }
                // Background output n + m - k must equal np + m - kp.
                const int k_max = std::min(cutoff, n + m);
                for (int k = std::max(0, n - np); k <= k_max; ++k) {
                    const int kp = k + np - n;
                    if (kp > std::min(cutoff, np + m)) {
                        break;
                    }
                    out(k * side + n, kp * side + np) += weight * un(k, n) * unp(kp, np);
                }
            }
        }
    }

    FockOperator op;
    op.modeCount = 2;
    op.cutoff = cutoff;
    op.entries = out.cast<Complex>();
    op.truncationBudget =
        thermal_tail(nS, cutoff) + thermal_tail(background, cutoff) + thermal_tail(kappa * nS + nB, cutoff);
    return op;
}

Spectrum::Spectrum(const FockOperator &rho) {
    require_hermitian(rho.entries);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho.entries);
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("density operator eigendecomposition failed");
    }
    require_floor(es.eigenvalues().minCoeff());
    values_ = es.eigenvalues().cwiseMax(0.0);
    vectors_ = es.eigenvectors();
}

std::vector<double> trace_power_product(const Spectrum &a, const Spectrum &b, const std::vector<double> &s) {
    if (a.values().size() != b.values().size()) {
        throw std::invalid_argument("trace_power_product: dimension mismatch");
    }
    const Eigen::MatrixXd overlap = (a.vectors().adjoint() * b.vectors()).cwiseAbs2();
    std::vector<double> out;
    out.reserve(s.size());
    for (double sv : s) {
        if (!(sv >= 0.0 && sv <= 1.0)) {
            throw std::invalid_argument("trace_power_product: s must lie in [0, 1]");
        }
        // Zero eigenvalues stay outside the support for every power.
        auto power = [](const Eigen::VectorXd &v, double p) {
            return v.unaryExpr([p](double x) { return x > 0.0 ? std::pow(x, p) : 0.0; }).eval();
        };
        out.push_back(power(a.values(), sv).dot(overlap * power(b.values(), 1.0 - sv)));
    }
    return out;
}

double trace_power_product(const FockOperator &a, const FockOperator &b, double s) {
    return trace_power_product(Spectrum(a), Spectrum(b), std::vector<double>{s}).front();
}

double helstrom_single_copy(const FockOperator &a, const FockOperator &b) {
    if (a.entries.rows() != b.entries.rows()) {
        throw std::invalid_argument("helstrom_single_copy: dimension mismatch");
    }
    require_density(a);
    require_density(b);
    Eigen::MatrixXcd diff = a.entries - b.entries;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(diff, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("helstrom_single_copy: eigendecomposition failed");
    }
    double trace_norm = es.eigenvalues().cwiseAbs().sum();
    return 0.5 * (1.0 - 0.5 * trace_norm);
}

std::vector<OracleValue> oracle_qs_two_mode(double nS, double nB, double kappa, const std::vector<double> &s,
                                            int cutoff) {
    checked_dimension(cutoff, 2);
    FockOperator rho = product_rho_fock(nS, nB, cutoff);
    FockOperator sigma = beamsplitter_sigma_fock(nS, nB, kappa, cutoff);
    const double budget = rho.truncationBudget + sigma.truncationBudget;
    if (budget > kOracleTailLimit) {
        std::ostringstream msg;
        msg << "truncation tail " << budget << " exceeds " << kOracleTailLimit << " at cutoff " << cutoff;
        throw TruncationBudgetExceeded(msg.str(), budget);
    }
    auto values = trace_power_product(Spectrum(rho), Spectrum(sigma), s);
    std::vector<OracleValue> out;
    out.reserve(values.size());
    for (double v : values) {
        out.push_back(OracleValue{v, budget});
    }
    return out;
}

OracleValue oracle_qs_two_mode(double nS, double nB, double kappa, double s, int cutoff) {
    return oracle_qs_two_mode(nS, nB, kappa, std::vector<double>{s}, cutoff).front();
}

QuadratureMoments quadrature_moments(const FockOperator &rho) {
    const int modes = rho.modeCount;
    const Complex i(0.0, 1.0);
    std::vector<SparseC> quads;
    for (int m = 0; m < modes; ++m) {
        SparseC a = lowering(m, modes, rho.cutoff);
        SparseC ad = SparseC(a.adjoint());
        quads.emplace_back(a + ad);
        quads.emplace_back(SparseC(-i * (a - ad)));
    }
    if (static_cast<Eigen::Index>(quads.front().rows()) != rho.entries.rows()) {
        throw std::invalid_argument("quadrature_moments: operator dimension does not match its cutoff");
    }
    const auto n = static_cast<Eigen::Index>(quads.size());
    QuadratureMoments out;
    out.mean.resize(n);
    out.cov.resize(n, n);
    std::vector<Eigen::MatrixXcd> rho_r;
    for (const auto &q : quads) {
        rho_r.emplace_back(rho.entries * q);
        out.mean(static_cast<Eigen::Index>(rho_r.size() - 1)) = rho_r.back().trace().real();
    }
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = r; c < n; ++c) {
            // Tr[rho R_r R_c], symmetrized.
            Complex rc = trace_product(rho_r[r], quads[c]);
            Complex cr = trace_product(rho_r[c], quads[r]);
            double v = 0.5 * (rc + cr).real() - out.mean(r) * out.mean(c);
            out.cov(r, c) = out.cov(c, r) = v;
        }
    }
    return out;
}

}  // namespace qillum::fock
