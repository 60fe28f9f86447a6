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

#include "qillum/symplectic.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

namespace qillum {

namespace {

constexpr double kPairingTolerance = 1e-9;
constexpr double kMinorTolerance = 1e-12;
constexpr double kPhysicalTolerance = 1e-9;

struct HermitianSpectrum {
    Eigen::MatrixXd sqrt_cov;
    Eigen::VectorXd values;    // ascending, length 2n
    Eigen::MatrixXcd vectors;  // columns match `values`
};

Eigen::MatrixXd symmetric_sqrt(const Eigen::MatrixXd &m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    if (es.info() != Eigen::Success) {
        throw NumericalBreakdown("symmetric square root: eigensolver failed");
    }
    Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
}

// Spectrum of i Lambda^{1/2} Omega Lambda^{1/2}, which is +-nu_j.
HermitianSpectrum hermitian_spectrum(const CovarianceMatrix &cov) {
    require_positive_definite(cov);
    const auto n = cov.modes();
    HermitianSpectrum out;
    out.sqrt_cov = symmetric_sqrt(cov.matrix());
    Eigen::MatrixXd a = out.sqrt_cov * symplectic_form(n) * out.sqrt_cov;
    a = 0.5 * (a - a.transpose()).eval();
    Eigen::MatrixXcd h = std::complex<double>(0.0, 1.0) * a.cast<std::complex<double>>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    if (es.info() != Eigen::Success) {
        throw NumericalBreakdown("symplectic spectrum: eigensolver failed");
    }
    out.values = es.eigenvalues();
    out.vectors = es.eigenvectors();

    const auto dim = static_cast<Eigen::Index>(2 * n);
    for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(n); ++k) {
        double neg = out.values(k);
        double pos = out.values(dim - 1 - k);
        if (std::abs(pos + neg) > kPairingTolerance * std::max(1.0, std::abs(pos)) || pos <= 0.0) {
            std::ostringstream msg;
            msg << "symplectic spectrum: cannot pair " << neg << " with " << pos;
            throw NumericalBreakdown(msg.str());
        }
    }
    return out;
}

}  // namespace

CovarianceMatrix::CovarianceMatrix(Eigen::MatrixXd m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() == 0 || m_.rows() % 2 != 0) {
        throw std::invalid_argument("covariance matrix must be square with even nonzero dimension");
    }
    if (!m_.allFinite()) {
        throw std::invalid_argument("covariance matrix has non-finite entries");
    }
    if ((m_ - m_.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance) {
        throw std::invalid_argument("covariance matrix is not symmetric");
    }
}

GaussianState::GaussianState(CovarianceMatrix c, Eigen::VectorXd m) : cov(std::move(c)), mean(std::move(m)) {
    if (static_cast<std::size_t>(mean.size()) != 2 * cov.modes()) {
        throw std::invalid_argument("mean vector length must be twice the mode count");
    }
}

GaussianState::GaussianState(CovarianceMatrix c)
    : cov(std::move(c)), mean(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(2 * cov.modes()))) {
}

Eigen::MatrixXd WilliamsonDecomposition::reconstruct(const std::vector<double> &values) const {
    if (values.size() != nu.size()) {
        throw std::invalid_argument("reconstruct: spectrum length mismatch");
    }
    Eigen::VectorXd d(static_cast<Eigen::Index>(2 * values.size()));
    for (std::size_t j = 0; j < values.size(); ++j) {
        d(2 * j) = values[j];
        d(2 * j + 1) = values[j];
    }
    return symplectic * d.asDiagonal() * symplectic.transpose();
}

Bipartition::Bipartition(std::set<std::size_t> transposed, std::size_t modes)
    : transposed_(std::move(transposed)), modes_(modes) {
    if (transposed_.empty() || transposed_.size() >= modes_ || *transposed_.rbegin() >= modes_) {
        throw std::invalid_argument("bipartition must be a nonempty proper subset of the modes");
    }
}

Eigen::MatrixXd symplectic_form(std::size_t n) {
    if (n == 0) {
        throw std::invalid_argument("symplectic_form: mode count must be positive");
    }
    const auto dim = static_cast<Eigen::Index>(2 * n);
    Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(dim, dim);
    for (Eigen::Index j = 0; j < dim; j += 2) {
        omega(j, j + 1) = 1.0;
        omega(j + 1, j) = -1.0;
    }
    return omega;
}

void require_positive_definite(const CovarianceMatrix &cov) {
    // Unpivoted elimination: the k-th leading minor is the product of the
    // first k pivots.
    Eigen::MatrixXd work = cov.matrix();
    const Eigen::Index dim = work.rows();
    double minor = 1.0;
    for (Eigen::Index k = 0; k < dim; ++k) {
        double pivot = work(k, k);
        minor *= pivot;
        if (!(minor > kMinorTolerance) || !(pivot > 0.0)) {
            std::ostringstream msg;
            msg << "covariance matrix is not positive definite (leading minor " << k + 1 << " = " << minor << ")";
            throw std::invalid_argument(msg.str());
        }
        for (Eigen::Index r = k + 1; r < dim; ++r) {
            double f = work(r, k) / pivot;
            work.row(r).tail(dim - k) -= f * work.row(k).tail(dim - k);
        }
    }
}

std::vector<double> symplectic_eigenvalues(const CovarianceMatrix &cov) {
    auto spec = hermitian_spectrum(cov);
    const auto n = static_cast<Eigen::Index>(cov.modes());
    std::vector<double> nu;
    nu.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index k = 2 * n - 1; k >= n; --k) {
        nu.push_back(spec.values(k));
    }
    return nu;
}

WilliamsonDecomposition williamson_decompose(const CovarianceMatrix &cov) {
    auto spec = hermitian_spectrum(cov);
    const auto n = static_cast<Eigen::Index>(cov.modes());
    const Eigen::Index dim = 2 * n;

    WilliamsonDecomposition out;
    Eigen::MatrixXd basis(dim, dim);
    Eigen::VectorXd inv_sqrt_nu(dim);
    for (Eigen::Index j = 0; j < n; ++j) {
        Eigen::Index k = dim - 1 - j;
        double nu = spec.values(k);
        out.nu.push_back(nu);
        Eigen::VectorXcd w = spec.vectors.col(k);
        basis.col(2 * j) = std::sqrt(2.0) * w.imag();
        basis.col(2 * j + 1) = std::sqrt(2.0) * w.real();
        inv_sqrt_nu(2 * j) = 1.0 / std::sqrt(nu);
        inv_sqrt_nu(2 * j + 1) = 1.0 / std::sqrt(nu);
    }
    out.symplectic = spec.sqrt_cov * basis * inv_sqrt_nu.asDiagonal();

    // Phase convention inside each 2x2 block.
    for (Eigen::Index j = 0; j < n; ++j) {
        auto block = out.symplectic.middleCols(2 * j, 2);
        double scale = block.cwiseAbs().maxCoeff();
        for (Eigen::Index r = 0; r < dim; ++r) {
            double cx = block(r, 0);
            double cp = block(r, 1);
            double rad = std::hypot(cx, cp);
            if (rad > 1e-12 * scale) {
                // x' = (cx x + cp p) / rad, p' = (cx p - cp x) / rad
                double c = cx / rad;
                double s = cp / rad;
                Eigen::Matrix2d rot;
                rot << c, -s, s, c;
                block = (block * rot).eval();
                break;
            }
        }
    }
    return out;
}

CovarianceMatrix partial_transpose(const CovarianceMatrix &cov, const Bipartition &part) {
    if (part.modes() != cov.modes()) {
        throw std::invalid_argument("partial_transpose: bipartition mode count mismatch");
    }
    Eigen::MatrixXd m = cov.matrix();
    for (std::size_t mode : part.transposed_modes()) {
        auto p = static_cast<Eigen::Index>(2 * mode + 1);
        m.row(p) = -m.row(p);
        m.col(p) = -m.col(p);
    }
    return CovarianceMatrix(std::move(m));
}

double log_negativity(const CovarianceMatrix &cov, const Bipartition &part) {
    double total = 0.0;
    for (double nu : symplectic_eigenvalues(partial_transpose(cov, part))) {
        if (nu < 1.0) {
            total -= std::log2(nu);
        }
    }
    return total;
}

bool is_pure(const CovarianceMatrix &cov) {
    auto nu = symplectic_eigenvalues(cov);
    return std::all_of(nu.begin(), nu.end(), [](double v) { return std::abs(v - 1.0) <= kPhysicalTolerance; });
}

bool is_bona_fide(const CovarianceMatrix &cov) {
    try {
        auto nu = symplectic_eigenvalues(cov);
        return nu.back() >= 1.0 - kPhysicalTolerance;
    } catch (const std::invalid_argument &) {
        return false;
    }
}

}  // namespace qillum
