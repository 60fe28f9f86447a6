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

#ifndef QILLUM_SYMPLECTIC_HPP
#define QILLUM_SYMPLECTIC_HPP

#include <cstddef>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qillum {

/// Raised when a linear-algebra step cannot produce a trustworthy result
/// (nonpositive pivot, unresolvable eigenvalue pairing). Never clamped away.
class NumericalBreakdown : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Real symmetric 2n x 2n matrix of quadrature second moments in the
/// interleaved ordering (x1, p1, ..., xn, pn), vacuum variance 1.
class CovarianceMatrix {
   public:
    static constexpr double kSymmetryTolerance = 1e-12;

    /// Throws std::invalid_argument unless `m` is square, of even nonzero
    /// dimension and symmetric to kSymmetryTolerance.
    explicit CovarianceMatrix(Eigen::MatrixXd m);

    std::size_t modes() const { return static_cast<std::size_t>(m_.rows() / 2); }
    const Eigen::MatrixXd &matrix() const { return m_; }
    double operator()(Eigen::Index r, Eigen::Index c) const { return m_(r, c); }

    bool operator==(const CovarianceMatrix &other) const { return m_ == other.m_; }

   private:
    Eigen::MatrixXd m_;
};

struct GaussianState {
    GaussianState(CovarianceMatrix cov, Eigen::VectorXd mean);
    /// Zero-mean state.
    explicit GaussianState(CovarianceMatrix cov);

    std::size_t modes() const { return cov.modes(); }

    CovarianceMatrix cov;
    Eigen::VectorXd mean;
};

/// Lambda = S (diag(nu_1, nu_1, ..., nu_n, nu_n)) S^T with S symplectic.
/// Block column j of `symplectic` belongs to nu[j]; nu is descending.
struct WilliamsonDecomposition {
    Eigen::MatrixXd symplectic;
    std::vector<double> nu;

    std::size_t modes() const { return nu.size(); }
    /// S diag(f(nu_j) 1_2) S^T for an arbitrary replacement spectrum.
    Eigen::MatrixXd reconstruct(const std::vector<double> &values) const;
    Eigen::MatrixXd reconstruct() const { return reconstruct(nu); }
};

/// Set of 0-based modes whose momenta get flipped by a partial transpose.
class Bipartition {
   public:
    /// Throws std::invalid_argument unless `transposed` is a nonempty proper
    /// subset of {0, ..., modes - 1}.
    Bipartition(std::set<std::size_t> transposed, std::size_t modes);

    const std::set<std::size_t> &transposed_modes() const { return transposed_; }
    std::size_t modes() const { return modes_; }

   private:
    std::set<std::size_t> transposed_;
    std::size_t modes_;
};

Eigen::MatrixXd symplectic_form(std::size_t n);

/// Throws std::invalid_argument if any leading principal minor is <= 1e-12.
void require_positive_definite(const CovarianceMatrix &cov);

/// Symplectic eigenvalues, one per mode, descending.
std::vector<double> symplectic_eigenvalues(const CovarianceMatrix &cov);

/// Numeric Williamson normal form.
///
/// Diagonalizes the Hermitian matrix i Lambda^{1/2} Omega Lambda^{1/2}; each
/// positive eigenvalue nu with eigenvector u + i v yields the symplectic
/// pair (v, u) after scaling. Degenerate clusters need no extra work since
/// the Hermitian eigenvectors are already orthonormal. Each block column is
/// then rotated so that, on the first row where the block is nonzero, the
/// p-column entry vanishes and the x-column entry is nonnegative.
///
/// Throws NumericalBreakdown if the +nu / -nu spectrum cannot be paired to
/// within 1e-9.
WilliamsonDecomposition williamson_decompose(const CovarianceMatrix &cov);

CovarianceMatrix partial_transpose(const CovarianceMatrix &cov, const Bipartition &part);

/// Sum of -log2(nu) over the partially transposed spectrum below 1.
double log_negativity(const CovarianceMatrix &cov, const Bipartition &part);

bool is_pure(const CovarianceMatrix &cov);

/// Smallest symplectic eigenvalue is at least 1 - 1e-9.
bool is_bona_fide(const CovarianceMatrix &cov);

}  // namespace qillum

#endif
