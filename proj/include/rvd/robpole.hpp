#pragma once

#include <vector>

#include "rvd/rng.hpp"
#include "rvd/types.hpp"

namespace rvd {

/// Desired closed-loop poles. Real, strictly negative, pairwise distinct.
struct PoleSet {
  std::vector<double> lambdas;

  PoleSet() = default;
  explicit PoleSet(std::vector<double> values) : lambdas(std::move(values)) {}

  int size() const { return static_cast<int>(lambdas.size()); }

  /// Throws ConfigError on empty, non-negative, or duplicated entries.
  void validate() const;
};

/// Output of one pole assignment.
struct GainResult {
  Eigen::MatrixXd K;  ///< m x n feedback gain
  Eigen::MatrixXd X;  ///< n x n eigenvector matrix, unit columns
  double det_X{0.0};  ///< det(X)
  double kappa{0.0};  ///< sigma_1 / sigma_n of X
  double residual{0.0};  ///< ||(A+BK)X - X Lambda||_F / (||A||_F + ||BK||_F)
  std::vector<double> det_history;  ///< |det X| before sweeping and after each sweep
};

/// Orthogonal decomposition of the input matrix, B = [Q0 Q1] [R; 0].
/// For a constant B this is computed once per run.
struct InputDecomposition {
  Eigen::MatrixXd Q0;  ///< n x m, spans range(B)
  Eigen::MatrixXd Q1;  ///< n x (n-m), spans the orthogonal complement
  Eigen::MatrixXd R;   ///< m x m, invertible upper triangular
};

/// QR-decompose B (full column rank required; throws PoleAssignmentError).
InputDecomposition decompose_input_matrix(const Eigen::MatrixXd& B);

/// Orthonormal basis (n x m) of the admissible eigenvector subspace
/// S_i = { s : Q1^T (A - lambda I) s = 0 } via the QR decomposition of
/// (A^T - lambda I) Q1. Throws PoleAssignmentError when lambda is an
/// uncontrollable mode (rank deficiency of the decomposed matrix).
Eigen::MatrixXd candidate_subspace(const Eigen::MatrixXd& A, double lambda,
                                   const Eigen::MatrixXd& Q1);

/// Selected eigenvector matrix plus the |det| trace across sweeps.
struct EigenvectorSelection {
  Eigen::MatrixXd X;
  std::vector<double> det_history;
};

/// Cyclic eigenvector selection maximizing |det X| subject to x_i in S_i,
/// ||x_i|| = 1. Each single-column update is conditionally optimal (the
/// normalized projection onto S_i of the direction orthogonal to the other
/// columns), so |det X| is non-decreasing. Stops when the relative per-sweep
/// improvement drops below tol or after max_sweeps. Throws
/// PoleAssignmentError if the selection stays singular.
EigenvectorSelection select_eigenvectors(const std::vector<Eigen::MatrixXd>& subspaces,
                                         int max_sweeps = 10, double tol = 1e-6);

/// Feedback gain K = R^{-1} Q0^T (X Lambda X^{-1} - A). Throws
/// PoleAssignmentError when cond(X) exceeds 1e12.
Eigen::MatrixXd compute_gain(const Eigen::MatrixXd& A, const InputDecomposition& bqr,
                             const Eigen::MatrixXd& X, const std::vector<double>& lambdas);

/// End-to-end robust pole assignment for (A, B). When the decomposition of a
/// constant B is available, pass it to skip Step 1.
GainResult assign_poles(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                        const PoleSet& poles);
GainResult assign_poles(const Eigen::MatrixXd& A, const InputDecomposition& bqr,
                        const PoleSet& poles);

/// Verification utility: a random admissible eigenvector selection (unit
/// x_i in S_i, direction uniform), used as a baseline for det/kappa
/// comparisons.
Eigen::MatrixXd random_admissible_selection(const Eigen::MatrixXd& A,
                                            const InputDecomposition& bqr,
                                            const PoleSet& poles, CounterRng& rng);

/// sigma_1 / sigma_n of X.
double condition_number(const Eigen::MatrixXd& X);

}  // namespace rvd
