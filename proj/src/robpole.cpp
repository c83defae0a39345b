#include "rvd/robpole.hpp"

#include <cmath>

#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "rvd/errors.hpp"

namespace rvd {

namespace {

/// log|det| via LU; returns -inf for a singular matrix.
double log_abs_det(const Eigen::MatrixXd& X) {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(X);
  double acc = 0.0;
  for (int i = 0; i < X.rows(); ++i) {
    const double d = std::abs(lu.matrixLU()(i, i));
    if (d == 0.0) {
      return -std::numeric_limits<double>::infinity();
    }
    acc += std::log(d);
  }
  return acc;
}

double abs_det(const Eigen::MatrixXd& X) {
  const double l = log_abs_det(X);
  return std::isinf(l) ? 0.0 : std::exp(l);
}

}  // namespace

void PoleSet::validate() const {
  if (lambdas.empty()) {
    throw ConfigError("pole set is empty");
  }
  double max_mag = 0.0;
  for (const double l : lambdas) {
    if (!(l < 0.0)) {
      throw ConfigError("poles must be strictly negative real values");
    }
    max_mag = std::max(max_mag, std::abs(l));
  }
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    for (std::size_t j = i + 1; j < lambdas.size(); ++j) {
      if (std::abs(lambdas[i] - lambdas[j]) <= 1e-12 * max_mag) {
        throw ConfigError("poles must be pairwise distinct");
      }
    }
  }
}

InputDecomposition decompose_input_matrix(const Eigen::MatrixXd& B) {
  const int n = static_cast<int>(B.rows());
  const int m = static_cast<int>(B.cols());
  if (m > n) {
    throw PoleAssignmentError("input matrix has more columns than rows");
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> rank_check(B);
  if (rank_check.rank() < m) {
    throw PoleAssignmentError("input matrix B is rank deficient");
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(B);
  Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd Rfull =
      qr.matrixQR().topRows(m).template triangularView<Eigen::Upper>();

  InputDecomposition d;
  d.Q0 = Q.leftCols(m);
  d.Q1 = Q.rightCols(n - m);
  d.R = Rfull;
  return d;
}

Eigen::MatrixXd candidate_subspace(const Eigen::MatrixXd& A, double lambda,
                                   const Eigen::MatrixXd& Q1) {
  const int n = static_cast<int>(A.rows());
  const int nm = static_cast<int>(Q1.cols());  // n - m
  const int m = n - nm;
  if (nm == 0) {
    // Unconstrained input (m = n): every direction is admissible.
    return Eigen::MatrixXd::Identity(n, n);
  }
  const Eigen::MatrixXd M =
      (A.transpose() - lambda * Eigen::MatrixXd::Identity(n, n)) * Q1;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> rank_check(M);
  if (rank_check.rank() < nm) {
    throw PoleAssignmentError("pole " + std::to_string(lambda) +
                              " is an uncontrollable mode of (A, B)");
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(M);
  Eigen::MatrixXd V = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  return V.rightCols(m);
}

EigenvectorSelection select_eigenvectors(const std::vector<Eigen::MatrixXd>& subspaces,
                                         int max_sweeps, double tol) {
  const int n = static_cast<int>(subspaces.size());
  if (n == 0) {
    throw PoleAssignmentError("no eigenvector subspaces given");
  }
  for (const auto& s : subspaces) {
    if (s.rows() != n || s.cols() < 1) {
      throw PoleAssignmentError("eigenvector subspace has invalid shape");
    }
  }

  Eigen::MatrixXd X(n, n);
  for (int i = 0; i < n; ++i) {
    X.col(i) = subspaces[i].col(0);
  }

  EigenvectorSelection sel;
  sel.det_history.push_back(abs_det(X));

  Eigen::MatrixXd X_minus(n, n - 1);
  double log_prev = log_abs_det(X);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    for (int i = 0; i < n; ++i) {
      int c = 0;
      for (int j = 0; j < n; ++j) {
        if (j != i) {
          X_minus.col(c++) = X.col(j);
        }
      }
      // Direction orthogonal to the span of the other columns: the last
      // column of the full Q factor of X_minus.
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(X_minus);
      const Eigen::VectorXd ortho =
          (qr.householderQ() * Eigen::MatrixXd::Identity(n, n)).col(n - 1);
      const Eigen::VectorXd proj = subspaces[i].transpose() * ortho;
      const double pn = proj.norm();
      if (pn < 1e-14) {
        continue;  // subspace lies in the span of the other columns
      }
      X.col(i) = subspaces[i] * (proj / pn);
    }
    const double log_cur = log_abs_det(X);
    sel.det_history.push_back(std::isinf(log_cur) ? 0.0 : std::exp(log_cur));
    if (std::isfinite(log_cur) && std::isfinite(log_prev) &&
        log_cur - log_prev < std::log1p(tol)) {
      break;
    }
    if (std::isinf(log_cur) && std::isinf(log_prev)) {
      break;  // stuck at det = 0
    }
    log_prev = log_cur;
  }

  if (!std::isfinite(log_abs_det(X))) {
    throw PoleAssignmentError("eigenvector selection is degenerate (det X = 0)");
  }
  sel.X = std::move(X);
  return sel;
}

Eigen::MatrixXd compute_gain(const Eigen::MatrixXd& A, const InputDecomposition& bqr,
                             const Eigen::MatrixXd& X, const std::vector<double>& lambdas) {
  const int n = static_cast<int>(A.rows());
  if (condition_number(X) > 1e12) {
    throw PoleAssignmentError("eigenvector matrix is numerically singular");
  }
  Eigen::MatrixXd XL = X;
  for (int i = 0; i < n; ++i) {
    XL.col(i) *= lambdas[static_cast<std::size_t>(i)];
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(X);
  const Eigen::MatrixXd A_target = XL * lu.inverse();
  return bqr.R.template triangularView<Eigen::Upper>().solve(
      bqr.Q0.transpose() * (A_target - A));
}

GainResult assign_poles(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                        const PoleSet& poles) {
  return assign_poles(A, decompose_input_matrix(B), poles);
}

GainResult assign_poles(const Eigen::MatrixXd& A, const InputDecomposition& bqr,
                        const PoleSet& poles) {
  poles.validate();
  const int n = static_cast<int>(A.rows());
  if (poles.size() != n) {
    throw ConfigError("pole count must match the state dimension");
  }

  std::vector<Eigen::MatrixXd> subspaces;
  subspaces.reserve(static_cast<std::size_t>(n));
  for (const double lambda : poles.lambdas) {
    subspaces.push_back(candidate_subspace(A, lambda, bqr.Q1));
  }

  EigenvectorSelection sel = select_eigenvectors(subspaces);

  GainResult g;
  g.K = compute_gain(A, bqr, sel.X, poles.lambdas);
  g.X = std::move(sel.X);
  g.det_history = std::move(sel.det_history);
  g.det_X = Eigen::PartialPivLU<Eigen::MatrixXd>(g.X).determinant();
  g.kappa = condition_number(g.X);

  const Eigen::MatrixXd BK = (bqr.Q0 * bqr.R) * g.K;
  Eigen::MatrixXd res = (A + BK) * g.X;
  for (int i = 0; i < n; ++i) {
    res.col(i) -= poles.lambdas[static_cast<std::size_t>(i)] * g.X.col(i);
  }
  g.residual = res.norm() / (A.norm() + BK.norm());
  return g;
}

Eigen::MatrixXd random_admissible_selection(const Eigen::MatrixXd& A,
                                            const InputDecomposition& bqr,
                                            const PoleSet& poles, CounterRng& rng) {
  const int n = static_cast<int>(A.rows());
  Eigen::MatrixXd X(n, n);
  for (int i = 0; i < n; ++i) {
    const Eigen::MatrixXd S = candidate_subspace(A, poles.lambdas[static_cast<std::size_t>(i)],
                                                 bqr.Q1);
    X.col(i) = S * rng.unit_vector(static_cast<int>(S.cols()));
  }
  return X;
}

double condition_number(const Eigen::MatrixXd& X) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(X);
  const auto& sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  if (smin <= 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  return sv(0) / smin;
}

}  // namespace rvd
