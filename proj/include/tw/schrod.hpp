#pragma once

#include <Eigen/Core>
#include <utility>
#include <vector>

#include "tw/core.hpp"

namespace tw {

/// Symmetric tridiagonal discretization of
///   L^k_lambda = -d^2/dy^2 + k^2 (1 - lambda V0 - W) - k^2 alpha delta_0
/// on [-y_max, y_max] with Dirichlet truncation. The delta potential enters
/// as -k^2 alpha / h on the diagonal at the y = 0 node.
struct DiscreteOperator {
    int k = 1;
    double lambda = 0.0;
    double y_max = 0.0;
    double h = 0.0;
    Eigen::VectorXd grid;      // interior nodes, -y_max+h .. y_max-h
    Eigen::VectorXd diagonal;  // includes potential and delta term
    double off_diagonal = 0.0;
    Eigen::Index delta_node = 0;  // index of y = 0

    Eigen::Index size() const { return diagonal.size(); }
    /// y = op * x for the tridiagonal operator.
    Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
    /// Trapezoid-weighted inner product on the interior grid (weight h).
    double dot(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const { return h * a.dot(b); }
};

/// Builds the operator; y = 0 (and +-b for P2 or a regular-Gamma edge) must be
/// grid nodes, otherwise throws "interface off-grid".
DiscreteOperator build_operator(const PotentialSpec& spec, int k, double lambda,
                                double y_max, int n_interior);

struct EigenPair {
    double value;
    Eigen::VectorXd vector;  // L2-normalized with trapezoid weight h
};

/// The m eigenvalues of smallest absolute value with eigenvectors, via
/// Sturm-sequence bisection on the tridiagonal matrix plus inverse iteration.
std::vector<EigenPair> smallest_eigs(const DiscreteOperator& op, int m);

/// Number of eigenvalues strictly below x (Sturm count).
Eigen::Index sturm_count(const DiscreteOperator& op, double x);

/// The lambda at which the discretized L^{k*}_lambda is exactly singular
/// (secant iteration on the smallest eigenvalue, started at lambda_guess).
/// Offset from the closed-form lambda* by the discretization error.
double discrete_lambda_star(const PotentialSpec& spec, int k_star, double lambda_guess,
                            double y_max, int n_interior);

/// Solves (T + flag * P) u = rhs with P = <., phi*>_h phi* rank-1, via a
/// pivoted tridiagonal factorization plus the Sherman-Morrison update.
/// phi_star must be h-normalized when flag is set.
Eigen::VectorXd projected_solve(const DiscreteOperator& op, bool k_star_flag,
                                const Eigen::VectorXd& phi_star, const Eigen::VectorXd& rhs);

}  // namespace tw
