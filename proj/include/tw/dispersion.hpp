#pragma once

#include <Eigen/Core>
#include <vector>

#include "tw/core.hpp"

namespace tw {

struct DispersionScan {
    int k_min = 1, k_max = 1;
    Eigen::VectorXd lambda_grid;
    Eigen::MatrixXd residuals;  // rows: k (k_min..k_max), cols: lambda grid
    struct Zero {
        int k;
        double lambda;
        double residual;  // |A^k_lambda| after polishing
    };
    std::vector<Zero> zeros;  // sorted by k, then lambda

    /// Certifies the uniqueness hypothesis on the scanned window.
    bool unique_kernel() const { return zeros.size() == 1; }
};

/// Dispersion coefficient A^k_lambda = 2 phi'_k(0+;lambda) + k^2 alpha.
double a_coeff(const PotentialSpec& spec, int k, double lambda);

/// Delta strength alpha making A^{k*}_{lambda*} = 0, by case:
///   P1          2 sqrt(1-lambda*)/k*
///   P2 beta<1   hyperbolic-ratio formula
///   P2 beta>1   2 sqrt(1-lambda*)/k* with b forced to pi/sqrt(beta-1)
///   P2 beta=1   2 sqrt(1-lambda*)/(k* (1 + sqrt(1-lambda*) k* b))
double alpha_star(PotentialCase pcase, int k_star, double lambda_star,
                  double beta = 0.0, double b = 0.0);

/// Convenience: fills spec.alpha (and, for beta>1, spec.b) so that
/// (k_star, lambda_star) is a kernel point; returns the BifurcationPoint.
BifurcationPoint make_bifurcation_point(PotentialSpec& spec, int k_star, double lambda_star);

/// Scans A^k_lambda on the (k, lambda) grid, brackets sign changes and
/// polishes each root to |A| <= 1e-12 by bisection + secant steps.
DispersionScan kernel_scan(const PotentialSpec& spec, int k_max,
                           double lambda_lo, double lambda_hi, int n_lambda = 2048);

/// Signed residual of the shifted eigenvalue condition for P2:
///   k alpha / (2 sqrt(1-beta~)) - ratio(lambda~, beta~),
/// with lambda~ = lambda + mu, beta~ = beta + mu. Roots in mu locate
/// eigenvalues mu~ = k^2 mu of L^k_lambda.
double shifted_eigencondition(const PotentialSpec& spec, int k, double lambda, double mu);

}  // namespace tw
