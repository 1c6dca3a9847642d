#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tw/core.hpp"
#include "tw/seqalg.hpp"

namespace tw {

/// One accepted point on a bifurcation branch. Distributional points carry
/// the sine coefficients `a`; regular points carry mode values on the
/// symmetric interior grid (rows: modes 1..K, cols: nodes).
struct BranchPoint {
    double eps = 0.0;
    double lambda = 0.0;
    OddSpectrum a;
    Eigen::MatrixXd mode_grid;
    Eigen::VectorXd grid;  // node coordinates for mode_grid
    double residual_norm = 0.0;
    int newton_iters = 0;
    double truncation_residual = 0.0;  // discarded cubic tail beyond K
    bool converged = true;
    std::vector<double> residual_history;
};

struct CurvatureReport {
    double measured = 0.0;      // c in lambda(eps) = lambda* + c/2 eps^2
    double fit_residual = 0.0;  // relative RMS misfit of the quadratic model
    std::vector<std::pair<std::string, double>> candidates;
    std::string best_match;     // label, "none", or "ambiguous"
    double relative_gap = 0.0;  // |measured - winner| / |winner|
};

/// Thrown when damped Newton fails; carries the residual history.
struct NewtonFailure : std::runtime_error {
    NewtonFailure(const std::string& what, std::vector<double> history)
        : std::runtime_error(what), residual_history(std::move(history)) {}
    std::vector<double> residual_history;
};

/// Algebraic residual of the distributional system, k = 1..a.K():
///   r_k = A^k_lambda a_k - (gamma k^2 / 4) (a*a*a)_k.
OddSpectrum g_residual(const OddSpectrum& a, double lambda, const PotentialSpec& spec);

/// Exact Jacobian of g_residual: dense K x K matrix in J plus the dlambda
/// column (2 psi'_k(0;lambda) a_k).
void g_jacobian(const OddSpectrum& a, double lambda, const PotentialSpec& spec,
                Eigen::MatrixXd& J, Eigen::VectorXd& dlambda);

/// Damped Newton on the (K+1)-unknown system {g_residual = 0, a_{k*} = eps}.
/// Armijo backtracking with factor 1/2, at most 20 halvings.
BranchPoint corrector(const BranchPoint& seed, double eps_target, int k_star,
                      const PotentialSpec& spec, const SolverConfig& cfg);

/// Marches eps over +-cfg.eps_max in cfg.n_branch steps per half-branch.
/// Predictor for the first point: a = eps e^{k*},
/// lambda = lambda* + (c_1/2) eps^2 with the first curvature candidate c_1;
/// afterwards each accepted point seeds the next. A corrector failure
/// terminates its half-branch, leaving partial results. Sorted by eps.
std::vector<BranchPoint> trace(const PotentialSpec& spec, const BifurcationPoint& bp,
                               const SolverConfig& cfg);

/// Residual of the regular-Gamma mode-coupled system on the symmetric
/// interior grid (n_interior = 2 n_y - 3 nodes):
///   r_{kj} = (T_k u_k)_j + (k^2/4) Gamma(y_j) (u(y_j)*u(y_j)*u(y_j))_k.
Eigen::MatrixXd regular_residual(const Eigen::MatrixXd& mode_grid, double lambda,
                                 const PotentialSpec& spec, const SolverConfig& cfg);

/// Extended Newton on (K n_interior + 1) unknowns with the amplitude
/// constraint <u_{k*}, phi*>_h = eps, phi* the h-normalized discrete kernel
/// eigenvector at (k*, lambda*). Same stepping scheme as trace.
std::vector<BranchPoint> regular_trace(const PotentialSpec& spec, const BifurcationPoint& bp,
                                       const SolverConfig& cfg);

/// All closed-form curvature candidates, labeled. Distributional:
/// cor_p1_distrib, prop_Abf, main2; regular: main1, prop_bf.
std::vector<std::pair<std::string, double>> lambda_ddot_candidates(const PotentialSpec& spec,
                                                                   const BifurcationPoint& bp);

/// Least-squares fit of lambda(eps) - lambda* against eps^2 on the
/// smallest-|eps| half of the accepted points; unique candidate within
/// match_tol relative wins, two matches report "ambiguous", none "none".
CurvatureReport measure_curvature(const std::vector<BranchPoint>& branch, double lambda_star,
                                  const std::vector<std::pair<std::string, double>>& candidates,
                                  double match_tol = 0.02);

}  // namespace tw
