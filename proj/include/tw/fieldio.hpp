#pragma once

#include <Eigen/Core>
#include <string>
#include <utility>
#include <vector>

#include "tw/branch.hpp"
#include "tw/core.hpp"

namespace tw {

struct GridSpec {
    int n_x = 64;        // x nodes on [0, 2pi)
    int n_y = 201;       // y nodes on [-y_max, y_max], odd so y = 0 is a node
    double y_max = 10.0;
};

/// Sampled field Phi(x, y) = sum_k a_k phi_k(|y|) sin(kx) on a tensor grid,
/// with the generating branch point kept as provenance.
struct FieldGrid {
    Eigen::VectorXd x_nodes;
    Eigen::VectorXd y_nodes;
    Eigen::MatrixXd values;  // values(i, j) = Phi(x_i, y_j)
    double lambda = 0.0;
    BranchPoint point;
    std::string digest;
};

FieldGrid reconstruct(const BranchPoint& point, const PotentialSpec& spec, const GridSpec& grid);

/// (interior, boundary) weak-form residuals. Distributional: interior is the
/// max over sine-times-hat test functions away from y = 0 (closed-form mode
/// evaluation, quadrature split at coefficient kinks); boundary is the
/// max-norm over x of the y = 0 jump-condition residual with the cube handled
/// spectrally. Regular: interior is the combined hat-weak residual of the
/// mode-coupled system (boundary reported as 0).
std::pair<double, double> weak_residual(const FieldGrid& field, const PotentialSpec& spec,
                                        double lambda, const SolverConfig& cfg);

/// Shortest 17-significant-digit decimal form, round-trip exact.
std::string format_g17(double v);

void write_branch_csv(const std::string& path, const std::vector<BranchPoint>& branch);
std::vector<BranchPoint> read_branch_csv(const std::string& path);

void write_field_csv(const std::string& path, const FieldGrid& field);

/// JSON with fixed key order: measured, fit_residual, best_match,
/// relative_gap, candidates.
void write_curvature_json(const std::string& path, const CurvatureReport& report);
std::string curvature_json(const CurvatureReport& report);

}  // namespace tw
