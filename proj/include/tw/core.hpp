#pragma once

#include <optional>
#include <string>
#include <vector>

namespace tw {

enum class PotentialCase { P1, P2 };
enum class GammaMode { RegularGamma, DistributionalGamma };

/// One constant piece of a regular nonlinearity profile Gamma(y).
struct GammaInterval {
    double y_lo = 0.0;
    double y_hi = 0.0;
    double value = 0.0;
};

/// Coefficient data defining V(lambda, y) and Gamma.
///
/// P1: V = lambda + alpha*delta_0.
/// P2: V = lambda*1_{|y|>=b} + beta*1_{|y|<b} + alpha*delta_0.
struct PotentialSpec {
    PotentialCase pcase = PotentialCase::P1;
    double alpha = 0.0;
    std::optional<double> beta;  // P2 only
    std::optional<double> b;     // P2 only
    double gamma = 0.0;          // distributional Gamma strength
    std::vector<GammaInterval> gamma_profile;  // regular Gamma
    GammaMode mode = GammaMode::DistributionalGamma;

    double beta_or(double fallback) const { return beta ? *beta : fallback; }
    double b_or(double fallback) const { return b ? *b : fallback; }

    /// Background coefficient V0(y) (the part multiplied by lambda).
    double v0(double y) const;
    /// Bounded part W(y) of V1.
    double w(double y) const;
    /// Regular Gamma(y) from the piecewise-constant profile.
    double gamma_at(double y) const;
};

struct SolverConfig {
    int K = 12;             // Fourier truncation
    double s = 2.5;         // sequence-norm index
    double y_max = 25.0;    // domain truncation
    int n_y = 2001;         // grid points on [0, y_max]
    double tol_newton = 1e-12;
    int max_newton_iters = 25;
    double eps_max = 0.1;   // branch amplitude extent
    int n_branch = 32;      // branch points per half-branch
};

/// A certified linear-kernel point: A^{k*}_{lambda*}(alpha) = 0.
struct BifurcationPoint {
    int k_star = 1;
    double lambda_star = 0.0;
    double alpha = 0.0;
};

/// Returns one human-readable diagnostic per violated invariant; empty means valid.
/// If `bifurcation_requested`, additionally demands alpha > 0.
std::vector<std::string> validate(const PotentialSpec& spec, const SolverConfig& cfg,
                                  bool bifurcation_requested = false,
                                  int k_star = 0);

/// Throws std::invalid_argument listing all diagnostics if validation fails.
void require_valid(const PotentialSpec& spec, const SolverConfig& cfg,
                   bool bifurcation_requested = false, int k_star = 0);

}  // namespace tw
