#include "tw/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "tw/modes.hpp"

namespace tw {

double a_coeff(const PotentialSpec& spec, int k, double lambda) {
    return 2.0 * phi_prime0(spec, k, lambda) + static_cast<double>(k) * k * spec.alpha;
}

double alpha_star(PotentialCase pcase, int k_star, double lambda_star, double beta, double b) {
    if (lambda_star >= 1.0) throw std::domain_error("alpha_star: outside parameter regime (lambda* >= 1)");
    if (k_star < 1) throw std::invalid_argument("alpha_star: k* must be >= 1");
    const double s_lam = std::sqrt(1.0 - lambda_star);

    if (pcase == PotentialCase::P1) return 2.0 * s_lam / k_star;

    if (beta < 1.0) {
        const double s_bet = std::sqrt(1.0 - beta);
        const double T = std::tanh(k_star * s_bet * b);
        return (2.0 * s_bet / k_star) * (s_bet * T + s_lam) / (s_bet + s_lam * T);
    }
    if (beta > 1.0) return 2.0 * s_lam / k_star;  // with b = pi/sqrt(beta-1)
    return 2.0 * s_lam / (k_star * (1.0 + s_lam * k_star * b));
}

BifurcationPoint make_bifurcation_point(PotentialSpec& spec, int k_star, double lambda_star) {
    double beta = spec.beta_or(0.0), b = spec.b_or(0.0);
    if (spec.pcase == PotentialCase::P2 && beta > 1.0) {
        b = std::numbers::pi / std::sqrt(beta - 1.0);
        spec.b = b;
    }
    spec.alpha = alpha_star(spec.pcase, k_star, lambda_star, beta, b);
    return BifurcationPoint{k_star, lambda_star, spec.alpha};
}

namespace {

// Bisection + secant polish of a bracketed root of lambda -> A^k_lambda.
DispersionScan::Zero polish_root(const PotentialSpec& spec, int k, double lo, double hi,
                                 double f_lo, double f_hi) {
    const double tol = 1e-13 * std::max(1.0, static_cast<double>(k) * k);
    double lam = lo, f = f_lo;
    for (int it = 0; it < 200; ++it) {
        // secant candidate, fall back to bisection when it leaves the bracket
        double cand = hi - f_hi * (hi - lo) / (f_hi - f_lo);
        if (!(cand > lo && cand < hi)) cand = 0.5 * (lo + hi);
        f = a_coeff(spec, k, cand);
        lam = cand;
        if (std::abs(f) <= tol || hi - lo < 1e-16 * (1.0 + std::abs(lam))) break;
        if ((f < 0.0) == (f_lo < 0.0)) {
            lo = cand;
            f_lo = f;
        } else {
            hi = cand;
            f_hi = f;
        }
    }
    return DispersionScan::Zero{k, lam, std::abs(f)};
}

}  // namespace

DispersionScan kernel_scan(const PotentialSpec& spec, int k_max,
                           double lambda_lo, double lambda_hi, int n_lambda) {
    if (lambda_hi >= 1.0) throw std::domain_error("kernel_scan: window must lie in (-inf, 1)");
    if (lambda_hi <= lambda_lo || n_lambda < 2) throw std::invalid_argument("kernel_scan: bad window");

    DispersionScan scan;
    scan.k_min = 1;
    scan.k_max = k_max;
    scan.lambda_grid = Eigen::VectorXd::LinSpaced(n_lambda, lambda_lo, lambda_hi);
    scan.residuals.resize(k_max, n_lambda);

    for (int k = 1; k <= k_max; ++k) {
        for (int j = 0; j < n_lambda; ++j)
            scan.residuals(k - 1, j) = a_coeff(spec, k, scan.lambda_grid[j]);
        for (int j = 0; j + 1 < n_lambda; ++j) {
            const double f0 = scan.residuals(k - 1, j), f1 = scan.residuals(k - 1, j + 1);
            if (f0 == 0.0) {
                scan.zeros.push_back({k, scan.lambda_grid[j], 0.0});
            } else if ((f0 < 0.0) != (f1 < 0.0)) {
                scan.zeros.push_back(
                    polish_root(spec, k, scan.lambda_grid[j], scan.lambda_grid[j + 1], f0, f1));
            }
        }
        const double f_last = scan.residuals(k - 1, n_lambda - 1);
        if (f_last == 0.0) scan.zeros.push_back({k, scan.lambda_grid[n_lambda - 1], 0.0});
    }
    std::sort(scan.zeros.begin(), scan.zeros.end(),
              [](const DispersionScan::Zero& a, const DispersionScan::Zero& b) {
                  return a.k != b.k ? a.k < b.k : a.lambda < b.lambda;
              });
    return scan;
}

double shifted_eigencondition(const PotentialSpec& spec, int k, double lambda, double mu) {
    const double lam_t = lambda + mu;
    const double beta_t = (spec.pcase == PotentialCase::P1 ? lambda : spec.beta_or(lambda)) + mu;
    if (lam_t >= 1.0 || beta_t >= 1.0)
        throw std::domain_error("shifted_eigencondition: outside parameter regime");
    const double s_lam = std::sqrt(1.0 - lam_t);
    const double s_bet = std::sqrt(1.0 - beta_t);
    double ratio;
    if (spec.pcase == PotentialCase::P1) {
        ratio = 1.0;  // beta~ = lambda~ collapses the step
    } else {
        const double T = std::tanh(k * s_bet * spec.b_or(0.0));
        ratio = (s_bet * T + s_lam) / (s_bet + s_lam * T);
    }
    return k * spec.alpha / (2.0 * s_bet) - ratio;
}

}  // namespace tw
