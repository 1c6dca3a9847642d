#include "tw/schrod.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tw {

Eigen::VectorXd DiscreteOperator::apply(const Eigen::VectorXd& x) const {
    const Eigen::Index n = size();
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double v = diagonal[i] * x[i];
        if (i > 0) v += off_diagonal * x[i - 1];
        if (i + 1 < n) v += off_diagonal * x[i + 1];
        y[i] = v;
    }
    return y;
}

DiscreteOperator build_operator(const PotentialSpec& spec, int k, double lambda,
                                double y_max, int n_interior) {
    if (lambda >= 1.0) throw std::domain_error("build_operator: outside parameter regime");
    if (n_interior < 3 || n_interior % 2 == 0)
        throw std::invalid_argument("build_operator: n_interior must be odd and >= 3 (y=0 on grid)");

    DiscreteOperator op;
    op.k = k;
    op.lambda = lambda;
    op.y_max = y_max;
    op.h = 2.0 * y_max / (n_interior + 1);
    op.delta_node = (n_interior - 1) / 2;
    op.grid.resize(n_interior);
    op.diagonal.resize(n_interior);
    op.off_diagonal = -1.0 / (op.h * op.h);

    if (spec.pcase == PotentialCase::P2) {
        const double b = spec.b_or(0.0);
        const double ratio = b / op.h;
        if (std::abs(ratio - std::round(ratio)) > 1e-9)
            throw std::invalid_argument("build_operator: interface off-grid");
    }

    const double k2 = static_cast<double>(k) * k;
    for (Eigen::Index i = 0; i < n_interior; ++i) {
        const double y = -y_max + (i + 1) * op.h;
        op.grid[i] = y;
        op.diagonal[i] = 2.0 / (op.h * op.h) + k2 * (1.0 - lambda * spec.v0(y) - spec.w(y));
    }
    op.diagonal[op.delta_node] -= k2 * spec.alpha / op.h;
    return op;
}

Eigen::Index sturm_count(const DiscreteOperator& op, double x) {
    const Eigen::Index n = op.size();
    const double e2 = op.off_diagonal * op.off_diagonal;
    Eigen::Index count = 0;
    double q = op.diagonal[0] - x;
    if (q < 0.0) ++count;
    for (Eigen::Index i = 1; i < n; ++i) {
        if (q == 0.0) q = 1e-300;
        q = op.diagonal[i] - x - e2 / q;
        if (q < 0.0) ++count;
    }
    return count;
}

namespace {

// i-th (0-based) eigenvalue of the tridiagonal operator by Sturm bisection.
double eig_by_index(const DiscreteOperator& op, Eigen::Index i) {
    double lo = op.diagonal.minCoeff() - 2.0 * std::abs(op.off_diagonal);
    double hi = op.diagonal.maxCoeff() + 2.0 * std::abs(op.off_diagonal);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (sturm_count(op, mid) > i)
            hi = mid;
        else
            lo = mid;
        if (hi - lo <= 1e-12 * std::max(1.0, std::abs(mid)) || hi - lo < 1e-14) break;
    }
    return 0.5 * (lo + hi);
}

// Solves (T - shift I) x = rhs with partial pivoting; returns false on a
// zero pivot.
bool solve_shifted(const DiscreteOperator& op, double shift, Eigen::VectorXd rhs,
                   Eigen::VectorXd& x) {
    const Eigen::Index n = op.size();
    Eigen::VectorXd d = op.diagonal.array() - shift;      // main
    Eigen::VectorXd c = Eigen::VectorXd::Constant(n - 1, op.off_diagonal);  // super
    Eigen::VectorXd a = Eigen::VectorXd::Constant(n - 1, op.off_diagonal);  // sub
    Eigen::VectorXd c2 = Eigen::VectorXd::Zero(n > 1 ? n - 2 : 0);          // fill-in

    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        if (std::abs(a[i]) > std::abs(d[i])) {
            std::swap(d[i], a[i]);
            double tmp = c[i];
            c[i] = d[i + 1];
            d[i + 1] = tmp;
            if (i + 2 < n) {
                c2[i] = c[i + 1];
                c[i + 1] = 0.0;
            }
            std::swap(rhs[i], rhs[i + 1]);
        }
        if (d[i] == 0.0) return false;
        const double m = a[i] / d[i];
        d[i + 1] -= m * c[i];
        if (i + 2 < n) c[i + 1] -= m * c2[i];
        rhs[i + 1] -= m * rhs[i];
    }
    if (d[n - 1] == 0.0) return false;

    x.resize(n);
    x[n - 1] = rhs[n - 1] / d[n - 1];
    if (n > 1) x[n - 2] = (rhs[n - 2] - c[n - 2] * x[n - 1]) / d[n - 2];
    for (Eigen::Index i = n - 3; i >= 0; --i)
        x[i] = (rhs[i] - c[i] * x[i + 1] - c2[i] * x[i + 2]) / d[i];
    return true;
}

Eigen::VectorXd inverse_iteration(const DiscreteOperator& op, double mu) {
    const Eigen::Index n = op.size();
    Eigen::VectorXd v = Eigen::VectorXd::Ones(n);
    v /= std::sqrt(op.dot(v, v));
    double shift = mu;
    for (int it = 0; it < 8; ++it) {
        Eigen::VectorXd x;
        if (!solve_shifted(op, shift, v, x)) {
            shift += 1e-12 * std::max(1.0, std::abs(mu));
            continue;
        }
        const double nrm = std::sqrt(op.dot(x, x));
        if (!std::isfinite(nrm) || nrm == 0.0)
            throw std::runtime_error("smallest_eigs: inverse iteration failed");
        v = x / nrm;
        const Eigen::VectorXd res = op.apply(v) - mu * v;
        if (std::sqrt(op.dot(res, res)) < 1e-9 * std::max(1.0, std::abs(mu))) break;
    }
    // deterministic sign: largest-magnitude entry positive
    Eigen::Index imax;
    v.cwiseAbs().maxCoeff(&imax);
    if (v[imax] < 0.0) v = -v;
    return v;
}

}  // namespace

std::vector<EigenPair> smallest_eigs(const DiscreteOperator& op, int m) {
    const Eigen::Index n = op.size();
    if (m < 1 || m > n) throw std::invalid_argument("smallest_eigs: bad m");

    const Eigen::Index below = sturm_count(op, 0.0);
    std::vector<double> candidates;
    const Eigen::Index lo_idx = std::max<Eigen::Index>(0, below - m);
    const Eigen::Index hi_idx = std::min<Eigen::Index>(n - 1, below + m - 1);
    for (Eigen::Index i = lo_idx; i <= hi_idx; ++i) candidates.push_back(eig_by_index(op, i));

    std::sort(candidates.begin(), candidates.end(),
              [](double a, double b) { return std::abs(a) < std::abs(b); });
    candidates.resize(std::min<std::size_t>(candidates.size(), m));

    std::vector<EigenPair> out;
    for (double mu : candidates) out.push_back({mu, inverse_iteration(op, mu)});
    return out;
}

double discrete_lambda_star(const PotentialSpec& spec, int k_star, double lambda_guess,
                            double y_max, int n_interior) {
    auto mu0 = [&](double lam) {
        const DiscreteOperator op = build_operator(spec, k_star, lam, y_max, n_interior);
        return smallest_eigs(op, 1).front().value;
    };
    double l0 = lambda_guess, f0 = mu0(l0);
    double l1 = lambda_guess + 1e-3, f1 = mu0(l1);
    for (int it = 0; it < 50; ++it) {
        if (f1 == f0) break;
        const double l2 = l1 - f1 * (l1 - l0) / (f1 - f0);
        l0 = l1;
        f0 = f1;
        l1 = l2;
        f1 = mu0(l1);
        if (std::abs(f1) < 1e-13 || std::abs(l1 - l0) < 1e-15 * (1.0 + std::abs(l1))) break;
    }
    return l1;
}

Eigen::VectorXd projected_solve(const DiscreteOperator& op, bool k_star_flag,
                                const Eigen::VectorXd& phi_star, const Eigen::VectorXd& rhs) {
    const double rhs_norm = rhs.norm();
    auto raw_solve = [&](const Eigen::VectorXd& g) {
        Eigen::VectorXd x;
        if (!solve_shifted(op, 0.0, g, x))
            throw std::runtime_error("projected_solve: operator singular: run kernel_scan");
        return x;
    };
    auto sm_solve = [&](const Eigen::VectorXd& g) {
        Eigen::VectorXd u = raw_solve(g);
        if (!k_star_flag) return u;
        // (T + phi (h phi)^T)^{-1} via Sherman-Morrison
        const Eigen::VectorXd t_phi = raw_solve(phi_star);
        const double denom = 1.0 + op.dot(phi_star, t_phi);
        return Eigen::VectorXd(u - t_phi * (op.dot(phi_star, u) / denom));
    };
    auto residual = [&](const Eigen::VectorXd& u) {
        Eigen::VectorXd r = rhs - op.apply(u);
        if (k_star_flag) r -= phi_star * op.dot(phi_star, u);
        return r;
    };

    Eigen::VectorXd u = sm_solve(rhs);
    for (int it = 0; it < 3; ++it) {  // iterative refinement near singular T
        const Eigen::VectorXd r = residual(u);
        if (r.norm() <= 1e-12 * std::max(rhs_norm, 1e-300)) break;
        u += sm_solve(r);
    }
    if (rhs_norm > 0.0 && residual(u).norm() > 1e-10 * rhs_norm)
        throw std::runtime_error("projected_solve: operator singular: run kernel_scan");
    return u;
}

}  // namespace tw
