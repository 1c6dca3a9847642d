#include "tw/branch.hpp"

#include <Eigen/LU>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "tw/dispersion.hpp"
#include "tw/modes.hpp"
#include "tw/schrod.hpp"

namespace tw {

OddSpectrum g_residual(const OddSpectrum& a, double lambda, const PotentialSpec& spec) {
    const int K = a.K();
    const OddSpectrum c = conv3(a, K);
    Eigen::VectorXd r(K);
    for (int k = 1; k <= K; ++k)
        r[k - 1] = a_coeff(spec, k, lambda) * a.at(k) -
                   0.25 * spec.gamma * k * k * c.at(k);
    return OddSpectrum(std::move(r));
}

void g_jacobian(const OddSpectrum& a, double lambda, const PotentialSpec& spec,
                Eigen::MatrixXd& J, Eigen::VectorXd& dlambda) {
    const int K = a.K();
    const Eigen::VectorXd b = self_conv2(a);  // indices 0..2K
    J.resize(K, K);
    dlambda.resize(K);
    for (int k = 1; k <= K; ++k) {
        const double fac = 0.75 * spec.gamma * k * k;
        for (int j = 1; j <= K; ++j) {
            // (a*a*e^j)_k = b_{|k-j|} - b_{k+j}
            double m = b[std::abs(k - j)];
            if (k + j <= 2 * K) m -= b[k + j];
            J(k - 1, j - 1) = -fac * m;
        }
        J(k - 1, k - 1) += a_coeff(spec, k, lambda);
        dlambda[k - 1] = 2.0 * psi_prime0(spec, k, lambda) * a.at(k);
    }
}

namespace {

double cubic_tail_norm(const OddSpectrum& a, const PotentialSpec& spec) {
    const int K = a.K();
    const OddSpectrum c = conv3(a, 3 * K);
    double s = 0.0;
    for (int k = K + 1; k <= 3 * K; ++k) {
        const double t = 0.25 * spec.gamma * k * k * c.at(k);
        s += t * t;
    }
    return std::sqrt(s);
}

[[noreturn]] void newton_fail(const char* what, const std::vector<double>& hist) {
    std::ostringstream oss;
    oss << what << " (last residual "
        << (hist.empty() ? 0.0 : hist.back()) << " after " << hist.size() << " evaluations)";
    throw NewtonFailure(oss.str(), hist);
}

}  // namespace

BranchPoint corrector(const BranchPoint& seed, double eps_target, int k_star,
                      const PotentialSpec& spec, const SolverConfig& cfg) {
    const int K = cfg.K;
    BranchPoint out;
    out.eps = eps_target;
    if (eps_target == 0.0) {
        out.lambda = seed.lambda;
        out.a = OddSpectrum(Eigen::VectorXd::Zero(K));
        return out;
    }

    Eigen::VectorXd z(K + 1);  // (a_1..a_K, lambda)
    z.setZero();
    if (seed.a.K() > 0) z.head(std::min(K, seed.a.K())) = seed.a.coeffs.head(std::min(K, seed.a.K()));
    z[K] = seed.lambda;

    auto eval = [&](const Eigen::VectorXd& zz) {
        const OddSpectrum a(Eigen::VectorXd(zz.head(K)));
        const OddSpectrum r = g_residual(a, zz[K], spec);
        Eigen::VectorXd F(K + 1);
        F.head(K) = r.coeffs;
        F[K] = a.at(k_star) - eps_target;
        return F;
    };

    std::vector<double> hist;
    Eigen::VectorXd F = eval(z);
    double norm = F.norm();
    hist.push_back(norm);

    int it = 0;
    while (norm > cfg.tol_newton) {
        if (++it > cfg.max_newton_iters) newton_fail("Newton: iteration budget exhausted", hist);

        Eigen::MatrixXd J;
        Eigen::VectorXd dlam;
        g_jacobian(OddSpectrum(Eigen::VectorXd(z.head(K))), z[K], spec, J, dlam);
        Eigen::MatrixXd Jext = Eigen::MatrixXd::Zero(K + 1, K + 1);
        Jext.topLeftCorner(K, K) = J;
        Jext.col(K).head(K) = dlam;
        Jext(K, k_star - 1) = 1.0;

        Eigen::FullPivLU<Eigen::MatrixXd> lu(Jext);
        if (!lu.isInvertible()) newton_fail("fold or symmetry-degenerate point", hist);
        const Eigen::VectorXd delta = lu.solve(-F);

        // Armijo backtracking, factor 1/2, at most 20 halvings
        double t = 1.0;
        bool accepted = false;
        for (int halve = 0; halve <= 20; ++halve, t *= 0.5) {
            const Eigen::VectorXd z_try = z + t * delta;
            const Eigen::VectorXd F_try = eval(z_try);
            const double n_try = F_try.norm();
            if (n_try < (1.0 - 1e-4 * t) * norm) {
                z = z_try;
                F = F_try;
                norm = n_try;
                accepted = true;
                break;
            }
        }
        if (!accepted) newton_fail("Newton divergence", hist);
        hist.push_back(norm);
    }

    out.lambda = z[K];
    out.a = OddSpectrum(Eigen::VectorXd(z.head(K)));
    out.residual_norm = norm;
    out.newton_iters = it;
    out.residual_history = std::move(hist);
    out.truncation_residual = cubic_tail_norm(out.a, spec);
    return out;
}

std::vector<BranchPoint> trace(const PotentialSpec& spec, const BifurcationPoint& bp,
                               const SolverConfig& cfg) {
    require_valid(spec, cfg, true, bp.k_star);
    const auto candidates = lambda_ddot_candidates(spec, bp);
    const double c1 = candidates.empty() ? 0.0 : candidates.front().second;

    std::vector<BranchPoint> branch;
    for (const double sign : {1.0, -1.0}) {
        const BranchPoint* prev = nullptr;
        for (int i = 1; i <= cfg.n_branch; ++i) {
            const double eps = sign * cfg.eps_max * i / cfg.n_branch;
            BranchPoint seed;
            seed.eps = eps;
            if (prev) {
                seed.a = OddSpectrum(Eigen::VectorXd(prev->a.coeffs * (eps / prev->eps)));
                seed.lambda = prev->lambda;
            } else {
                seed.a = OddSpectrum(Eigen::VectorXd(
                    eps * basis_e(bp.k_star, cfg.K).coeffs));
                seed.lambda = bp.lambda_star + 0.5 * c1 * eps * eps;
            }
            try {
                branch.push_back(corrector(seed, eps, bp.k_star, spec, cfg));
            } catch (const NewtonFailure&) {
                BranchPoint failed;
                failed.eps = eps;
                failed.lambda = seed.lambda;
                failed.converged = false;
                branch.push_back(failed);
                break;  // terminate this half-branch
            }
            prev = &branch.back();
        }
    }
    std::sort(branch.begin(), branch.end(),
              [](const BranchPoint& p, const BranchPoint& q) { return p.eps < q.eps; });
    return branch;
}

namespace {

int symmetric_interior(const SolverConfig& cfg) { return 2 * cfg.n_y - 3; }

// Composite 5-point Gauss-Legendre quadrature.
template <class F>
double quad(F f, double lo, double hi, int panels) {
    static const double xs[5] = {-0.906179845938664, -0.5384693101056831, 0.0,
                                 0.5384693101056831, 0.906179845938664};
    static const double ws[5] = {0.23692688505618908, 0.47862867049936647, 0.5688888888888889,
                                 0.47862867049936647, 0.23692688505618908};
    const double dx = (hi - lo) / panels;
    double s = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = lo + (p + 0.5) * dx;
        for (int q = 0; q < 5; ++q) s += ws[q] * f(mid + 0.5 * dx * xs[q]);
    }
    return s * 0.5 * dx;
}

// Integrates f over [lo, hi] split at the kinks of the mode profile.
template <class F>
double quad_split(F f, double lo, double hi, const std::vector<double>& kinks) {
    std::vector<double> pts{lo, hi};
    for (double c : kinks)
        if (c > lo && c < hi) pts.push_back(c);
    std::sort(pts.begin(), pts.end());
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const int panels = std::max(16, static_cast<int>(std::ceil(8.0 * (pts[i + 1] - pts[i]))));
        s += quad(f, pts[i], pts[i + 1], panels);
    }
    return s;
}

}  // namespace

std::vector<std::pair<std::string, double>> lambda_ddot_candidates(const PotentialSpec& spec,
                                                                   const BifurcationPoint& bp) {
    std::vector<std::pair<std::string, double>> out;
    if (spec.mode == GammaMode::DistributionalGamma) {
        const double k2 = static_cast<double>(bp.k_star) * bp.k_star;
        const double i_half = psi_prime0(spec, bp.k_star, bp.lambda_star) / k2;
        out.emplace_back("cor_p1_distrib", -spec.gamma * bp.k_star * std::sqrt(1.0 - bp.lambda_star));
        out.emplace_back("prop_Abf", -3.0 * spec.gamma / (4.0 * i_half));
        out.emplace_back("main2", -3.0 * spec.gamma / (4.0 * 2.0 * i_half));
        return out;
    }

    // regular Gamma: R = int Gamma phi*^4 / int V0 phi*^2 with phi*
    // L2(R)-normalized, both integrals over the whole line
    const ModeFunction m = build_mode(spec, bp.k_star, bp.lambda_star);
    const double L = phi_l2(spec, bp.k_star, bp.lambda_star);
    std::vector<double> kinks{0.0};
    if (spec.pcase == PotentialCase::P2) {
        kinks.push_back(m.b);
        kinks.push_back(-m.b);
    }
    auto phi = [&](double y) { return m.value(std::abs(y)); };
    double num = 0.0;
    for (const auto& iv : spec.gamma_profile)
        num += iv.value * quad_split([&](double y) { return std::pow(phi(y), 4); },
                                     iv.y_lo, iv.y_hi, kinks);
    num /= 4.0 * L * L * L * L;
    const double k2 = static_cast<double>(bp.k_star) * bp.k_star;
    const double i_half = psi_prime0(spec, bp.k_star, bp.lambda_star) / k2;  // int_0^inf V0 phi^2
    const double den = i_half / (L * L);
    const double R = num / den;
    out.emplace_back("main1", -1.5 * R);
    out.emplace_back("prop_bf", -1.5 * std::numbers::pi * R);
    return out;
}

CurvatureReport measure_curvature(const std::vector<BranchPoint>& branch, double lambda_star,
                                  const std::vector<std::pair<std::string, double>>& candidates,
                                  double match_tol) {
    std::vector<const BranchPoint*> pts;
    for (const auto& p : branch)
        if (p.converged && p.eps != 0.0) pts.push_back(&p);
    if (pts.size() < 8) throw std::invalid_argument("measure_curvature: need >= 8 branch points");

    std::sort(pts.begin(), pts.end(), [](const BranchPoint* p, const BranchPoint* q) {
        return std::abs(p->eps) < std::abs(q->eps);
    });
    pts.resize(std::max<std::size_t>(4, (pts.size() + 1) / 2));  // smallest-|eps| half

    double se4 = 0.0, sde2 = 0.0;
    for (const auto* p : pts) {
        const double e2 = p->eps * p->eps;
        se4 += e2 * e2;
        sde2 += (p->lambda - lambda_star) * e2;
    }
    CurvatureReport rep;
    rep.measured = 2.0 * sde2 / se4;
    rep.candidates = candidates;

    double misfit = 0.0, scale = 0.0;
    for (const auto* p : pts) {
        const double model = 0.5 * rep.measured * p->eps * p->eps;
        const double d = p->lambda - lambda_star;
        misfit += (d - model) * (d - model);
        scale += d * d;
    }
    rep.fit_residual = scale > 0.0 ? std::sqrt(misfit / scale) : std::sqrt(misfit);

    int matches = 0;
    double best_gap = std::numeric_limits<double>::infinity();
    for (const auto& [label, value] : candidates) {
        const double denom = std::max({std::abs(value), std::abs(rep.measured), 1e-300});
        const double gap = std::abs(rep.measured - value) / denom;
        if (gap <= match_tol) {
            ++matches;
            if (gap < best_gap) {
                best_gap = gap;
                rep.best_match = label;
                rep.relative_gap = gap;
            }
        }
    }
    if (matches == 0) rep.best_match = "none";
    if (matches > 1) rep.best_match = "ambiguous";
    return rep;
}

Eigen::MatrixXd regular_residual(const Eigen::MatrixXd& mode_grid, double lambda,
                                 const PotentialSpec& spec, const SolverConfig& cfg) {
    const int K = static_cast<int>(mode_grid.rows());
    const int n = static_cast<int>(mode_grid.cols());
    if (n != symmetric_interior(cfg))
        throw std::invalid_argument("regular_residual: grid size mismatch");

    Eigen::MatrixXd r(K, n);
    DiscreteOperator op0 = build_operator(spec, 1, lambda, cfg.y_max, n);
    for (int k = 1; k <= K; ++k) {
        const DiscreteOperator op = build_operator(spec, k, lambda, cfg.y_max, n);
        r.row(k - 1) = op.apply(mode_grid.row(k - 1).transpose()).transpose();
    }
    for (int j = 0; j < n; ++j) {
        const double g = spec.gamma_at(op0.grid[j]);
        if (g == 0.0) continue;
        const OddSpectrum aj(Eigen::VectorXd(mode_grid.col(j)));
        const OddSpectrum c = conv3(aj, K);
        for (int k = 1; k <= K; ++k)
            r(k - 1, j) += 0.25 * k * k * g * c.at(k);
    }
    return r;
}

namespace {

struct RegularSystem {
    const PotentialSpec& spec;
    const SolverConfig& cfg;
    int k_star;
    double eps_target;
    Eigen::VectorXd phi_star;  // h-normalized discrete kernel vector
    int n;                     // interior nodes
    double h;

    int dim() const { return cfg.K * n + 1; }

    Eigen::VectorXd residual(const Eigen::MatrixXd& U, double lambda) const {
        const Eigen::MatrixXd r = regular_residual(U, lambda, spec, cfg);
        Eigen::VectorXd F(dim());
        for (int k = 0; k < cfg.K; ++k) F.segment(k * n, n) = r.row(k).transpose();
        F[cfg.K * n] = h * U.row(k_star - 1).dot(phi_star) - eps_target;
        return F;
    }

    Eigen::SparseMatrix<double> jacobian(const Eigen::MatrixXd& U, double lambda,
                                         const Eigen::VectorXd& grid) const {
        const int K = cfg.K, N = dim();
        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(static_cast<std::size_t>(K) * n * 6);
        for (int k = 1; k <= K; ++k) {
            const DiscreteOperator op = build_operator(spec, k, lambda, cfg.y_max, n);
            const int base = (k - 1) * n;
            for (int j = 0; j < n; ++j) {
                trips.emplace_back(base + j, base + j, op.diagonal[j]);
                if (j + 1 < n) {
                    trips.emplace_back(base + j, base + j + 1, op.off_diagonal);
                    trips.emplace_back(base + j + 1, base + j, op.off_diagonal);
                }
                // dlambda column: d/dlambda of k^2 (1 - lambda V0) u
                trips.emplace_back(base + j, K * n,
                                   -static_cast<double>(k) * k * spec.v0(grid[j]) * U(k - 1, j));
            }
        }
        for (int j = 0; j < n; ++j) {
            const double g = spec.gamma_at(grid[j]);
            if (g == 0.0) continue;
            const OddSpectrum aj(Eigen::VectorXd(U.col(j)));
            const Eigen::VectorXd b = self_conv2(aj);
            for (int k = 1; k <= K; ++k)
                for (int kp = 1; kp <= K; ++kp) {
                    double m = b[std::abs(k - kp)];
                    if (k + kp <= 2 * K) m -= b[k + kp];
                    const double v = 0.75 * k * k * g * m;
                    if (v != 0.0) trips.emplace_back((k - 1) * n + j, (kp - 1) * n + j, v);
                }
        }
        for (int j = 0; j < n; ++j)
            trips.emplace_back(K * n, (k_star - 1) * n + j, h * phi_star[j]);

        Eigen::SparseMatrix<double> J(N, N);
        J.setFromTriplets(trips.begin(), trips.end());
        return J;
    }
};

BranchPoint regular_corrector(RegularSystem& sys, Eigen::MatrixXd U, double lambda,
                              const Eigen::VectorXd& grid) {
    const SolverConfig& cfg = sys.cfg;
    std::vector<double> hist;
    Eigen::VectorXd F = sys.residual(U, lambda);
    double norm = F.norm();
    hist.push_back(norm);

    int it = 0;
    while (norm > cfg.tol_newton) {
        if (++it > cfg.max_newton_iters) newton_fail("Newton: iteration budget exhausted", hist);
        const Eigen::SparseMatrix<double> J = sys.jacobian(U, lambda, grid);
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(J);
        if (lu.info() != Eigen::Success) newton_fail("fold or symmetry-degenerate point", hist);
        const Eigen::VectorXd delta = lu.solve(-F);

        double t = 1.0;
        bool accepted = false;
        for (int halve = 0; halve <= 20; ++halve, t *= 0.5) {
            Eigen::MatrixXd U_try = U;
            for (int k = 0; k < cfg.K; ++k)
                U_try.row(k) += t * delta.segment(k * sys.n, sys.n).transpose();
            const double lam_try = lambda + t * delta[cfg.K * sys.n];
            const Eigen::VectorXd F_try = sys.residual(U_try, lam_try);
            const double n_try = F_try.norm();
            if (n_try < (1.0 - 1e-4 * t) * norm) {
                U = std::move(U_try);
                lambda = lam_try;
                F = F_try;
                norm = n_try;
                accepted = true;
                break;
            }
        }
        if (!accepted) newton_fail("Newton divergence", hist);
        hist.push_back(norm);
    }

    BranchPoint out;
    out.eps = sys.eps_target;
    out.lambda = lambda;
    out.mode_grid = std::move(U);
    out.grid = grid;
    out.residual_norm = norm;
    out.newton_iters = it;
    out.residual_history = std::move(hist);
    return out;
}

}  // namespace

std::vector<BranchPoint> regular_trace(const PotentialSpec& spec, const BifurcationPoint& bp,
                                       const SolverConfig& cfg) {
    require_valid(spec, cfg, true, bp.k_star);
    const int n = symmetric_interior(cfg);
    const DiscreteOperator op_star = build_operator(spec, bp.k_star, bp.lambda_star, cfg.y_max, n);
    const auto eigs = smallest_eigs(op_star, 1);
    const Eigen::VectorXd phi_star = eigs.front().vector;

    const auto candidates = lambda_ddot_candidates(spec, bp);
    const double c1 = candidates.empty() ? 0.0 : candidates.front().second;

    RegularSystem sys{spec, cfg, bp.k_star, 0.0, phi_star, n, op_star.h};

    std::vector<BranchPoint> branch;
    for (const double sign : {1.0, -1.0}) {
        const BranchPoint* prev = nullptr;
        for (int i = 1; i <= cfg.n_branch; ++i) {
            const double eps = sign * cfg.eps_max * i / cfg.n_branch;
            sys.eps_target = eps;
            Eigen::MatrixXd U;
            double lam;
            if (prev) {
                U = prev->mode_grid * (eps / prev->eps);
                lam = prev->lambda;
            } else {
                U = Eigen::MatrixXd::Zero(cfg.K, n);
                U.row(bp.k_star - 1) = eps * phi_star.transpose();
                lam = bp.lambda_star + 0.5 * c1 * eps * eps;
            }
            try {
                branch.push_back(regular_corrector(sys, std::move(U), lam, op_star.grid));
            } catch (const NewtonFailure&) {
                BranchPoint failed;
                failed.eps = eps;
                failed.lambda = lam;
                failed.converged = false;
                branch.push_back(failed);
                break;
            }
            prev = &branch.back();
        }
    }
    std::sort(branch.begin(), branch.end(),
              [](const BranchPoint& p, const BranchPoint& q) { return p.eps < q.eps; });
    return branch;
}

}  // namespace tw
