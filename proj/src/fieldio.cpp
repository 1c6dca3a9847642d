#include "tw/fieldio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "tw/dispersion.hpp"
#include "tw/modes.hpp"
#include "tw/seqalg.hpp"

namespace tw {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

std::string spec_digest(const PotentialSpec& spec) {
    std::ostringstream oss;
    oss << (spec.pcase == PotentialCase::P1 ? "p1" : "p2") << ";alpha=" << format_g17(spec.alpha);
    if (spec.beta) oss << ";beta=" << format_g17(*spec.beta);
    if (spec.b) oss << ";b=" << format_g17(*spec.b);
    oss << ";gamma=" << format_g17(spec.gamma)
        << ";mode=" << (spec.mode == GammaMode::RegularGamma ? "regular" : "distributional");
    for (const auto& iv : spec.gamma_profile)
        oss << ";iv=" << format_g17(iv.y_lo) << ":" << format_g17(iv.y_hi) << ":"
            << format_g17(iv.value);
    return oss.str();
}

// Linear interpolation of tabulated mode values; zero Dirichlet one cell
// beyond the last node.
double interp_row(const Eigen::VectorXd& grid, const Eigen::RowVectorXd& vals, double y) {
    const Eigen::Index n = grid.size();
    const double h = grid[1] - grid[0];
    if (y <= grid[0] - h || y >= grid[n - 1] + h) {
        if (y < grid[0] - 1.5 * h || y > grid[n - 1] + 1.5 * h)
            throw std::invalid_argument("reconstruct: grid outside mode-grid support");
        return 0.0;
    }
    if (y <= grid[0]) return vals[0] * (1.0 - (grid[0] - y) / h);
    if (y >= grid[n - 1]) return vals[n - 1] * (1.0 - (y - grid[n - 1]) / h);
    const Eigen::Index j = static_cast<Eigen::Index>((y - grid[0]) / h);
    const double t = (y - grid[j]) / h;
    return vals[j] * (1.0 - t) + vals[j + 1] * t;
}

// Composite 5-point Gauss-Legendre quadrature split at kink locations.
template <class F>
double quad_kinked(F f, double lo, double hi, const std::vector<double>& kinks) {
    static const double xs[5] = {-0.906179845938664, -0.5384693101056831, 0.0,
                                 0.5384693101056831, 0.906179845938664};
    static const double ws[5] = {0.23692688505618908, 0.47862867049936647, 0.5688888888888889,
                                 0.47862867049936647, 0.23692688505618908};
    std::vector<double> pts{lo, hi};
    for (double c : kinks)
        if (c > lo && c < hi) pts.push_back(c);
    std::sort(pts.begin(), pts.end());
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double mid = 0.5 * (pts[i] + pts[i + 1]), half = 0.5 * (pts[i + 1] - pts[i]);
        for (int q = 0; q < 5; ++q) s += ws[q] * half * f(mid + half * xs[q]);
    }
    return s;
}

}  // namespace

FieldGrid reconstruct(const BranchPoint& point, const PotentialSpec& spec, const GridSpec& grid) {
    if (grid.n_x < 1 || grid.n_y < 3 || grid.n_y % 2 == 0 || grid.y_max <= 0.0)
        throw std::invalid_argument("reconstruct: bad grid spec (n_y must be odd)");

    FieldGrid f;
    f.lambda = point.lambda;
    f.point = point;
    f.digest = spec_digest(spec);
    f.x_nodes = Eigen::VectorXd::LinSpaced(grid.n_x, 0.0, two_pi * (grid.n_x - 1) / grid.n_x);
    f.y_nodes = Eigen::VectorXd::LinSpaced(grid.n_y, -grid.y_max, grid.y_max);
    f.values.setZero(grid.n_x, grid.n_y);

    const bool distributional = point.a.K() > 0;
    if (distributional) {
        std::vector<ModeFunction> modes;
        for (int k = 1; k <= point.a.K(); ++k) modes.push_back(build_mode(spec, k, point.lambda));
        for (int j = 0; j < grid.n_y; ++j) {
            const double ay = std::abs(f.y_nodes[j]);
            for (int k = 1; k <= point.a.K(); ++k) {
                const double amp = point.a.at(k) * modes[k - 1].value(ay);
                if (amp == 0.0) continue;
                for (int i = 0; i < grid.n_x; ++i)
                    f.values(i, j) += amp * std::sin(k * f.x_nodes[i]);
            }
        }
    } else {
        if (point.mode_grid.rows() == 0 || point.grid.size() == 0)
            throw std::invalid_argument("reconstruct: branch point carries no data");
        const int K = static_cast<int>(point.mode_grid.rows());
        for (int j = 0; j < grid.n_y; ++j)
            for (int k = 1; k <= K; ++k) {
                const double amp = interp_row(point.grid, point.mode_grid.row(k - 1), f.y_nodes[j]);
                if (amp == 0.0) continue;
                for (int i = 0; i < grid.n_x; ++i)
                    f.values(i, j) += amp * std::sin(k * f.x_nodes[i]);
            }
    }
    return f;
}

std::pair<double, double> weak_residual(const FieldGrid& field, const PotentialSpec& spec,
                                        double lambda, const SolverConfig& cfg) {
    const BranchPoint& point = field.point;

    if (point.a.K() == 0) {
        // regular case: hat-weak residual of the mode-coupled system,
        // nodal quadrature (one h factor per test function)
        if (point.mode_grid.rows() == 0) return {0.0, 0.0};
        const Eigen::MatrixXd r = regular_residual(point.mode_grid, lambda, spec, cfg);
        const double h = point.grid[1] - point.grid[0];
        return {std::numbers::pi * h * r.cwiseAbs().maxCoeff(), 0.0};
    }

    const int K = point.a.K();
    std::vector<ModeFunction> modes;
    for (int k = 1; k <= K; ++k) modes.push_back(build_mode(spec, k, lambda));

    std::vector<double> kinks{0.0};
    if (spec.pcase == PotentialCase::P2) {
        kinks.push_back(spec.b_or(0.0));
        kinks.push_back(-spec.b_or(0.0));
    }

    // interior: test functions sin(kx) hat_j(y), hats on the field y-grid,
    // y = 0 node excluded (that row is the jump condition)
    const Eigen::VectorXd& y = field.y_nodes;
    const Eigen::Index ny = y.size();
    const double h = y[1] - y[0];
    double interior = 0.0;
    for (int k = 1; k <= K; ++k) {
        const double ak = point.a.at(k);
        if (ak == 0.0) continue;
        const ModeFunction& m = modes[k - 1];
        auto phi = [&](double yy) { return m.value(std::abs(yy)); };
        auto pot = [&](double yy) {
            return static_cast<double>(k) * k * (1.0 - lambda * spec.v0(yy) - spec.w(yy));
        };
        for (Eigen::Index j = 1; j + 1 < ny; ++j) {
            if (y[j] == 0.0) continue;
            const double grad = (phi(y[j]) - phi(y[j - 1])) / h - (phi(y[j + 1]) - phi(y[j])) / h;
            auto left = [&](double yy) { return pot(yy) * phi(yy) * (yy - y[j - 1]) / h; };
            auto right = [&](double yy) { return pot(yy) * phi(yy) * (y[j + 1] - yy) / h; };
            const double mass =
                quad_kinked(left, y[j - 1], y[j], kinks) + quad_kinked(right, y[j], y[j + 1], kinks);
            interior = std::max(interior, std::numbers::pi * std::abs(ak * (grad + mass)));
        }
    }

    // boundary: jump-condition residual as a sine series up to 3K
    const OddSpectrum c = conv3(point.a, 3 * K);
    Eigen::VectorXd r(3 * K);
    for (int k = 1; k <= 3 * K; ++k) {
        double v = -0.25 * spec.gamma * k * k * c.at(k);
        if (k <= K) v += a_coeff(spec, k, lambda) * point.a.at(k);
        r[k - 1] = v;
    }
    double boundary = 0.0;
    const int nx = 24 * K + 1;
    for (int i = 0; i < nx; ++i) {
        const double x = two_pi * i / nx;
        double s = 0.0;
        for (int k = 1; k <= 3 * K; ++k) s += r[k - 1] * std::sin(k * x);
        boundary = std::max(boundary, std::abs(s));
    }
    return {interior, boundary};
}

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_branch_csv(const std::string& path, const std::vector<BranchPoint>& branch) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    const int K = branch.empty() ? 0 : branch.front().a.K();
    out << "eps,lambda,residual,iters";
    for (int k = 1; k <= K; ++k) out << ",a_" << k;
    out << "\n";
    for (const auto& p : branch) {
        if (!p.converged) continue;
        out << format_g17(p.eps) << "," << format_g17(p.lambda) << ","
            << format_g17(p.residual_norm) << "," << p.newton_iters;
        for (int k = 1; k <= K; ++k) out << "," << format_g17(p.a.at(k));
        out << "\n";
    }
}

std::vector<BranchPoint> read_branch_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty branch file: " + path);

    int ncols = 1;
    for (char ch : line)
        if (ch == ',') ++ncols;
    if (ncols < 4 || line.rfind("eps,lambda,residual,iters", 0) != 0)
        throw std::runtime_error("bad branch file header: " + path);
    const int K = ncols - 4;

    std::vector<BranchPoint> branch;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream iss(line);
        std::string cell;
        BranchPoint p;
        Eigen::VectorXd a(K);
        auto next = [&]() {
            if (!std::getline(iss, cell, ',')) throw std::runtime_error("short row in: " + path);
            return std::stod(cell);
        };
        p.eps = next();
        p.lambda = next();
        p.residual_norm = next();
        p.newton_iters = static_cast<int>(next());
        for (int k = 0; k < K; ++k) a[k] = next();
        p.a = OddSpectrum(std::move(a));
        branch.push_back(std::move(p));
    }
    return branch;
}

void write_field_csv(const std::string& path, const FieldGrid& field) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "y\\x";
    for (Eigen::Index i = 0; i < field.x_nodes.size(); ++i)
        out << "," << format_g17(field.x_nodes[i]);
    out << "\n";
    for (Eigen::Index j = 0; j < field.y_nodes.size(); ++j) {
        out << format_g17(field.y_nodes[j]);
        for (Eigen::Index i = 0; i < field.x_nodes.size(); ++i)
            out << "," << format_g17(field.values(i, j));
        out << "\n";
    }
}

std::string curvature_json(const CurvatureReport& report) {
    std::ostringstream oss;
    oss << "{\n"
        << "  \"measured\": " << format_g17(report.measured) << ",\n"
        << "  \"fit_residual\": " << format_g17(report.fit_residual) << ",\n"
        << "  \"best_match\": \"" << report.best_match << "\",\n"
        << "  \"relative_gap\": " << format_g17(report.relative_gap) << ",\n"
        << "  \"candidates\": [";
    for (std::size_t i = 0; i < report.candidates.size(); ++i) {
        if (i) oss << ",";
        oss << "\n    {\"label\": \"" << report.candidates[i].first
            << "\", \"value\": " << format_g17(report.candidates[i].second) << "}";
    }
    oss << "\n  ]\n}\n";
    return oss.str();
}

void write_curvature_json(const std::string& path, const CurvatureReport& report) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << curvature_json(report);
}

}  // namespace tw
