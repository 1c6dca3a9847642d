#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "tw/branch.hpp"
#include "tw/config.hpp"
#include "tw/core.hpp"
#include "tw/dispersion.hpp"
#include "tw/fieldio.hpp"
#include "tw/modes.hpp"
#include "tw/schrod.hpp"

namespace {

// exit codes: 0 ok, 1 usage/config, 2 solver failure, 3 verification failure
constexpr int kExitConfig = 1;
constexpr int kExitSolver = 2;
constexpr int kExitVerify = 3;

struct Global {
    std::string config_path;
    std::string out_dir = ".";
    int seed = 0;  // reserved for randomized utilities; solvers ignore it
};

std::string out_path(const Global& g, const std::string& name) {
    std::filesystem::create_directories(g.out_dir);
    return (std::filesystem::path(g.out_dir) / name).string();
}

tw::RunConfig load(const Global& g) {
    if (g.config_path.empty()) throw std::invalid_argument("--config is required");
    return tw::load_config(g.config_path);
}

int cmd_bifpoint(const Global& g) {
    tw::RunConfig rc = load(g);
    if (!rc.have_branch) throw std::invalid_argument("bifpoint needs a [branch] section");
    const tw::BifurcationPoint bp =
        tw::make_bifurcation_point(rc.spec, rc.k_star, rc.lambda_star);
    tw::require_valid(rc.spec, rc.cfg, true, bp.k_star);

    std::ofstream out(out_path(g, "bifpoint.json"));
    out << "{\n  \"k_star\": " << bp.k_star
        << ",\n  \"lambda_star\": " << tw::format_g17(bp.lambda_star)
        << ",\n  \"alpha\": " << tw::format_g17(bp.alpha) << "\n}\n";
    std::cout << "bifurcation point: k* = " << bp.k_star
              << ", lambda* = " << tw::format_g17(bp.lambda_star)
              << ", alpha = " << tw::format_g17(bp.alpha) << "\n";
    return 0;
}

int cmd_modes(const Global& g) {
    tw::RunConfig rc = load(g);
    if (!rc.have_branch) throw std::invalid_argument("modes needs a [branch] section");
    const tw::ModeFunction m = tw::build_mode(rc.spec, rc.k_star, rc.lambda_star);

    std::ofstream out(out_path(g, "mode.csv"));
    out << "y,phi,dphi\n";
    for (int j = 0; j < rc.cfg.n_y; ++j) {
        const double y = rc.cfg.y_max * j / (rc.cfg.n_y - 1);
        out << tw::format_g17(y) << "," << tw::format_g17(m.value(y)) << ","
            << tw::format_g17(m.derivative(y)) << "\n";
    }
    std::cout << "phi'(0+) = " << tw::format_g17(tw::phi_prime0(rc.spec, rc.k_star, rc.lambda_star))
              << ", ||phi||_L2 = " << tw::format_g17(tw::phi_l2(rc.spec, rc.k_star, rc.lambda_star))
              << ", psi'(0) = " << tw::format_g17(tw::psi_prime0(rc.spec, rc.k_star, rc.lambda_star))
              << ", A = " << tw::format_g17(tw::a_coeff(rc.spec, rc.k_star, rc.lambda_star))
              << "\n";
    return 0;
}

int cmd_spectrum(const Global& g, int k_max, double l_lo, double l_hi, int n_lambda,
                 bool discrete, int n_eigs) {
    tw::RunConfig rc = load(g);
    const tw::DispersionScan scan = tw::kernel_scan(rc.spec, k_max, l_lo, l_hi, n_lambda);

    std::ofstream out(out_path(g, "spectrum.csv"));
    out << "k,lambda,residual\n";
    for (const auto& z : scan.zeros)
        out << z.k << "," << tw::format_g17(z.lambda) << "," << tw::format_g17(z.residual) << "\n";
    std::cout << "kernel zeros found: " << scan.zeros.size()
              << (scan.unique_kernel() ? " (unique)" : "") << "\n";

    if (discrete) {
        if (!rc.have_branch) throw std::invalid_argument("--discrete needs a [branch] section");
        const int n = 2 * rc.cfg.n_y - 3;
        const tw::DiscreteOperator op =
            tw::build_operator(rc.spec, rc.k_star, rc.lambda_star, rc.cfg.y_max, n);
        const auto eigs = tw::smallest_eigs(op, n_eigs);
        std::ofstream de(out_path(g, "discrete_eigs.csv"));
        de << "index,eigenvalue\n";
        for (std::size_t i = 0; i < eigs.size(); ++i)
            de << i << "," << tw::format_g17(eigs[i].value) << "\n";
        std::cout << "smallest |eigenvalue| = " << tw::format_g17(eigs.front().value) << "\n";
    }
    return 0;
}

int cmd_trace(const Global& g) {
    tw::RunConfig rc = load(g);
    if (!rc.have_branch) throw std::invalid_argument("trace needs a [branch] section");
    const tw::BifurcationPoint bp =
        tw::make_bifurcation_point(rc.spec, rc.k_star, rc.lambda_star);
    tw::require_valid(rc.spec, rc.cfg, true, bp.k_star);

    const bool distributional = rc.spec.mode == tw::GammaMode::DistributionalGamma;
    const std::vector<tw::BranchPoint> branch =
        distributional ? tw::trace(rc.spec, bp, rc.cfg) : tw::regular_trace(rc.spec, bp, rc.cfg);

    tw::write_branch_csv(out_path(g, "branch.csv"), branch);
    // fit about the discrete bifurcation value in the regular case: the O(h^2)
    // offset of the grid kernel point would otherwise pollute the quadratic fit
    const double lambda_fit =
        distributional ? bp.lambda_star
                       : tw::discrete_lambda_star(rc.spec, bp.k_star, bp.lambda_star,
                                                  rc.cfg.y_max, 2 * rc.cfg.n_y - 3);
    const tw::CurvatureReport rep =
        tw::measure_curvature(branch, lambda_fit, tw::lambda_ddot_candidates(rc.spec, bp));
    tw::write_curvature_json(out_path(g, "curvature.json"), rep);

    bool all_ok = true;
    for (const auto& p : branch) all_ok = all_ok && p.converged;
    std::cout << "traced " << branch.size() << " points; curvature " << tw::format_g17(rep.measured)
              << ", best match: " << rep.best_match << "\n";
    return all_ok ? 0 : kExitSolver;
}

int cmd_verify(const Global& g, const std::string& in_path) {
    tw::RunConfig rc = load(g);
    if (!rc.have_branch) throw std::invalid_argument("verify needs a [branch] section");
    tw::make_bifurcation_point(rc.spec, rc.k_star, rc.lambda_star);

    const std::string path = in_path.empty() ? out_path(g, "branch.csv") : in_path;
    const std::vector<tw::BranchPoint> branch = tw::read_branch_csv(path);
    if (branch.empty()) {
        std::cout << "no branch points in " << path << "\n";
        return kExitVerify;
    }

    const tw::GridSpec grid{65, 2 * rc.cfg.n_y - 1, rc.cfg.y_max};
    bool ok = true;
    for (const auto& p : branch) {
        const double alg = tw::g_residual(p.a, p.lambda, rc.spec).coeffs.norm();
        const tw::FieldGrid f = tw::reconstruct(p, rc.spec, grid);
        const auto [interior, boundary] = tw::weak_residual(f, rc.spec, p.lambda, rc.cfg);
        const bool pass = alg <= 10.0 * rc.cfg.tol_newton && interior <= 1e-10 &&
                          boundary <= 10.0 * rc.cfg.tol_newton;
        ok = ok && pass;
        std::cout << (pass ? "ok  " : "FAIL") << " eps = " << tw::format_g17(p.eps)
                  << "  algebraic = " << tw::format_g17(alg)
                  << "  interior = " << tw::format_g17(interior)
                  << "  boundary = " << tw::format_g17(boundary) << "\n";
    }
    return ok ? 0 : kExitVerify;
}

int cmd_field(const Global& g, const std::string& in_path, int index, int n_x, int n_y,
              double y_max) {
    tw::RunConfig rc = load(g);
    const std::string path = in_path.empty() ? out_path(g, "branch.csv") : in_path;
    const std::vector<tw::BranchPoint> branch = tw::read_branch_csv(path);
    if (branch.empty()) throw std::invalid_argument("no branch points in " + path);
    if (index < 0) index = static_cast<int>(branch.size()) - 1;
    if (index >= static_cast<int>(branch.size()))
        throw std::invalid_argument("--index out of range");

    if (rc.have_branch) tw::make_bifurcation_point(rc.spec, rc.k_star, rc.lambda_star);
    const tw::GridSpec grid{n_x, n_y, y_max > 0.0 ? y_max : rc.cfg.y_max};
    const tw::FieldGrid f = tw::reconstruct(branch[index], rc.spec, grid);
    tw::write_field_csv(out_path(g, "field.csv"), f);
    const auto [interior, boundary] = tw::weak_residual(f, rc.spec, f.lambda, rc.cfg);
    std::cout << "field at eps = " << tw::format_g17(f.point.eps)
              << ": interior residual = " << tw::format_g17(interior)
              << ", boundary residual = " << tw::format_g17(boundary) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"traveling-wave bifurcation solver and verifier"};
    app.require_subcommand(1);

    Global g;
    app.add_option("--config", g.config_path, "configuration file");
    app.add_option("--out", g.out_dir, "output directory");
    app.add_option("--seed", g.seed, "seed for randomized utilities");

    auto* bifpoint = app.add_subcommand("bifpoint", "compute the kernel point (k*, lambda*, alpha)");
    auto* modes = app.add_subcommand("modes", "tabulate the closed-form mode at (k*, lambda*)");

    auto* spectrum = app.add_subcommand("spectrum", "dispersion scan / discrete spectrum");
    int k_max = 40, n_lambda = 2048, n_eigs = 3;
    double l_lo = 0.0, l_hi = 0.9;
    bool discrete = false;
    spectrum->add_option("--kmax", k_max, "largest wavenumber scanned");
    spectrum->add_option("--lmin", l_lo, "lambda window lower edge");
    spectrum->add_option("--lmax", l_hi, "lambda window upper edge");
    spectrum->add_option("--nlambda", n_lambda, "lambda samples");
    spectrum->add_flag("--discrete", discrete, "also compute discrete eigenvalues at (k*, lambda*)");
    spectrum->add_option("--neigs", n_eigs, "how many discrete eigenvalues");

    auto* trace = app.add_subcommand("trace", "trace the bifurcating branch");

    auto* verify = app.add_subcommand("verify", "re-check residuals of a stored branch");
    std::string verify_in;
    verify->add_option("--in", verify_in, "branch CSV (default <out>/branch.csv)");

    auto* field = app.add_subcommand("field", "reconstruct and export a field");
    std::string field_in;
    int index = -1, n_x = 64, n_y = 201;
    double y_max = 0.0;
    field->add_option("--in", field_in, "branch CSV (default <out>/branch.csv)");
    field->add_option("--index", index, "branch point index (default last)");
    field->add_option("--nx", n_x, "x samples");
    field->add_option("--ny", n_y, "y samples (odd)");
    field->add_option("--ymax", y_max, "y extent (default solver y_max)");

    // let --config/--out/--seed appear after the subcommand too
    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        if (bifpoint->parsed()) return cmd_bifpoint(g);
        if (modes->parsed()) return cmd_modes(g);
        if (spectrum->parsed()) return cmd_spectrum(g, k_max, l_lo, l_hi, n_lambda, discrete, n_eigs);
        if (trace->parsed()) return cmd_trace(g);
        if (verify->parsed()) return cmd_verify(g, verify_in);
        if (field->parsed()) return cmd_field(g, field_in, index, n_x, n_y, y_max);
    } catch (const tw::NewtonFailure& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return kExitSolver;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return 0;
}
