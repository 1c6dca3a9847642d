#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "tw/dispersion.hpp"
#include "tw/schrod.hpp"

using namespace tw;

namespace {

PotentialSpec p1(double alpha = 0.0) {
    PotentialSpec s;
    s.pcase = PotentialCase::P1;
    s.alpha = alpha;
    return s;
}

}  // namespace

TEST_CASE("free operator reproduces the box-shifted continuum edge") {
    // alpha = 0, k = 1, lambda = 0: smallest eigenvalue ~ 1 + (pi/(2 y_max))^2
    const double y_max = 20.0;
    const DiscreteOperator op = build_operator(p1(), 1, 0.0, y_max, 3999);
    const auto eigs = smallest_eigs(op, 1);
    const double expect = 1.0 + std::pow(std::numbers::pi_v<double> / (2.0 * y_max), 2);
    CHECK(eigs[0].value == doctest::Approx(expect).epsilon(1e-5));
}

TEST_CASE("operator is symmetric tridiagonal with the delta on the diagonal") {
    const DiscreteOperator op = build_operator(p1(2.0), 1, 0.0, 10.0, 399);
    CHECK(op.grid[op.delta_node] == doctest::Approx(0.0));
    CHECK(op.off_diagonal == doctest::Approx(-1.0 / (op.h * op.h)));
    // delta contributes -k^2 alpha / h relative to the neighbors
    CHECK(op.diagonal[op.delta_node] - op.diagonal[op.delta_node + 1] ==
          doctest::Approx(-2.0 / op.h).epsilon(1e-12));
}

TEST_CASE("interface must land on the grid") {
    PotentialSpec s;
    s.pcase = PotentialCase::P2;
    s.beta = 0.5;
    s.b = 1.05;  // h = 0.1 below: 1.05/h is not an integer
    CHECK_THROWS_WITH_AS(build_operator(s, 1, 0.0, 10.0, 199) /* h = 0.1 */,
                         "build_operator: interface off-grid", std::invalid_argument);
    s.b = 1.1;
    CHECK_NOTHROW(build_operator(s, 1, 0.0, 10.0, 199));
}

TEST_CASE("sturm count is consistent with the computed spectrum") {
    const DiscreteOperator op = build_operator(p1(2.0), 1, 0.0, 15.0, 599);
    const auto eigs = smallest_eigs(op, 3);
    for (const auto& e : eigs) {
        CHECK(sturm_count(op, e.value - 1e-8) < sturm_count(op, e.value + 1e-8));
    }
}

TEST_CASE("eigenvectors are h-normalized and orthogonal") {
    const DiscreteOperator op = build_operator(p1(2.0), 1, 0.2, 15.0, 599);
    const auto eigs = smallest_eigs(op, 3);
    REQUIRE(eigs.size() == 3);
    for (std::size_t i = 0; i < eigs.size(); ++i) {
        CHECK(op.dot(eigs[i].vector, eigs[i].vector) == doctest::Approx(1.0).epsilon(1e-12));
        const Eigen::VectorXd r = op.apply(eigs[i].vector) - eigs[i].value * eigs[i].vector;
        CHECK(std::sqrt(op.dot(r, r)) < 1e-7);
        for (std::size_t j = 0; j < i; ++j)
            CHECK(std::abs(op.dot(eigs[i].vector, eigs[j].vector)) < 1e-6);
    }
}

TEST_CASE("near-zero eigenvalue at the certified point, eigenvector closed form") {
    PotentialSpec s = p1();
    make_bifurcation_point(s, 1, 0.0);  // alpha = 2
    const double y_max = 30.0;
    const DiscreteOperator op = build_operator(s, 1, 0.0, y_max, 2999);
    const auto eigs = smallest_eigs(op, 1);
    CHECK(std::abs(eigs[0].value) < 5e-3);

    // phi*(y) = sqrt(k sqrt(1-lambda)) exp(-k sqrt(1-lambda)|y|), L2-normalized
    Eigen::VectorXd ref(op.size());
    for (Eigen::Index i = 0; i < op.size(); ++i) ref[i] = std::exp(-std::abs(op.grid[i]));
    ref /= std::sqrt(op.dot(ref, ref));
    CHECK((eigs[0].vector - ref).cwiseAbs().maxCoeff() < 5e-3);

    // discrete jump condition: one-sided slopes differ by -k^2 alpha u(0) + O(h)
    const Eigen::VectorXd& u = eigs[0].vector;
    const Eigen::Index j0 = op.delta_node;
    const double jump = (u[j0 + 1] - u[j0]) / op.h - (u[j0] - u[j0 - 1]) / op.h;
    CHECK(jump == doctest::Approx(-s.alpha * u[j0]).epsilon(2e-2));
}

TEST_CASE("discrete_lambda_star tracks the closed-form point to O(h^2)") {
    PotentialSpec s = p1();
    make_bifurcation_point(s, 1, 0.0);
    const double lam_h = discrete_lambda_star(s, 1, 0.0, 25.0, 1999);
    CHECK(std::abs(lam_h) < 5e-3);
    const DiscreteOperator op = build_operator(s, 1, lam_h, 25.0, 1999);
    CHECK(std::abs(smallest_eigs(op, 1)[0].value) < 1e-12);
}

TEST_CASE("projected_solve") {
    PotentialSpec s = p1();
    make_bifurcation_point(s, 1, 0.0);
    const DiscreteOperator op = build_operator(s, 1, 0.0, 25.0, 1999);
    const Eigen::VectorXd phi = smallest_eigs(op, 1)[0].vector;

    SUBCASE("rhs = phi* with the projector: eigenvalue one") {
        // at the exact discrete kernel point T phi* = 0, so (T + P) phi* = phi*
        const double lam_h = discrete_lambda_star(s, 1, 0.0, 25.0, 1999);
        const DiscreteOperator ker = build_operator(s, 1, lam_h, 25.0, 1999);
        const Eigen::VectorXd psi = smallest_eigs(ker, 1)[0].vector;
        const Eigen::VectorXd u = projected_solve(ker, true, psi, psi);
        CHECK((u - psi).norm() < 1e-6 * psi.norm());
    }
    SUBCASE("zero rhs") {
        const Eigen::VectorXd u =
            projected_solve(op, true, phi, Eigen::VectorXd::Zero(op.size()));
        CHECK(u.norm() == 0.0);
    }
    SUBCASE("residual contract on a rough rhs") {
        std::mt19937 rng(17);
        std::normal_distribution<double> g;
        Eigen::VectorXd rhs(op.size());
        for (Eigen::Index i = 0; i < op.size(); ++i) rhs[i] = g(rng);
        const Eigen::VectorXd u = projected_solve(op, true, phi, rhs);
        Eigen::VectorXd r = rhs - op.apply(u) - phi * op.dot(phi, u);
        CHECK(r.norm() <= 1e-10 * rhs.norm());
    }
    SUBCASE("unprojected solve at the kernel point is flagged singular") {
        const double lam_h = discrete_lambda_star(s, 1, 0.0, 25.0, 1999);
        const DiscreteOperator sing = build_operator(s, 1, lam_h, 25.0, 1999);
        Eigen::VectorXd rhs = Eigen::VectorXd::Ones(sing.size());
        CHECK_THROWS_AS(projected_solve(sing, false, phi, rhs), std::runtime_error);
    }
}

TEST_CASE("resolvent decay rates off the kernel mode") {
    PotentialSpec s = p1();
    make_bifurcation_point(s, 1, 0.0);
    // oscillatory rhs at the resonant frequency witnesses both rates
    double c2_min = 1e300, c2_max = 0.0, c1_min = 1e300, c1_max = 0.0;
    for (int k : {2, 4, 8, 16}) {
        const DiscreteOperator op = build_operator(s, k, 0.0, 25.0, 1999);
        Eigen::VectorXd rhs(op.size());
        for (Eigen::Index i = 0; i < op.size(); ++i)
            rhs[i] = std::sin(k * op.grid[i]) * std::exp(-std::abs(op.grid[i]) / 5.0);
        const Eigen::VectorXd u = projected_solve(op, false, rhs, rhs);
        Eigen::VectorXd du(op.size() - 2);
        for (Eigen::Index i = 1; i + 1 < op.size(); ++i)
            du[i - 1] = (u[i + 1] - u[i - 1]) / (2.0 * op.h);
        const double c2 = k * k * u.norm() / rhs.norm();
        const double c1 = k * du.norm() / rhs.norm();
        c2_min = std::min(c2_min, c2);
        c2_max = std::max(c2_max, c2);
        c1_min = std::min(c1_min, c1);
        c1_max = std::max(c1_max, c1);
    }
    CHECK(c2_max / c2_min < 2.0);
    CHECK(c1_max / c1_min < 2.0);
}
