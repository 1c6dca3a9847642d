#pragma once

#include "tw/core.hpp"

namespace tw {

/// Closed-form decaying mode phi_k(y; lambda), y >= 0, normalized phi_k(0) = 1.
///
/// P1:        phi(y) = exp(-kappa_out y).
/// P2 beta<1: phi(y) = cosh(kappa_in y) + c1 sinh(kappa_in y) on [0,b],
///            c2 exp(-kappa_out y) beyond.
/// P2 beta>1: phi(y) = cos(kappa_in y) + c1 sin(kappa_in y) on [0,b],
///            c2 exp(-kappa_out y) beyond.
/// P2 beta=1: phi(y) = 1 + c1 y on [0,b], c2 exp(-kappa_out y) beyond.
struct ModeFunction {
    enum class Regime { P1, P2Sub, P2Super, P2Flat };  // beta<1, beta>1, beta=1

    Regime regime = Regime::P1;
    int k = 1;
    double lambda = 0.0;
    double b = 0.0;          // step half-width (0 for P1)
    double kappa_in = 0.0;   // k*sqrt(|1-beta|)
    double kappa_out = 0.0;  // k*sqrt(1-lambda)
    double c1 = 0.0;
    double c2 = 1.0;
    double tail_at_b = 1.0;  // phi(b); the tail is tail_at_b * exp(-kappa_out (y-b))

    double value(double y) const;
    double derivative(double y) const;
    /// One-sided derivatives at an interior kink (identical except at y = b).
    double derivative_left(double y) const;
};

/// Builds the closed-form mode. Throws for lambda >= 1 (and P2 beta<1 with
/// beta >= 1). For beta > 1, b != pi/sqrt(beta-1) is allowed but the
/// uniqueness certificate then requires an explicit kernel scan.
ModeFunction build_mode(const PotentialSpec& spec, int k, double lambda);

/// phi'_k(0+; lambda).
double phi_prime0(const PotentialSpec& spec, int k, double lambda);

/// ||phi_k||_{L^2(0,inf)} from piecewise closed-form integrals.
double phi_l2(const PotentialSpec& spec, int k, double lambda);

/// psi'_k(0; lambda) = k^2 * int_0^inf V0 phi_k^2 dy (the lambda-derivative
/// of phi'_k(0+; lambda)).
double psi_prime0(const PotentialSpec& spec, int k, double lambda);

}  // namespace tw
