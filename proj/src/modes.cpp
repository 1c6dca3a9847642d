#include "tw/modes.hpp"

#include <cmath>
#include <stdexcept>

namespace tw {

namespace {

void check_regime(const PotentialSpec& spec, double lambda) {
    if (lambda >= 1.0) throw std::domain_error("build_mode: outside parameter regime (lambda >= 1)");
    if (spec.pcase == PotentialCase::P2) {
        if (!spec.beta || !spec.b) throw std::invalid_argument("build_mode: P2 requires beta and b");
        if (*spec.b <= 0.0) throw std::invalid_argument("build_mode: P2 requires b > 0");
    }
}

}  // namespace

double ModeFunction::value(double y) const {
    if (regime == Regime::P1) return std::exp(-kappa_out * y);
    if (y >= b) return tail_at_b * std::exp(-kappa_out * (y - b));
    switch (regime) {
        case Regime::P2Sub: {
            // A e^{kappa y} + B e^{-kappa y} with A = (1+c1)/2, B = (1-c1)/2
            const double A = 0.5 * (1.0 + c1), B = 0.5 * (1.0 - c1);
            return A * std::exp(kappa_in * y) + B * std::exp(-kappa_in * y);
        }
        case Regime::P2Super:
            return std::cos(kappa_in * y) + c1 * std::sin(kappa_in * y);
        case Regime::P2Flat:
            return 1.0 + c1 * y;
        default:
            return 0.0;
    }
}

double ModeFunction::derivative(double y) const {
    if (regime == Regime::P1) return -kappa_out * std::exp(-kappa_out * y);
    if (y >= b) return -kappa_out * tail_at_b * std::exp(-kappa_out * (y - b));
    switch (regime) {
        case Regime::P2Sub: {
            const double A = 0.5 * (1.0 + c1), B = 0.5 * (1.0 - c1);
            return kappa_in * (A * std::exp(kappa_in * y) - B * std::exp(-kappa_in * y));
        }
        case Regime::P2Super:
            return kappa_in * (-std::sin(kappa_in * y) + c1 * std::cos(kappa_in * y));
        case Regime::P2Flat:
            return c1;
        default:
            return 0.0;
    }
}

double ModeFunction::derivative_left(double y) const {
    if (regime != Regime::P1 && y == b) {
        switch (regime) {
            case Regime::P2Sub: {
                const double A = 0.5 * (1.0 + c1), B = 0.5 * (1.0 - c1);
                return kappa_in * (A * std::exp(kappa_in * b) - B * std::exp(-kappa_in * b));
            }
            case Regime::P2Super:
                return kappa_in * (-std::sin(kappa_in * b) + c1 * std::cos(kappa_in * b));
            case Regime::P2Flat:
                return c1;
            default:
                break;
        }
    }
    return derivative(y);
}

ModeFunction build_mode(const PotentialSpec& spec, int k, double lambda) {
    check_regime(spec, lambda);
    if (k < 1) throw std::invalid_argument("build_mode: k must be >= 1");

    ModeFunction m;
    m.k = k;
    m.lambda = lambda;
    m.kappa_out = k * std::sqrt(1.0 - lambda);

    if (spec.pcase == PotentialCase::P1) {
        m.regime = ModeFunction::Regime::P1;
        m.c1 = 0.0;
        m.c2 = 1.0;
        m.tail_at_b = 1.0;
        return m;
    }

    const double beta = *spec.beta;
    const double b = *spec.b;
    m.b = b;
    const double s_lam = std::sqrt(1.0 - lambda);

    if (beta < 1.0) {
        m.regime = ModeFunction::Regime::P2Sub;
        const double s_bet = std::sqrt(1.0 - beta);
        m.kappa_in = k * s_bet;
        const double T = std::tanh(m.kappa_in * b);
        m.c1 = -(s_bet * T + s_lam) / (s_bet + s_lam * T);
        // phi(b) = s_bet / (s_bet cosh + s_lam sinh), written overflow-free
        const double E2 = std::exp(-2.0 * m.kappa_in * b);
        m.tail_at_b = 2.0 * s_bet * std::exp(-m.kappa_in * b) /
                      (s_bet * (1.0 + E2) + s_lam * (1.0 - E2));
        m.c2 = m.tail_at_b * std::exp(m.kappa_out * b);
    } else if (beta > 1.0) {
        m.regime = ModeFunction::Regime::P2Super;
        const double s_bet = std::sqrt(beta - 1.0);
        m.kappa_in = k * s_bet;
        const double S = std::sin(m.kappa_in * b), C = std::cos(m.kappa_in * b);
        const double den = s_bet * C + s_lam * S;
        if (std::abs(den) < 1e-14 * (s_bet + s_lam))
            throw std::domain_error("build_mode: resonant step width, no decaying mode");
        m.c1 = (s_bet * S - s_lam * C) / den;
        m.tail_at_b = C + m.c1 * S;
        m.c2 = m.tail_at_b * std::exp(m.kappa_out * b);
    } else {
        m.regime = ModeFunction::Regime::P2Flat;
        m.kappa_in = 0.0;
        m.c1 = -s_lam * k / (k * b * s_lam + 1.0);
        m.tail_at_b = 1.0 / (k * b * s_lam + 1.0);
        m.c2 = m.tail_at_b * std::exp(m.kappa_out * b);
    }
    return m;
}

double phi_prime0(const PotentialSpec& spec, int k, double lambda) {
    check_regime(spec, lambda);
    if (spec.pcase == PotentialCase::P1) return -k * std::sqrt(1.0 - lambda);
    const ModeFunction m = build_mode(spec, k, lambda);
    switch (m.regime) {
        case ModeFunction::Regime::P2Sub:
        case ModeFunction::Regime::P2Super:
            return m.kappa_in * m.c1;
        case ModeFunction::Regime::P2Flat:
            return m.c1;
        default:
            return -m.kappa_out;
    }
}

double phi_l2(const PotentialSpec& spec, int k, double lambda) {
    const ModeFunction m = build_mode(spec, k, lambda);
    if (m.regime == ModeFunction::Regime::P1) return std::sqrt(1.0 / (2.0 * m.kappa_out));

    const double tail = m.tail_at_b * m.tail_at_b / (2.0 * m.kappa_out);
    double inner = 0.0;
    const double b = m.b, kap = m.kappa_in;
    switch (m.regime) {
        case ModeFunction::Regime::P2Sub: {
            const double A = 0.5 * (1.0 + m.c1), B = 0.5 * (1.0 - m.c1);
            // A e^{kappa b} in log form: A ~ e^{-2 kappa b} deep in the
            // barrier, so the direct product can hit 0 * inf
            const double G =
                A == 0.0 ? 0.0
                         : std::copysign(std::exp(std::log(std::abs(A)) + kap * b), A);
            inner = (G * G - A * A) / (2.0 * kap) + 2.0 * A * B * b +
                    B * B * (1.0 - std::exp(-2.0 * kap * b)) / (2.0 * kap);
            break;
        }
        case ModeFunction::Regime::P2Super: {
            const double c1 = m.c1;
            inner = 0.5 * (1.0 + c1 * c1) * b +
                    (1.0 - c1 * c1) * std::sin(2.0 * kap * b) / (4.0 * kap) +
                    c1 * (1.0 - std::cos(2.0 * kap * b)) / (2.0 * kap);
            break;
        }
        case ModeFunction::Regime::P2Flat: {
            const double c1 = m.c1;
            inner = b + c1 * b * b + c1 * c1 * b * b * b / 3.0;
            break;
        }
        default:
            break;
    }
    return std::sqrt(inner + tail);
}

double psi_prime0(const PotentialSpec& spec, int k, double lambda) {
    const ModeFunction m = build_mode(spec, k, lambda);
    if (m.regime == ModeFunction::Regime::P1)
        return k * k / (2.0 * m.kappa_out);  // = k / (2 sqrt(1-lambda))
    // V0 = 1_{|y|>=b}: only the exponential tail contributes
    return k * k * m.tail_at_b * m.tail_at_b / (2.0 * m.kappa_out);
}

}  // namespace tw
