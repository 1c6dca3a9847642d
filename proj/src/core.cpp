#include "tw/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace tw {

double PotentialSpec::v0(double y) const {
    if (pcase == PotentialCase::P1) return 1.0;
    return std::abs(y) >= b_or(0.0) ? 1.0 : 0.0;
}

double PotentialSpec::w(double y) const {
    if (pcase == PotentialCase::P1) return 0.0;
    return std::abs(y) < b_or(0.0) ? beta_or(0.0) : 0.0;
}

double PotentialSpec::gamma_at(double y) const {
    for (const auto& iv : gamma_profile)
        if (y >= iv.y_lo && y <= iv.y_hi) return iv.value;
    return 0.0;
}

std::vector<std::string> validate(const PotentialSpec& spec, const SolverConfig& cfg,
                                  bool bifurcation_requested, int k_star) {
    std::vector<std::string> diags;
    auto add = [&](const std::string& msg) { diags.push_back(msg); };

    if (spec.pcase == PotentialCase::P1) {
        if (spec.beta || spec.b) add("P1: beta and b are unused (remove them or switch to P2)");
    } else {
        if (!spec.b) add("P2: b is required");
        else if (*spec.b <= 0.0) add("P2: b must be positive");
        if (!spec.beta) add("P2: beta is required");
    }

    if (spec.alpha < 0.0) add("alpha must be nonnegative");
    if (bifurcation_requested && spec.alpha <= 0.0) add("alpha must be positive");

    if (spec.mode == GammaMode::RegularGamma) {
        if (spec.gamma_profile.empty()) add("regular Gamma requires a nonempty gamma_profile");
        auto profile = spec.gamma_profile;
        std::sort(profile.begin(), profile.end(),
                  [](const GammaInterval& a, const GammaInterval& b) { return a.y_lo < b.y_lo; });
        for (std::size_t i = 0; i < profile.size(); ++i) {
            const auto& iv = profile[i];
            if (!(std::isfinite(iv.y_lo) && std::isfinite(iv.y_hi)) || iv.y_lo >= iv.y_hi)
                add("gamma_profile interval must be finite with y_lo < y_hi");
            if (i > 0 && profile[i].y_lo < profile[i - 1].y_hi) add("overlapping Gamma intervals");
        }
    } else {
        if (!spec.gamma_profile.empty()) add("distributional Gamma: gamma_profile must be absent");
    }

    if (cfg.K < 1) add("K must be >= 1");
    if (cfg.s < 2.5) add("s must be >= 5/2");
    if (cfg.y_max <= 0.0) add("y_max must be positive");
    if (cfg.n_y < 2) add("n_y must be >= 2");
    if (cfg.tol_newton <= 0.0) add("tol_newton must be positive");
    if (cfg.max_newton_iters < 1) add("max_newton_iters must be >= 1");

    if (k_star > 0) {
        // cubic coupling populates modes up to 3 k*
        if (cfg.K < 3 * k_star) add("K must be >= 3*k_star");
    }
    return diags;
}

void require_valid(const PotentialSpec& spec, const SolverConfig& cfg,
                   bool bifurcation_requested, int k_star) {
    auto diags = validate(spec, cfg, bifurcation_requested, k_star);
    if (diags.empty()) return;
    std::ostringstream oss;
    oss << "invalid input:";
    for (const auto& d : diags) oss << "\n  - " << d;
    throw std::invalid_argument(oss.str());
}

}  // namespace tw
