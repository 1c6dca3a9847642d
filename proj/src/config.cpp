#include "tw/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tw {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

[[noreturn]] void bad(int lineno, const std::string& msg) {
    std::ostringstream oss;
    oss << "config line " << lineno << ": " << msg;
    throw std::invalid_argument(oss.str());
}

double to_real(int lineno, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) bad(lineno, "trailing characters in number '" + v + "'");
        return x;
    } catch (const std::invalid_argument&) {
        bad(lineno, "not a number: '" + v + "'");
    } catch (const std::out_of_range&) {
        bad(lineno, "number out of range: '" + v + "'");
    }
}

int to_int(int lineno, const std::string& v) {
    const double x = to_real(lineno, v);
    const int i = static_cast<int>(x);
    if (static_cast<double>(i) != x) bad(lineno, "expected an integer, got '" + v + "'");
    return i;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig rc;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;

    while (std::getline(in, line)) {
        ++lineno;
        const auto cut = line.find_first_of("#;");
        if (cut != std::string::npos) line.erase(cut);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') bad(lineno, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section != "potential" && section != "solver" && section != "branch")
                bad(lineno, "unknown section [" + section + "]");
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos) bad(lineno, "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (section.empty()) bad(lineno, "key outside any section");

        if (section == "potential") {
            if (key == "case") {
                if (val == "p1")
                    rc.spec.pcase = PotentialCase::P1;
                else if (val == "p2")
                    rc.spec.pcase = PotentialCase::P2;
                else
                    bad(lineno, "case must be p1 or p2");
            } else if (key == "alpha") {
                rc.spec.alpha = to_real(lineno, val);
            } else if (key == "beta") {
                rc.spec.beta = to_real(lineno, val);
            } else if (key == "b") {
                rc.spec.b = to_real(lineno, val);
            } else if (key == "gamma") {
                rc.spec.gamma = to_real(lineno, val);
            } else if (key == "gamma_mode") {
                if (val == "regular")
                    rc.spec.mode = GammaMode::RegularGamma;
                else if (val == "distributional")
                    rc.spec.mode = GammaMode::DistributionalGamma;
                else
                    bad(lineno, "gamma_mode must be regular or distributional");
            } else if (key == "gamma_interval") {
                std::istringstream iss(val);
                GammaInterval iv;
                if (!(iss >> iv.y_lo >> iv.y_hi >> iv.value))
                    bad(lineno, "gamma_interval wants 'y_lo y_hi value'");
                rc.spec.gamma_profile.push_back(iv);
            } else {
                bad(lineno, "unknown key '" + key + "' in [potential]");
            }
        } else if (section == "solver") {
            if (key == "K")
                rc.cfg.K = to_int(lineno, val);
            else if (key == "s")
                rc.cfg.s = to_real(lineno, val);
            else if (key == "y_max")
                rc.cfg.y_max = to_real(lineno, val);
            else if (key == "n_y")
                rc.cfg.n_y = to_int(lineno, val);
            else if (key == "tol_newton")
                rc.cfg.tol_newton = to_real(lineno, val);
            else if (key == "max_newton_iters")
                rc.cfg.max_newton_iters = to_int(lineno, val);
            else if (key == "eps_max")
                rc.cfg.eps_max = to_real(lineno, val);
            else if (key == "n_branch")
                rc.cfg.n_branch = to_int(lineno, val);
            else
                bad(lineno, "unknown key '" + key + "' in [solver]");
        } else {  // branch
            rc.have_branch = true;
            if (key == "k_star")
                rc.k_star = to_int(lineno, val);
            else if (key == "lambda_star")
                rc.lambda_star = to_real(lineno, val);
            else
                bad(lineno, "unknown key '" + key + "' in [branch]");
        }
    }
    return rc;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    std::ostringstream oss;
    oss << in.rdbuf();
    return parse_config(oss.str());
}

}  // namespace tw
