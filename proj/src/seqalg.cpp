#include "tw/seqalg.hpp"

#include <cmath>
#include <stdexcept>

namespace tw {

namespace {

// Kahan-compensated accumulator.
struct Kahan {
    double sum = 0.0, c = 0.0;
    void add(double v) {
        double y = v - c;
        double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
};

}  // namespace

OddSpectrum basis_e(int m, int K, BasisNorm norm) {
    if (m < 1 || m > K) throw std::invalid_argument("basis_e: m out of range");
    Eigen::VectorXd c = Eigen::VectorXd::Zero(K);
    c[m - 1] = norm == BasisNorm::Unit ? 1.0 : 1.0 / std::sqrt(2.0);
    return OddSpectrum{std::move(c)};
}

Eigen::VectorXd self_conv2(const OddSpectrum& a) {
    const int K = a.K();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(2 * K + 1);  // b[m] = (a*a)_m, m = 0..2K
    for (int m = 0; m <= 2 * K; ++m) {
        Kahan acc;
        for (int l = -K; l <= K; ++l) {
            if (l == 0) continue;
            acc.add(a.at(m - l) * a.at(l));
        }
        b[m] = acc.sum;
    }
    return b;
}

Eigen::VectorXd conv2(const OddSpectrum& a, const OddSpectrum& b) {
    const int Ka = a.K(), Kb = b.K();
    Eigen::VectorXd c = Eigen::VectorXd::Zero(Ka + Kb + 1);
    for (int m = 0; m <= Ka + Kb; ++m) {
        Kahan acc;
        for (int l = -Ka; l <= Ka; ++l) {
            if (l == 0) continue;
            acc.add(a.at(l) * b.at(m - l));
        }
        c[m] = acc.sum;
    }
    return c;
}

double even_hs_norm(const Eigen::VectorXd& c, double s) {
    Kahan acc;
    if (c.size() > 0) acc.add(c[0] * c[0]);
    for (int k = 1; k < c.size(); ++k)
        acc.add(2.0 * std::pow(1.0 + k, 2.0 * s) * c[k] * c[k]);
    return std::sqrt(acc.sum);
}

OddSpectrum conv3(const OddSpectrum& a, int out_len) {
    const int K = a.K();
    if (out_len > 3 * K) throw std::invalid_argument("conv3: truncation exceeds support");
    const Eigen::VectorXd b = self_conv2(a);  // even: b_{-m} = b_m
    Eigen::VectorXd c(out_len);
    for (int k = 1; k <= out_len; ++k) {
        Kahan acc;
        for (int m = -2 * K; m <= 2 * K; ++m) {
            double bm = b[std::abs(m)];
            acc.add(bm * a.at(k - m));
        }
        c[k - 1] = acc.sum;
    }
    return OddSpectrum{std::move(c)};
}

OddSpectrum conv3_dir(const OddSpectrum& a, const OddSpectrum& h, int out_len) {
    if (a.K() != h.K()) throw std::invalid_argument("conv3_dir: mismatched truncation");
    const int K = a.K();
    if (out_len > 3 * K) throw std::invalid_argument("conv3_dir: truncation exceeds support");
    const Eigen::VectorXd b = self_conv2(a);
    Eigen::VectorXd c(out_len);
    for (int k = 1; k <= out_len; ++k) {
        Kahan acc;
        for (int m = -2 * K; m <= 2 * K; ++m) {
            double bm = b[std::abs(m)];
            acc.add(bm * h.at(k - m));
        }
        c[k - 1] = 3.0 * acc.sum;
    }
    return OddSpectrum{std::move(c)};
}

double hs_norm(const OddSpectrum& a, double s) {
    Kahan acc;
    for (int k = 1; k <= a.K(); ++k) {
        double w = std::pow(1.0 + k, 2.0 * s);
        acc.add(2.0 * w * a.coeffs[k - 1] * a.coeffs[k - 1]);
    }
    return std::sqrt(acc.sum);
}

double l1_norm(const OddSpectrum& a) {
    Kahan acc;
    for (int k = 1; k <= a.K(); ++k) acc.add(2.0 * std::abs(a.coeffs[k - 1]));
    return acc.sum;
}

double sine_eval(const OddSpectrum& a, double x) {
    Kahan acc;
    for (int k = 1; k <= a.K(); ++k) acc.add(a.coeffs[k - 1] * std::sin(k * x));
    return acc.sum;
}

}  // namespace tw
