#pragma once

#include <Eigen/Core>

namespace tw {

/// Truncated odd real sequence (a_k), k = 1..K, with the implicit
/// antisymmetric extension a_{-k} = -a_k, a_0 = 0. Represents the sine
/// series A(x) = sum_k a_k sin(kx).
struct OddSpectrum {
    Eigen::VectorXd coeffs;  // a_1..a_K

    OddSpectrum() = default;
    explicit OddSpectrum(Eigen::VectorXd c) : coeffs(std::move(c)) {}

    int K() const { return static_cast<int>(coeffs.size()); }
    /// a_k for any k in Z (zero outside the truncation).
    double at(int k) const {
        int m = k < 0 ? -k : k;
        if (m == 0 || m > K()) return 0.0;
        return k > 0 ? coeffs[m - 1] : -coeffs[m - 1];
    }
};

enum class BasisNorm { Unit, InvSqrt2 };

/// Single-mode basis sequence e^m: e_m = 1 (Unit) or 1/sqrt(2) (InvSqrt2).
OddSpectrum basis_e(int m, int K, BasisNorm norm = BasisNorm::Unit);

/// Full double convolution a*a restricted to indices 0..2K. The result is
/// even in the lattice index: (a*a)_{-m} = (a*a)_m.
Eigen::VectorXd self_conv2(const OddSpectrum& a);

/// (a*b)_m for m = 0..Ka+Kb; even in m since both factors are odd.
Eigen::VectorXd conv2(const OddSpectrum& a, const OddSpectrum& b);

/// h^s norm of an even lattice sequence stored as c_0..c_M:
/// sqrt( c_0^2 + sum_{k>=1} 2 (1+k)^{2s} c_k^2 ).
double even_hs_norm(const Eigen::VectorXd& c, double s);

/// Triple convolution (a*a*a)_k for k = 1..out_len, computed on the full
/// index range with compensated summation. Throws if out_len > 3K.
OddSpectrum conv3(const OddSpectrum& a, int out_len);

/// Directional derivative of the cubic map: 3*(a*a*h)_k for k = 1..out_len.
OddSpectrum conv3_dir(const OddSpectrum& a, const OddSpectrum& h, int out_len);

/// Full-lattice h^s norm: sqrt( sum_k 2 (1+k)^{2s} a_k^2 ), k = 1..K.
double hs_norm(const OddSpectrum& a, double s);

/// Full-lattice l^1 norm: 2 * sum_k |a_k|.
double l1_norm(const OddSpectrum& a);

/// A(x) = sum_{k=1..K} a_k sin(kx).
double sine_eval(const OddSpectrum& a, double x);

}  // namespace tw
