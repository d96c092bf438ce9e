#pragma once

// Independent reference implementations used only by the tests. Everything
// here deliberately avoids the closed forms under test: the Holevo bound is
// recomputed from symplectic spectra of explicit covariance matrices, and
// distribution integrals go through quadrature instead of erfc.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "cvtag/gg02.hpp"

namespace oracles {

// ---------------------------------------------------------------- quadrature

namespace detail {
inline double simpson(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <typename F>
double adapt(F&& f, double a, double b, double fa, double fm, double fb, double whole,
             double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(a, m, fa, flm, fm);
    const double right = simpson(m, b, fm, frm, fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adapt(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adapt(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
} // namespace detail

template <typename F>
double adaptive_simpson(F&& f, double a, double b, double tol = 1e-12) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = detail::simpson(a, b, fa, fm, fb);
    return detail::adapt(f, a, b, fa, fm, fb, whole, tol, 48);
}

// ------------------------------------------------------- symplectic spectrum

// Symplectic eigenvalues of a 2n x 2n covariance matrix in (x1,p1,x2,p2,...)
// ordering: the eigenvalues of i*Omega*sigma come in +/- nu pairs, so take
// every other element of the sorted absolute imaginary parts.
inline std::vector<double> symplectic_eigenvalues(const Eigen::MatrixXd& sigma) {
    const Eigen::Index n = sigma.rows() / 2;
    Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (Eigen::Index i = 0; i < n; ++i) {
        omega(2 * i, 2 * i + 1) = 1.0;
        omega(2 * i + 1, 2 * i) = -1.0;
    }
    const Eigen::MatrixXd m = omega * sigma;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(m, /*computeEigenvectors=*/false);
    std::vector<double> vals(static_cast<std::size_t>(2 * n));
    for (Eigen::Index i = 0; i < 2 * n; ++i)
        vals[static_cast<std::size_t>(i)] = std::abs(solver.eigenvalues()(i).imag());
    std::sort(vals.begin(), vals.end());
    std::vector<double> out;
    for (std::size_t i = 0; i < vals.size(); i += 2)
        out.push_back(vals[i]);
    return out;
}

// Holevo information bound recomputed from explicit covariance matrices:
// entangling-cloner channel purification for S(E) = S(A,B1), then an EPR
// detector model (beamsplitter eta mixing B1 with an ancilla of variance
// 1 + v_el/(1-eta)) conditioned on an x-homodyne of the detected mode.
inline double chi_oracle(double eta, double v_el, double V_A, double T, double eps) {
    using Eigen::MatrixXd;
    const double V = V_A + 1.0;
    const double chi_line = 1.0 / T - 1.0 + eps;
    const double c = std::sqrt(T * (V * V - 1.0));
    const Eigen::Matrix2d I2 = Eigen::Matrix2d::Identity();
    Eigen::Matrix2d Z2;
    Z2 << 1.0, 0.0, 0.0, -1.0;

    // modes A, B1, F0, G
    MatrixXd sig = MatrixXd::Zero(8, 8);
    sig.block<2, 2>(0, 0) = V * I2;
    sig.block<2, 2>(2, 2) = T * (V + chi_line) * I2;
    sig.block<2, 2>(0, 2) = c * Z2;
    sig.block<2, 2>(2, 0) = c * Z2;
    const double v = eta < 1.0 ? 1.0 + v_el / (1.0 - eta) : 1.0;
    const double cv = std::sqrt(v * v - 1.0);
    sig.block<2, 2>(4, 4) = v * I2;
    sig.block<2, 2>(6, 6) = v * I2;
    sig.block<2, 2>(4, 6) = cv * Z2;
    sig.block<2, 2>(6, 4) = cv * Z2;

    // beamsplitter eta between B1 and F0
    MatrixXd S = MatrixXd::Identity(8, 8);
    const double se = std::sqrt(eta), sr = std::sqrt(1.0 - eta);
    S.block<2, 2>(2, 2) = se * I2;
    S.block<2, 2>(2, 4) = sr * I2;
    S.block<2, 2>(4, 2) = -sr * I2;
    S.block<2, 2>(4, 4) = se * I2;
    sig = S * sig * S.transpose();

    // S(E) = S(A,B1) before detection (Eve purifies the channel alone)
    MatrixXd sigAB = MatrixXd::Zero(4, 4);
    sigAB.block<2, 2>(0, 0) = V * I2;
    sigAB.block<2, 2>(2, 2) = T * (V + chi_line) * I2;
    sigAB.block<2, 2>(0, 2) = c * Z2;
    sigAB.block<2, 2>(2, 0) = c * Z2;
    const std::vector<double> nu12 = symplectic_eigenvalues(sigAB);

    // condition (A, F1, G) on the x-homodyne outcome of the detected mode
    const int keep[6] = {0, 1, 4, 5, 6, 7};
    MatrixXd sk(6, 6), sc(6, 2);
    for (int r = 0; r < 6; ++r) {
        for (int col = 0; col < 6; ++col)
            sk(r, col) = sig(keep[r], keep[col]);
        sc(r, 0) = sig(keep[r], 2);
        sc(r, 1) = sig(keep[r], 3);
    }
    Eigen::Matrix2d pinv = Eigen::Matrix2d::Zero();
    pinv(0, 0) = 1.0 / sig(2, 2);
    const MatrixXd scond = sk - sc * pinv * sc.transpose();
    const std::vector<double> nu345 = symplectic_eigenvalues(scond);

    double total = 0.0;
    for (double nu : nu12)
        total += cvtag::g_func(std::max(0.0, (nu - 1.0) / 2.0));
    for (double nu : nu345)
        total -= cvtag::g_func(std::max(0.0, (nu - 1.0) / 2.0));
    return total;
}

// --------------------------------------------------------- sample statistics

// Two-sided Kolmogorov-Smirnov statistic of samples against a reference CDF.
template <typename Cdf>
double ks_statistic(std::vector<double> samples, Cdf&& cdf) {
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    }
    return d;
}

// Histogram estimate of differential entropy in bits.
inline double histogram_entropy_bits(const std::vector<double>& samples, int bins,
                                     double lo, double hi) {
    std::vector<double> counts(static_cast<std::size_t>(bins), 0.0);
    const double width = (hi - lo) / bins;
    double used = 0.0;
    for (double x : samples) {
        if (x < lo || x >= hi)
            continue;
        ++counts[static_cast<std::size_t>((x - lo) / width)];
        ++used;
    }
    double h = 0.0;
    for (double cnt : counts) {
        if (cnt == 0.0)
            continue;
        const double p = cnt / used;
        h -= p * std::log2(p / width);
    }
    return h;
}

} // namespace oracles
