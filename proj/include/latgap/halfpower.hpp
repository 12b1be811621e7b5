#pragma once

// Operator square roots through the resolvent integral
//   K^{-1/2} = (1/pi) int_0^inf dr/sqrt(r) (K + r)^{-1},
// evaluated by Gauss-Legendre quadrature after r = t^2/(1-t)^2.

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace latgap {

struct QuadNode {
    double x;
    double w;
};

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration.
inline std::vector<QuadNode> gauss_legendre(int n) {
    std::vector<QuadNode> out(static_cast<std::size_t>(n));
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double w = 2.0 / ((1.0 - x * x) * pp * pp);
        out[static_cast<std::size_t>(i)] = {-x, w};
        out[static_cast<std::size_t>(n - 1 - i)] = {x, w};
    }
    return out;
}

inline std::vector<QuadNode> gauss_legendre_on(double a, double b, int n) {
    auto base = gauss_legendre(n);
    for (auto& q : base) {
        q.x = 0.5 * (b - a) * q.x + 0.5 * (a + b);
        q.w *= 0.5 * (b - a);
    }
    return base;
}

// K^{-1/2} for symmetric positive definite K.
inline Eigen::MatrixXd matrix_inverse_sqrt(const Eigen::MatrixXd& k, int nodes) {
    if (nodes < 8) throw std::invalid_argument("matrix_inverse_sqrt: need at least 8 nodes");
    const auto n = k.rows();
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
    for (const auto& q : gauss_legendre_on(0.0, 1.0, nodes)) {
        double t = q.x;
        double r = t * t / ((1.0 - t) * (1.0 - t));
        double jac = 2.0 / ((1.0 - t) * (1.0 - t));  // dr / sqrt(r)
        acc += q.w * jac * (k + r * id).ldlt().solve(id);
    }
    return acc / std::numbers::pi;
}

// C^{1/2} for a covariance C: apply the resolvent integral to T = C^{-1}.
inline Eigen::MatrixXd half_power(const Eigen::MatrixXd& c, int nodes) {
    Eigen::MatrixXd t = c.llt().solve(Eigen::MatrixXd::Identity(c.rows(), c.cols()));
    return matrix_inverse_sqrt(t, nodes);
}

// Scalar version, used to pin the quadrature against 1/sqrt(t).
inline double scalar_inverse_sqrt(double t, int nodes) {
    Eigen::MatrixXd m(1, 1);
    m(0, 0) = t;
    return matrix_inverse_sqrt(m, nodes)(0, 0);
}

// Exact square root by eigendecomposition (test oracle).
inline Eigen::MatrixXd matrix_sqrt_eigen(const Eigen::MatrixXd& k) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k);
    return es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() *
           es.eigenvectors().transpose();
}

}  // namespace latgap
