#pragma once

// Determinant identities det K = e^{Tr log K} with log K evaluated through
// resolvent integrals, for positive self-adjoint and for invertible
// self-adjoint matrices. The split point R0 is arbitrary; results must not
// depend on it.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "latgap/halfpower.hpp"

namespace latgap {

enum class LogDetVariant { SPD, SelfAdjoint };

namespace detail {

// Geometric panels toward zero keep the quadrature sharp when eigenvalue
// scales are far below the panel width.
inline std::vector<double> geometric_breaks(double hi) {
    return {0.0,      hi / 4096.0, hi / 1024.0, hi / 256.0, hi / 64.0,
            hi / 16.0, hi / 4.0,    hi};
}

inline Eigen::MatrixXcd integrate_panels(const std::function<Eigen::MatrixXcd(double)>& f,
                                         const std::vector<double>& breaks, int nodes_per_panel) {
    Eigen::MatrixXcd acc;
    bool first = true;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        for (const auto& q : gauss_legendre_on(breaks[i], breaks[i + 1], nodes_per_panel)) {
            Eigen::MatrixXcd v = q.w * f(q.x);
            if (first) {
                acc = v;
                first = false;
            } else {
                acc += v;
            }
        }
    }
    return acc;
}

}  // namespace detail

// Matrix logarithm via the resolvent identities.
//   SPD:          log K = K int_{R0}^inf dx/x (K+x)^{-1} - int_0^{R0} dx (K+x)^{-1} + log R0
//   SelfAdjoint:  log M = M int_{R0}^inf dy/y (M+iy)^{-1} - i int_0^{R0} dy (M+iy)^{-1}
//                         + log R0 + i pi/2
inline Eigen::MatrixXcd log_via_identity(const Eigen::MatrixXcd& k, LogDetVariant variant,
                                         double r0, int nodes_per_panel = 48) {
    if (r0 <= 0) throw std::invalid_argument("log_via_identity: R0 must be positive");
    const auto n = k.rows();
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
    const cplx i(0, 1);

    // Tail: substitute x = R0/u, giving int_0^1 du K (uK + R0)^{-1} (SPD)
    // and int_0^1 du M (uM + i R0)^{-1} (self-adjoint).
    auto tail = detail::integrate_panels(
        [&](double u) -> Eigen::MatrixXcd {
            if (variant == LogDetVariant::SPD)
                return k * (u * k + r0 * id).fullPivLu().solve(id).eval();
            return k * (u * k + i * r0 * id).fullPivLu().solve(id).eval();
        },
        detail::geometric_breaks(1.0), nodes_per_panel);

    auto head = detail::integrate_panels(
        [&](double x) -> Eigen::MatrixXcd {
            if (variant == LogDetVariant::SPD) return (k + x * id).fullPivLu().solve(id).eval();
            return (k + i * x * id).fullPivLu().solve(id).eval();
        },
        detail::geometric_breaks(r0), nodes_per_panel);

    Eigen::MatrixXcd out = tail;
    if (variant == LogDetVariant::SPD) {
        out -= head;
        out += std::log(r0) * id;
    } else {
        out -= i * head;
        out += (std::log(r0) + i * std::numbers::pi / 2.0) * id;
    }
    return out;
}

inline cplx tr_log_via_identity(const Eigen::MatrixXcd& k, LogDetVariant variant, double r0,
                                int nodes_per_panel = 48) {
    return log_via_identity(k, variant, r0, nodes_per_panel).trace();
}

// det K reconstructed as e^{Tr log K}.
inline cplx log_det_via_identity(const Eigen::MatrixXcd& k, LogDetVariant variant, double r0,
                                 int nodes_per_panel = 48) {
    return tr_log_via_identity(k, variant, r0, nodes_per_panel);
}

inline cplx det_via_identity(const Eigen::MatrixXcd& k, LogDetVariant variant, double r0,
                             int nodes_per_panel = 48) {
    return std::exp(tr_log_via_identity(k, variant, r0, nodes_per_panel));
}

}  // namespace latgap
