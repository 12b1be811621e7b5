#pragma once

// Lattice Dirac and boson quadratic-form operators: stencil applies, dense
// matrices, momentum-space symbols, and the operator-norm bound report.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "latgap/clifford.hpp"
#include "latgap/fields.hpp"
#include "latgap/fourier.hpp"
#include "latgap/lattice.hpp"

namespace latgap {

using SpinorField = std::vector<cplx>;  // layout: site * 4 + spinor
using PhiVector = std::vector<double>;  // layout: [rho (n_sites), a (n_bonds)]

inline std::array<double, kDim> momentum_of(const TorusLattice& lat, std::int64_t k_index) {
    Coords k = lat.site_coords(k_index);
    std::array<double, kDim> p{};
    for (int d = 0; d < kDim; ++d) p[d] = momentum_component(k[d], lat.side());
    return p;
}

// -- Wilson-Dirac operator ----------------------------------------------------

// Applies (gamma.grad - (1/2)Laplacian + mass) with optional U(1) phases on
// the hopping terms. The hop x -> x+e_mu carries e^{+i e0 A_mu(x)}, the hop
// x -> x-e_mu carries e^{-i e0 A_mu(x-e_mu)} (the phase of the traversed bond).
inline SpinorField dirac_apply(const TorusLattice& lat, const SpinorField& psi,
                               const FieldConfig* gauge, double e0, double mass) {
    if (psi.size() != static_cast<std::size_t>(lat.n_sites() * 4))
        throw std::invalid_argument("dirac_apply: field size mismatch");
    const Clifford& cl = Clifford::instance();
    std::array<Mat4, kDim> hop_fwd, hop_bwd;
    for (int mu = 0; mu < kDim; ++mu) {
        hop_fwd[mu] = 0.5 * (Mat4::Identity() - cl.gamma[mu]);
        hop_bwd[mu] = 0.5 * (Mat4::Identity() + cl.gamma[mu]);
    }
    SpinorField out(psi.size(), cplx(0));
    const cplx i(0, 1);
    for (std::int64_t s = 0; s < lat.n_sites(); ++s) {
        Eigen::Vector4cd acc = Eigen::Vector4cd::Zero();
        Eigen::Map<const Eigen::Vector4cd> here(&psi[static_cast<std::size_t>(4 * s)]);
        for (int mu = 0; mu < kDim; ++mu) {
            std::int64_t sp = lat.neighbor(s, mu, +1);
            std::int64_t sm = lat.neighbor(s, mu, -1);
            cplx up = 1.0, um = 1.0;
            if (gauge) {
                up = std::exp(i * e0 * gauge->a(s, mu));
                um = std::exp(-i * e0 * gauge->a(sm, mu));
            }
            Eigen::Map<const Eigen::Vector4cd> fwd(&psi[static_cast<std::size_t>(4 * sp)]);
            Eigen::Map<const Eigen::Vector4cd> bwd(&psi[static_cast<std::size_t>(4 * sm)]);
            acc -= hop_fwd[mu] * (up * fwd) + hop_bwd[mu] * (um * bwd) - here;
        }
        acc += mass * here;
        Eigen::Map<Eigen::Vector4cd> dst(&out[static_cast<std::size_t>(4 * s)]);
        dst = acc;
    }
    return out;
}

// Momentum symbol of (gamma.grad - (1/2)Laplacian + mass):
//   mass + sum_mu (1 - cos p_mu) + i sum_mu gamma_mu sin p_mu.
inline Mat4 dirac_symbol(const std::array<double, kDim>& p, double mass) {
    const Clifford& cl = Clifford::instance();
    double m = mass;
    Mat4 out = Mat4::Zero();
    for (int mu = 0; mu < kDim; ++mu) {
        m += 1.0 - std::cos(p[mu]);
        out += cplx(0, std::sin(p[mu])) * cl.gamma[mu];
    }
    out += m * Mat4::Identity();
    return out;
}

inline Eigen::MatrixXcd dirac_dense(const TorusLattice& lat, const FieldConfig* gauge, double e0,
                                    double mass) {
    const std::int64_t n = lat.n_sites() * 4;
    Eigen::MatrixXcd m(n, n);
    SpinorField basis(static_cast<std::size_t>(n), cplx(0));
    for (std::int64_t j = 0; j < n; ++j) {
        basis[static_cast<std::size_t>(j)] = 1.0;
        SpinorField col = dirac_apply(lat, basis, gauge, e0, mass);
        for (std::int64_t k = 0; k < n; ++k) m(k, j) = col[static_cast<std::size_t>(k)];
        basis[static_cast<std::size_t>(j)] = 0.0;
    }
    return m;
}

struct OperatorNormReport {
    double dirac_norm = 0.0;        // max singular value over the momentum grid
    double dirac_norm_bound = 12.0; // asserted upper bound
    double wilson_part_at_corner = 0.0;
    double shifted_norm = 0.0;      // for mass > 0: ||Dirac + m||
    bool pass = false;
};

// The free operator is normal, so singular values come in closed form:
// sqrt(M0(p)^2 + |s(p)|^2) with M0 = sum (1 - cos p_mu), s_mu = sin p_mu.
inline OperatorNormReport operator_norm_bound_check(const TorusLattice& lat, double mass) {
    OperatorNormReport rep;
    for (std::int64_t k = 0; k < lat.n_sites(); ++k) {
        auto p = momentum_of(lat, k);
        double m0 = 0.0, s2 = 0.0;
        for (int d = 0; d < kDim; ++d) {
            m0 += 1.0 - std::cos(p[d]);
            s2 += std::sin(p[d]) * std::sin(p[d]);
        }
        rep.dirac_norm = std::max(rep.dirac_norm, std::sqrt(m0 * m0 + s2));
        rep.shifted_norm = std::max(rep.shifted_norm, std::sqrt((m0 + mass) * (m0 + mass) + s2));
    }
    // p = (pi,pi,pi,pi): s = 0, only the Wilson part contributes.
    rep.wilson_part_at_corner = 2.0 * kDim;
    rep.pass = rep.dirac_norm <= rep.dirac_norm_bound + 1e-12 &&
               rep.shifted_norm <= rep.dirac_norm_bound + mass + 1e-12;
    return rep;
}

// -- boson quadratic-form operators -------------------------------------------

// (-Laplacian + mu^2) rho on sites.
inline std::vector<double> scalar_t_apply(const TorusLattice& lat, const std::vector<double>& rho,
                                          double mu2) {
    std::vector<double> out(rho.size(), 0.0);
    for (std::int64_t s = 0; s < lat.n_sites(); ++s) {
        double acc = (2.0 * kDim + mu2) * rho[static_cast<std::size_t>(s)];
        for (int mu = 0; mu < kDim; ++mu)
            acc -= rho[static_cast<std::size_t>(lat.neighbor(s, mu, +1))] +
                   rho[static_cast<std::size_t>(lat.neighbor(s, mu, -1))];
        out[static_cast<std::size_t>(s)] = acc;
    }
    return out;
}

inline double scalar_t_symbol(const std::array<double, kDim>& p, double mu2) {
    double acc = mu2;
    for (int d = 0; d < kDim; ++d) acc += 2.0 * (1.0 - std::cos(p[d]));
    return acc;
}

// (delta d + mA^2) A on bonds, assembled from the plaquette quadratic form
//   <A, delta d A> = sum_{x, mu<nu} (dA)^2.
inline std::vector<double> gauge_t_apply(const TorusLattice& lat, const std::vector<double>& a,
                                         double mA2) {
    auto bond = [&](std::int64_t s, int mu) { return static_cast<std::size_t>(s * kDim + mu); };
    auto curl = [&](std::int64_t s, int mu, int nu) {
        return a[bond(lat.neighbor(s, mu, +1), nu)] - a[bond(s, nu)] -
               a[bond(lat.neighbor(s, nu, +1), mu)] + a[bond(s, mu)];
    };
    std::vector<double> out(a.size(), 0.0);
    for (std::int64_t s = 0; s < lat.n_sites(); ++s) {
        for (int mu = 0; mu < kDim; ++mu) {
            double acc = mA2 * a[bond(s, mu)];
            for (int nu = 0; nu < kDim; ++nu) {
                if (nu == mu) continue;
                acc += curl(s, mu, nu) - curl(lat.neighbor(s, nu, -1), mu, nu);
            }
            out[bond(s, mu)] = acc;
        }
    }
    return out;
}

// Momentum symbol of (delta d + mA^2): |D|^2 I - D D^dagger + mA^2 I with
// D_mu(p) = e^{i p_mu} - 1.
inline Mat4 gauge_t_symbol(const std::array<double, kDim>& p, double mA2) {
    Eigen::Vector4cd d;
    for (int mu = 0; mu < kDim; ++mu) d(mu) = std::polar(1.0, p[mu]) - 1.0;
    double d2 = d.squaredNorm();
    Mat4 out = (d2 + mA2) * Mat4::Identity();
    out -= d * d.adjoint();
    return out;
}

// The full quadratic-form operator on Phi = (rho, A).
struct PhiOperator {
    TorusLattice lat;
    double mu2;
    double mA2;

    PhiOperator(const TorusLattice& l, double mu2_, double mA2_) : lat(l), mu2(mu2_), mA2(mA2_) {
        if (mu2 <= 0 || mA2 <= 0) throw std::invalid_argument("boson masses must be positive");
    }

    std::int64_t dim() const { return lat.n_sites() + lat.n_bonds(); }

    PhiVector apply(const PhiVector& phi) const {
        const std::size_t ns = static_cast<std::size_t>(lat.n_sites());
        std::vector<double> rho(phi.begin(), phi.begin() + ns);
        std::vector<double> a(phi.begin() + ns, phi.end());
        auto trho = scalar_t_apply(lat, rho, mu2);
        auto ta = gauge_t_apply(lat, a, mA2);
        PhiVector out;
        out.reserve(phi.size());
        out.insert(out.end(), trho.begin(), trho.end());
        out.insert(out.end(), ta.begin(), ta.end());
        return out;
    }

    Eigen::MatrixXd dense() const {
        const std::int64_t n = dim();
        Eigen::MatrixXd m(n, n);
        PhiVector basis(static_cast<std::size_t>(n), 0.0);
        for (std::int64_t j = 0; j < n; ++j) {
            basis[static_cast<std::size_t>(j)] = 1.0;
            PhiVector col = apply(basis);
            for (std::int64_t k = 0; k < n; ++k) m(k, j) = col[static_cast<std::size_t>(k)];
            basis[static_cast<std::size_t>(j)] = 0.0;
        }
        return m;
    }
};

// Index helpers for the Phi layout.
inline std::int64_t phi_site_index(const TorusLattice&, std::int64_t site) { return site; }
inline std::int64_t phi_bond_index(const TorusLattice& lat, std::int64_t site, int mu) {
    return lat.n_sites() + site * kDim + mu;
}

}  // namespace latgap
