#pragma once

// Localization corrections: the far-tail bilinear left over by the kernel
// change of variables, the per-block trace-log series for the localized and
// region-restricted determinant prefactors, and the conditioned quadratic
// form lower bound on the large-field region.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <vector>

#include "latgap/fields.hpp"
#include "latgap/kernels.hpp"

namespace latgap {

// -- D * deltaS convolution ---------------------------------------------------

// Convolves the 9-tap shifted Dirac stencil with a translation-invariant
// spinor kernel: (D K)(d) = sum_e D(e) K(d - e).
inline KernelTable dirac_times_kernel(const TorusLattice& lat, double mass, const KernelTable& k) {
    const Clifford& cl = Clifford::instance();
    KernelTable out(lat, 4);
    for (std::int64_t d = 0; d < lat.n_sites(); ++d) {
        Eigen::MatrixXcd acc = (mass + kDim) * k.block(d);
        for (int mu = 0; mu < kDim; ++mu) {
            Mat4 hf = 0.5 * (Mat4::Identity() - cl.gamma[mu]);
            Mat4 hb = 0.5 * (Mat4::Identity() + cl.gamma[mu]);
            acc -= hf * k.block(lat.neighbor(d, mu, -1));  // K(d - e_mu)
            acc -= hb * k.block(lat.neighbor(d, mu, +1));
        }
        out.block(d) = acc;
    }
    return out;
}

struct VEpsilonReport {
    KernelTable coefficients;  // (D deltaS)(d), the bilinear coefficient kernel
    double per_block_norm = 0.0;  // block volume * sum_d sum_ab |coeff|, h = 1
    double tail_sup = 0.0;        // sup_d max|deltaS(d)|
};

// block volume * total absolute weight of a kernel; the per-block h=1 norm
// of the bilinear whose coefficients are the kernel entries.
inline double kernel_block_l1_norm(const KernelTable& k) {
    double sum = 0.0;
    for (std::int64_t d = 0; d < k.lattice().n_sites(); ++d) sum += k.block(d).cwiseAbs().sum();
    return std::pow(static_cast<double>(k.lattice().block_side()), kDim) * sum;
}

// The bilinear left by psi -> S^loc psi: coefficients (D deltaS)(x, y) and
// their h=1 per-block norm. Vanishes when r exceeds the lattice diameter.
inline VEpsilonReport v_epsilon_quadratic(const TorusLattice& lat, double m_f, double r) {
    auto s = fermion_covariance(lat, m_f);
    auto [local, delta] = localize_kernel(s, r);
    VEpsilonReport rep{dirac_times_kernel(lat, m_f, delta)};
    double sum = 0.0;
    for (std::int64_t d = 0; d < lat.n_sites(); ++d) {
        sum += rep.coefficients.block(d).cwiseAbs().sum();
        rep.tail_sup = std::max(rep.tail_sup, delta.max_abs(d));
    }
    double vol = std::pow(static_cast<double>(lat.block_side()), kDim);
    rep.per_block_norm = vol * sum;
    return rep;
}

// -- trace-log series ---------------------------------------------------------

// The shifted-hopping split D = (m + kDim) (1 - Ktilde) underlies every
// fermion trace-log here: ||Ktilde|| <= kDim / (m + kDim) < 1, so the
// Mercator series converges geometrically. (The boson sectors shift by
// 2 kDim instead; their hopping carries no 1/2.)

struct SeriesReport {
    double value = 0.0;           // the converged series value
    double spectral_radius = 0.0; // sup over momenta (translation-invariant path)
    int terms_used = 0;
    bool converged = false;
};

// Masked hopping apply for the Dirac operator: v -> (1_mask Khop 1_mask) v,
// normalized by (mass + 2 kDim).
class MaskedDiracHop {
public:
    MaskedDiracHop(const TorusLattice& lat, double mass, std::vector<char> site_mask)
        : lat_(lat), mass_(mass), mask_(std::move(site_mask)) {
        const Clifford& cl = Clifford::instance();
        for (int mu = 0; mu < kDim; ++mu) {
            hf_[mu] = 0.5 * (Mat4::Identity() - cl.gamma[mu]);
            hb_[mu] = 0.5 * (Mat4::Identity() + cl.gamma[mu]);
        }
    }

    double shift() const { return mass_ + kDim; }
    bool in_mask(std::int64_t s) const { return mask_.empty() || mask_[static_cast<std::size_t>(s)]; }

    void apply(const Eigen::VectorXcd& v, Eigen::VectorXcd& out) const {
        out.setZero();
        for (std::int64_t s = 0; s < lat_.n_sites(); ++s) {
            if (!in_mask(s)) continue;
            Eigen::Vector4cd acc = Eigen::Vector4cd::Zero();
            for (int mu = 0; mu < kDim; ++mu) {
                std::int64_t sp = lat_.neighbor(s, mu, +1);
                std::int64_t sm = lat_.neighbor(s, mu, -1);
                if (in_mask(sp)) acc += hf_[mu] * v.segment<4>(4 * sp);
                if (in_mask(sm)) acc += hb_[mu] * v.segment<4>(4 * sm);
            }
            out.segment<4>(4 * s) = acc / shift();
        }
    }

private:
    TorusLattice lat_;
    double mass_;
    std::vector<char> mask_;
    std::array<Mat4, kDim> hf_, hb_;
};

// Tr_{block} log D for the (possibly region-restricted) shifted Dirac
// operator, via Tr log = [4 #sites] log(shift) + Tr log(1 - Ktilde).
inline double tr_block_log_dirac(const TorusLattice& lat, double mass,
                                 const std::vector<char>& site_mask,
                                 const std::vector<std::int64_t>& block_sites, double tol = 1e-14,
                                 int max_terms = 400) {
    MaskedDiracHop hop(lat, mass, site_mask);
    const std::int64_t n = lat.n_sites() * 4;
    double series = 0.0;
    for (std::int64_t site : block_sites) {
        if (!hop.in_mask(site)) continue;
        for (int alpha = 0; alpha < 4; ++alpha) {
            Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n);
            v(4 * site + alpha) = 1.0;
            Eigen::VectorXcd w(n);
            double rate = kDim / hop.shift();
            for (int k = 1; k <= max_terms; ++k) {
                hop.apply(v, w);
                std::swap(v, w);
                series -= std::real(v(4 * site + alpha)) / k;
                if (std::pow(rate, k) < tol) break;
            }
        }
    }
    double count = 0;
    for (std::int64_t site : block_sites) count += hop.in_mask(site) ? 4.0 : 0.0;
    return count * std::log(hop.shift()) + series;
}

// Same restricted trace-log for the boson sectors. kind 0: sites with
// (-Laplacian + mu^2); kind 1: bonds with (delta d + mA^2). The shifted
// hopping has norm <= 2 kDim in both sectors.
inline double tr_block_log_boson(const TorusLattice& lat, int kind, double mass2,
                                 const std::vector<char>& site_mask,
                                 const std::vector<std::int64_t>& block_sites, double tol = 1e-14,
                                 int max_terms = 400) {
    const double shift = 2.0 * kDim + mass2;
    auto in_mask = [&](std::int64_t s) {
        return site_mask.empty() || site_mask[static_cast<std::size_t>(s)];
    };
    const std::int64_t dim = kind == 0 ? lat.n_sites() : lat.n_bonds();
    auto masked_hop = [&](const std::vector<double>& v, std::vector<double>& out) {
        if (kind == 0) {
            for (std::int64_t s = 0; s < lat.n_sites(); ++s) {
                double acc = 0.0;
                if (in_mask(s)) {
                    for (int mu = 0; mu < kDim; ++mu) {
                        std::int64_t sp = lat.neighbor(s, mu, +1), sm = lat.neighbor(s, mu, -1);
                        if (in_mask(sp)) acc += v[static_cast<std::size_t>(sp)];
                        if (in_mask(sm)) acc += v[static_cast<std::size_t>(sm)];
                    }
                }
                out[static_cast<std::size_t>(s)] = acc / shift;
            }
        } else {
            // Khop = (2 kDim) - delta d on the masked bond space
            std::vector<double> masked(v);
            for (std::int64_t s = 0; s < lat.n_sites(); ++s)
                if (!in_mask(s))
                    for (int mu = 0; mu < kDim; ++mu) masked[static_cast<std::size_t>(s * kDim + mu)] = 0.0;
            auto dd = gauge_t_apply(lat, masked, 0.0);
            for (std::int64_t s = 0; s < lat.n_sites(); ++s)
                for (int mu = 0; mu < kDim; ++mu) {
                    std::size_t b = static_cast<std::size_t>(s * kDim + mu);
                    out[b] = in_mask(s) ? (2.0 * kDim * masked[b] - dd[b]) / shift : 0.0;
                }
        }
    };
    double series = 0.0;
    double per_site = kind == 0 ? 1.0 : kDim;
    for (std::int64_t site : block_sites) {
        if (!in_mask(site)) continue;
        for (int comp = 0; comp < per_site; ++comp) {
            std::int64_t idx = kind == 0 ? site : site * kDim + comp;
            std::vector<double> v(static_cast<std::size_t>(dim), 0.0), w(static_cast<std::size_t>(dim));
            v[static_cast<std::size_t>(idx)] = 1.0;
            double rate = 2.0 * kDim / shift;
            for (int k = 1; k <= max_terms; ++k) {
                masked_hop(v, w);
                std::swap(v, w);
                series -= v[static_cast<std::size_t>(idx)] / k;
                if (std::pow(rate, k) < tol) break;
            }
        }
    }
    double count = 0;
    for (std::int64_t site : block_sites) count += in_mask(site) ? per_site : 0.0;
    return count * std::log(shift) + series;
}

// -- W corrections ------------------------------------------------------------

struct WCorrections {
    std::vector<double> w1;        // boson localization series per block
    std::vector<double> w1_prime;  // fermion localization series per block
    std::vector<double> w2;        // boson restriction trace-log difference per block
    std::vector<double> w2_prime;  // fermion restriction trace-log difference per block
    double w1_prime_global = 0.0;  // independent global evaluation of the series
    double spectral_radius = 0.0;  // of D_restricted deltaS_restricted
    bool series_converged = true;
};

namespace detail {

// Dense n-step trace series -sum 1/n Tr_block[(A)^n] for a dense matrix A
// over a restricted index set; per-block diagonal accumulation.
inline std::vector<double> dense_log_series_per_block(
    const Eigen::MatrixXcd& a, const std::vector<std::int64_t>& index_to_site,
    const TorusLattice& lat, double tol, int max_terms, double& global, double& radius,
    bool& converged) {
    std::vector<double> per_block(static_cast<std::size_t>(lat.n_blocks()), 0.0);
    Eigen::VectorXcd ev = a.eigenvalues();
    radius = 0.0;
    for (int i = 0; i < ev.size(); ++i) radius = std::max(radius, std::abs(ev(i)));
    converged = radius < 1.0;
    global = 0.0;
    if (!converged) return per_block;
    Eigen::MatrixXcd power = a;
    for (int n = 1; n <= max_terms; ++n) {
        for (Eigen::Index i = 0; i < power.rows(); ++i) {
            std::int64_t b = lat.block_of_site(lat.site_coords(index_to_site[static_cast<std::size_t>(i)]));
            per_block[static_cast<std::size_t>(b)] -= std::real(power(i, i)) / n;
        }
        global -= std::real(power.trace()) / n;
        // the trace can vanish identically at low orders, so terminate on the
        // whole power, not on the current term
        if (power.cwiseAbs().maxCoeff() * static_cast<double>(power.rows()) < tol ||
            n == max_terms)
            break;
        power = power * a;
    }
    return per_block;
}

}  // namespace detail

// Per-block localization series for the fermion change of variables,
// restricted to the site mask (empty mask = whole torus), evaluated densely.
// Returns per-block values plus an independently accumulated global trace.
inline WCorrections w1_prime_dense(const TorusLattice& lat, double m_f, double r,
                                   const std::vector<char>& site_mask, double tol = 1e-14,
                                   int max_terms = 60) {
    auto s = fermion_covariance(lat, m_f);
    auto [local, delta] = localize_kernel(s, r);
    std::vector<std::int64_t> sites;
    for (std::int64_t x = 0; x < lat.n_sites(); ++x)
        if (site_mask.empty() || site_mask[static_cast<std::size_t>(x)]) sites.push_back(x);
    const Eigen::Index n = static_cast<Eigen::Index>(sites.size()) * 4;
    Eigen::MatrixXcd dmat(n, n), smat(n, n);
    auto dd = dirac_dense(lat, nullptr, 0.0, m_f);
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(sites.size()); ++i)
        for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(sites.size()); ++j) {
            Coords ci = lat.site_coords(sites[static_cast<std::size_t>(i)]);
            Coords cj = lat.site_coords(sites[static_cast<std::size_t>(j)]);
            Coords diff{ci[0] - cj[0], ci[1] - cj[1], ci[2] - cj[2], ci[3] - cj[3]};
            smat.block(4 * i, 4 * j, 4, 4) = delta.block(lat.site_index(diff));
            dmat.block(4 * i, 4 * j, 4, 4) =
                dd.block(4 * sites[static_cast<std::size_t>(i)], 4 * sites[static_cast<std::size_t>(j)], 4, 4);
        }
    Eigen::MatrixXcd a = dmat * smat;
    std::vector<std::int64_t> index_to_site(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < sites.size(); ++i)
        for (int alpha = 0; alpha < 4; ++alpha) index_to_site[4 * i + alpha] = sites[i];
    WCorrections w;
    w.w1_prime = detail::dense_log_series_per_block(a, index_to_site, lat, tol, max_terms,
                                                    w.w1_prime_global, w.spectral_radius,
                                                    w.series_converged);
    return w;
}

// Translation-invariant per-block localization series for the full torus:
// the trace is evaluated in momentum space and shared equally by blocks.
inline SeriesReport w1_prime_translation_invariant(const TorusLattice& lat, double m_f, double r,
                                                   double tol = 1e-14, int max_terms = 60) {
    auto s = fermion_covariance(lat, m_f);
    auto [local, delta] = localize_kernel(s, r);
    SeriesReport rep;
    // symbols of deltaS via forward transforms of its components
    std::vector<std::vector<cplx>> comp(16);
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            auto& grid = comp[static_cast<std::size_t>(a * 4 + b)];
            grid.resize(static_cast<std::size_t>(lat.n_sites()));
            for (std::int64_t d = 0; d < lat.n_sites(); ++d)
                grid[static_cast<std::size_t>(d)] = delta.block(d)(a, b);
            dft4_forward(grid, lat.side());
        }
    std::vector<Mat4> sym(static_cast<std::size_t>(lat.n_sites()));
    for (std::int64_t k = 0; k < lat.n_sites(); ++k) {
        Mat4 dssym;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                dssym(a, b) = comp[static_cast<std::size_t>(a * 4 + b)][static_cast<std::size_t>(k)];
        sym[static_cast<std::size_t>(k)] = dirac_symbol(momentum_of(lat, k), m_f) * dssym;
        Eigen::ComplexEigenSolver<Mat4> es(sym[static_cast<std::size_t>(k)]);
        for (int i = 0; i < 4; ++i)
            rep.spectral_radius = std::max(rep.spectral_radius, std::abs(es.eigenvalues()(i)));
    }
    if (rep.spectral_radius >= 1.0) return rep;
    // Tr[A^n] over the lattice = sum_p tr[A(p)^n].
    std::vector<Mat4> power = sym;
    for (int n = 1; n <= max_terms; ++n) {
        cplx tr = 0;
        double pmax = 0;
        for (std::int64_t k = 0; k < lat.n_sites(); ++k) {
            tr += power[static_cast<std::size_t>(k)].trace();
            pmax = std::max(pmax, power[static_cast<std::size_t>(k)].cwiseAbs().maxCoeff());
        }
        rep.value -= std::real(tr) / n;
        rep.terms_used = n;
        if (pmax * 4.0 * static_cast<double>(lat.n_sites()) < tol) break;
        for (std::int64_t k = 0; k < lat.n_sites(); ++k)
            power[static_cast<std::size_t>(k)] =
                power[static_cast<std::size_t>(k)] * sym[static_cast<std::size_t>(k)];
    }
    rep.converged = true;
    return rep;
}

// -- conditioned quadratic form -----------------------------------------------

struct QuadraticFormReport {
    bool hypothesis_met = false;  // min(mu^2, mA^2) > 8
    double m_min = 0.0;
    double gamma4 = 0.0;          // (m_min - 64/m_min)/2 - 16 g
    double worst_ratio = 0.0;     // min over probes of LHS / ||Phi||^2
    double schur_min = 0.0;       // min over probes of the Schur form / ||Phi||^2
    bool pass = false;
};

// Evaluates (1/2) <Phi, (T_out - 2 T_oi C_in T_io) Phi> - 16 g ||Phi||^2 on
// probe fields supported outside the small-field region and checks the
// gamma4 ||Phi||^2 lower bound; also reports the plain Schur-complement form.
inline QuadraticFormReport quadratic_form_lower_bound(const TorusLattice& lat, double mu2,
                                                      double mA2, double g,
                                                      const RegionDecomposition& rd,
                                                      const std::vector<PhiVector>& probes) {
    QuadraticFormReport rep;
    rep.m_min = std::min(mu2, mA2);
    rep.hypothesis_met = rep.m_min > 8.0;
    rep.gamma4 = 0.5 * (rep.m_min - 64.0 / rep.m_min) - 16.0 * g;
    if (!rep.hypothesis_met) return rep;

    PhiOperator t(lat, mu2, mA2);
    Eigen::MatrixXd td = t.dense();
    const std::int64_t dim = t.dim();

    // membership of Phi components: site or bond block inside large_enlarged?
    std::vector<char> outside(static_cast<std::size_t>(dim), 0);
    for (std::int64_t s = 0; s < lat.n_sites(); ++s) {
        bool out = rd.large_enlarged[static_cast<std::size_t>(lat.block_of_site(lat.site_coords(s)))];
        outside[static_cast<std::size_t>(phi_site_index(lat, s))] = out;
        for (int mu = 0; mu < kDim; ++mu)
            outside[static_cast<std::size_t>(phi_bond_index(lat, s, mu))] = out;
    }
    std::vector<std::int64_t> in_idx, out_idx;
    for (std::int64_t i = 0; i < dim; ++i)
        (outside[static_cast<std::size_t>(i)] ? out_idx : in_idx).push_back(i);
    if (out_idx.empty() || in_idx.empty()) return rep;

    Eigen::MatrixXd t_oo(out_idx.size(), out_idx.size()), t_oi(out_idx.size(), in_idx.size()),
        t_ii(in_idx.size(), in_idx.size());
    for (std::size_t a = 0; a < out_idx.size(); ++a)
        for (std::size_t b = 0; b < out_idx.size(); ++b) t_oo(a, b) = td(out_idx[a], out_idx[b]);
    for (std::size_t a = 0; a < out_idx.size(); ++a)
        for (std::size_t b = 0; b < in_idx.size(); ++b) t_oi(a, b) = td(out_idx[a], in_idx[b]);
    for (std::size_t a = 0; a < in_idx.size(); ++a)
        for (std::size_t b = 0; b < in_idx.size(); ++b) t_ii(a, b) = td(in_idx[a], in_idx[b]);
    Eigen::MatrixXd c_in = t_ii.ldlt().solve(Eigen::MatrixXd::Identity(t_ii.rows(), t_ii.cols()));
    Eigen::MatrixXd cross = t_oi * c_in * t_oi.transpose();

    rep.worst_ratio = std::numeric_limits<double>::infinity();
    rep.schur_min = std::numeric_limits<double>::infinity();
    for (const auto& probe : probes) {
        Eigen::VectorXd phi(out_idx.size());
        for (std::size_t a = 0; a < out_idx.size(); ++a)
            phi(static_cast<Eigen::Index>(a)) = probe[static_cast<std::size_t>(out_idx[a])];
        double n2 = phi.squaredNorm();
        if (n2 == 0) continue;
        double lhs = 0.5 * (phi.dot(t_oo * phi) - 2.0 * phi.dot(cross * phi)) - 16.0 * g * n2;
        double schur = phi.dot(t_oo * phi) - phi.dot(cross * phi);
        rep.worst_ratio = std::min(rep.worst_ratio, lhs / n2);
        rep.schur_min = std::min(rep.schur_min, schur / n2);
    }
    rep.pass = rep.worst_ratio >= rep.gamma4 - 1e-10 && rep.schur_min >= -1e-10;
    return rep;
}

}  // namespace latgap
