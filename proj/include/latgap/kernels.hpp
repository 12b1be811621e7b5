#pragma once

// Translation-invariant kernels on the torus: fermion and boson covariances
// built in momentum space, exponential decay fits, kernel localization, and
// the local-operator invertibility report.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "latgap/fourier.hpp"
#include "latgap/operators.hpp"

namespace latgap {

struct DecayFit {
    double gamma = 0.0;     // fitted rate (positive = decaying)
    double c_lsq = 0.0;     // least-squares prefactor
    double c_bound = 0.0;   // sup prefactor: |K| <= c_bound e^{-gamma sep} holds pointwise
    double residual = 0.0;  // rms residual of the log fit
    int n_points = 0;
};

class KernelTable {
public:
    KernelTable(const TorusLattice& lat, int block_dim)
        : lat_(lat),
          block_dim_(block_dim),
          values_(static_cast<std::size_t>(lat.n_sites()),
                  Eigen::MatrixXcd::Zero(block_dim, block_dim)) {}

    const TorusLattice& lattice() const { return lat_; }
    int block_dim() const { return block_dim_; }

    Eigen::MatrixXcd& block(std::int64_t offset) { return values_[static_cast<std::size_t>(offset)]; }
    const Eigen::MatrixXcd& block(std::int64_t offset) const {
        return values_[static_cast<std::size_t>(offset)];
    }

    double max_abs(std::int64_t offset) const {
        return values_[static_cast<std::size_t>(offset)].cwiseAbs().maxCoeff();
    }

    double separation(std::int64_t offset, Metric metric = Metric::L2) const {
        return lat_.distance(lat_.site_coords(offset), Coords{0, 0, 0, 0}, metric);
    }

    // Operator entries: K(x, y) = block(x - y).
    Eigen::MatrixXcd dense() const {
        const std::int64_t n = lat_.n_sites() * block_dim_;
        Eigen::MatrixXcd m(n, n);
        for (std::int64_t x = 0; x < lat_.n_sites(); ++x) {
            Coords cx = lat_.site_coords(x);
            for (std::int64_t y = 0; y < lat_.n_sites(); ++y) {
                Coords cy = lat_.site_coords(y);
                Coords d{};
                for (int k = 0; k < kDim; ++k) d[k] = cx[k] - cy[k];
                m.block(x * block_dim_, y * block_dim_, block_dim_, block_dim_) =
                    block(lat_.site_index(d));
            }
        }
        return m;
    }

    // Symbol at momentum index k: sum_d K(d) e^{-i p.d}.
    Eigen::MatrixXcd symbol_at(std::int64_t k_index) const {
        auto p = momentum_of(lat_, k_index);
        Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(block_dim_, block_dim_);
        for (std::int64_t d = 0; d < lat_.n_sites(); ++d) {
            Coords c = lat_.site_coords(d);
            double ph = 0.0;
            for (int k = 0; k < kDim; ++k) ph -= p[k] * c[k];
            acc += std::polar(1.0, ph) * block(d);
        }
        return acc;
    }

    // Applies the kernel as an operator using the diagonal momentum form.
    std::vector<cplx> apply(const std::vector<cplx>& field) const {
        const std::int64_t ns = lat_.n_sites();
        std::vector<std::vector<cplx>> comp(static_cast<std::size_t>(block_dim_));
        for (int a = 0; a < block_dim_; ++a) {
            comp[a].resize(static_cast<std::size_t>(ns));
            for (std::int64_t s = 0; s < ns; ++s)
                comp[a][static_cast<std::size_t>(s)] = field[static_cast<std::size_t>(s * block_dim_ + a)];
            dft4_forward(comp[a], lat_.side());
        }
        std::vector<std::vector<cplx>> kf(static_cast<std::size_t>(block_dim_ * block_dim_));
        for (int a = 0; a < block_dim_; ++a)
            for (int b = 0; b < block_dim_; ++b) {
                auto& grid = kf[static_cast<std::size_t>(a * block_dim_ + b)];
                grid.resize(static_cast<std::size_t>(ns));
                for (std::int64_t d = 0; d < ns; ++d)
                    grid[static_cast<std::size_t>(d)] = block(d)(a, b);
                dft4_forward(grid, lat_.side());
            }
        std::vector<std::vector<cplx>> outc(static_cast<std::size_t>(block_dim_));
        for (int a = 0; a < block_dim_; ++a) {
            outc[a].assign(static_cast<std::size_t>(ns), cplx(0));
            for (int b = 0; b < block_dim_; ++b)
                for (std::int64_t k = 0; k < ns; ++k)
                    outc[a][static_cast<std::size_t>(k)] +=
                        kf[static_cast<std::size_t>(a * block_dim_ + b)][static_cast<std::size_t>(k)] *
                        comp[b][static_cast<std::size_t>(k)];
            dft4_inverse(outc[a], lat_.side());
        }
        std::vector<cplx> out(field.size());
        for (int a = 0; a < block_dim_; ++a)
            for (std::int64_t s = 0; s < ns; ++s)
                out[static_cast<std::size_t>(s * block_dim_ + a)] = outc[a][static_cast<std::size_t>(s)];
        return out;
    }

    std::optional<DecayFit> fit;

private:
    TorusLattice lat_;
    int block_dim_;
    std::vector<Eigen::MatrixXcd> values_;
};

inline KernelTable kernel_from_symbol(
    const TorusLattice& lat, int block_dim,
    const std::function<Eigen::MatrixXcd(const std::array<double, kDim>&)>& symbol) {
    KernelTable table(lat, block_dim);
    const std::int64_t ns = lat.n_sites();
    std::vector<std::vector<cplx>> comp(static_cast<std::size_t>(block_dim * block_dim));
    for (auto& c : comp) c.resize(static_cast<std::size_t>(ns));
    for (std::int64_t k = 0; k < ns; ++k) {
        Eigen::MatrixXcd s = symbol(momentum_of(lat, k));
        for (int a = 0; a < block_dim; ++a)
            for (int b = 0; b < block_dim; ++b)
                comp[static_cast<std::size_t>(a * block_dim + b)][static_cast<std::size_t>(k)] = s(a, b);
    }
    for (auto& c : comp) dft4_inverse(c, lat.side());
    for (std::int64_t d = 0; d < ns; ++d)
        for (int a = 0; a < block_dim; ++a)
            for (int b = 0; b < block_dim; ++b)
                table.block(d)(a, b) = comp[static_cast<std::size_t>(a * block_dim + b)][static_cast<std::size_t>(d)];
    return table;
}

// Fermion covariance S = (gamma.grad - (1/2)Laplacian + m_f)^{-1}:
//   symbol (M - i gamma.s) / (M^2 + |s|^2), M = m_f + sum(1 - cos p), s = sin p.
inline KernelTable fermion_covariance(const TorusLattice& lat, double m_f) {
    if (m_f <= 0) throw std::invalid_argument("fermion_covariance: m_f must be positive");
    const Clifford& cl = Clifford::instance();
    return kernel_from_symbol(lat, 4, [&](const std::array<double, kDim>& p) -> Eigen::MatrixXcd {
        double m = m_f, s2 = 0.0;
        Mat4 gs = Mat4::Zero();
        for (int mu = 0; mu < kDim; ++mu) {
            m += 1.0 - std::cos(p[mu]);
            double sm = std::sin(p[mu]);
            s2 += sm * sm;
            gs += cplx(0, sm) * cl.gamma[mu];
        }
        return (m * Mat4::Identity() - gs) / (m * m + s2);
    });
}

// Scalar boson covariance (-Laplacian + mu^2)^{-1}.
inline KernelTable scalar_covariance(const TorusLattice& lat, double mu2) {
    if (mu2 <= 0) throw std::invalid_argument("scalar_covariance: mu^2 must be positive");
    return kernel_from_symbol(lat, 1, [&](const std::array<double, kDim>& p) -> Eigen::MatrixXcd {
        Eigen::MatrixXcd s(1, 1);
        s(0, 0) = 1.0 / scalar_t_symbol(p, mu2);
        return s;
    });
}

// Gauge boson covariance (delta d + mA^2)^{-1} on bond fields.
inline KernelTable gauge_covariance(const TorusLattice& lat, double mA2) {
    if (mA2 <= 0) throw std::invalid_argument("gauge_covariance: mA^2 must be positive");
    return kernel_from_symbol(lat, 4, [&](const std::array<double, kDim>& p) -> Eigen::MatrixXcd {
        return gauge_t_symbol(p, mA2).inverse();
    });
}

// Least-squares fit of log(max |entry|) against separation, binned by rounded
// distance, over the window [1, L/4]. The rate comes from the fit; the
// prefactor c_bound is the sup making the bound pointwise true on the window.
inline DecayFit fit_decay(KernelTable& kernel, Metric metric = Metric::L2) {
    const TorusLattice& lat = kernel.lattice();
    const double lo = 1.0, hi = lat.side() / 4.0;
    std::map<double, double> bins;  // separation -> max |entry| at that separation
    for (std::int64_t d = 1; d < lat.n_sites(); ++d) {
        double sep = kernel.separation(d, metric);
        if (sep < lo || sep > hi) continue;
        double v = kernel.max_abs(d);
        auto it = bins.find(sep);
        if (it == bins.end())
            bins[sep] = v;
        else
            it->second = std::max(it->second, v);
    }
    if (bins.size() < 2) throw std::runtime_error("fit_decay: fewer than 2 distinct separations");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto& [x, v] : bins) {
        double y = std::log(v);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(bins.size());
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    double intercept = (sy - slope * sx) / n;
    DecayFit fit;
    fit.gamma = -slope;
    fit.c_lsq = std::exp(intercept);
    fit.n_points = static_cast<int>(bins.size());
    double ss = 0.0, cb = 0.0;
    for (auto& [x, v] : bins) {
        double r = std::log(v) - (intercept + slope * x);
        ss += r * r;
        cb = std::max(cb, v * std::exp(fit.gamma * x));
    }
    fit.residual = std::sqrt(ss / n);
    fit.c_bound = cb;
    kernel.fit = fit;
    return fit;
}

// Checks |K(d)| <= c e^{-gamma sep} for every tabulated offset in the window.
inline bool decay_bound_pointwise(const KernelTable& kernel, double c, double gamma,
                                  Metric metric = Metric::L2) {
    const TorusLattice& lat = kernel.lattice();
    const double lo = 1.0, hi = lat.side() / 4.0;
    for (std::int64_t d = 1; d < lat.n_sites(); ++d) {
        double sep = kernel.separation(d, metric);
        if (sep < lo || sep > hi) continue;
        if (kernel.max_abs(d) > c * std::exp(-gamma * sep) * (1.0 + 1e-12)) return false;
    }
    return true;
}

// Splits a kernel into the part supported on separations < r and the far
// remainder. local + delta reassembles the input entry by entry.
inline std::pair<KernelTable, KernelTable> localize_kernel(const KernelTable& kernel, double r,
                                                           Metric metric = Metric::L2) {
    KernelTable local(kernel.lattice(), kernel.block_dim());
    KernelTable delta(kernel.lattice(), kernel.block_dim());
    for (std::int64_t d = 0; d < kernel.lattice().n_sites(); ++d) {
        if (kernel.separation(d, metric) < r)
            local.block(d) = kernel.block(d);
        else
            delta.block(d) = kernel.block(d);
    }
    return {std::move(local), std::move(delta)};
}

struct InvertibilityReport {
    double smallest_singular_value = 0.0;
    double largest_singular_value = 0.0;
    double inverse_action_sup_ratio = 0.0;  // sup_probe ||K^{-1} f||_inf / ||f||_inf
    bool invertible = false;
};

// Singular values of a translation-invariant operator come from its momentum
// symbols; the inverse-action ratio is probed on delta and random fields.
inline InvertibilityReport invertibility_check_local(const KernelTable& kernel,
                                                     const std::vector<std::vector<cplx>>& probes = {}) {
    const TorusLattice& lat = kernel.lattice();
    InvertibilityReport rep;
    rep.smallest_singular_value = std::numeric_limits<double>::infinity();
    std::vector<Eigen::MatrixXcd> symbols(static_cast<std::size_t>(lat.n_sites()));
    for (std::int64_t k = 0; k < lat.n_sites(); ++k) {
        symbols[static_cast<std::size_t>(k)] = kernel.symbol_at(k);
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(symbols[static_cast<std::size_t>(k)]);
        rep.smallest_singular_value =
            std::min(rep.smallest_singular_value, svd.singularValues().minCoeff());
        rep.largest_singular_value =
            std::max(rep.largest_singular_value, svd.singularValues().maxCoeff());
    }
    rep.invertible = rep.smallest_singular_value > 1e-12;
    if (rep.invertible) {
        std::vector<std::vector<cplx>> all = probes;
        if (all.empty()) {
            std::vector<cplx> delta(static_cast<std::size_t>(lat.n_sites() * kernel.block_dim()), cplx(0));
            delta[0] = 1.0;
            all.push_back(std::move(delta));
        }
        const int bd = kernel.block_dim();
        for (const auto& f : all) {
            // Solve K u = f through the momentum symbols.
            std::vector<std::vector<cplx>> comp(static_cast<std::size_t>(bd));
            for (int a = 0; a < bd; ++a) {
                comp[a].resize(static_cast<std::size_t>(lat.n_sites()));
                for (std::int64_t s = 0; s < lat.n_sites(); ++s)
                    comp[a][static_cast<std::size_t>(s)] = f[static_cast<std::size_t>(s * bd + a)];
                dft4_forward(comp[a], lat.side());
            }
            for (std::int64_t k = 0; k < lat.n_sites(); ++k) {
                Eigen::VectorXcd v(bd);
                for (int a = 0; a < bd; ++a) v(a) = comp[a][static_cast<std::size_t>(k)];
                Eigen::VectorXcd u = symbols[static_cast<std::size_t>(k)].fullPivLu().solve(v);
                for (int a = 0; a < bd; ++a) comp[a][static_cast<std::size_t>(k)] = u(a);
            }
            double fi = 0, ui = 0;
            for (int a = 0; a < bd; ++a) {
                dft4_inverse(comp[a], lat.side());
                for (std::int64_t s = 0; s < lat.n_sites(); ++s) {
                    ui = std::max(ui, std::abs(comp[a][static_cast<std::size_t>(s)]));
                    fi = std::max(fi, std::abs(f[static_cast<std::size_t>(s * bd + a)]));
                }
            }
            if (fi > 0) rep.inverse_action_sup_ratio = std::max(rep.inverse_action_sup_ratio, ui / fi);
        }
    }
    return rep;
}

}  // namespace latgap
