#pragma once

// Separable DFT on the 4D torus. Lattices here are small (L <= 16), so a
// precomputed-twiddle O(L^5) transform per axis is plenty.

#include <complex>
#include <numbers>
#include <vector>

#include "latgap/lattice.hpp"

namespace latgap {

namespace detail {

// Transform one axis of a 4D array of complex values, stride layout matching
// TorusLattice::site_index (axis 0 fastest).
inline void dft_axis(std::vector<std::complex<double>>& data, int L, int axis, int sign) {
    const std::int64_t n = static_cast<std::int64_t>(data.size());
    std::int64_t stride = 1;
    for (int d = 0; d < axis; ++d) stride *= L;
    std::vector<std::complex<double>> tw(static_cast<std::size_t>(L) * L);
    for (int k = 0; k < L; ++k)
        for (int x = 0; x < L; ++x) {
            double ph = sign * 2.0 * std::numbers::pi * k * x / L;
            tw[static_cast<std::size_t>(k) * L + x] = {std::cos(ph), std::sin(ph)};
        }
    std::vector<std::complex<double>> line(L), out(L);
    const std::int64_t block = stride * L;
    for (std::int64_t base = 0; base < n; base += block) {
        for (std::int64_t off = 0; off < stride; ++off) {
            for (int x = 0; x < L; ++x) line[x] = data[base + off + stride * x];
            for (int k = 0; k < L; ++k) {
                std::complex<double> acc = 0;
                const std::complex<double>* t = &tw[static_cast<std::size_t>(k) * L];
                for (int x = 0; x < L; ++x) acc += t[x] * line[x];
                out[k] = acc;
            }
            for (int k = 0; k < L; ++k) data[base + off + stride * k] = out[k];
        }
    }
}

}  // namespace detail

// Forward transform: F(p) = sum_x e^{-i p.x} f(x), p_mu = 2 pi k_mu / L.
inline void dft4_forward(std::vector<std::complex<double>>& data, int L) {
    for (int axis = 0; axis < kDim; ++axis) detail::dft_axis(data, L, axis, -1);
}

// Inverse transform: f(x) = (1/L^4) sum_p e^{+i p.x} F(p).
inline void dft4_inverse(std::vector<std::complex<double>>& data, int L) {
    for (int axis = 0; axis < kDim; ++axis) detail::dft_axis(data, L, axis, +1);
    double norm = 1.0;
    for (int d = 0; d < kDim; ++d) norm /= L;
    for (auto& v : data) v *= norm;
}

inline double momentum_component(int k, int L) {
    return 2.0 * std::numbers::pi * k / L;
}

}  // namespace latgap
