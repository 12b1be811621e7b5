#pragma once

// Finite 4D torus geometry: sites, oriented bonds, plaquettes, blocks,
// polymers, wraparound metrics and minimal-tree lengths.

#include <array>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace latgap {

inline constexpr int kDim = 4;

using Coords = std::array<int, kDim>;

enum class Metric { L2, Linf };

inline const char* metric_name(Metric m) { return m == Metric::L2 ? "l2" : "linf"; }

struct Site {
    Coords c{};
};

struct Bond {
    Coords c{};  // base site x; the bond links x and x+e_mu
    int mu = 0;  // direction, 0..3
};

struct Plaquette {
    Coords c{};
    int mu = 0, nu = 1;  // mu < nu
};

class TorusLattice {
public:
    TorusLattice(int side_length, int block_side = 1)
        : L_(side_length), block_side_(block_side) {
        if (L_ < 2) throw std::invalid_argument("side_length must be >= 2");
        if (block_side_ < 1) throw std::invalid_argument("block_side must be >= 1");
        if (L_ % block_side_ != 0)
            throw std::invalid_argument("side_length must be a multiple of block_side");
        n_sites_ = 1;
        for (int d = 0; d < kDim; ++d) n_sites_ *= L_;
        blocks_per_side_ = L_ / block_side_;
        n_blocks_ = 1;
        for (int d = 0; d < kDim; ++d) n_blocks_ *= blocks_per_side_;
    }

    int side() const { return L_; }
    int block_side() const { return block_side_; }
    int blocks_per_side() const { return blocks_per_side_; }
    std::int64_t n_sites() const { return n_sites_; }
    std::int64_t n_bonds() const { return kDim * n_sites_; }
    std::int64_t n_plaquettes() const { return 6 * n_sites_; }
    std::int64_t n_blocks() const { return n_blocks_; }

    int wrap(int x) const {
        x %= L_;
        return x < 0 ? x + L_ : x;
    }

    std::int64_t site_index(const Coords& c) const {
        std::int64_t idx = 0;
        for (int d = kDim - 1; d >= 0; --d) idx = idx * L_ + wrap(c[d]);
        return idx;
    }

    Coords site_coords(std::int64_t idx) const {
        Coords c{};
        for (int d = 0; d < kDim; ++d) {
            c[d] = static_cast<int>(idx % L_);
            idx /= L_;
        }
        return c;
    }

    Coords shifted(Coords c, int mu, int step) const {
        c[mu] = wrap(c[mu] + step);
        return c;
    }

    std::int64_t neighbor(std::int64_t idx, int mu, int step) const {
        return site_index(shifted(site_coords(idx), mu, step));
    }

    std::int64_t bond_index(const Coords& c, int mu) const {
        return site_index(c) * kDim + mu;
    }

    // Smallest signed representative of a coordinate difference.
    int min_image(int d) const {
        d %= L_;
        if (d < 0) d += L_;
        if (d > L_ / 2) d -= L_;
        return d;
    }

    double distance(const Coords& x, const Coords& y, Metric metric) const {
        double acc = 0.0;
        for (int d = 0; d < kDim; ++d) {
            double a = std::abs(min_image(x[d] - y[d]));
            if (metric == Metric::Linf)
                acc = std::max(acc, a);
            else
                acc += a * a;
        }
        return metric == Metric::Linf ? acc : std::sqrt(acc);
    }

    // -- blocks -------------------------------------------------------------

    std::int64_t block_of_site(const Coords& c) const {
        std::int64_t idx = 0;
        for (int d = kDim - 1; d >= 0; --d) idx = idx * blocks_per_side_ + wrap(c[d]) / block_side_;
        return idx;
    }

    // A bond (x, mu) belongs to the block of its base site x.
    std::int64_t block_of_bond(const Coords& c, int /*mu*/) const { return block_of_site(c); }

    Coords block_anchor(std::int64_t block_idx) const {
        Coords c{};
        for (int d = 0; d < kDim; ++d) {
            c[d] = static_cast<int>(block_idx % blocks_per_side_) * block_side_;
            block_idx /= blocks_per_side_;
        }
        return c;
    }

    std::vector<std::int64_t> block_sites(std::int64_t block_idx) const {
        Coords a = block_anchor(block_idx);
        std::vector<std::int64_t> out;
        out.reserve(static_cast<std::size_t>(std::pow(block_side_, kDim)));
        Coords o{};
        for (o[0] = 0; o[0] < block_side_; ++o[0])
            for (o[1] = 0; o[1] < block_side_; ++o[1])
                for (o[2] = 0; o[2] < block_side_; ++o[2])
                    for (o[3] = 0; o[3] < block_side_; ++o[3]) {
                        Coords c{};
                        for (int d = 0; d < kDim; ++d) c[d] = a[d] + o[d];
                        out.push_back(site_index(c));
                    }
        return out;
    }

    // Distance between block grid positions in block units (sup metric wraps
    // on the block grid).
    int block_sup_distance(std::int64_t b1, std::int64_t b2) const {
        Coords a1 = block_anchor(b1), a2 = block_anchor(b2);
        int acc = 0;
        for (int d = 0; d < kDim; ++d) {
            int diff = (a1[d] - a2[d]) / block_side_;
            diff %= blocks_per_side_;
            if (diff < 0) diff += blocks_per_side_;
            if (diff > blocks_per_side_ / 2) diff -= blocks_per_side_;
            acc = std::max(acc, std::abs(diff));
        }
        return acc;
    }

    // Blocks touching `block_idx`: sup distance 1 on the block grid.
    std::vector<std::int64_t> block_neighbors(std::int64_t block_idx) const {
        Coords a = block_anchor(block_idx);
        std::set<std::int64_t> out;
        Coords o{};
        for (o[0] = -1; o[0] <= 1; ++o[0])
            for (o[1] = -1; o[1] <= 1; ++o[1])
                for (o[2] = -1; o[2] <= 1; ++o[2])
                    for (o[3] = -1; o[3] <= 1; ++o[3]) {
                        if (o[0] == 0 && o[1] == 0 && o[2] == 0 && o[3] == 0) continue;
                        Coords c{};
                        for (int d = 0; d < kDim; ++d) c[d] = a[d] + o[d] * block_side_;
                        std::int64_t b = block_of_site({wrap(c[0]), wrap(c[1]), wrap(c[2]), wrap(c[3])});
                        if (b != block_idx) out.insert(b);
                    }
        return {out.begin(), out.end()};
    }

private:
    int L_;
    int block_side_;
    int blocks_per_side_ = 0;
    std::int64_t n_sites_ = 0;
    std::int64_t n_blocks_ = 0;
};

// A polymer is a connected set of blocks (adjacency: sup distance <= 1 on
// the block grid, i.e. sharing a hypersurface, face, edge or a corner).
struct Polymer {
    std::vector<std::int64_t> blocks;  // sorted, unique

    std::size_t size() const { return blocks.size(); }
    bool operator==(const Polymer& o) const { return blocks == o.blocks; }
    bool operator<(const Polymer& o) const { return blocks < o.blocks; }
};

inline bool polymer_connected(const TorusLattice& lat, const std::vector<std::int64_t>& blocks) {
    if (blocks.empty()) return false;
    std::vector<char> seen(blocks.size(), 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    std::size_t reached = 1;
    while (!stack.empty()) {
        std::size_t i = stack.back();
        stack.pop_back();
        for (std::size_t j = 0; j < blocks.size(); ++j) {
            if (!seen[j] && lat.block_sup_distance(blocks[i], blocks[j]) <= 1) {
                seen[j] = 1;
                ++reached;
                stack.push_back(j);
            }
        }
    }
    return reached == blocks.size();
}

inline bool polymers_overlap(const TorusLattice& lat, const Polymer& a, const Polymer& b) {
    for (auto x : a.blocks)
        for (auto y : b.blocks)
            if (x == y || lat.block_sup_distance(x, y) <= 1) return true;
    return false;
}

// Minimal spanning tree length over the given points under the wraparound
// metric. This stands in for the minimal (Steiner) tree: MST >= Steiner, so
// every weight factor e^{kappa t} computed from it over-estimates and "<="
// bound checks stay conservative. Not monotone under supersets.
inline double minimal_tree_length(const TorusLattice& lat, const std::vector<Coords>& points,
                                  Metric metric) {
    if (points.empty()) throw std::invalid_argument("minimal_tree_length: empty point set");
    const std::size_t n = points.size();
    if (n == 1) return 0.0;
    std::vector<double> best(n, std::numeric_limits<double>::infinity());
    std::vector<char> used(n, 0);
    best[0] = 0.0;
    double total = 0.0;
    for (std::size_t it = 0; it < n; ++it) {
        std::size_t pick = n;
        for (std::size_t i = 0; i < n; ++i)
            if (!used[i] && (pick == n || best[i] < best[pick])) pick = i;
        used[pick] = 1;
        total += best[pick];
        for (std::size_t i = 0; i < n; ++i)
            if (!used[i]) best[i] = std::min(best[i], lat.distance(points[pick], points[i], metric));
    }
    return total;
}

// tau(X): minimal tree length over the block anchors, in block-side units.
// Zero for a single block, 1 for two touching blocks.
inline double polymer_tau(const TorusLattice& lat, const Polymer& x, Metric metric = Metric::Linf) {
    if (x.blocks.empty()) throw std::invalid_argument("polymer_tau: empty polymer");
    if (!polymer_connected(lat, x.blocks)) throw std::invalid_argument("polymer_tau: disconnected block set");
    std::vector<Coords> anchors;
    anchors.reserve(x.blocks.size());
    for (auto b : x.blocks) anchors.push_back(lat.block_anchor(b));
    return minimal_tree_length(lat, anchors, metric) / lat.block_side();
}

// All connected polymers containing `root` with at most `max_blocks` blocks.
inline std::vector<Polymer> enumerate_connected_polymers(const TorusLattice& lat, std::int64_t root,
                                                         int max_blocks,
                                                         std::size_t safety_cap = 2'000'000) {
    if (max_blocks < 1 || max_blocks > 6)
        throw std::invalid_argument("enumerate_connected_polymers: max_blocks must be in [1,6]");
    std::set<std::vector<std::int64_t>> seen;
    std::vector<Polymer> out;
    std::vector<std::vector<std::int64_t>> frontier{{root}};
    seen.insert({root});
    out.push_back({{root}});
    for (int sz = 2; sz <= max_blocks; ++sz) {
        std::vector<std::vector<std::int64_t>> next;
        for (const auto& poly : frontier) {
            std::set<std::int64_t> candidates;
            for (auto b : poly)
                for (auto nb : lat.block_neighbors(b)) candidates.insert(nb);
            for (auto b : poly) candidates.erase(b);
            for (auto nb : candidates) {
                std::vector<std::int64_t> grown = poly;
                grown.insert(std::lower_bound(grown.begin(), grown.end(), nb), nb);
                if (seen.insert(grown).second) {
                    next.push_back(grown);
                    out.push_back({grown});
                    if (out.size() > safety_cap)
                        throw std::runtime_error("enumerate_connected_polymers: safety cap exceeded");
                }
            }
        }
        frontier = std::move(next);
    }
    return out;
}

}  // namespace latgap
