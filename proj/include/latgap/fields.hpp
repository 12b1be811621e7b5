#pragma once

// Bosonic field configurations (radial Higgs component rho on sites, gauge
// field A on bonds, vortex field fixed to zero) and the block-level
// small/large field region decomposition.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "latgap/csv.hpp"
#include "latgap/lattice.hpp"

namespace latgap {

class FieldConfig {
public:
    explicit FieldConfig(const TorusLattice& lat)
        : lat_(lat),
          rho_(static_cast<std::size_t>(lat.n_sites()), 0.0),
          a_(static_cast<std::size_t>(lat.n_bonds()), 0.0) {}

    const TorusLattice& lattice() const { return lat_; }

    double rho(std::int64_t site) const { return rho_[static_cast<std::size_t>(site)]; }
    double& rho(std::int64_t site) { return rho_[static_cast<std::size_t>(site)]; }
    double a(std::int64_t site, int mu) const { return a_[static_cast<std::size_t>(site * kDim + mu)]; }
    double& a(std::int64_t site, int mu) { return a_[static_cast<std::size_t>(site * kDim + mu)]; }
    double a(std::int64_t bond) const { return a_[static_cast<std::size_t>(bond)]; }
    double vortex(std::int64_t /*plaquette*/) const { return 0.0; }

    const std::vector<double>& rho_data() const { return rho_; }
    const std::vector<double>& a_data() const { return a_; }
    std::vector<double>& rho_data() { return rho_; }
    std::vector<double>& a_data() { return a_; }

    // Sup of |field value| over a block: the block's sites plus the bonds
    // based at those sites (a bond belongs to the block of its base site).
    double block_sup(std::int64_t block) const {
        double sup = 0.0;
        for (auto s : lat_.block_sites(block)) {
            sup = std::max(sup, std::abs(rho(s)));
            for (int mu = 0; mu < kDim; ++mu) sup = std::max(sup, std::abs(a(s, mu)));
        }
        return sup;
    }

private:
    TorusLattice lat_;
    std::vector<double> rho_;
    std::vector<double> a_;
};

struct Thresholds {
    double p_lambda = 10.0;   // large-field cut
    double p0_lambda = 5.0;   // intermediate cut, must be < p_lambda
    double r_lambda = 2.0;    // contraction depth in block layers
    int q_enlarge = 1;        // layer multiplier for the first contraction
    int p_enlarge = 1;        // layer multiplier for the interior contractions

    void validate() const {
        if (p_lambda <= 0 || p0_lambda <= 0 || r_lambda <= 0)
            throw std::invalid_argument("thresholds must be positive");
        if (!(p0_lambda < p_lambda))
            throw std::invalid_argument("p0_lambda must be < p_lambda");
    }
};

// Block-index sets of the region decomposition. Nesting:
//   interior1 <= interior0 <= interior <= small1 <= small0 <= all blocks.
struct RegionDecomposition {
    std::vector<char> large;                 // Q: a value >= p_lambda somewhere in the block
    std::vector<char> small0;                // Lambda_0 = complement of Q
    std::vector<char> small1;                // Lambda_1: small0 eroded by r_lambda layers
    std::vector<char> intermediate;          // P: blocks of small1 with sup >= p0_lambda
    std::vector<char> interior;              // Omega = small1 - P
    std::vector<char> interior0;             // Omega_0: interior eroded
    std::vector<char> interior1;             // Omega_1: interior0 eroded
    std::vector<char> intermediate_enlarged; // Ptilde = small0 - interior1
    std::vector<char> large_enlarged;        // Qtilde = complement of small1
    bool interior1_empty = false;
    bool all_large_field = false;

    static std::vector<std::int64_t> members(const std::vector<char>& mask) {
        std::vector<std::int64_t> out;
        for (std::size_t i = 0; i < mask.size(); ++i)
            if (mask[i]) out.push_back(static_cast<std::int64_t>(i));
        return out;
    }
    static std::size_t count(const std::vector<char>& mask) {
        std::size_t n = 0;
        for (char c : mask) n += (c != 0);
        return n;
    }
};

// chi: 1 iff every field value in the block is strictly below the threshold.
inline int chi_block(const FieldConfig& config, std::int64_t block, double threshold) {
    return config.block_sup(block) < threshold ? 1 : 0;
}

inline int zeta_block(const FieldConfig& config, std::int64_t block, double threshold) {
    return 1 - chi_block(config, block, threshold);
}

namespace detail {
inline std::vector<char> erode(const TorusLattice& lat, const std::vector<char>& mask, int layers) {
    if (layers <= 0) return mask;
    std::vector<char> out(mask.size(), 0);
    for (std::int64_t b = 0; b < lat.n_blocks(); ++b) {
        if (!mask[static_cast<std::size_t>(b)]) continue;
        bool keep = true;
        for (std::int64_t o = 0; o < lat.n_blocks() && keep; ++o)
            if (lat.block_sup_distance(b, o) <= layers && !mask[static_cast<std::size_t>(o)]) keep = false;
        out[static_cast<std::size_t>(b)] = keep ? 1 : 0;
    }
    return out;
}
}  // namespace detail

inline RegionDecomposition decompose_regions(const FieldConfig& config, const Thresholds& th) {
    th.validate();
    const TorusLattice& lat = config.lattice();
    const std::size_t nb = static_cast<std::size_t>(lat.n_blocks());
    const int r = static_cast<int>(th.r_lambda);

    RegionDecomposition rd;
    rd.large.assign(nb, 0);
    rd.small0.assign(nb, 0);
    for (std::int64_t b = 0; b < lat.n_blocks(); ++b) {
        bool big = zeta_block(config, b, th.p_lambda) == 1;
        rd.large[static_cast<std::size_t>(b)] = big;
        rd.small0[static_cast<std::size_t>(b)] = !big;
    }
    rd.small1 = detail::erode(lat, rd.small0, th.q_enlarge * r);

    rd.intermediate.assign(nb, 0);
    rd.interior.assign(nb, 0);
    for (std::int64_t b = 0; b < lat.n_blocks(); ++b) {
        if (!rd.small1[static_cast<std::size_t>(b)]) continue;
        bool mid = zeta_block(config, b, th.p0_lambda) == 1;
        rd.intermediate[static_cast<std::size_t>(b)] = mid;
        rd.interior[static_cast<std::size_t>(b)] = !mid;
    }
    rd.interior0 = detail::erode(lat, rd.interior, th.p_enlarge * r);
    rd.interior1 = detail::erode(lat, rd.interior0, th.p_enlarge * r);

    rd.intermediate_enlarged.assign(nb, 0);
    rd.large_enlarged.assign(nb, 0);
    for (std::size_t b = 0; b < nb; ++b) {
        rd.intermediate_enlarged[b] = rd.small0[b] && !rd.interior1[b];
        rd.large_enlarged[b] = !rd.small1[b];
    }
    rd.interior1_empty = RegionDecomposition::count(rd.interior1) == 0;
    rd.all_large_field = RegionDecomposition::count(rd.small0) == 0;
    return rd;
}

inline bool region_nesting_ok(const RegionDecomposition& rd) {
    for (std::size_t b = 0; b < rd.small0.size(); ++b) {
        if (rd.interior1[b] && !rd.interior0[b]) return false;
        if (rd.interior0[b] && !rd.interior[b]) return false;
        if (rd.interior[b] && !rd.small1[b]) return false;
        if (rd.small1[b] && !rd.small0[b]) return false;
        if (rd.large[b] == rd.small0[b]) return false;
        if (rd.large_enlarged[b] == rd.small1[b]) return false;
    }
    return true;
}

// Exhaustive check of the decomposition of unity: over all 2^{#blocks}
// region assignments exactly one product chi_{T-Q} zeta_Q is nonzero, it has
// Q = the set found by decompose_regions, and the terms sum to 1.
inline bool decomposition_of_unity_check(const FieldConfig& config, const Thresholds& th) {
    const TorusLattice& lat = config.lattice();
    const int nb = static_cast<int>(lat.n_blocks());
    if (nb > 20) throw std::invalid_argument("decomposition_of_unity_check: too many blocks for exhaustive sweep");
    std::vector<int> chi(nb);
    for (int b = 0; b < nb; ++b) chi[b] = chi_block(config, b, th.p_lambda);

    RegionDecomposition rd = decompose_regions(config, th);
    std::uint64_t expected_q = 0;
    for (int b = 0; b < nb; ++b)
        if (rd.large[static_cast<std::size_t>(b)]) expected_q |= (1ULL << b);

    std::uint64_t sum = 0;
    std::optional<std::uint64_t> nonzero_q;
    for (std::uint64_t q = 0; q < (1ULL << nb); ++q) {
        int term = 1;
        for (int b = 0; b < nb && term; ++b) {
            bool in_q = (q >> b) & 1ULL;
            term = in_q ? (1 - chi[b]) : chi[b];
        }
        if (term) {
            if (nonzero_q.has_value()) return false;
            nonzero_q = q;
        }
        sum += static_cast<std::uint64_t>(term);
    }
    return sum == 1 && nonzero_q.has_value() && *nonzero_q == expected_q;
}

// -- serialization ----------------------------------------------------------
//
// Text table, one value per line:
//   site x y z t rho
//   bond x y z t mu a

inline void save_config(const FieldConfig& config, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    const TorusLattice& lat = config.lattice();
    f << "latgap-config v1 L " << lat.side() << " block " << lat.block_side() << "\n";
    for (std::int64_t s = 0; s < lat.n_sites(); ++s) {
        Coords c = lat.site_coords(s);
        f << "site " << c[0] << ' ' << c[1] << ' ' << c[2] << ' ' << c[3] << ' '
          << fmt_double(config.rho(s)) << "\n";
    }
    for (std::int64_t s = 0; s < lat.n_sites(); ++s) {
        Coords c = lat.site_coords(s);
        for (int mu = 0; mu < kDim; ++mu)
            f << "bond " << c[0] << ' ' << c[1] << ' ' << c[2] << ' ' << c[3] << ' ' << mu << ' '
              << fmt_double(config.a(s, mu)) << "\n";
    }
}

inline FieldConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("load_config: cannot open " + path);
    std::string tag, ver, key;
    int L = 0, bs = 0;
    f >> tag >> ver >> key >> L >> key >> bs;
    if (tag != "latgap-config") throw std::runtime_error("load_config: bad header");
    FieldConfig config{TorusLattice(L, bs)};
    const TorusLattice& lat = config.lattice();
    std::string kind;
    while (f >> kind) {
        Coords c{};
        if (kind == "site") {
            double v;
            f >> c[0] >> c[1] >> c[2] >> c[3] >> v;
            config.rho(lat.site_index(c)) = v;
        } else if (kind == "bond") {
            int mu;
            double v;
            f >> c[0] >> c[1] >> c[2] >> c[3] >> mu >> v;
            config.a(lat.site_index(c), mu) = v;
        } else {
            throw std::runtime_error("load_config: unknown record " + kind);
        }
    }
    return config;
}

inline void write_region_report(const TorusLattice& lat, const RegionDecomposition& rd,
                                const std::string& path, const std::string& config_hash) {
    CsvWriter csv(path,
                  {"bx", "by", "bz", "bt", "in_large", "in_small0", "in_small1", "in_intermediate",
                   "in_interior", "in_interior0", "in_interior1", "in_intermediate_enlarged",
                   "in_large_enlarged"},
                  config_hash);
    for (std::int64_t b = 0; b < lat.n_blocks(); ++b) {
        Coords a = lat.block_anchor(b);
        auto i = static_cast<std::size_t>(b);
        csv.row({std::to_string(a[0]), std::to_string(a[1]), std::to_string(a[2]),
                 std::to_string(a[3]), std::to_string(int(rd.large[i])), std::to_string(int(rd.small0[i])),
                 std::to_string(int(rd.small1[i])), std::to_string(int(rd.intermediate[i])),
                 std::to_string(int(rd.interior[i])), std::to_string(int(rd.interior0[i])),
                 std::to_string(int(rd.interior1[i])), std::to_string(int(rd.intermediate_enlarged[i])),
                 std::to_string(int(rd.large_enlarged[i]))});
    }
    csv.flush();
}

}  // namespace latgap
