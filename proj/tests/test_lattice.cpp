#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>
#include <set>

#include "latgap/lattice.hpp"

using namespace latgap;

namespace {

// Brute-force distance: scan all 3^4 nearest periodic images.
double image_scan_distance(const TorusLattice& lat, Coords x, Coords y, Metric m) {
    double best = std::numeric_limits<double>::infinity();
    int L = lat.side();
    Coords o{};
    for (o[0] = -1; o[0] <= 1; ++o[0])
        for (o[1] = -1; o[1] <= 1; ++o[1])
            for (o[2] = -1; o[2] <= 1; ++o[2])
                for (o[3] = -1; o[3] <= 1; ++o[3]) {
                    double acc = 0;
                    for (int d = 0; d < kDim; ++d) {
                        double a = std::abs((x[d] - y[d]) + o[d] * L);
                        acc = (m == Metric::Linf) ? std::max(acc, a) : acc + a * a;
                    }
                    if (m == Metric::L2) acc = std::sqrt(acc);
                    best = std::min(best, acc);
                }
    return best;
}

// Brute-force minimum over all labelled spanning trees via Prufer sequences.
double brute_min_spanning_tree(const TorusLattice& lat, const std::vector<Coords>& pts, Metric m) {
    const int n = static_cast<int>(pts.size());
    if (n == 1) return 0.0;
    if (n == 2) return lat.distance(pts[0], pts[1], m);
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> prufer(static_cast<std::size_t>(n - 2), 0);
    const std::int64_t total = static_cast<std::int64_t>(std::pow(n, n - 2));
    for (std::int64_t code = 0; code < total; ++code) {
        std::int64_t c = code;
        for (int i = 0; i < n - 2; ++i) {
            prufer[static_cast<std::size_t>(i)] = static_cast<int>(c % n);
            c /= n;
        }
        std::vector<int> degree(static_cast<std::size_t>(n), 1);
        for (int v : prufer) degree[static_cast<std::size_t>(v)]++;
        std::vector<int> deg = degree;
        double len = 0.0;
        std::set<int> leaves;
        for (int i = 0; i < n; ++i)
            if (deg[static_cast<std::size_t>(i)] == 1) leaves.insert(i);
        for (int v : prufer) {
            int leaf = *leaves.begin();
            leaves.erase(leaves.begin());
            len += lat.distance(pts[static_cast<std::size_t>(leaf)], pts[static_cast<std::size_t>(v)], m);
            if (--deg[static_cast<std::size_t>(v)] == 1) leaves.insert(v);
        }
        int a = *leaves.begin(), b = *std::next(leaves.begin());
        len += lat.distance(pts[static_cast<std::size_t>(a)], pts[static_cast<std::size_t>(b)], m);
        best = std::min(best, len);
    }
    return best;
}

}  // namespace

TEST_CASE("lattice counts and block partition") {
    TorusLattice lat(4, 2);
    CHECK(lat.n_sites() == 256);
    CHECK(lat.n_bonds() == 4 * 256);
    CHECK(lat.n_plaquettes() == 6 * 256);
    CHECK(lat.n_blocks() == 16);

    std::vector<int> hits(static_cast<std::size_t>(lat.n_blocks()), 0);
    for (std::int64_t s = 0; s < lat.n_sites(); ++s)
        hits[static_cast<std::size_t>(lat.block_of_site(lat.site_coords(s)))]++;
    for (int h : hits) CHECK(h == 16);  // block volume 2^4

    CHECK_THROWS(TorusLattice(5, 2));
    CHECK_THROWS(TorusLattice(1, 1));
}

TEST_CASE("torus distance") {
    TorusLattice lat(8);
    CHECK(lat.distance({3, 2, 1, 0}, {3, 2, 1, 0}, Metric::L2) == 0.0);
    CHECK(lat.distance({0, 0, 0, 0}, {7, 0, 0, 0}, Metric::Linf) == 1.0);
    CHECK(lat.distance({0, 0, 0, 0}, {3, 4, 0, 0}, Metric::L2) == Catch::Approx(5.0));

    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> pick(0, 7);
    for (int it = 0; it < 1000; ++it) {
        Coords x{pick(rng), pick(rng), pick(rng), pick(rng)};
        Coords y{pick(rng), pick(rng), pick(rng), pick(rng)};
        Coords z{pick(rng), pick(rng), pick(rng), pick(rng)};
        for (Metric m : {Metric::L2, Metric::Linf}) {
            CHECK(lat.distance(x, y, m) == Catch::Approx(image_scan_distance(lat, x, y, m)).margin(1e-12));
            CHECK(lat.distance(x, y, m) == Catch::Approx(lat.distance(y, x, m)));
            CHECK(lat.distance(x, z, m) <= lat.distance(x, y, m) + lat.distance(y, z, m) + 1e-12);
        }
    }
}

TEST_CASE("minimal tree length") {
    TorusLattice lat(32);
    CHECK(minimal_tree_length(lat, {{1, 2, 3, 4}}, Metric::L2) == 0.0);
    CHECK(minimal_tree_length(lat, {{0, 0, 0, 0}, {3, 4, 0, 0}}, Metric::L2) == Catch::Approx(5.0));

    // Collinear points at 0, 2, 5: total 5 either way, matches brute force.
    std::vector<Coords> pts{{0, 0, 0, 0}, {2, 0, 0, 0}, {5, 0, 0, 0}};
    CHECK(minimal_tree_length(lat, pts, Metric::L2) == Catch::Approx(5.0));
    CHECK(minimal_tree_length(lat, pts, Metric::L2) ==
          Catch::Approx(brute_min_spanning_tree(lat, pts, Metric::L2)));

    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> pick(0, 31);
    for (int it = 0; it < 25; ++it) {
        std::vector<Coords> rpts;
        for (int k = 0; k < 5; ++k) rpts.push_back({pick(rng), pick(rng), pick(rng), pick(rng)});
        for (Metric m : {Metric::L2, Metric::Linf}) {
            double mst = minimal_tree_length(lat, rpts, m);
            CHECK(mst == Catch::Approx(brute_min_spanning_tree(lat, rpts, m)).margin(1e-9));
            // Never worse than visiting the points in any fixed order.
            double chain = 0.0;
            for (std::size_t i = 0; i + 1 < rpts.size(); ++i)
                chain += lat.distance(rpts[i], rpts[i + 1], m);
            CHECK(mst <= chain + 1e-12);
        }
    }
}

TEST_CASE("polymer tau") {
    TorusLattice lat(8, 2);
    std::int64_t b0 = lat.block_of_site({0, 0, 0, 0});
    std::int64_t b1 = lat.block_of_site({2, 0, 0, 0});
    std::int64_t b2 = lat.block_of_site({2, 2, 0, 0});

    CHECK(polymer_tau(lat, {{b0}}) == 0.0);
    CHECK(polymer_tau(lat, {{b0, b1}}) == Catch::Approx(1.0));
    Polymer ell{{b0, b1, b2}};
    std::sort(ell.blocks.begin(), ell.blocks.end());
    CHECK(polymer_tau(lat, ell) == Catch::Approx(2.0));

    std::int64_t far = lat.block_of_site({4, 4, 4, 4});
    CHECK_THROWS(polymer_tau(lat, {{b0, far}}));

    // Translation invariance of tau.
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> shift(0, 3);
    for (int it = 0; it < 50; ++it) {
        Coords t{2 * shift(rng), 2 * shift(rng), 2 * shift(rng), 2 * shift(rng)};
        Polymer moved;
        for (auto b : ell.blocks) {
            Coords a = lat.block_anchor(b);
            for (int d = 0; d < kDim; ++d) a[d] = lat.wrap(a[d] + t[d]);
            moved.blocks.push_back(lat.block_of_site(a));
        }
        std::sort(moved.blocks.begin(), moved.blocks.end());
        CHECK(polymer_tau(lat, moved) == Catch::Approx(polymer_tau(lat, ell)));
    }
}

TEST_CASE("polymer enumeration") {
    TorusLattice lat(4, 1);
    std::int64_t root = lat.block_of_site({0, 0, 0, 0});

    auto singles = enumerate_connected_polymers(lat, root, 1);
    REQUIRE(singles.size() == 1);
    CHECK(singles[0].blocks == std::vector<std::int64_t>{root});

    auto pairs = enumerate_connected_polymers(lat, root, 2);
    CHECK(pairs.size() == 81);  // root alone plus its 3^4 - 1 sup-metric neighbors

    auto triples = enumerate_connected_polymers(lat, root, 3);
    std::set<std::vector<std::int64_t>> uniq;
    for (const auto& p : triples) {
        CHECK(polymer_connected(lat, p.blocks));
        CHECK(std::is_sorted(p.blocks.begin(), p.blocks.end()));
        uniq.insert(p.blocks);
    }
    CHECK(uniq.size() == triples.size());

    CHECK_THROWS(enumerate_connected_polymers(lat, root, 7));
}
