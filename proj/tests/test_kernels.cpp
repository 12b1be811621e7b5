#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "latgap/kernels.hpp"

using namespace latgap;

TEST_CASE("fermion covariance") {
    SECTION("zero-momentum symbol is 1/m_f") {
        TorusLattice lat(4);
        auto s = fermion_covariance(lat, 3.0);
        Eigen::MatrixXcd sym0 = s.symbol_at(0);
        CHECK((sym0 - Mat4::Identity() / 3.0).norm() < 1e-10);
    }

    SECTION("matches the dense inverse of the shifted Dirac operator") {
        TorusLattice lat(4);
        auto s = fermion_covariance(lat, 3.0);
        Eigen::MatrixXcd d = dirac_dense(lat, nullptr, 0.0, 3.0);
        Eigen::MatrixXcd sinv = d.fullPivLu().inverse();
        CHECK((s.dense() - sinv).cwiseAbs().maxCoeff() < 1e-8);
        // S (Dirac + m) = 1
        CHECK((s.dense() * d - Eigen::MatrixXcd::Identity(d.rows(), d.cols())).cwiseAbs().maxCoeff() <
              1e-8);
    }

    SECTION("gamma5 structure: g5 S(d) g5 = S(-d)^dagger") {
        TorusLattice lat(4);
        auto s = fermion_covariance(lat, 2.0);
        const Clifford& cl = Clifford::instance();
        for (std::int64_t d = 0; d < lat.n_sites(); ++d) {
            Coords c = lat.site_coords(d);
            Coords neg{-c[0], -c[1], -c[2], -c[3]};
            Eigen::MatrixXcd lhs = cl.gamma5 * s.block(d) * cl.gamma5;
            Eigen::MatrixXcd rhs = s.block(lat.site_index(neg)).adjoint();
            CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
        }
    }

    SECTION("periodization: L=8 agrees with L=16 in the central region") {
        auto s8 = fermion_covariance(TorusLattice(8), 3.0);
        auto s16 = fermion_covariance(TorusLattice(16), 3.0);
        auto fit = fit_decay(s16);
        REQUIRE(fit.gamma > 0);
        for (int dx = -2; dx <= 2; ++dx)
            for (int dy = -2; dy <= 2; ++dy) {
                Coords c{dx, dy, 0, 0};
                double sep = s8.separation(s8.lattice().site_index(c));
                double diff = (s8.block(s8.lattice().site_index(c)) -
                               s16.block(s16.lattice().site_index(c)))
                                  .cwiseAbs()
                                  .maxCoeff();
                // image-sum bound: the 3^4 - 1 nearest images sit at distance >= 8 - sep
                CHECK(diff <= 256.0 * fit.c_bound * std::exp(-fit.gamma * (8.0 - sep)));
            }
    }
}

TEST_CASE("boson covariances") {
    TorusLattice lat(4);

    SECTION("scalar symbol at p=0 is 1/mu^2") {
        auto c = scalar_covariance(lat, 2.5);
        CHECK(std::abs(c.symbol_at(0)(0, 0) - 1.0 / 2.5) < 1e-10);
    }

    SECTION("scalar kernel equals dense inverse") {
        const double mu2 = 3.7;
        auto c = scalar_covariance(lat, mu2);
        std::vector<double> basis(static_cast<std::size_t>(lat.n_sites()), 0.0);
        Eigen::MatrixXd t(lat.n_sites(), lat.n_sites());
        for (std::int64_t j = 0; j < lat.n_sites(); ++j) {
            basis[static_cast<std::size_t>(j)] = 1.0;
            auto col = scalar_t_apply(lat, basis, mu2);
            for (std::int64_t i = 0; i < lat.n_sites(); ++i)
                t(i, j) = col[static_cast<std::size_t>(i)];
            basis[static_cast<std::size_t>(j)] = 0.0;
        }
        Eigen::MatrixXd tinv = t.inverse();
        CHECK((c.dense().real() - tinv).cwiseAbs().maxCoeff() < 1e-10);
    }

    SECTION("gauge kernel equals dense inverse and fixes constants at 1/mA^2") {
        const double mA2 = 2.2;
        auto c = gauge_covariance(lat, mA2);
        std::vector<double> basis(static_cast<std::size_t>(lat.n_bonds()), 0.0);
        Eigen::MatrixXd t(lat.n_bonds(), lat.n_bonds());
        for (std::int64_t j = 0; j < lat.n_bonds(); ++j) {
            basis[static_cast<std::size_t>(j)] = 1.0;
            auto col = gauge_t_apply(lat, basis, mA2);
            for (std::int64_t i = 0; i < lat.n_bonds(); ++i)
                t(i, j) = col[static_cast<std::size_t>(i)];
            basis[static_cast<std::size_t>(j)] = 0.0;
        }
        CHECK((c.dense().real() - t.inverse()).cwiseAbs().maxCoeff() < 1e-10);

        // constant bond field: curl-free, so only the mass term survives
        std::vector<cplx> constant(static_cast<std::size_t>(lat.n_bonds()), cplx(1.0));
        auto out = c.apply(constant);
        for (auto v : out) CHECK(std::abs(v - 1.0 / mA2) < 1e-10);
    }
}

TEST_CASE("decay fits") {
    SECTION("synthetic exponential recovers its rate") {
        TorusLattice lat(16);
        KernelTable k(lat, 1);
        for (std::int64_t d = 0; d < lat.n_sites(); ++d)
            k.block(d)(0, 0) = std::exp(-0.7 * k.separation(d));
        auto fit = fit_decay(k);
        CHECK(fit.gamma == Catch::Approx(0.7).margin(1e-6));
        CHECK(fit.residual < 1e-9);
    }

    SECTION("fermion kernel: positive rate, pointwise bound") {
        TorusLattice lat(16);
        auto s = fermion_covariance(lat, 3.0);
        auto fit = fit_decay(s);
        CHECK(fit.gamma > 0);
        CHECK(fit.gamma <= 3.0 + 1.0);  // gamma2 below O(1) * m_f
        CHECK(decay_bound_pointwise(s, fit.c_bound, fit.gamma));
    }

    SECTION("scalar+gauge kernels: positive rate, pointwise bound") {
        TorusLattice lat(16);
        auto cs = scalar_covariance(lat, 9.0);
        auto fs = fit_decay(cs);
        CHECK(fs.gamma > 0);
        CHECK(decay_bound_pointwise(cs, fs.c_bound, fs.gamma));

        auto cg = gauge_covariance(lat, 9.0);
        auto fg = fit_decay(cg);
        CHECK(fg.gamma > 0);
        CHECK(decay_bound_pointwise(cg, fg.c_bound, fg.gamma));
    }

    SECTION("fermion rate nondecreasing in the mass") {
        TorusLattice lat(8);
        double prev = 0.0;
        for (double m : {1.0, 3.0, 6.0, 12.0}) {
            auto s = fermion_covariance(lat, m);
            auto fit = fit_decay(s);
            CHECK(fit.gamma >= prev - 1e-9);
            prev = fit.gamma;
        }
    }
}

TEST_CASE("kernel localization") {
    TorusLattice lat(8);
    auto s = fermion_covariance(lat, 3.0);

    SECTION("partition is exact") {
        auto [local, delta] = localize_kernel(s, 3.0);
        for (std::int64_t d = 0; d < lat.n_sites(); ++d) {
            Eigen::MatrixXcd sum = local.block(d) + delta.block(d);
            CHECK((sum - s.block(d)).cwiseAbs().maxCoeff() == 0.0);
            if (s.separation(d) < 3.0)
                CHECK(delta.block(d).cwiseAbs().maxCoeff() == 0.0);
            else
                CHECK(local.block(d).cwiseAbs().maxCoeff() == 0.0);
        }
    }

    SECTION("radius beyond the diameter keeps everything local") {
        auto [local, delta] = localize_kernel(s, 100.0);
        for (std::int64_t d = 0; d < lat.n_sites(); ++d)
            CHECK(delta.block(d).cwiseAbs().maxCoeff() == 0.0);
    }

    SECTION("tiny radius keeps only the diagonal block") {
        auto [local, delta] = localize_kernel(s, 0.5);
        for (std::int64_t d = 1; d < lat.n_sites(); ++d)
            CHECK(local.block(d).cwiseAbs().maxCoeff() == 0.0);
        CHECK(local.block(0).cwiseAbs().maxCoeff() > 0.0);
    }

    SECTION("far part obeys the fitted decay bound") {
        auto fit = fit_decay(s);
        auto [local, delta] = localize_kernel(s, 2.0);
        double dmax = 0.0;
        for (std::int64_t d = 0; d < lat.n_sites(); ++d) dmax = std::max(dmax, delta.max_abs(d));
        CHECK(dmax <= fit.c_bound * std::exp(-fit.gamma * 2.0));
    }
}

TEST_CASE("local operator invertibility") {
    TorusLattice lat(8);
    auto c = scalar_covariance(lat, 9.0);

    SECTION("full radius reproduces the global condition") {
        auto [local, delta] = localize_kernel(c, 100.0);
        auto full = invertibility_check_local(c);
        auto loc = invertibility_check_local(local);
        CHECK(loc.smallest_singular_value ==
              Catch::Approx(full.smallest_singular_value).epsilon(1e-10));
    }

    SECTION("localized covariance is a small perturbation, improving with r") {
        auto global = invertibility_check_local(c);
        double prev_dev = std::numeric_limits<double>::infinity();
        for (double r : {2.0, 3.0, 4.0}) {
            auto [local, delta] = localize_kernel(c, r);
            auto rep = invertibility_check_local(local);
            CHECK(rep.invertible);
            CHECK(rep.smallest_singular_value > 0.0);
            // |sigma_min(local) - sigma_min(global)| <= ||delta||, bounded by
            // the absolute tail sum of the kernel beyond r.
            double tail = 0.0;
            for (std::int64_t d = 0; d < lat.n_sites(); ++d)
                if (c.separation(d) >= r) tail += c.max_abs(d);
            double dev = std::abs(rep.smallest_singular_value - global.smallest_singular_value);
            CHECK(dev <= tail + 1e-14);
            CHECK(dev <= prev_dev + 1e-14);
            prev_dev = dev;
        }
    }
}
