#include <catch2/catch.hpp>

#include <cmath>
#include <numbers>
#include <set>

#include "isoflow/catalog.hpp"

using namespace isoflow;
using namespace isoflow::catalog;
using std::numbers::pi;

TEST_CASE("clifford torus entries") {
    SECTION("n = 2, k = 1: square torus") {
        auto e = clifford_torus(2, 1);
        CHECK(e.config.g == 2);
        CHECK(e.config.n == 2);
        CHECK(e.config.delta == 0.0);
        CHECK(rank2::theta_min(e.config) == Approx(pi / 4).epsilon(1e-14));
        bool saw_a2 = false;
        for (const auto& f : e.facts)
            if (f.quantity == "min_a2_spherical") {
                CHECK(f.value == Approx(2.0));
                saw_a2 = true;
            }
        CHECK(saw_a2);
    }
    SECTION("n = 4, k = 1: delta = 1/2 and theta_min = pi/3") {
        auto e = clifford_torus(4, 1);
        CHECK(e.config.delta == Approx(0.5));
        CHECK(rank2::theta_min(e.config) == Approx(pi / 3).epsilon(1e-14));
        for (const auto& f : e.facts) {
            if (f.quantity == "cos_sq_theta_min") CHECK(f.value == Approx(0.25));
            if (f.quantity == "sin_sq_theta_min") CHECK(f.value == Approx(0.75));
        }
    }
    SECTION("even split has delta = 0 and theta_min = pi/4") {
        auto e = clifford_torus(4, 2);
        CHECK(e.config.delta == 0.0);
        CHECK(rank2::theta_min(e.config) == Approx(pi / 4).epsilon(1e-14));
    }
    SECTION("k > n/2 mirrors the multiplicities") {
        auto e = clifford_torus(4, 3);
        CHECK(e.config.m1 == 1);
        CHECK(e.config.m2 == 3);
    }
    SECTION("bounds are enforced") {
        CHECK_THROWS(clifford_torus(2, 0));
        CHECK_THROWS(clifford_torus(2, 2));
        CHECK_THROWS(clifford_torus(1, 1));
    }
}

TEST_CASE("flag manifold entry") {
    auto e = flag_so3();
    CHECK(e.config.g == 3);
    CHECK(e.config.n == 3);
    CHECK(rank2::theta_min(e.config) == Approx(pi / 6).epsilon(1e-14));
    bool saw_a2 = false, saw_tp = false;
    for (const auto& f : e.facts) {
        if (f.quantity == "min_a2_spherical") {
            CHECK(f.value == Approx(6.0));
            saw_a2 = true;
        }
        if (f.quantity == "t_plus" && f.param && *f.param == Approx(pi / 12)) {
            CHECK(f.value == Approx(std::log(2.0) / 18.0).epsilon(1e-14));
            saw_tp = true;
        }
    }
    CHECK(saw_a2);
    CHECK(saw_tp);
}

TEST_CASE("flag matrix map") {
    SECTION("focal and minimal representatives") {
        auto cplus = flag_matrix(0.0);
        CHECK(cplus[0][0] == Approx(1.0 / std::sqrt(6.0)).epsilon(1e-15));
        CHECK(cplus[1][1] == Approx(1.0 / std::sqrt(6.0)).epsilon(1e-15));
        CHECK(cplus[2][2] == Approx(-2.0 / std::sqrt(6.0)).epsilon(1e-15));

        auto cmin = flag_matrix(pi / 6);
        CHECK(cmin[0][0] == Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
        CHECK(cmin[1][1] == Approx(0.0).margin(1e-15));
        CHECK(cmin[2][2] == Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-14));

        auto cminus = flag_matrix(pi / 3);
        CHECK(cminus[0][0] == Approx(2.0 / std::sqrt(6.0)).epsilon(1e-14));
        CHECK(cminus[1][1] == Approx(-1.0 / std::sqrt(6.0)).epsilon(1e-14));
        CHECK(cminus[2][2] == Approx(-1.0 / std::sqrt(6.0)).epsilon(1e-14));
    }
    SECTION("trace free with unit Frobenius norm, eigenvalues on the diagonal") {
        for (int j = 0; j <= 32; ++j) {
            double theta = pi / 3 * j / 32.0;
            auto m = flag_matrix(theta);
            CHECK(m[0][0] + m[1][1] + m[2][2] == Approx(0.0).margin(1e-14));
            double fro = 0.0;
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) fro += m[a][b] * m[a][b];
            CHECK(std::sqrt(fro) == Approx(1.0).margin(1e-14));
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                    if (a != b) CHECK(m[a][b] == 0.0);
        }
    }
    SECTION("range check") {
        CHECK_THROWS_AS(flag_matrix(-0.1), std::domain_error);
        CHECK_THROWS_AS(flag_matrix(pi / 3 + 0.1), std::domain_error);
    }
}

TEST_CASE("standard suite") {
    auto suite = standard_suite();
    REQUIRE(suite.size() >= 9);

    SECTION("covers every admissible g and the named cases") {
        std::set<int> gs;
        bool has_g6_22 = false, has_g1 = false;
        for (const auto& e : suite) {
            gs.insert(e.config.g);
            if (e.config.g == 6 && e.config.m1 == 2 && e.config.m2 == 2) {
                has_g6_22 = true;
                CHECK(e.config.n == 12);
            }
            if (e.config.g == 1) has_g1 = true;
        }
        CHECK(gs == std::set<int>{1, 2, 3, 4, 6});
        CHECK(has_g6_22);
        CHECK(has_g1);
    }

    SECTION("every entry is valid and satisfies cos(g theta_min) = -delta") {
        for (const auto& e : suite) {
            CHECK(entry_valid(e));
            double tm = rank2::theta_min(e.config);
            CHECK(std::abs(std::cos(e.config.g * tm) + e.config.delta) <= 1e-14);
        }
    }

    SECTION("every documented fact re-derives within its tolerance") {
        for (const auto& e : suite) {
            for (const auto& f : e.facts) {
                double got = rederive(e, f);
                INFO(e.name << " / " << f.quantity);
                CHECK(std::abs(got - f.value) <= std::max(f.tol, 1e-15));
            }
        }
    }
}
