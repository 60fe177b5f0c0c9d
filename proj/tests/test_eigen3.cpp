#include "doctest.h"

#include <cmath>
#include <random>
#include <stdexcept>

#include "support/oracles.hpp"
#include "vesselprep/eigen3.hpp"

using namespace vesselprep;
namespace vt = vesselprep::testing;

TEST_CASE("diagonal matrices return their entries") {
    const EigenTriple e = eigen3_symmetric(1, 1, 1, 0, 0, 0);
    CHECK(e.lam1 == 1.0);
    CHECK(e.lam2 == 1.0);
    CHECK(e.lam3 == 1.0);

    const EigenTriple f = eigen3_symmetric(3, -1, 2, 0, 0, 0);
    CHECK(f.lam1 == -1.0);   // ordered by |.|
    CHECK(f.lam2 == 2.0);
    CHECK(f.lam3 == 3.0);
}

TEST_CASE("known off-diagonal case") {
    // [[2,1,0],[1,2,0],[0,0,5]] has eigenvalues 1, 3, 5.
    const EigenTriple e = eigen3_symmetric(2, 2, 5, 1, 0, 0);
    CHECK(e.lam1 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(e.lam2 == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(e.lam3 == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("non-finite input throws") {
    CHECK_THROWS_AS(eigen3_symmetric(std::nan(""), 0, 0, 0, 0, 0), std::invalid_argument);
}

namespace {

void check_against_oracle(double xx, double yy, double zz, double xy, double xz, double yz,
                          double rel_tol) {
    const EigenTriple e = eigen3_symmetric(xx, yy, zz, xy, xz, yz);
    const auto oracle = vt::charpoly_eigenvalues(xx, yy, zz, xy, xz, yz);

    double got[3] = {e.lam1, e.lam2, e.lam3};
    std::sort(got, got + 3);
    const double norm2 = std::max({std::abs(oracle[0]), std::abs(oracle[2]), 1e-30});
    for (int i = 0; i < 3; ++i)
        CHECK(std::abs(got[i] - oracle[i]) <= rel_tol * norm2);

    // invariants against trace and determinant
    const double tr = xx + yy + zz;
    const double det = xx * (yy * zz - yz * yz) - xy * (xy * zz - yz * xz) + xz * (xy * yz - yy * xz);
    const double scale = std::max(1e-30, norm2);
    CHECK(std::abs((e.lam1 + e.lam2 + e.lam3) - tr) <= 1e-6 * scale);
    CHECK(std::abs(e.lam1 * e.lam2 * e.lam3 - det) <= 1e-6 * scale * scale * scale);
}

}  // namespace

TEST_CASE("random symmetric matrices match the characteristic-polynomial oracle") {
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 20000; ++i)
        check_against_oracle(u(rng), u(rng), u(rng), u(rng), u(rng), u(rng), 1e-7);
}

TEST_CASE("near-degenerate spectra stay accurate") {
    // The char-poly oracle loses digits at (nearly) multiple roots, so these
    // cases check against construction-known spectra instead.
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);

    SUBCASE("scaled identity plus noise keeps all eigenvalues within the perturbation") {
        for (int i = 0; i < 2000; ++i) {
            const double eps = 1e-10;
            const EigenTriple e =
                eigen3_symmetric(2.0 + eps * u(rng), 2.0 + eps * u(rng), 2.0 + eps * u(rng),
                                 eps * u(rng), eps * u(rng), eps * u(rng));
            for (double lam : {e.lam1, e.lam2, e.lam3}) CHECK(std::abs(lam - 2.0) <= 4.0 * eps);
        }
    }
    SUBCASE("rank one has spectrum (0, 0, |v|^2)") {
        // acos near +-1 costs sqrt(eps) of accuracy at double roots; 5e-8
        // relative stays well inside the 1e-7 contract.
        for (int i = 0; i < 2000; ++i) {
            const double a = u(rng), b = u(rng), c = u(rng);
            const double norm2 = a * a + b * b + c * c;
            const double tol = 5e-8 * std::max(norm2, 1e-30);
            const EigenTriple e = eigen3_symmetric(a * a, b * b, c * c, a * b, a * c, b * c);
            CHECK(std::abs(e.lam1) <= tol);
            CHECK(std::abs(e.lam2) <= tol);
            CHECK(std::abs(e.lam3 - norm2) <= tol);
        }
    }
    SUBCASE("exact zero matrix") {
        const EigenTriple e = eigen3_symmetric(0, 0, 0, 0, 0, 0);
        CHECK(e.lam1 == 0.0);
        CHECK(e.lam2 == 0.0);
        CHECK(e.lam3 == 0.0);
    }
    SUBCASE("tiny off-diagonals fall back to the diagonal") {
        const EigenTriple e = eigen3_symmetric(4, 2, -3, 1e-18, 0, -1e-18);
        CHECK(e.lam1 == 2.0);
        CHECK(e.lam2 == -3.0);
        CHECK(e.lam3 == 4.0);
    }
}

TEST_CASE("ordering is by absolute value") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        const EigenTriple e = eigen3_symmetric(u(rng), u(rng), u(rng), u(rng), u(rng), u(rng));
        CHECK(std::abs(e.lam1) <= std::abs(e.lam2) + 1e-18);
        CHECK(std::abs(e.lam2) <= std::abs(e.lam3) + 1e-18);
    }
}
