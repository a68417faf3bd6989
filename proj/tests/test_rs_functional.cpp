#include <doctest.h>

#include <random>

#include "nct/errors.hpp"
#include "nct/rs_functional.hpp"

using namespace nct;

namespace {

const Theta th("0.70710678118654757");
const ModuleGeometry geo(0, -1, 1, 0, th, cplx(0, 1));
const ModuleGeometry geo2(1, 0, 1, 1, th, cplx(0, 1));

FourierElement U(int k, int l) { return FourierElement::monomial(th, k, l); }
FourierElement zero() { return FourierElement::scalar(th, 0.0); }

FourierElement random_sa(std::mt19937& rng, int box, double scale) {
    std::normal_distribution<double> n(0.0, 1.0);
    FourierElement a(th, box);
    for (int k = -box; k <= box; ++k)
        for (int l = -box; l <= box; ++l) a.set(k, l, cplx(n(rng), n(rng)) / double(1 + k * k + l * l));
    FourierElement s = (a + star(a)) * cplx(0.5);
    s.set(0, 0, 0.0);
    return s * cplx(scale / s.l1_norm());
}

double fd_F(const FourierElement& h, const FourierElement& a, double eps) {
    return (F_functional(h + a * cplx(eps), geo) - F_functional(h - a * cplx(eps), geo)) / (2 * eps);
}

}  // namespace

TEST_CASE("geometry constants") {
    CHECK(geo.rk() == doctest::Approx(0.70710678118654757));
    CHECK(geo.mu() == doctest::Approx(std::sqrt(2.0)));
    CHECK(geo.theta_prime() == doctest::Approx(-std::sqrt(2.0)));
    CHECK(geo.dual().mu() < 0);
    CHECK_THROWS_AS(ModuleGeometry(1, 1, 1, 1, th, cplx(0, 1)), RejectedInput);
}

TEST_CASE("flat densities") {
    const double mt = 2 * kPi * geo.mu();
    auto d = curvature_densities(zero(), geo);
    CHECK(std::abs(trace(d.plus) + mt) < 1e-13);
    CHECK(std::abs(trace(d.minus) - mt) < 1e-13);
    CHECK(d.plus.support_box(1e-15) == 0);
    CHECK(d.mu_term == doctest::Approx(mt));

    auto h = (U(1, 0) + U(-1, 0)) * cplx(0.1) + (U(0, 1) + U(0, -1)) * cplx(0.05);
    auto dh = curvature_densities(h, geo);
    CHECK(max_diff(dh.graded, dh.plus - dh.minus) == 0.0);
    CHECK(is_self_adjoint(dh.minus, 1e-12));
    // the heat density of k dd* k is k^{-1} K_+ k, which is self-adjoint while K_+ is not
    auto conj = mul(mul(nct::exp(h * cplx(-0.5)), dh.plus), nct::exp(h * cplx(0.5)));
    CHECK(is_self_adjoint(conj, 1e-12));
    CHECK(!is_self_adjoint(dh.plus, 1e-6));
    // first order in h: 1/6 Lambda h for Delta^+ and -1/3 Lambda h for Delta^-
    auto h1 = h * cplx(1e-4);
    CHECK(max_diff(intrinsic_curvature(h1, geo.tau, Sign::plus), laplacian_tau(h1, geo.tau) * cplx(1.0 / 6)) < 1e-8);
    CHECK(max_diff(intrinsic_curvature(h1, geo.tau, Sign::minus), laplacian_tau(h1, geo.tau) * cplx(-1.0 / 3)) < 1e-8);
}

TEST_CASE("Q and F") {
    for (double e : {0.05, 0.2}) {
        auto h = (U(1, 0) + U(-1, 0)) * cplx(e);
        CHECK(positivity_form(h, geo.tau) == doctest::Approx(-8 * kPi * kPi * e * e / 3).epsilon(1e-12));
    }
    CHECK(positivity_form(FourierElement::scalar(th, 0.7), geo.tau) == 0.0);
    CHECK(F_functional(zero(), geo) == doctest::Approx(-logdet_flat(geo)).epsilon(1e-15));
    CHECK(logdet_flat(geo) == doctest::Approx(-0.5 * std::log(2 * std::sqrt(2.0))).epsilon(1e-15));

    std::mt19937 rng(9);
    auto h = random_sa(rng, 1, 0.3);
    auto shifted = h + FourierElement::scalar(th, 0.37);
    CHECK(std::abs(F_functional(shifted, geo) - F_functional(h, geo)) < 1e-14);
    CHECK_THROWS_AS(F_functional(h, geo.dual()), UnsupportedOrientation);

    int neg = 0;
    for (int i = 0; i < 8; ++i) neg += positivity_form(random_sa(rng, 2, 0.3), geo.tau) < 0;
    CHECK(neg == 8);
    CHECK(measured_orientation(geo.tau, th) == -1);
    CHECK(F_functional(h, geo) > F_functional(zero(), geo));
}

TEST_CASE("variation formula along s h") {
    std::mt19937 rng(10);
    auto h = random_sa(rng, 1, 0.3);
    h.set(0, 0, 0.2);
    for (double s : {0.3, 1.0}) {
        const double e = 1e-4;
        const double fd = (rs_logdet_closed(h * cplx(s + e), geo) - rs_logdet_closed(h * cplx(s - e), geo)) / (2 * e);
        CHECK(std::abs(logdet_variation(h, geo, s) - fd) < 1e-6);
    }
}

TEST_CASE("gradient") {
    CHECK(gradient(zero(), geo).max_abs() < 1e-15);
    std::mt19937 rng(11);
    for (int i = 0; i < 3; ++i) {
        auto h = random_sa(rng, 1, 0.3);
        auto a = random_sa(rng, 1, 1.0);
        a.set(0, 0, 0.25);
        const double lhs = pairing(gradient(h, geo), a, geo);
        const double fd = fd_F(h, a, 1e-4);
        CHECK(std::abs(lhs - fd) < 1e-6);
        // the unconjugated form is off at first order in the commutators
        CHECK(std::abs(pairing(gradient_printed(h, geo.tau), a, geo) - fd) > 1e-7);
    }
    // geometry independence
    auto h = random_sa(rng, 1, 0.2);
    CHECK(max_diff(gradient(h, geo), gradient(h, geo2)) == 0.0);
}

TEST_CASE("gradient flow") {
    auto fixed = extremize(zero(), geo, -1);
    CHECK(fixed.converged);
    CHECK(fixed.trajectory.size() == 1);

    auto U1U2 = mul(U(1, 0), U(0, 1));
    for (const auto& h0 : {(U(1, 0) + U(-1, 0)) * cplx(0.3),
                           (U(0, 1) + U(0, -1)) * cplx(0.2) + (U1U2 + star(U1U2)) * cplx(0.1)}) {
        auto r = extremize(h0, geo, measured_orientation(geo.tau, th));
        CHECK(r.converged);
        CHECK(r.trajectory.size() <= 201);
        for (std::size_t i = 1; i < r.trajectory.size(); ++i) CHECK(r.trajectory[i].F <= r.trajectory[i - 1].F);
        CHECK(r.trajectory.back().dist <= 1e-6);
    }
}
