#include <doctest.h>

#include <random>

#include "nct/errors.hpp"
#include "nct/nc_algebra.hpp"

using namespace nct;

namespace {

const Theta th("0.70710678118654757");

FourierElement U1() { return FourierElement::monomial(th, 1, 0); }
FourierElement U2() { return FourierElement::monomial(th, 0, 1); }

FourierElement random_element(std::mt19937& rng, int box) {
    std::normal_distribution<double> n(0.0, 1.0);
    FourierElement a(th, box);
    for (int k = -box; k <= box; ++k)
        for (int l = -box; l <= box; ++l) a.set(k, l, cplx(n(rng), n(rng)) / double(1 + k * k + l * l));
    return a;
}

FourierElement random_sa(std::mt19937& rng, int box, double scale) {
    auto a = random_element(rng, box);
    return (a + star(a)) * cplx(0.5 * scale / a.l1_norm());
}

}  // namespace

TEST_CASE("theta keeps an exact decimal and reduces phases mod 1") {
    Theta t("0.25");
    CHECK(t.str() == "0.25");
    CHECK(std::abs(t.phase(4) - cplx(1, 0)) < 1e-15);
    CHECK(std::abs(t.phase(1) - cplx(0, 1)) < 1e-15);
    CHECK(std::abs(t.phase(-1) - cplx(0, -1)) < 1e-15);
    Theta big("0.70710678118654757");
    const long long n = 123456789LL;
    const long double ref = std::fmod(0.70710678118654757L * n, 1.0L);
    CHECK(std::abs(double(big.frac_times(n) - ref)) < 1e-9);
    CHECK(Theta::from_double(0.5) == Theta("0.5"));
    CHECK(Theta("1e-3").str() == "0.001");
    CHECK_THROWS_AS(Theta("abc"), RejectedInput);
}

TEST_CASE("commutation relation U2 U1 = e^{2 pi i theta} U1 U2") {
    auto p = mul(U2(), U1());
    CHECK(std::abs(p.coeff(1, 1) - th.phase(1)) < 1e-15);
    CHECK(std::abs(mul(U1(), U2()).coeff(1, 1) - 1.0) < 1e-15);
}

TEST_CASE("unit and brute-force reordering") {
    std::mt19937 rng(1);
    auto a = random_element(rng, 2);
    auto one = FourierElement::scalar(th, 1.0);
    CHECK(max_diff(mul(one, a), a) < 1e-15);
    CHECK(max_diff(mul(a, one), a) < 1e-15);
    // U1 U2 U1 U2 = U1 (U2 U1) U2 = q U1^2 U2^2
    auto w = mul(U1(), U2());
    auto p = mul(w, w);
    CHECK(std::abs(p.coeff(2, 2) - th.phase(1)) < 1e-14);
    CHECK(p.l1_norm() == doctest::Approx(1.0));
}

TEST_CASE("associativity, traciality, involution") {
    std::mt19937 rng(7);
    for (int i = 0; i < 10; ++i) {
        auto a = random_element(rng, 2), b = random_element(rng, 3), c = random_element(rng, 1);
        CHECK(max_diff(mul(mul(a, b), c), mul(a, mul(b, c))) < 1e-13);
        CHECK(std::abs(trace(mul(a, b)) - trace(mul(b, a))) < 1e-13);
        CHECK(max_diff(star(star(a)), a) < 1e-15);
        CHECK(max_diff(star(mul(a, b)), mul(star(b), star(a))) < 1e-13);
    }
}

TEST_CASE("star and trace examples") {
    CHECK(trace(FourierElement::scalar(th, 1.0)) == cplx(1.0));
    CHECK(trace(FourierElement::monomial(th, 2, -1)) == cplx(0.0));
    auto s = star(mul(U1(), U2()));
    CHECK(std::abs(s.coeff(-1, -1) - th.phase(1)) < 1e-15);
}

TEST_CASE("derivations") {
    const cplx tau(0.3, 1.2);
    auto d = derive(U1(), Deriv::d1);
    CHECK(std::abs(d.coeff(1, 0) - cplx(0, kTwoPi)) < 1e-14);
    CHECK(derive(FourierElement::scalar(th, 3.0), Deriv::tau, tau).max_abs() == 0.0);
    auto L = laplacian_tau(U1(), tau);
    CHECK(std::abs(L.coeff(1, 0) + 4 * kPi * kPi) < 1e-12);

    std::mt19937 rng(3);
    auto a = random_element(rng, 2), b = random_element(rng, 2);
    for (Deriv w : {Deriv::d1, Deriv::d2, Deriv::tau, Deriv::tau_star}) {
        auto lhs = derive(mul(a, b), w, tau);
        auto rhs = mul(derive(a, w, tau), b) + mul(a, derive(b, w, tau));
        CHECK(max_diff(lhs, rhs) < 1e-11);
        CHECK(std::abs(trace(derive(a, w, tau))) == 0.0);
    }
}

TEST_CASE("laplacian and squares on h = U1 + U1^*") {
    const cplx tau(0, 1);
    auto h = U1() + star(U1());
    CHECK(max_diff(laplacian_tau(h, tau), h * cplx(-4 * kPi * kPi)) < 1e-12);
    CHECK(std::abs(trace(square_re(h, tau)) - 8 * kPi * kPi) < 1e-11);
    CHECK(laplacian_tau(FourierElement::scalar(th, 1.0), tau).max_abs() == 0.0);

    std::mt19937 rng(5);
    auto g = random_sa(rng, 2, 0.5);
    CHECK(is_self_adjoint(square_re(g, cplx(0.2, 0.9)), 1e-12));
    // (delta_tau h)^* = delta_tau^* h, so both products are self-adjoint
    CHECK(is_self_adjoint(square_im(g, cplx(0.2, 0.9)), 1e-12));
}

TEST_CASE("exp, log, inverse") {
    std::mt19937 rng(11);
    auto h = random_sa(rng, 2, 0.3);
    auto k2 = nct::exp(h);
    CHECK(max_diff(nct::log(k2), h) < 1e-12);
    auto inv = nct::inverse(k2);
    auto one = FourierElement::scalar(th, 1.0);
    CHECK(max_diff(mul(k2, inv).project(0), one) < 1e-12);
    CHECK(max_diff(inv, nct::exp(-h)) < 1e-12);
    CHECK_THROWS_AS(nct::inverse(U1() + star(U1())), SingularMetric);
}

TEST_CASE("theta mismatch is rejected") {
    auto a = FourierElement::monomial(Theta("0.5"), 1, 0);
    CHECK_THROWS_AS(mul(a, U1()), RejectedInput);
}

TEST_CASE("json round trip") {
    std::mt19937 rng(2);
    auto a = random_element(rng, 2);
    auto b = element_from_json(to_json(a));
    CHECK(b.theta() == a.theta());
    CHECK(max_diff(a, b) == 0.0);
}

TEST_CASE("hermitian connection") {
    const cplx tau(0.25, 0.8);
    const Theta thp("-1.4142135623730951");
    auto one = FourierElement::scalar(thp, 1.0);
    auto w0 = hermitian_connection(one * cplx(2.0), 0.0, tau);
    CHECK(w0.omega1.max_abs() < 1e-15);
    CHECK(w0.omega2.max_abs() < 1e-15);

    const cplx z(0.3, -0.7);
    auto wz = hermitian_connection(one * cplx(2.0), z, tau);
    auto comb = wz.omega1 + wz.omega2 * std::conj(tau);
    CHECK(max_diff(comb, one * z) < 1e-14);
    CHECK(wz.omega1.support_box(1e-15) == 0);

    auto V1 = FourierElement::monomial(thp, 1, 0);
    auto K = nct::exp((V1 + star(V1)) * cplx(0.1));
    for (double scale : {1.0, 1.0 / 0.7071067811865476}) {
        auto w = hermitian_connection(K, z, tau, scale);
        CHECK(connection_residual(K, w, tau, scale) < 1e-10);
        CHECK(max_diff(w.omega1 + w.omega2 * std::conj(tau), one * z) < 1e-12);
    }
}
