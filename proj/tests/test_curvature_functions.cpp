#include <doctest.h>

#include <cmath>

#include "nct/curvature_functions.hpp"
#include "nct/errors.hpp"

using namespace nct;

TEST_CASE("modified logarithm") {
    CHECK(modified_log(0, 1.0) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(modified_log(0, 2.0) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
    CHECK(h_integral_quadrature(1, {0, 0}, {2.0}, 0) == doctest::Approx(std::log(2.0)).epsilon(1e-13));
    CHECK(modified_log(1, 1.0) == doctest::Approx(0.5).epsilon(1e-13));
    // L_1(u) = -(log u - u + 1)/(u-1)^2 away from 1
    const double u = 3.0;
    CHECK(modified_log(1, u) == doctest::Approx(-(std::log(u) - u + 1) / ((u - 1) * (u - 1))).epsilon(1e-14));
    // H^{(1)}_{(alpha,0)}(u,0) = L_alpha(u)
    for (int a = 0; a <= 3; ++a)
        for (double x : {0.3, 0.97, 1.0, 1.04, 2.0, 4.5})
            CHECK(std::abs(modified_log(a, x) - h_integral_quadrature(1, {a, 0}, {x}, 0)) < 1e-10);
    CHECK_THROWS_AS(modified_log(0, -1.0), DomainError);
}

TEST_CASE("divided differences of x^m log x") {
    CHECK(divided_diff_idm_log({{1.0, 1}, {3.0, 1}}, 0) == doctest::Approx(modified_log(0, 3.0)).epsilon(1e-14));
    CHECK(divided_diff_idm_log({{1.0, 2}}, 0) == doctest::Approx(1.0));
    // H^{(2)}_{(0,0,0)}(2,3;0) = -[1,2,3] log, against quadrature
    const double q = h_integral_quadrature(2, {0, 0, 0}, {2.0, 3.0}, 0);
    CHECK(q == doctest::Approx(std::log(2.0) - 0.5 * std::log(3.0)).epsilon(1e-13));
    CHECK(h_integral_closed(2, {0, 0, 0}, {2.0, 3.0}, 0) == doctest::Approx(q).epsilon(1e-12));
    CHECK(h_integral_quadrature(1, {0, 0}, {1.0}, 0) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(h_integral_quadrature(2, {0, 0, 0}, {1.0, 1.0}, 1) == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(h_integral_closed(2, {0, 0, 0}, {1.0, 1.0}, 1) == doctest::Approx(0.5).epsilon(1e-13));
    // general closed form vs quadrature over a few multi-indices
    for (int a0 = 0; a0 <= 2; ++a0)
        for (int a1 = 0; a1 <= 1; ++a1)
            for (int m = 0; m <= 1; ++m) {
                const double c = h_integral_closed(2, {a0, a1, 0}, {0.4, 2.5}, m);
                const double d = h_integral_quadrature(2, {a0, a1, 0}, {0.4, 2.5}, m);
                CHECK(std::abs(c - d) < 1e-10);
            }
    CHECK_THROWS_AS(divided_diff_idm_log({{0.0, 1}}, 0), DomainError);
}

TEST_CASE("two-variable integrals in terms of modified logs") {
    // H^{(2)}_{(a0,0,0)}(u,v,0) = -(L_a0(v) - L_a0(u))/(v-u)
    for (int a0 = 0; a0 <= 2; ++a0) {
        const double u = 0.7, v = 2.2;
        const double rhs = -(modified_log(a0, v) - modified_log(a0, u)) / (v - u);
        CHECK(std::abs(h_integral_quadrature(2, {a0, 0, 0}, {u, v}, 0) - rhs) < 1e-10);
        // a1 = 1: derivative in u, by a central difference of the a1 = 0 formula
        const double e = 1e-4;
        auto g = [&](double x) { return (modified_log(a0, v) - modified_log(a0, x)) / (v - x); };
        const double d1 = (g(u + e) - g(u - e)) / (2 * e);
        CHECK(std::abs(h_integral_quadrature(2, {a0, 1, 0}, {u, v}, 0) - d1) < 1e-7);
        // m = 1 relation: H(u,v,1) = (1/a1)(a1 + u d/du) H_{(a0,a1-1,0)}(u,v,0), a1 = 1
        auto H0 = [&](double x) { return h_integral_quadrature(2, {a0, 0, 0}, {x, v}, 0); };
        const double rel = H0(u) + u * (H0(u + e) - H0(u - e)) / (2 * e);
        CHECK(std::abs(h_integral_quadrature(2, {a0, 1, 0}, {u, v}, 1) - rel) < 1e-7);
    }
}

TEST_CASE("registry limits and examples") {
    CHECK(lookup("K_gamma")->eval_u(1.0) == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(std::abs(lookup("K2")->eval_s(0.0)) < 1e-12);
    CHECK(lookup("L0")->eval_u(1.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(lookup("G3")->eval_uv(1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(lookup("G3")->eval_uv(1.0, 1.0) == doctest::Approx(2 * b_integral(1, 3, 0, 0, 1, 1)).epsilon(1e-12));
    const double l2 = std::log(2.0), l3 = std::log(3.0);
    const double hi = lookup("HIm_gamma")->eval_st(l2, l3);
    CHECK(hi == doctest::Approx(3 / (10 * l2) + 4 / (5 * l3) - 1 / (l2 * l3)).epsilon(1e-13));
    CHECK(hi == doctest::Approx(-0.15219772470898467).epsilon(1e-12));
    // via the transform of the quadrature value of G2
    const double g2q = quadrature_oracle("G2", 2.0, 3.0);
    CHECK(g2q * (2.0 - 1) / l2 * (3.0 - 1) / l3 == doctest::Approx(hi).epsilon(1e-11));
    CHECK_THROWS_AS(lookup("nope"), RejectedInput);
    CHECK_THROWS_AS(lookup("K_gamma")->eval_u(0.0), DomainError);
}

TEST_CASE("Taylor data") {
    const auto& c = lookup("K_gamma")->taylor1();
    CHECK(c[0] == doctest::Approx(-0.5).epsilon(1e-13));
    CHECK(c[1] == doctest::Approx(1.0 / 12).epsilon(1e-13));
    CHECK(std::abs(c[2]) < 1e-14);
    CHECK(c[3] == doctest::Approx(-1.0 / 720).epsilon(1e-11));
    // K_{0,0}(0) = -1/6
    CHECK(lookup("K_eps", 0, 0)->taylor1()[0] == doctest::Approx(-1.0 / 6).epsilon(1e-13));
    // bivariate Taylor reproduces eval near 0
    auto H = lookup("HRe_gamma");
    const auto& T = H->taylor2();
    const double s = 0.13, t = -0.21;
    double acc = 0;
    for (int m = 0; m < T.rows(); ++m)
        for (int n = 0; m + n < T.rows(); ++n) acc += T(m, n) * std::pow(s, m) * std::pow(t, n);
    CHECK(acc == doctest::Approx(H->eval_st(s, t)).epsilon(1e-12));
}

TEST_CASE("continuity across the singular sets") {
    const double r = ModularFunction::kPatchRadius;
    for (const std::string n : {"K_gamma", "L0", "K2", "F_gamma", "K0_CM"}) {
        auto f = lookup(n);
        CHECK(std::abs(f->eval_s(r * (1 + 1e-9)) - f->eval_s(r * (1 - 1e-9))) < 1e-9);
        CHECK(std::abs(f->eval_s(-r * (1 + 1e-9)) - f->eval_s(-r * (1 - 1e-9))) < 1e-9);
    }
    for (const std::string n : {"HRe_gamma", "HIm_gamma", "G1", "G3", "GRe_gamma", "H0_CM", "S_CM"}) {
        auto f = lookup(n);
        for (double t : {0.7, -1.3}) {
            CHECK(std::abs(f->eval_st(r * (1 + 1e-9), t) - f->eval_st(r * (1 - 1e-9), t)) < 1e-9);
            CHECK(std::abs(f->eval_st(t, r * (1 + 1e-9)) - f->eval_st(t, r * (1 - 1e-9))) < 1e-9);
            const double d = r * std::sqrt(2.0);
            CHECK(std::abs(f->eval_st(t, -t + d * (1 + 1e-9)) - f->eval_st(t, -t + d * (1 - 1e-9))) < 1e-9);
        }
    }
}

TEST_CASE("HRe_gamma symmetry as written") {
    // HIm_gamma is symmetric under (s,u) <-> (t,v)
    auto HI = lookup("HIm_gamma");
    for (double s : {-1.1, 0.05, 0.6})
        for (double t : {-0.4, 0.9}) CHECK(std::abs(HI->eval_st(s, t) - HI->eval_st(t, s)) < 1e-12);
    // two displayed expressions for HRe_gamma agree
    auto HR = lookup("HRe_gamma");
    for (double s : {-1.1, 0.6})
        for (double t : {-0.4, 0.9}) {
            const double u = std::exp(s), v = std::exp(t), w = std::exp(s + t);
            const double second = t * (u - 1) * v / (s * (s + t) * (v - 1) * (w - 1)) -
                                  s * u * (v - 1) / (t * (s + t) * (u - 1) * (w - 1)) + (u - v) / ((s + t) * (u - 1) * (v - 1)) +
                                  (t - s) / (s * t * (s + t));
            CHECK(HR->eval_st(s, t) == doctest::Approx(second).epsilon(1e-12));
        }
}

TEST_CASE("transforms") {
    auto K = transform_F_to_K(lookup("F_gamma"));
    auto Kg = lookup("K_gamma");
    for (int i = 0; i < 50; ++i) {
        const double s = -2.0 + 4.0 * i / 49;
        CHECK(std::abs(K->eval_s(s) - Kg->eval_s(s)) < 1e-11);
    }
    for (auto [e1, e2] : {std::pair{0, 0}, {1, 0}, {0, 1}, {1, 1}}) {
        auto HR = transform_G_to_H(lookup("F_eps", e1, e2), lookup("GRe_eps", e1, e2), HKind::Re);
        auto HRd = lookup("HRe_eps", e1, e2);
        auto HI = transform_G_to_H(nullptr, lookup("GIm_eps", e1, e2), HKind::Im);
        auto HId = lookup("HIm_eps", e1, e2);
        auto Kt = transform_F_to_K(lookup("F_eps", e1, e2));
        for (double s : {-1.5, -0.02, 0.4, 1.6})
            for (double t : {-1.2, 0.0, 0.7}) {
                CHECK(std::abs(HR->eval_st(s, t) - HRd->eval_st(s, t)) < 1e-10);
                CHECK(std::abs(HI->eval_st(s, t) - HId->eval_st(s, t)) < 1e-10);
            }
        for (double s : {-1.5, 0.0, 0.4}) CHECK(std::abs(Kt->eval_s(s) - lookup("K_eps", e1, e2)->eval_s(s)) < 1e-11);
    }
    // graded case: gamma-functions are differences of the (0,0) and (1,0) ones
    CHECK(lookup("K_gamma")->eval_s(0.7) ==
          doctest::Approx(lookup("K_eps", 0, 0)->eval_s(0.7) - lookup("K_eps", 1, 0)->eval_s(0.7)).epsilon(1e-12));
}

TEST_CASE("identity, quadrature and limit suites") {
    const auto grid = log_grid(0.2, 5.0, 6);
    for (const auto& rep : {identity_suite(grid), quadrature_suite(grid), limit_suite()})
        for (const auto& r : rep.results) {
            INFO(r.name << " err=" << r.max_err);
            if (!r.informational) CHECK(r.pass);
        }
    // the printed forms are reported as failing identities
    auto rep = identity_suite(grid);
    int printed_fail = 0;
    for (const auto& r : rep.results)
        if (r.informational && !r.pass) ++printed_fail;
    CHECK(printed_fail == 3);
}
