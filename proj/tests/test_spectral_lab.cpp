#include <doctest.h>

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "nct/errors.hpp"
#include "nct/spectral_lab.hpp"

using namespace nct;
using Eigen::MatrixXcd;

namespace {

const Theta th("0.70710678118654757");
const ModuleGeometry geo(0, -1, 1, 0, th, cplx(0, 1));

FourierElement U(int k, int l) { return FourierElement::monomial(th, k, l); }
FourierElement one() { return FourierElement::scalar(th, 1.0); }

Eigen::VectorXd eigs(const MatrixXcd& A) { return Eigen::SelfAdjointEigenSolver<MatrixXcd>(A).eigenvalues(); }

}  // namespace

TEST_CASE("oscillator ladder") {
    for (cplx tau : {cplx(0, 1), cplx(0.5, 1.0), cplx(-0.3, 0.7)}) {
        const ModuleGeometry g(0, -1, 1, 0, th, tau);
        const Ladder l = build_ladder(g, 400);
        CHECK(l.c_tau == doctest::Approx(4 * kPi * g.mu() * tau.imag()));
        const auto ev = eigs(l.H);
        double err = 0.0;
        for (int n = 0; n < 50; ++n) err = std::max(err, std::abs(ev(n) - l.c_tau * n) / (l.c_tau * std::max(n, 1)));
        CHECK(err < 1e-10);
        const MatrixXcd comm = l.DDstar - l.H - l.c_tau * MatrixXcd::Identity(400, 400);
        CHECK(comm.cwiseAbs().maxCoeff() < 1e-10 * l.c_tau * 400);
        CHECK((l.H - l.H.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
        // D^* shifts forward: H D^* = D^* (H + c_tau) away from the truncation edge
        const MatrixXcd fwd = l.H * l.Dstar - l.Dstar * (l.H + l.c_tau * MatrixXcd::Identity(400, 400));
        CHECK(fwd.topLeftCorner(380, 380).cwiseAbs().maxCoeff() < 1e-9 * l.c_tau * 400);
    }
    // |c| = 2, mu > 0: kernel of d of dimension 2; the dual has mu < 0 and no kernel
    const ModuleGeometry g2(1, 0, 2, 1, th, cplx(0, 1));
    const auto ev2 = eigs(build_ladder(g2, 60).H);
    CHECK(std::abs(ev2(0)) < 1e-10);
    CHECK(std::abs(ev2(1)) < 1e-10);
    CHECK(ev2(2) > 1.0);
    const ModuleGeometry gd = g2.dual();
    REQUIRE(gd.mu() < 0);
    const Ladder ld = build_ladder(gd, 60);
    CHECK(eigs(ld.H)(0) == doctest::Approx(std::abs(ld.c_tau)).epsilon(1e-10));
    CHECK(std::abs(eigs(ld.DDstar)(0)) < 1e-10);
}

TEST_CASE("closed zeta values") {
    const auto z = zeta_closed(geo);
    CHECK(z.zeta0 == -0.5);
    CHECK(z.zetaprime0 == doctest::Approx(0.5 * std::log(2 * std::sqrt(2.0))).epsilon(1e-15));
    CHECK(z.residue == doctest::Approx(std::abs(geo.rk()) / (4 * kPi)).epsilon(1e-15));
    CHECK(-z.zetaprime0 == doctest::Approx(logdet_flat(geo)).epsilon(1e-15));
}

TEST_CASE("right action matrices") {
    RightAction ra(geo, 100);
    const double w = 2 * kPi * std::sqrt(2.0);
    const auto R1 = ra.matrix(U(1, 0));
    const auto R1s = ra.matrix(U(-1, 0));
    const auto R2 = ra.matrix(U(0, 1));
    CHECK((R1 * R1s - MatrixXcd::Identity(100, 100)).topLeftCorner(60, 60).cwiseAbs().maxCoeff() < 1e-10);
    // <phi_0, e^{2 pi i t} phi_0> = e^{-pi^2/omega}
    CHECK(std::abs(R1(0, 0) - std::exp(-kPi * kPi / w)) < 1e-14);
    // <phi_1, phi_0(. - q)>, coherent amplitude b = q sqrt(omega/2)
    const double b = geo.rk() * std::sqrt(w / 2);
    CHECK(std::abs(R2(1, 0) - b * std::exp(-b * b / 2)) < 1e-14);
    // f U1 U2 = (f U1) U2
    CHECK((R2 * R1 - ra.matrix(mul(U(1, 0), U(0, 1)))).topLeftCorner(60, 60).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((R1.adjoint() - R1s).topLeftCorner(60, 60).cwiseAbs().maxCoeff() < 1e-10);
    const Theta other("0.25");
    CHECK_THROWS_AS(ra.matrix(FourierElement::monomial(other, 1, 0)), RejectedInput);
}

TEST_CASE("twisted laplacians") {
    const auto flat = build_twisted_laplacian(geo, one(), Sign::plus, 80);
    CHECK((flat.matrix - build_ladder(geo, 80).DDstar).cwiseAbs().maxCoeff() < 1e-9);
    const auto h = (U(1, 0) + U(-1, 0)) * cplx(0.1);
    const auto k = nct::exp(h * cplx(0.5));
    const auto A = build_twisted_laplacian(geo, k, Sign::plus, 120);
    CHECK((A.matrix - A.matrix.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(eigs(A.matrix)(0) > 1.0);
    const auto B = build_twisted_laplacian(geo, k, Sign::minus, 120);
    const auto evb = eigs(B.matrix);
    CHECK(std::abs(evb(0)) < 1e-9);  // d^* k^2 d keeps the kernel of d
    CHECK(evb(1) > 1.0);
    CHECK_THROWS_AS(build_twisted_laplacian(geo, U(1, 0), Sign::plus, 20), RejectedInput);
}

TEST_CASE("conjugation reduction") {
    // right action: Tr(R_a e^{-t k L k}) = Tr(R_{k^{-1} a k} e^{-t R_{k^2} L})
    const int M = 160;
    const auto h = (U(1, 0) + U(-1, 0)) * cplx(0.2) + (U(0, 1) + U(0, -1)) * cplx(0.1);
    const auto k = nct::exp(h * cplx(0.5));
    const auto kinv = nct::exp(h * cplx(-0.5));
    const auto a = U(1, 0) + U(-1, 0) + U(0, 1) * cplx(0.3) + U(0, -1) * cplx(0.3);
    RightAction ra(geo, M);
    const auto L = build_ladder(geo, M).DDstar;
    const auto A = build_twisted_laplacian(geo, k, Sign::plus, M);
    const double t = 0.05;
    const MatrixXcd lhs = ra.matrix(a) * (-t * A.matrix).exp();
    const MatrixXcd rhs = ra.matrix(mul(mul(kinv, a), k)) * (-t * ra.matrix(mul(k, k)) * L).exp();
    CHECK(std::abs(lhs.trace() - rhs.trace()) < 1e-10 * std::abs(lhs.trace()));
}

TEST_CASE("flat heat traces and theta check") {
    const ModuleGeometry g2(1, 0, 2, 1, th, cplx(0.3, 0.9));
    for (const auto& g : {geo, g2, g2.dual()}) {
        const Ladder l = build_ladder(g, 300);
        for (Sign s : {Sign::plus, Sign::minus}) {
            const HeatKernel hk({g, l.basis, s == Sign::plus ? l.DDstar : l.H});
            for (double t : log_spaced(0.05, 1.0, 8)) {
                const double ref = flat_heat_trace_closed(g, s, t);
                CHECK(std::abs(hk.trace(t) - ref) < 1e-10 * ref);
            }
        }
    }
    for (double t : log_spaced(0.05, 1.0, 6)) {
        const auto c = theta_trace(g2, t);
        CHECK(std::abs(c.direct - c.dual) < 1e-10 * c.dual);
    }
    const auto small = theta_trace(geo, 0.05);
    CHECK(small.leading == doctest::Approx(0.5 / (4 * kPi * 0.05)).epsilon(1e-14));
}

TEST_CASE("expansion fit") {
    const auto t = log_spaced(0.01, 0.1, 12);
    std::vector<double> v;
    for (double x : t) v.push_back(0.3 / x - 0.5 + 2.0 * x);
    const auto f = fit_expansion(t, v, 3);
    CHECK(f.coeffs[0] == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(f.coeffs[1] == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(f.coeffs[2] == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(f.residual < 1e-12);
    CHECK_THROWS_AS(fit_expansion({0.1, 0.2}, {1.0, 2.0}, 3), FitError);
    CHECK_THROWS_AS(log_spaced(0.2, 0.1, 4), RejectedInput);
}

TEST_CASE("heat coefficients on the asymptotic window") {
    const auto h = (U(1, 0) + U(-1, 0)) * cplx(0.1);
    for (Sign s : {Sign::plus, Sign::minus})
        for (const auto& a : {one(), U(1, 0) + U(-1, 0)}) {
            const auto r = heat_experiment(geo, h, a, s, 400, 0.003, 0.006, 20, 4);
            CHECK(std::abs(r.fit.coeffs[0] - r.a0_expected) < 1e-4 * std::abs(r.a0_expected));
            CHECK(std::abs(r.fit.coeffs[1] - r.a2_expected) < 1e-2 * std::abs(r.a2_expected));
        }
}

TEST_CASE("numerical log determinant") {
    const auto flat = build_twisted_laplacian(geo, one(), Sign::plus, 600);
    const auto r = logdet_numeric(flat);
    CHECK(std::abs(r.value - logdet_flat(geo)) < 1e-6);
    CHECK(r.zeta0 == doctest::Approx(-0.5).epsilon(1e-6));
    // A -> 2A: -zeta'(0) shifts by zeta(0) log 2
    HermiteOperator twice = flat;
    twice.matrix *= 2.0;
    LogDetOptions o;
    o.T /= 2;
    o.fit_lo /= 2;
    o.fit_hi /= 2;
    CHECK(std::abs(logdet_numeric(twice, o).value - (r.value - 0.5 * std::log(2.0))) < 1e-6);

    const auto h = (U(1, 0) + U(-1, 0)) * cplx(0.05) + (U(0, 1) + U(0, -1)) * cplx(0.025);
    const auto A = build_twisted_laplacian(geo, nct::exp(h * cplx(0.5)), Sign::plus, 600);
    CHECK(std::abs(logdet_numeric(A).value - rs_logdet_closed(h, geo)) < 1e-3);

    CHECK_THROWS_AS(logdet_numeric(build_twisted_laplacian(geo, one(), Sign::plus, 100)), FitError);
}
