#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <random>

#include "nct/errors.hpp"
#include "nct/heisenberg_rep.hpp"

using namespace nct;

namespace {

const Theta th("0.70710678118654757");
const ModuleGeometry geo(0, -1, 1, 0, th, cplx(0, 1));
const ModuleGeometry geo2(1, 0, 2, 1, th, cplx(0.3, 0.9));
const Grid grid{24.0, 2048};
constexpr int kBox = 14;  // lattice box wide enough for the packets below

cplx cis(double x) { return std::polar(1.0, kTwoPi * x); }

SampledSection unit_gaussian(int lines = 1) {
    return SampledSection::from_function(grid, lines, [](double t, int a) {
        return a == 0 ? std::pow(2.0, 0.25) * std::exp(-kPi * t * t) : cplx(0);
    });
}

// Two modulated Gaussians per line; narrow when |rk| < 1 so that J(f) still decays on the grid.
SampledSection packet(std::mt19937& rng, const ModuleGeometry& g) {
    const int lines = int(std::abs(g.c));
    const bool narrow = std::abs(g.rk()) < 1;
    std::uniform_real_distribution<double> u(-0.5, 0.5), s(narrow ? 0.6 : 1.0, narrow ? 0.8 : 1.3), nu(-0.3, 0.3);
    std::normal_distribution<double> n(0.0, 1.0);
    struct Bump {
        cplx amp;
        double t0, sigma, freq;
    };
    std::vector<std::vector<Bump>> bumps(static_cast<std::size_t>(lines));
    for (auto& b : bumps)
        for (int i = 0; i < 2; ++i) b.push_back({cplx(n(rng), n(rng)), u(rng), s(rng), nu(rng)});
    return SampledSection::from_function(grid, lines, [&](double t, int a) {
        cplx v = 0;
        for (const auto& b : bumps[std::size_t(a)])
            v += b.amp * std::exp(-kPi * (t - b.t0) * (t - b.t0) / (b.sigma * b.sigma)) * cis(b.freq * t);
        return v;
    });
}

FourierElement random_element(std::mt19937& rng, const Theta& t, int box) {
    std::normal_distribution<double> n(0.0, 1.0);
    FourierElement a(t, box);
    for (int k = -box; k <= box; ++k)
        for (int l = -box; l <= box; ++l) a.set(k, l, cplx(n(rng), n(rng)) / double(1 + k * k + l * l));
    return a;
}

double coeff_diff(const FourierElement& a, const FourierElement& b) {
    const int B = std::max(a.box(), b.box());
    double d = 0.0;
    for (int k = -B; k <= B; ++k)
        for (int l = -B; l <= B; ++l) d = std::max(d, std::abs(a.coeff(k, l) - b.coeff(k, l)));
    return d;
}

double rel(const SampledSection& a, const SampledSection& b) { return max_diff(a, b) / std::max(max_abs(b), 1e-300); }

}  // namespace

TEST_CASE("module actions") {
    std::mt19937 rng(1);
    const auto g0 = unit_gaussian();
    const auto u1 = act_U(geo, 1, g0);
    for (int i : {0, 300, 512, 700})
        CHECK(std::abs(u1.values(i, 0) - cis(grid.point(i)) * g0.values(i, 0)) < 1e-15);
    for (const auto& g : {geo, geo2}) {
        const auto f = packet(rng, g);
        CHECK(rel(act_U(g, 1, act_U(g, 1, f), -1), f) < 1e-12);
        CHECK(rel(act_U(g, 2, act_U(g, 2, f), -1), f) < 1e-12);
        // (f U2) U1 = e^{2 pi i theta} (f U1) U2
        CHECK(rel(act_U(g, 1, act_U(g, 2, f)), act_U(g, 2, act_U(g, 1, f)) * cis(g.theta.value())) < 1e-10);
        // V2 V1 = e^{2 pi i theta'} V1 V2
        CHECK(rel(act_V(g, 2, act_V(g, 1, f)), act_V(g, 1, act_V(g, 2, f)) * cis(g.theta_prime())) < 1e-10);
        // the two actions commute
        for (int j : {1, 2})
            for (int k : {1, 2}) CHECK(rel(act_V(g, j, act_U(g, k, f)), act_U(g, k, act_V(g, j, f))) < 1e-10);
        // module laws for the extended actions
        const auto a = random_element(rng, g.theta, 1), b = random_element(rng, g.theta, 1);
        CHECK(rel(right_action(g, f, mul(a, b)), right_action(g, right_action(g, f, a), b)) < 1e-10);
        const Theta tp = g.theta_prime_exact();
        const auto p = random_element(rng, tp, 1), q = random_element(rng, tp, 1);
        CHECK(rel(left_action(g, mul(p, q), f), left_action(g, p, left_action(g, q, f))) < 1e-10);
    }
    CHECK_THROWS_AS(right_action(geo, g0, FourierElement::monomial(Theta("0.3"), 1, 0)), RejectedInput);
    CHECK_THROWS_AS(act_U(geo2, 1, g0), RejectedInput);
}

TEST_CASE("standard connection") {
    std::mt19937 rng(2);
    const auto g0 = unit_gaussian();
    // d/dt e^{-pi t^2} = -2 pi t e^{-pi t^2}
    const auto d = connection(geo, 1, g0);
    const auto ref = SampledSection::from_function(grid, 1, [](double t, int) {
        return -2 * kPi * t * std::pow(2.0, 0.25) * std::exp(-kPi * t * t);
    });
    CHECK(rel(d, ref) < 1e-12);
    for (const auto& g : {geo, geo2}) {
        const auto f = packet(rng, g);
        const auto comm = connection(g, 1, connection(g, 2, f)) - connection(g, 2, connection(g, 1, f));
        CHECK(rel(comm, f * cplx(0, kTwoPi * g.mu())) < 1e-10);
        // nabla_j (a f b) = a nabla_j(f) b + delta'_j(a) f b + a f delta_j(b)
        const auto a = random_element(rng, g.theta_prime_exact(), 1);
        const auto b = random_element(rng, g.theta, 1);
        auto afb = [&](const FourierElement& x, const SampledSection& s, const FourierElement& y) {
            return right_action(g, left_action(g, x, s), y);
        };
        for (int j : {1, 2}) {
            const Deriv dj = j == 1 ? Deriv::d1 : Deriv::d2;
            const auto lhs = connection(g, j, afb(a, f, b));
            const auto rhs = afb(a, connection(g, j, f), b) + afb(derive(a, dj) * cplx(1.0 / g.rk()), f, b) +
                             afb(a, f, derive(b, dj));
            CHECK(rel(lhs, rhs) < 1e-9);
        }
        // Hermitian for both inner products
        const auto f2 = packet(rng, g);
        const auto ip = inner_products(g, f, f2, kBox);
        for (int j : {1, 2}) {
            const Deriv dj = j == 1 ? Deriv::d1 : Deriv::d2;
            const auto p1 = inner_products(g, connection(g, j, f), f2, kBox);
            const auto p2 = inner_products(g, f, connection(g, j, f2), kBox);
            CHECK(coeff_diff(derive(ip.right, dj), p1.right + p2.right) < 1e-9 * ip.right.max_abs());
            CHECK(coeff_diff(derive(ip.left, dj) * cplx(1.0 / g.rk()), p1.left + p2.left) < 1e-9 * ip.left.max_abs());
        }
    }
}

TEST_CASE("inner products") {
    std::mt19937 rng(3);
    const auto g0 = unit_gaussian();
    const auto ip0 = inner_products(geo, g0, g0, kBox);
    CHECK(std::abs(trace(ip0.right) - 1.0) < 1e-13);
    CHECK(std::abs(ip0.l2 - 1.0) < 1e-13);
    CHECK(ip0.tail < 1e-12);
    CHECK_THROWS_AS(inner_products(geo, g0, g0, 2), QuadratureFailure);

    for (const auto& g : {geo, geo2}) {
        const int m = int(std::abs(g.c));
        const auto f1 = packet(rng, g), f2 = packet(rng, g), f3 = packet(rng, g);
        const auto ip = inner_products(g, f1, f2, kBox);
        // |rk| phi'_0(<f2, f1>_left) = <f1, f2> = phi_0(<f1, f2>_right)
        const auto ip21 = inner_products(g, f2, f1, kBox);
        CHECK(std::abs(std::abs(g.rk()) * trace(ip21.left) - ip.l2) < 1e-9 * std::abs(ip.l2));
        CHECK(std::abs(trace(ip.right) - ip.l2) < 1e-9 * std::abs(ip.l2));
        // lattice coefficients against the module action: coefficient of W = <f1 W, f2>
        for (auto [k, l] : {std::pair{1, 0}, {0, 1}, {1, -1}, {-2, 1}}) {
            const auto w = FourierElement::monomial(g.theta, k, l);
            CHECK(std::abs(ip.right.coeff(k, l) - l2_product(right_action(g, f1, w), f2)) < 1e-10);
            const auto v = FourierElement::monomial(g.theta_prime_exact(), k, l);
            CHECK(std::abs(ip.left.coeff(k, l) - l2_product(left_action(g, v, f2), f1) / std::abs(g.rk())) < 1e-10);
        }
        // A-linearity and associativity f1 <f2, f3>_A = _B<f1, f2> f3
        const auto b = random_element(rng, g.theta, 1);
        const auto lin = inner_products(g, f1, right_action(g, f2, b), kBox);
        CHECK(coeff_diff(lin.right, mul(ip.right, b).project(8)) < 1e-10);
        const auto lhs = right_action(g, f1, inner_products(g, f2, f3, kBox).right);
        const auto rhs = left_action(g, inner_products(g, f1, f2, kBox).left, f3);
        CHECK(rel(lhs, rhs) < 1e-9);
        // W isometry: phi_0(<f1 k, f2 k>_A k^{-2}) = <f1, f2>
        const auto h = (FourierElement::monomial(g.theta, 1, 0) + FourierElement::monomial(g.theta, -1, 0)) * cplx(0.2) +
                       (FourierElement::monomial(g.theta, 0, 1) + FourierElement::monomial(g.theta, 0, -1)) * cplx(0.1);
        const auto k = nct::exp(h * cplx(0.5)).trimmed(1e-15);
        const auto kinv2 = nct::exp(-h);
        // f k spreads in frequency, so only the right sum converges on this box; the trace check covers it
        const auto wk = inner_products(g, right_action(g, f1, k), right_action(g, f2, k), kBox, 1.0);
        CHECK(std::abs(trace(mul(wk.right, kinv2)) - ip.l2) < 1e-9 * std::abs(ip.l2));
    }
}

TEST_CASE("projective representation") {
    std::mt19937 rng(4);
    for (const auto& g : {geo, geo2}) {
        const auto f = packet(rng, g);
        const std::array<double, 2> w{0.3, -0.7}, x{0.4, -0.25}, y{-0.3, 0.6};
        const std::array<double, 2> xy{x[0] + y[0], x[1] + y[1]};
        const double sigma = x[0] * y[1] - x[1] * y[0];
        CHECK(rel(pi_w(g, w, x, pi_w(g, w, y, f)),
                  pi_w(g, w, xy, f) * std::polar(1.0, kPi * g.mu() * sigma)) < 1e-10);
        // pi_w(x) U_j pi_w(x)^* = e^{2 pi i x_j} U_j, same for V_j with x_j / rk
        const std::array<double, 2> mx{-x[0], -x[1]};
        for (int j : {1, 2}) {
            const double xj = x[std::size_t(j - 1)];
            const auto cu = pi_w(g, w, x, act_U(g, j, pi_w(g, w, mx, f)));
            CHECK(rel(cu, act_U(g, j, f) * cis(xj)) < 1e-10);
            const auto cv = pi_w(g, w, x, act_V(g, j, pi_w(g, w, mx, f)));
            CHECK(rel(cv, act_V(g, j, f) * cis(xj / g.rk())) < 1e-10);
        }
        // generators nabla_j + i w_j
        const double e = 1e-4;
        for (int j : {1, 2}) {
            std::array<double, 2> p{0, 0}, q{0, 0};
            p[std::size_t(j - 1)] = e;
            q[std::size_t(j - 1)] = -e;
            const auto fd = (pi_w(g, w, p, f) - pi_w(g, w, q, f)) * cplx(1.0 / (2 * e));
            const auto gen = connection(g, j, f) + f * cplx(0, w[std::size_t(j - 1)]);
            CHECK(rel(fd, gen) < 1e-6);
        }
        // appendix realization: V_j = pi(w_j), f U_j = pi(wt_j) f, L^perp is rho-orthogonal to L
        const auto L = heis_lattices(g);
        CHECK(rel(heis_pi(g, L.w1, f), act_V(g, 1, f)) < 1e-12);
        CHECK(rel(heis_pi(g, L.w2, f), act_V(g, 2, f)) < 1e-12);
        CHECK(rel(heis_pi(g, L.wt1, f), act_U(g, 1, f)) < 1e-12);
        CHECK(rel(heis_pi(g, L.wt2, f), act_U(g, 2, f)) < 1e-12);
        for (const auto& l : {L.w1, L.w2})
            for (const auto& xi : {L.wt1, L.wt2}) CHECK(std::abs(heis_rho(g.c, xi, l) - 1.0) < 1e-12);
        // V1 V2 = rho(w1, w2) V2 V1
        CHECK(std::abs(heis_rho(g.c, L.w1, L.w2) - cis(-g.theta_prime())) < 1e-12);
    }
}

TEST_CASE("J antiisomorphism") {
    std::mt19937 rng(5);
    for (const auto& g : {geo, geo2}) {
        const ModuleGeometry gd = g.dual();
        const int m = int(std::abs(g.c));
        const auto f1 = packet(rng, g), f2 = packet(rng, g);
        const auto J1 = j_map(g, f1), J2 = j_map(g, f2);
        CHECK(rel(j_map(gd, J1), f1) < 1e-10);
        // J(a f b) = b^* J(f) a^*
        const auto a = random_element(rng, g.theta_prime_exact(), 1);
        const auto b = random_element(rng, g.theta, 1);
        const auto lhs = j_map(g, right_action(g, left_action(g, a, f1), b));
        const auto rhs = right_action(gd, left_action(gd, star(b), J1), star(a));
        CHECK(rel(lhs, rhs) < 1e-9);
        const auto ip = inner_products(g, f1, f2, kBox), ipd = inner_products(gd, J1, J2, kBox);
        CHECK(coeff_diff(ipd.left, ip.right) < 1e-9 * ip.right.max_abs());
        CHECK(coeff_diff(ipd.right, ip.left) < 1e-9 * ip.left.max_abs());
        CHECK(std::abs(std::abs(g.rk()) * ipd.l2 - l2_product(f2, f1)) < 1e-9 * std::abs(ip.l2));
        // J d^* J^{-1} = -(1/rk) d'
        const auto F = packet(rng, g);
        const auto push = j_map(g, holomorphic_adjoint(g, j_map(gd, F)));
        CHECK(rel(push, holomorphic(gd, F) * cplx(-1.0 / g.rk())) < 1e-8);
    }
}

TEST_CASE("trace formula") {
    auto gauss = [](const HPoint& x) { return std::exp(-kPi * (x.x1 * x.x1 + x.x2 * x.x2)); };
    const auto r0 = trace_formula(geo, [&](const HPoint& x, int m, int n) { return m == 0 && n == 0 ? gauss(x) : 0.0; });
    CHECK(std::abs(r0.kernel_trace - 1.0) < 1e-8);
    CHECK(std::abs(r0.contraction_at_zero - 1.0) < 1e-15);

    const auto rz = trace_formula(geo, [](const HPoint&, int, int) { return cplx(0); });
    CHECK(std::abs(rz.kernel_trace) == 0.0);

    // lattice coefficients without inversion symmetry
    const LatticeFunction f = [&](const HPoint& x, int m, int n) {
        const double w = std::exp(-0.7 * (m * m + n * n) + 0.4 * m - 0.3 * n);
        const HPoint s{x.x1 - 0.2, x.a1, x.x2 + 0.1, x.a2};
        return w * gauss(s) * cplx(1.0, 0.5 * x.x1) * (x.a1 == 1 ? cplx(0.5, 0.2) : cplx(1.0));
    };
    for (const auto& g : {geo, geo2}) {
        const auto r = trace_formula(g, f);
        CHECK(std::abs(r.kernel_trace - r.contraction_at_zero) < 1e-8);
        CHECK(std::abs(r.kernel_trace - r.sum_statement) < 1e-8);
        CHECK(std::abs(r.kernel_trace - r.sum_proof) < 1e-8);
        CHECK(std::abs(r.kernel_trace - r.sum_dual_trace) < 1e-8);
        CHECK(r.term_statement < 1e-15);
        CHECK(r.term_proof > 1e-3);
        // dominated by l = 0
        CHECK(std::abs(r.kernel_trace - f({}, 0, 0)) < 0.5 * std::abs(r.kernel_trace));
    }
    // trivial coefficients on |c| = 2: trace = f(0_G) with a discrete factor
    const auto r2 = trace_formula(geo2, [&](const HPoint& x, int m, int n) {
        return m == 0 && n == 0 ? gauss(x) * (x.a1 == 0 && x.a2 == 0 ? 1.5 : 0.3) : 0.0;
    });
    CHECK(std::abs(r2.kernel_trace - 1.5) < 1e-8);
    // no decay in the dual variable: the kernel diagonal is not integrable
    CHECK_THROWS_AS(trace_formula(geo, [](const HPoint& x, int m, int n) {
                        return m == 0 && n == 0 ? std::exp(-kPi * x.x1 * x.x1) : 0.0;
                    }),
                    DomainError);
}

TEST_CASE("orthogonality relations") {
    std::mt19937 rng(6);
    const auto g0 = unit_gaussian();
    const auto r0 = orthogonality(geo, g0, g0, g0, g0);
    CHECK(std::abs(r0.lhs - 1.0) < 1e-6);
    // g orthogonal to k: first Hermite function
    const auto h1 = SampledSection::from_function(grid, 1, [](double t, int) {
        return std::pow(2.0, 0.25) * std::sqrt(4 * kPi) * t * std::exp(-kPi * t * t);
    });
    CHECK(std::abs(l2_product(g0, h1)) < 1e-14);
    const auto rp = orthogonality(geo, g0, g0, g0, h1);
    CHECK(std::abs(rp.lhs) < 1e-6);
    CHECK(std::abs(rp.rhs) < 1e-14);
    for (const auto& g : {geo, geo2}) {
        const int m = int(std::abs(g.c));
        const auto a = packet(rng, g), b = packet(rng, g), c = packet(rng, g), d = packet(rng, g);
        const auto r = orthogonality(g, a, b, c, d);
        CHECK(std::abs(r.lhs - r.rhs) < 1e-6 * std::max(1.0, std::abs(r.rhs)));
    }
}

TEST_CASE("Poisson summation") {
    auto g1 = [](const Eigen::VectorXd& x) { return cplx(std::exp(-kPi * x.squaredNorm())); };
    CHECK(poisson_check(g1, g1, Eigen::MatrixXd::Identity(1, 1)) < 1e-12);
    CHECK(poisson_check(g1, g1, 2 * Eigen::MatrixXd::Identity(1, 1)) < 1e-12);
    Eigen::MatrixXd B(2, 2);
    B << 1.0, 0.3, 0.0, 0.8;
    CHECK(poisson_check(g1, g1, B) < 1e-12);
    // a shifted profile with its transform
    auto s = [](const Eigen::VectorXd& x) { return cplx(std::exp(-kPi * (x(0) - 0.3) * (x(0) - 0.3))); };
    auto sh = [](const Eigen::VectorXd& x) { return std::exp(-kPi * x(0) * x(0)) * std::polar(1.0, -kTwoPi * 0.3 * x(0)); };
    CHECK(poisson_check(s, sh, 0.7 * Eigen::MatrixXd::Identity(1, 1)) < 1e-12);

    auto gauss = [](const HPoint& x) { return cplx(std::exp(-kPi * (x.x1 * x.x1 + x.x2 * x.x2))); };
    CHECK(poisson_check_heisenberg(geo, gauss, gauss) < 1e-10);
    // |c| = 2 with a discrete factor chi; fhat = gaussian * (1/|c|) sum rho chi
    auto chi = [](long long a1, long long a2) { return cplx(1.0 + a1, 0.5 * a2 - 0.2 * a1 * a2); };
    auto f2 = [&](const HPoint& x) { return gauss(x) * chi(x.a1, x.a2); };
    auto f2hat = [&](const HPoint& xi) {
        cplx s = 0;
        for (long long a1 = 0; a1 < 2; ++a1)
            for (long long a2 = 0; a2 < 2; ++a2)
                s += std::polar(1.0, kTwoPi * double(xi.a1 * a2 - xi.a2 * a1) / 2.0) * chi(a1, a2) / 2.0;
        return gauss(xi) * s;
    };
    CHECK(poisson_check_heisenberg(geo2, f2, f2hat) < 1e-10);
}

TEST_CASE("grid checks and serialization") {
    const auto wide = SampledSection::from_function(grid, 1, [](double t, int) { return std::exp(-kPi * t * t / 25); });
    CHECK_THROWS_AS(translate(wide, 0.3), GridTooCoarse);
    const auto narrow = SampledSection::from_function(grid, 1, [](double t, int) { return std::exp(-kPi * t * t * 400); });
    CHECK_THROWS_AS(translate(narrow, 0.3), GridTooCoarse);
    const auto g0 = unit_gaussian();
    CHECK(std::abs(interpolate(g0, 0.123, 0) - std::pow(2.0, 0.25) * std::exp(-kPi * 0.123 * 0.123)) < 1e-13);

    std::mt19937 rng(7);
    const auto f = packet(rng, geo2);
    const auto path = (std::filesystem::temp_directory_path() / "nct_section_test").string();
    save_section(f, path);
    const auto back = load_section(path);
    CHECK(back.grid.N == f.grid.N);
    CHECK(back.grid.extent == f.grid.extent);
    CHECK(max_diff(back, f) == 0.0);
    std::remove((path + ".bin").c_str());
    std::remove((path + ".json").c_str());
    CHECK_THROWS_AS(load_section(path), RejectedInput);
}
