#include "nct/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "nct/curvature_functions.hpp"
#include "nct/errors.hpp"
#include "nct/heisenberg_rep.hpp"
#include "nct/rs_functional.hpp"
#include "nct/spectral_lab.hpp"
#include "nct/symbol_engine.hpp"

namespace nct {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

AcceptanceCheck le(std::string name, double measured, double tol, bool informational = false) {
    return {std::move(name), measured, tol, std::isfinite(measured) && measured <= tol, informational, false};
}

AcceptanceCheck ge(std::string name, double measured, double tol, bool informational = false) {
    return {std::move(name), measured, tol, std::isfinite(measured) && measured >= tol, informational, true};
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

const Theta& theta0() {
    static const Theta th("0.70710678118654757");
    return th;
}
ModuleGeometry geo_s() { return {0, -1, 1, 0, theta0(), cplx(0, 1)}; }

FourierElement U(int k, int l) { return FourierElement::monomial(theta0(), k, l); }

FourierElement random_sa(std::mt19937& rng, int box, double scale) {
    std::normal_distribution<double> n(0.0, 1.0);
    FourierElement a(theta0(), box);
    for (int k = -box; k <= box; ++k)
        for (int l = -box; l <= box; ++l) a.set(k, l, cplx(n(rng), n(rng)) / double(1 + k * k + l * l));
    FourierElement s = (a + star(a)) * cplx(0.5);
    s.set(0, 0, 0.0);
    return s * cplx(scale / s.l1_norm());
}

// 1. Symbolic resolvent

CriterionResult criterion1() {
    CriterionResult r{1, "symbolic resolvent b_-4 equals the closed form", {}, 0.0, {}};
    const auto t0 = Clock::now();
    const auto v = sym::verify_theorem_resexp();
    const double secs = elapsed(t0);
    r.checks.push_back(le("b_-4 recursion - closed form: surviving canonical terms", double(v.diff.size()), 0.0));
    r.checks.push_back(le("derivation runtime [s]", secs, 10.0));
    const auto v00 = sym::verify_theorem_resexp({}, 0, 0);
    r.checks.push_back(le("eps = (0,0): surviving canonical terms", double(v00.diff.size()), 0.0));
    r.notes["normalized_terms"] = v.recursion.size();
    return r;
}

// 2. Function identities

CriterionResult criterion2() {
    CriterionResult r{2, "curvature function identities, quadrature oracles and limits", {}, 0.0, {}};
    const auto t0 = Clock::now();
    const auto grid = log_grid(0.2, 5.0, 20);
    auto add = [&](const IdentityReport& rep, const std::string& prefix, double tol) {
        for (const auto& x : rep.results) r.checks.push_back(le(prefix + x.name, x.max_err, tol, x.informational));
    };
    add(quadrature_suite(grid), "quadrature: ", 1e-9);
    add(identity_suite(grid), "identity: ", 1e-10);
    add(limit_suite(), "limit: ", 1e-8);
    r.checks.push_back(le("suite runtime [s]", elapsed(t0), 60.0));
    return r;
}

// 3. Symbolic-to-function round trip

CriterionResult criterion3() {
    CriterionResult r{3, "integrated b_-4 reproduces F, G^Re, G^Im", {}, 0.0, {}};
    const auto contrib = sym::integrate_b4();
    const auto grid = log_grid(0.2, 5.0, 20);
    double eF = 0, eR = 0, eI = 0, eA = 0;
    const auto L0 = lookup("L0");
    for (const auto& [u, v] : grid) eA = std::max(eA, rel(sym::b4_total(contrib, sym::Target::A0, u, v, 0, 0), -L0->eval_u(u)));
    for (auto [p1, p2] : {std::pair{Rational(0), Rational(0)}, {Rational(1), Rational(0)}, {Rational(0), Rational(1)},
                          {Rational(1), Rational(1)}, {Rational(1, 2), Rational(-1, 3)}, {Rational(2), Rational(3)}}) {
        const auto F = lookup("F_eps", p1, p2), GR = lookup("GRe_eps", p1, p2), GI = lookup("GIm_eps", p1, p2);
        const double e1 = p1.value(), e2 = p2.value();
        for (const auto& [u, v] : grid) {
            eF = std::max(eF, rel(sym::b4_total(contrib, sym::Target::F, u, v, e1, e2), F->eval_u(u)));
            eR = std::max(eR, rel(sym::b4_total(contrib, sym::Target::GRe, u, v, e1, e2), GR->eval_uv(u, v)));
            eI = std::max(eI, rel(sym::b4_total(contrib, sym::Target::GIm, u, v, e1, e2), GI->eval_uv(u, v)));
        }
    }
    r.checks.push_back(le("F_eps max rel error", eF, 1e-10));
    r.checks.push_back(le("GRe_eps max rel error", eR, 1e-10));
    r.checks.push_back(le("GIm_eps max rel error", eI, 1e-10));
    r.checks.push_back(le("a0 term vs -L0", eA, 1e-10));
    r.notes["eps"] = "(0,0) (1,0) (0,1) (1,1) (1/2,-1/3) (2,3)";
    return r;
}

// 4. Heisenberg suite

const Grid kGrid{24.0, 2048};
constexpr int kBox = 14;

SampledSection unit_gaussian() {
    return SampledSection::from_function(kGrid, 1, [](double t, int) { return std::pow(2.0, 0.25) * std::exp(-kPi * t * t); });
}

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
    return SampledSection::from_function(kGrid, lines, [&](double t, int a) {
        cplx v = 0;
        for (const auto& b : bumps[std::size_t(a)])
            v += b.amp * std::exp(-kPi * (t - b.t0) * (t - b.t0) / (b.sigma * b.sigma)) * std::polar(1.0, kTwoPi * b.freq * t);
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

double coeff_rel(const FourierElement& a, const FourierElement& b) {
    const int B = std::max(a.box(), b.box());
    double d = 0.0;
    for (int k = -B; k <= B; ++k)
        for (int l = -B; l <= B; ++l) d = std::max(d, std::abs(a.coeff(k, l) - b.coeff(k, l)));
    return d / std::max(b.max_abs(), 1e-300);
}

double srel(const SampledSection& a, const SampledSection& b) { return max_diff(a, b) / std::max(max_abs(b), 1e-300); }

CriterionResult criterion4() {
    CriterionResult r{4, "Heisenberg module suite", {}, 0.0, {}};
    const ModuleGeometry geo = geo_s();
    const ModuleGeometry geo2(1, 0, 2, 1, theta0(), cplx(0.3, 0.9));
    std::mt19937 rng(2024);

    // trace formula
    auto gauss = [](const HPoint& x) { return std::exp(-kPi * (x.x1 * x.x1 + x.x2 * x.x2)); };
    double tr = std::abs(trace_formula(geo, [&](const HPoint& x, int m, int n) {
                             return m == 0 && n == 0 ? gauss(x) : 0.0;
                         }).kernel_trace - 1.0);
    const LatticeFunction f = [&](const HPoint& x, int m, int n) {
        const double w = std::exp(-0.7 * (m * m + n * n) + 0.4 * m - 0.3 * n);
        const HPoint s{x.x1 - 0.2, x.a1, x.x2 + 0.1, x.a2};
        return w * gauss(s) * cplx(1.0, 0.5 * x.x1) * (x.a1 == 1 ? cplx(0.5, 0.2) : cplx(1.0));
    };
    for (const auto& g : {geo, geo2}) {
        const auto t = trace_formula(g, f);
        for (cplx other : {t.contraction_at_zero, t.sum_statement, t.sum_dual_trace})
            tr = std::max(tr, std::abs(t.kernel_trace - other));
    }
    r.checks.push_back(le("trace formula on Gaussians", tr, 1e-8));

    // orthogonality: rank-one case and random packets
    const auto g0 = unit_gaussian();
    double orth = std::abs(orthogonality(geo, g0, g0, g0, g0).lhs - 1.0);
    for (const auto& g : {geo, geo2}) {
        const auto a = packet(rng, g), b = packet(rng, g), c = packet(rng, g), d = packet(rng, g);
        const auto o = orthogonality(g, a, b, c, d);
        orth = std::max(orth, std::abs(o.lhs - o.rhs) / std::max(1.0, std::abs(o.rhs)));
    }
    r.checks.push_back(le("orthogonality relations", orth, 1e-6));

    // Poisson summation
    auto g1 = [](const Eigen::VectorXd& x) { return cplx(std::exp(-kPi * x.squaredNorm())); };
    Eigen::MatrixXd B(2, 2);
    B << 1.0, 0.3, 0.0, 0.8;
    double pois = std::max(poisson_check(g1, g1, 0.7 * Eigen::MatrixXd::Identity(1, 1)), poisson_check(g1, g1, B));
    auto hg = [&](const HPoint& x) { return cplx(gauss(x)); };
    pois = std::max(pois, poisson_check_heisenberg(geo, hg, hg));
    // |c| = 2: a discrete factor chi, fhat = gaussian * (1/|c|) sum rho chi
    auto chi = [](long long a1, long long a2) { return cplx(1.0 + a1, 0.5 * a2 - 0.2 * a1 * a2); };
    auto f2 = [&](const HPoint& x) { return hg(x) * chi(x.a1, x.a2); };
    auto f2hat = [&](const HPoint& xi) {
        cplx s = 0;
        for (long long a1 = 0; a1 < 2; ++a1)
            for (long long a2 = 0; a2 < 2; ++a2)
                s += std::polar(1.0, kTwoPi * double(xi.a1 * a2 - xi.a2 * a1) / 2.0) * chi(a1, a2) / 2.0;
        return hg(xi) * s;
    };
    pois = std::max(pois, poisson_check_heisenberg(geo2, f2, f2hat));
    r.checks.push_back(le("Poisson summation residual", pois, 1e-10));

    double jid = 0, comm = 0, compat = 0, push = 0;
    for (const auto& g : {geo, geo2}) {
        const ModuleGeometry gd = g.dual();
        const auto f1 = packet(rng, g), f2 = packet(rng, g);
        const auto J1 = j_map(g, f1), J2 = j_map(g, f2);
        // J^{-1} J = id, J(a f b) = b^* J(f) a^*, J exchanges the inner products
        jid = std::max(jid, srel(j_map(gd, J1), f1));
        const auto a = random_element(rng, g.theta_prime_exact(), 1);
        const auto b = random_element(rng, g.theta, 1);
        jid = std::max(jid, srel(j_map(g, right_action(g, left_action(g, a, f1), b)),
                                 right_action(gd, left_action(gd, star(b), J1), star(a))));
        const auto ip = inner_products(g, f1, f2, kBox), ipd = inner_products(gd, J1, J2, kBox);
        jid = std::max(jid, coeff_rel(ipd.left, ip.right));
        jid = std::max(jid, coeff_rel(ipd.right, ip.left));
        jid = std::max(jid, std::abs(std::abs(g.rk()) * ipd.l2 - l2_product(f2, f1)) / std::abs(ip.l2));

        const auto c = connection(g, 1, connection(g, 2, f1)) - connection(g, 2, connection(g, 1, f1));
        comm = std::max(comm, srel(c, f1 * cplx(0, kTwoPi * g.mu())));

        const auto ip21 = inner_products(g, f2, f1, kBox);
        compat = std::max(compat, std::abs(std::abs(g.rk()) * trace(ip21.left) - ip.l2) / std::abs(ip.l2));
        compat = std::max(compat, std::abs(trace(ip.right) - ip.l2) / std::abs(ip.l2));

        const auto F = packet(rng, g);
        push = std::max(push, srel(j_map(g, holomorphic_adjoint(g, j_map(gd, F))), holomorphic(gd, F) * cplx(-1.0 / g.rk())));
    }
    r.checks.push_back(le("J antiisomorphism identities", jid, 1e-9));
    r.checks.push_back(le("[nabla_1, nabla_2] - 2 pi i mu", comm, 1e-10));
    r.checks.push_back(le("inner product compatibility", compat, 1e-9));
    r.checks.push_back(le("push-forward of the holomorphic structure", push, 1e-8));
    r.notes["geometries"] = "(0,-1;1,0) tau=i and (1,0;2,1) tau=0.3+0.9i, theta=1/sqrt2";
    return r;
}

// 5. Spectral closed forms

CriterionResult criterion5() {
    CriterionResult r{5, "oscillator spectrum, zeta values, flat heat traces", {}, 0.0, {}};
    const ModuleGeometry geo = geo_s();
    const Ladder l = build_ladder(geo, 400);
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(l.H).eigenvalues();
    const double step = 4 * kPi * std::abs(geo.mu()) * geo.tau.imag();
    double eig = 0.0;
    for (int n = 0; n < 50; ++n) eig = std::max(eig, std::abs(ev(n) - step * n) / (step * std::max(n, 1)));
    r.checks.push_back(le("first 50 eigenvalues vs 4 pi |mu| Im tau n (M=400)", eig, 1e-10));

    const auto z = zeta_closed(geo);
    const double deg = std::abs(double(geo.deg()));
    r.checks.push_back(le("zeta(0) + |deg|/2", std::abs(z.zeta0 + 0.5 * deg), 0.0));
    r.checks.push_back(le("residue - |rk|/(4 pi Im tau)", std::abs(z.residue - std::abs(geo.rk()) / (4 * kPi * geo.tau.imag())), 1e-15));
    const auto flat = build_twisted_laplacian(geo, FourierElement::scalar(theta0(), 1.0), Sign::plus, 600);
    r.checks.push_back(le("fitted zeta(0) from the flat heat trace (M=600)", std::abs(logdet_numeric(flat).zeta0 - z.zeta0), 1e-6, true));

    const ModuleGeometry g2(1, 0, 2, 1, theta0(), cplx(0.3, 0.9));
    double heat = 0.0;
    for (const auto& g : {geo, g2, g2.dual()}) {
        const Ladder lg = build_ladder(g, 300);
        for (Sign s : {Sign::plus, Sign::minus}) {
            const HeatKernel hk({g, lg.basis, s == Sign::plus ? lg.DDstar : lg.H});
            for (double t : log_spaced(0.05, 1.0, 8)) {
                const double ref = flat_heat_trace_closed(g, s, t);
                heat = std::max(heat, std::abs(hk.trace(t) - ref) / ref);
            }
        }
    }
    r.checks.push_back(le("flat heat trace vs geometric series, t in [0.05,1]", heat, 1e-10));
    double theta = 0.0;
    for (const auto& g : {geo, g2})
        for (double t : log_spaced(0.05, 1.0, 8)) {
            const auto c = theta_trace(g, t);
            theta = std::max(theta, std::abs(c.direct - c.dual) / c.dual);
        }
    r.checks.push_back(le("theta-function trace, direct vs dual", theta, 1e-10));
    return r;
}

// 6. Heat coefficients

CriterionResult criterion6() {
    CriterionResult r{6, "heat coefficients a_0, a_2 of the twisted Laplacian", {}, 0.0, {}};
    const ModuleGeometry geo = geo_s();
    const auto h = (U(1, 0) + U(-1, 0)) * cplx(0.1);
    const std::vector<std::pair<std::string, FourierElement>> weights{
        {"a=1", FourierElement::scalar(theta0(), 1.0)}, {"a=U1+U1*", U(1, 0) + U(-1, 0)}};
    auto run = [&](const std::string& tag, int M, double lo, double hi, int terms, bool info) {
        for (const auto& [name, a] : weights) {
            double e0 = std::numeric_limits<double>::infinity(), e2 = e0;
            try {
                const auto x = heat_experiment(geo, h, a, Sign::plus, M, lo, hi, 20, terms);
                e0 = std::abs(x.fit.coeffs[0] - x.a0_expected) / std::abs(x.a0_expected);
                e2 = std::abs(x.fit.coeffs[1] - x.a2_expected) / std::abs(x.a2_expected);
                r.notes[tag + " " + name] = {{"a0_fit", x.fit.coeffs[0]}, {"a0_expected", x.a0_expected},
                                             {"a2_fit", x.fit.coeffs[1]}, {"a2_expected", x.a2_expected}};
            } catch (const Error& ex) {
                r.notes[tag + " " + name] = ex.what();
            }
            r.checks.push_back(le(tag + " " + name + ": a_0 rel error", e0, 0.01, info));
            r.checks.push_back(le(tag + " " + name + ": a_2 rel error", e2, 0.05, info));
        }
    };
    const auto t0 = Clock::now();
    run("t in [0.02,0.2], M=600", 600, 0.02, 0.2, 4, false);
    run("diagnostic t in [0.003,0.006], M=400", 400, 0.003, 0.006, 4, true);
    r.checks.push_back(le("runtime [s]", elapsed(t0), 600.0));
    r.notes["window"] = "traces carry terms ~exp(-0.125/t) from the Fourier modes of a and k; "
                        "the prescribed window is not asymptotic";
    return r;
}

// 7. Gradient consistency

CriterionResult criterion7() {
    CriterionResult r{7, "gradient against finite differences, Morita invariance", {}, 0.0, {}};
    const ModuleGeometry geo = geo_s();
    const ModuleGeometry geo2(1, 0, 1, 1, theta0(), cplx(0, 1));
    std::mt19937 rng(77);
    std::vector<double> lhs, lhs_printed, fd;
    const double eps = 1e-4;
    for (int i = 0; i < 20; ++i) {
        const auto h = random_sa(rng, 1, 0.3);
        auto a = random_sa(rng, 1, 1.0);
        a.set(0, 0, 0.25);
        lhs.push_back(pairing(gradient(h, geo), a, geo));
        lhs_printed.push_back(pairing(gradient_printed(h, geo.tau), a, geo));
        fd.push_back((F_functional(h + a * cplx(eps), geo) - F_functional(h - a * cplx(eps), geo)) / (2 * eps));
    }
    double dot = 0.0;
    for (std::size_t i = 0; i < fd.size(); ++i) dot += lhs[i] * fd[i];
    const double sigma = dot >= 0 ? 1.0 : -1.0;
    double e = 0.0, ep = 0.0;
    for (std::size_t i = 0; i < fd.size(); ++i) {
        e = std::max(e, std::abs(sigma * lhs[i] - fd[i]));
        ep = std::max(ep, std::abs(sigma * lhs_printed[i] - fd[i]));
    }
    r.checks.push_back(le("<grad F, a> vs central FD, 20 pairs", e, 1e-6));
    r.checks.push_back(le("printed gradient form vs central FD", ep, 1e-6, true));
    double morita = 0.0;
    for (int i = 0; i < 3; ++i) {
        const auto h = random_sa(rng, 2, 0.2);
        morita = std::max(morita, max_diff(gradient(h, geo), gradient(h, geo2)));
    }
    r.checks.push_back(le("gradient coefficients (0,-1;1,0) vs (1,0;1,1)", morita, 1e-12));
    r.notes["sigma"] = sigma;
    return r;
}

// 8. Extremum property

CriterionResult criterion8() {
    CriterionResult r{8, "extremum at constants: sign of F, Q, gradient flow", {}, 0.0, {}};
    const ModuleGeometry geo = geo_s();
    std::mt19937 rng(88);
    const double F0 = F_functional(FourierElement::scalar(theta0(), 0.0), geo);
    int pos = 0, neg = 0, qpos = 0, qneg = 0;
    double qmin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 20; ++i) {
        const auto h0 = random_sa(rng, 2, 0.3);
        for (double s : {-1.0, -0.75, -0.5, -0.25, -0.1, 0.1, 0.25, 0.5, 0.75, 1.0}) {
            const double d = F_functional(h0 * cplx(s), geo) - F0;
            (d > 0 ? pos : neg) += 1;
        }
        const double q = positivity_form(h0, geo.tau);
        (q > 0 ? qpos : qneg) += 1;
        qmin = std::min(qmin, std::abs(q));
    }
    r.checks.push_back(le("F(s h0) - F(0): samples against the majority sign", double(std::min(pos, neg)), 0.0));
    r.checks.push_back(le("Q(h0): samples against the majority sign", double(std::min(qpos, qneg)), 0.0));
    double qker = 0.0;
    for (double c : {0.3, -1.2, 2.5}) qker = std::max(qker, std::abs(positivity_form(FourierElement::scalar(theta0(), c), geo.tau)));
    r.checks.push_back(le("|Q| on constants", qker, 1e-10));
    r.checks.push_back(ge("min |Q| off constants", qmin, 1e-10));

    const int orientation = measured_orientation(geo.tau, theta0());
    double dist = 0.0, steps = 0.0;
    int failed = 0;
    for (int i = 0; i < 3; ++i) {
        const auto fr = extremize(random_sa(rng, 1, 0.3), geo, orientation);
        failed += !fr.converged;
        dist = std::max(dist, fr.trajectory.back().dist);
        steps = std::max(steps, double(fr.trajectory.size() - 1));
    }
    r.checks.push_back(le("gradient flow: runs not converged", double(failed), 0.0));
    r.checks.push_back(le("gradient flow: final ||h - phi_0(h) 1||", dist, 1e-6));
    r.checks.push_back(le("gradient flow: steps", steps, 200.0));
    r.notes["F_sign"] = pos > neg ? "+" : "-";
    r.notes["Q_sign"] = qpos > qneg ? "+" : "-";
    r.notes["orientation"] = orientation;
    return r;
}

// 9. Numerical log-determinant

CriterionResult criterion9() {
    CriterionResult r{9, "numerical log-determinant against the closed form", {}, 0.0, {}};
    const ModuleGeometry geo = geo_s();
    const int M = 600;
    const auto flat = build_twisted_laplacian(geo, FourierElement::scalar(theta0(), 1.0), Sign::plus, M);
    const double num0 = logdet_numeric(flat).value;
    const double deg = std::abs(double(geo.deg()));
    const double ref0 = -0.5 * deg * std::log(2 * std::abs(geo.mu()) * geo.tau.imag());
    r.checks.push_back(le("h = 0 vs -1/2 |deg| log(2 |mu| Im tau)", std::abs(num0 - ref0), 1e-6));
    r.checks.push_back(le("h = 0 vs the printed +1/2 |deg| log(2 |mu| Im tau)", std::abs(num0 + ref0), 1e-6, true));
    double e = 0.0;
    const std::vector<FourierElement> hs{(U(1, 0) + U(-1, 0)) * cplx(0.05), (U(0, 1) + U(0, -1)) * cplx(0.05),
                                         (U(1, 0) + U(-1, 0)) * cplx(0.03) + (U(0, 1) + U(0, -1)) * cplx(0.02)};
    for (const auto& h : hs) {
        const auto A = build_twisted_laplacian(geo, nct::exp(h * cplx(0.5)), Sign::plus, M);
        e = std::max(e, std::abs(logdet_numeric(A).value - rs_logdet_closed(h, geo)));
    }
    r.checks.push_back(le("|logdet_numeric - closed|, ||h||_1 <= 0.1", e, 5e-2));
    r.notes["logdet_flat"] = num0;
    return r;
}

}  // namespace

bool CriterionResult::pass() const {
    for (const auto& c : checks)
        if (!c.informational && !c.pass) return false;
    return true;
}

CriterionResult run_criterion(int id) {
    static const std::vector<CriterionResult (*)()> fns{criterion1, criterion2, criterion3, criterion4, criterion5,
                                                        criterion6, criterion7, criterion8, criterion9};
    if (id < 1 || id > int(fns.size())) throw RejectedInput("no acceptance criterion " + std::to_string(id));
    const auto t0 = Clock::now();
    CriterionResult r = fns[std::size_t(id - 1)]();
    r.seconds = elapsed(t0);
    return r;
}

std::vector<CriterionResult> run_acceptance(const std::vector<int>& ids) {
    std::vector<CriterionResult> out;
    for (int id : ids) out.push_back(run_criterion(id));
    return out;
}

nlohmann::json to_json(const CriterionResult& r) {
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : r.checks)
        checks.push_back({{"name", c.name},
                          {"measured", std::isfinite(c.measured) ? nlohmann::json(c.measured) : nlohmann::json(nullptr)},
                          {"tol", c.tol},
                          {"relation", c.at_least ? ">=" : "<="},
                          {"pass", c.pass},
                          {"informational", c.informational}});
    return {{"criterion", r.id}, {"title", r.title}, {"pass", r.pass()},
            {"seconds", r.seconds}, {"checks", checks}, {"notes", r.notes}};
}

std::string summary_line(const CriterionResult& r) {
    std::ostringstream os;
    os.precision(3);
    os << "criterion " << r.id << ": " << (r.pass() ? "PASS" : "FAIL") << "  " << r.title << " (" << std::fixed
       << r.seconds << " s)";
    return os.str();
}

std::string detail_lines(const CriterionResult& r) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific;
    for (const auto& c : r.checks)
        os << "    " << (c.pass ? "ok  " : (c.informational ? "info" : "FAIL")) << "  " << c.name << ": " << c.measured
           << (c.at_least ? " >= " : " <= ") << c.tol << "\n";
    return os.str();
}

}  // namespace nct
