#include "nct/heisenberg_rep.hpp"

#include <fftw3.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <map>

#include <json.hpp>

#include "nct/errors.hpp"

namespace nct {

namespace {

long long md(long long x, long long m) { return ((x % m) + m) % m; }

cplx cis(double x) { return std::polar(1.0, kTwoPi * x); }  // e^{2 pi i x}

// e^{2 pi i p / c} for integers p, c.
cplx cis_ratio(long long p, long long c) {
    const long long m = std::llabs(c);
    return cis(double(md(c > 0 ? p : -p, m)) / double(m));
}

int lines_of(const ModuleGeometry& geo) { return int(std::llabs(geo.c)); }

void require_lines(const ModuleGeometry& geo, const SampledSection& f) {
    if (f.lines() != lines_of(geo)) throw RejectedInput("section: number of lines differs from |c|");
}

void require_same_grid(const SampledSection& a, const SampledSection& b) {
    if (a.grid.N != b.grid.N || a.grid.extent != b.grid.extent || a.lines() != b.lines())
        throw RejectedInput("section: grids differ");
}

Eigen::VectorXcd fft(const Eigen::VectorXcd& x, int dir) {
    Eigen::VectorXcd in = x, out(x.size());
    auto* pi = reinterpret_cast<fftw_complex*>(in.data());
    auto* po = reinterpret_cast<fftw_complex*>(out.data());
    fftw_plan p = fftw_plan_dft_1d(int(x.size()), pi, po, dir, FFTW_ESTIMATE);
    fftw_execute(p);
    fftw_destroy_plan(p);
    return out;
}

int freq_index(int k, int N) { return k < N / 2 ? k : k - N; }

void check_boundary(const SampledSection& f, double tol, const char* what) {
    const double peak = f.values.cwiseAbs().maxCoeff();
    if (peak == 0.0) return;
    const int N = f.grid.N, band = std::max(2, N / 100);
    double edge = 0.0;
    for (int j = 0; j < band; ++j)
        for (int a = 0; a < f.lines(); ++a)
            edge = std::max({edge, std::abs(f.values(j, a)), std::abs(f.values(N - 1 - j, a))});
    if (edge > tol * peak) throw GridTooCoarse(std::string(what) + ": section does not decay at the grid boundary");
}

void check_spectrum(const Eigen::VectorXcd& F, double tol, const char* what) {
    const int N = int(F.size());
    const double peak = F.cwiseAbs().maxCoeff();
    if (peak == 0.0) return;
    double high = 0.0;
    for (int k = 0; k < N; ++k)
        if (std::abs(freq_index(k, N)) >= int(0.4 * N)) high = std::max(high, std::abs(F(k)));
    if (high > tol * peak) throw GridTooCoarse(std::string(what) + ": spectral content near the Nyquist frequency");
}

// Fourier multiplier m(nu) on one column, nu in cycles per unit length; Nyquist bin dropped.
Eigen::VectorXcd apply_multiplier(const Eigen::VectorXcd& col, const Grid& g, const std::function<cplx(double)>& m,
                                  const GridCheck& chk, const char* what) {
    Eigen::VectorXcd F = fft(col, FFTW_FORWARD);
    check_spectrum(F, chk.spectral_tol, what);
    const int N = g.N;
    for (int k = 0; k < N; ++k) F(k) = (k == N / 2) ? cplx(0) : F(k) * m(freq_index(k, N) / g.extent);
    return fft(F, FFTW_BACKWARD) / double(N);
}

// Values of the trigonometric interpolant of one column at arbitrary points.
Eigen::VectorXcd resample(const Eigen::VectorXcd& col, const Grid& g, const std::vector<double>& pts) {
    const Eigen::VectorXcd F = fft(col, FFTW_FORWARD) / double(g.N);
    const double t0 = g.point(0), half = 0.5 * g.extent;
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(Eigen::Index(pts.size()));
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (pts[i] < -half || pts[i] >= half) continue;
        cplx s = 0;
        for (int k = 0; k < g.N; ++k) {
            if (k == g.N / 2) continue;
            s += F(k) * cis(freq_index(k, g.N) * (pts[i] - t0) / g.extent);
        }
        out(Eigen::Index(i)) = s;
    }
    return out;
}

// f(t - s) with the input checked; the output check is optional.
SampledSection shift(const SampledSection& f, double s, bool check_output) {
    GridCheck chk;
    check_boundary(f, chk.boundary_tol, "shift");
    if (!check_output) chk.boundary_tol = std::numeric_limits<double>::infinity();
    return translate(f, s, chk);
}

// Sections shifted as u(t + y1, alpha + b1), the argument pattern of pi(y). Inside
// overlap integrals the periodic wrap is harmless, so the output check is optional.
SampledSection pull(const SampledSection& f, double y1, long long b1, bool check_output = true) {
    const SampledSection s = shift(f, -y1, check_output);
    SampledSection out(f.grid, f.lines());
    const long long m = f.lines();
    for (int a = 0; a < f.lines(); ++a) out.values.col(a) = s.values.col(md(a + b1, m));
    return out;
}

// Zero-padded copy on a grid of odd multiple extent, so that shifts up to `shift`
// stay free of periodic wrap-around in overlap integrals.
SampledSection padded(const SampledSection& f, double shift) {
    int K = 1 + int(std::ceil(std::abs(shift) / f.grid.extent));
    if (K % 2 == 0) ++K;
    if (K == 1) return f;
    SampledSection out(Grid{K * f.grid.extent, K * f.grid.N}, f.lines());
    out.values.middleRows((K - 1) * f.grid.N / 2, f.grid.N) = f.values;
    return out;
}

using Coeffs = std::map<std::pair<int, int>, cplx>;

}  // namespace

SampledSection::SampledSection(Grid g, int lines) : grid(g), values(Eigen::MatrixXcd::Zero(g.N, lines)) {
    if (g.N < 8 || g.N % 2 != 0 || !(g.extent > 0)) throw RejectedInput("grid: N must be even and >= 8, extent > 0");
    if (lines < 1) throw RejectedInput("section: at least one line");
}

SampledSection SampledSection::from_function(Grid g, int lines, const std::function<cplx(double, int)>& f) {
    SampledSection s(g, lines);
    for (int a = 0; a < lines; ++a)
        for (int j = 0; j < g.N; ++j) s.values(j, a) = f(g.point(j), a);
    return s;
}

SampledSection& SampledSection::operator+=(const SampledSection& o) {
    require_same_grid(*this, o);
    values += o.values;
    return *this;
}

SampledSection& SampledSection::operator-=(const SampledSection& o) {
    require_same_grid(*this, o);
    values -= o.values;
    return *this;
}

SampledSection& SampledSection::operator*=(cplx s) {
    values *= s;
    return *this;
}

double max_diff(const SampledSection& a, const SampledSection& b) {
    require_same_grid(a, b);
    return (a.values - b.values).cwiseAbs().maxCoeff();
}

double max_abs(const SampledSection& a) { return a.values.cwiseAbs().maxCoeff(); }

cplx l2_product(const SampledSection& f1, const SampledSection& f2) {
    require_same_grid(f1, f2);
    return (f1.values.conjugate().cwiseProduct(f2.values)).sum() * f1.grid.step();
}

SampledSection translate(const SampledSection& f, double s, const GridCheck& chk) {
    check_boundary(f, chk.boundary_tol, "translate");
    SampledSection out(f.grid, f.lines());
    for (int a = 0; a < f.lines(); ++a)
        out.values.col(a) = apply_multiplier(
            f.values.col(a), f.grid, [s](double nu) { return cis(-nu * s); }, chk, "translate");
    check_boundary(out, chk.boundary_tol, "translate");
    return out;
}

SampledSection differentiate(const SampledSection& f, const GridCheck& chk) {
    check_boundary(f, chk.boundary_tol, "differentiate");
    SampledSection out(f.grid, f.lines());
    for (int a = 0; a < f.lines(); ++a)
        out.values.col(a) = apply_multiplier(
            f.values.col(a), f.grid, [](double nu) { return cplx(0, kTwoPi * nu); }, chk, "differentiate");
    return out;
}

cplx interpolate(const SampledSection& f, double t, int line) {
    return resample(f.values.col(line), f.grid, {t})(0);
}

namespace {

// Generator powers; with check_output false, terms of a sum may leave the window as long as the sum does not.
SampledSection u_power(const ModuleGeometry& geo, int j, const SampledSection& f, int n, bool check_output) {
    require_lines(geo, f);
    const long long m = lines_of(geo);
    SampledSection out(f.grid, f.lines());
    if (j == 1) {
        // e^{2 pi i n (t - alpha d / c)}
        for (int a = 0; a < f.lines(); ++a) {
            const cplx ph = cis_ratio(-n * a * geo.d, geo.c);
            for (int i = 0; i < f.grid.N; ++i) out.values(i, a) = cis(n * f.grid.point(i)) * ph * f.values(i, a);
        }
    } else if (j == 2) {
        // f(t - n rk / c, alpha - n)
        const SampledSection s = shift(f, n * geo.rk() / double(geo.c), check_output);
        for (int a = 0; a < f.lines(); ++a) out.values.col(a) = s.values.col(md(a - n, m));
    } else {
        throw RejectedInput("U action: j must be 1 or 2");
    }
    return out;
}

SampledSection v_power(const ModuleGeometry& geo, int j, const SampledSection& f, int n, bool check_output) {
    require_lines(geo, f);
    const long long m = lines_of(geo);
    SampledSection out(f.grid, f.lines());
    if (j == 1) {
        // e^{2 pi i n (t / rk - alpha / c)}
        for (int a = 0; a < f.lines(); ++a) {
            const cplx ph = cis_ratio(-n * a, geo.c);
            for (int i = 0; i < f.grid.N; ++i)
                out.values(i, a) = cis(n * f.grid.point(i) / geo.rk()) * ph * f.values(i, a);
        }
    } else if (j == 2) {
        // f(t - n / c, alpha - n a)
        const SampledSection s = shift(f, n / double(geo.c), check_output);
        for (int a = 0; a < f.lines(); ++a) out.values.col(a) = s.values.col(md(a - n * geo.a, m));
    } else {
        throw RejectedInput("V action: j must be 1 or 2");
    }
    return out;
}

}  // namespace

SampledSection act_U(const ModuleGeometry& geo, int j, const SampledSection& f, int n) {
    return u_power(geo, j, f, n, true);
}

SampledSection act_V(const ModuleGeometry& geo, int j, const SampledSection& f, int n) {
    return v_power(geo, j, f, n, true);
}

SampledSection right_action(const ModuleGeometry& geo, const SampledSection& f, const FourierElement& a) {
    if (std::abs(a.theta().value() - geo.theta.value()) > 1e-12)
        throw RejectedInput("right_action: element is not in A_theta of this module");
    SampledSection out(f.grid, f.lines());
    const int B = a.box();
    check_boundary(f, GridCheck{}.boundary_tol, "right_action");
    std::vector<SampledSection> mod;
    for (int k = -B; k <= B; ++k) mod.push_back(u_power(geo, 1, f, k, false));
    for (int l = -B; l <= B; ++l) {
        SampledSection s(f.grid, f.lines());
        bool any = false;
        for (int k = -B; k <= B; ++k)
            if (a.coeff(k, l) != cplx(0)) {
                s += mod[std::size_t(k + B)] * a.coeff(k, l);
                any = true;
            }
        if (any) out += u_power(geo, 2, s, l, false);
    }
    check_boundary(out, GridCheck{}.boundary_tol, "right_action");
    return out;
}

SampledSection left_action(const ModuleGeometry& geo, const FourierElement& b, const SampledSection& f) {
    if (std::abs(b.theta().value() - geo.theta_prime()) > 1e-12)
        throw RejectedInput("left_action: element is not in A_theta' of this module");
    SampledSection out(f.grid, f.lines());
    const int B = b.box();
    check_boundary(f, GridCheck{}.boundary_tol, "left_action");
    for (int l = -B; l <= B; ++l) {
        bool any = false;
        for (int k = -B; k <= B; ++k) any = any || b.coeff(k, l) != cplx(0);
        if (!any) continue;
        const SampledSection g = v_power(geo, 2, f, l, false);
        for (int k = -B; k <= B; ++k)
            if (b.coeff(k, l) != cplx(0)) out += v_power(geo, 1, g, k, false) * b.coeff(k, l);
    }
    check_boundary(out, GridCheck{}.boundary_tol, "left_action");
    return out;
}

SampledSection connection(const ModuleGeometry& geo, int j, const SampledSection& f) {
    require_lines(geo, f);
    if (j == 1) return differentiate(f);
    if (j != 2) throw RejectedInput("connection: j must be 1 or 2");
    SampledSection out = f;
    for (int i = 0; i < f.grid.N; ++i) out.values.row(i) *= cplx(0, kTwoPi * geo.mu() * f.grid.point(i));
    return out;
}

SampledSection holomorphic(const ModuleGeometry& geo, const SampledSection& f) {
    return connection(geo, 1, f) + connection(geo, 2, f) * std::conj(geo.tau);
}

SampledSection holomorphic_adjoint(const ModuleGeometry& geo, const SampledSection& f) {
    return (connection(geo, 1, f) + connection(geo, 2, f) * geo.tau) * cplx(-1.0);
}

HPoint operator+(const HPoint& x, const HPoint& y) { return {x.x1 + y.x1, x.a1 + y.a1, x.x2 + y.x2, x.a2 + y.a2}; }
HPoint operator-(const HPoint& x) { return {-x.x1, -x.a1, -x.x2, -x.a2}; }
HPoint operator*(long long n, const HPoint& x) { return {double(n) * x.x1, n * x.a1, double(n) * x.x2, n * x.a2}; }

cplx heis_cocycle(long long c, const HPoint& x, const HPoint& y) {
    return cis(0.5 * (x.x1 * y.x2 - x.x2 * y.x1)) * cis_ratio(x.a1 * y.a2, c);
}

cplx heis_rho(long long c, const HPoint& x, const HPoint& y) {
    return heis_cocycle(c, x, y) * std::conj(heis_cocycle(c, y, x));
}

SampledSection heis_pi(const ModuleGeometry& geo, const HPoint& y, const SampledSection& f) {
    require_lines(geo, f);
    SampledSection out = pull(f, y.x1, y.a1);
    for (int a = 0; a < f.lines(); ++a) {
        const cplx ph = cis(0.5 * y.x1 * y.x2) * cis_ratio(a * y.a2, geo.c);
        for (int i = 0; i < f.grid.N; ++i) out.values(i, a) *= ph * cis(f.grid.point(i) * y.x2);
    }
    return out;
}

HeisLattices heis_lattices(const ModuleGeometry& geo) {
    const double c = double(geo.c), rk = geo.rk();
    HeisLattices L;
    L.w1 = {0.0, 0, 1.0 / rk, -1};
    L.w2 = {-1.0 / c, -geo.a, 0.0, 0};
    L.wt1 = {0.0, 0, 1.0, -geo.d};
    L.wt2 = {-rk / c, -1, 0.0, 0};
    L.covolume = 1.0 / std::abs(rk);
    return L;
}

SampledSection pi_w(const ModuleGeometry& geo, const std::array<double, 2>& w, const std::array<double, 2>& x,
                    const SampledSection& f) {
    require_lines(geo, f);
    SampledSection out = translate(f, -x[0]);
    const double mu = geo.mu();
    const cplx ch = std::polar(1.0, w[0] * x[0] + w[1] * x[1]);
    for (int i = 0; i < f.grid.N; ++i)
        out.values.row(i) *= ch * std::polar(1.0, kPi * mu * (x[0] * x[1] + 2 * x[1] * f.grid.point(i)));
    return out;
}

InnerProducts inner_products(const ModuleGeometry& geo, const SampledSection& f1, const SampledSection& f2, int box,
                             double tail_tol) {
    require_lines(geo, f1);
    require_same_grid(f1, f2);
    const HeisLattices L = heis_lattices(geo);
    InnerProducts r{l2_product(f1, f2), FourierElement(geo.theta, box), FourierElement(geo.theta_prime_exact(), box),
                    0.0};
    // <pi(xi) u, v> with xi = k p + l q; the translation depends only on l
    auto pair_sum = [&](const HPoint& p, const HPoint& q, const SampledSection& u0, const SampledSection& v0,
                        const std::function<void(int, int, cplx)>& put) {
        const SampledSection u = padded(u0, box * q.x1), v = padded(v0, box * q.x1);
        // q has no x2 part, so the modulation depends on k only
        Eigen::MatrixXcd T(u.grid.N, 2 * box + 1);
        for (int k = -box; k <= box; ++k)
            for (int i = 0; i < u.grid.N; ++i) T(i, k + box) = cis(u.grid.point(i) * k * p.x2);
        for (int l = -box; l <= box; ++l) {
            const HPoint ql = l * q;
            const SampledSection s = pull(u, ql.x1, ql.a1, false);
            for (int k = -box; k <= box; ++k) {
                const HPoint xi = k * p + ql;
                cplx acc = 0;
                for (int a = 0; a < u.lines(); ++a) {
                    const cplx ph = cis(0.5 * xi.x1 * xi.x2) * cis_ratio(a * xi.a2, geo.c);
                    acc += std::conj(ph) * T.col(k + box).cwiseProduct(s.values.col(a)).dot(v.values.col(a));
                }
                put(k, l, acc * u.grid.step());
            }
        }
    };
    // f1 . U1^k U2^l = e(l wt2, k wt1) pi(k wt1 + l wt2) f1
    pair_sum(L.wt1, L.wt2, f1, f2, [&](int k, int l, cplx v) {
        r.right.set(k, l, v * std::conj(heis_cocycle(geo.c, l * L.wt2, k * L.wt1)));
    });
    // V1^k V2^l = e(k w1, l w2) pi(k w1 + l w2)
    pair_sum(L.w1, L.w2, f2, f1, [&](int k, int l, cplx v) {
        r.left.set(k, l, L.covolume * v * std::conj(heis_cocycle(geo.c, k * L.w1, l * L.w2)));
    });
    auto ring = [box](const FourierElement& e) {
        double edge = 0.0;
        for (int k = -box; k <= box; ++k)
            for (int l = -box; l <= box; ++l)
                if (std::abs(k) == box || std::abs(l) == box) edge = std::max(edge, std::abs(e.coeff(k, l)));
        const double peak = e.max_abs();
        return peak == 0.0 ? 0.0 : edge / peak;
    };
    r.tail = std::max(ring(r.right), ring(r.left));
    if (r.tail > tail_tol) throw QuadratureFailure("inner_products: lattice sum not converged at the truncation box");
    return r;
}

SampledSection j_map(const ModuleGeometry& geo, const SampledSection& f) {
    require_lines(geo, f);
    check_boundary(f, 1e-10, "j_map");
    for (int a = 0; a < f.lines(); ++a) check_spectrum(fft(f.values.col(a), FFTW_FORWARD), 1e-10, "j_map");
    const long long m = lines_of(geo), dinv = geo.d_inverse_mod_c();
    std::vector<double> pts(std::size_t(f.grid.N));
    for (int i = 0; i < f.grid.N; ++i) pts[std::size_t(i)] = geo.rk() * f.grid.point(i);
    SampledSection out(f.grid, f.lines());
    for (int a = 0; a < f.lines(); ++a)
        out.values.col(a) = resample(f.values.col(md(-dinv * a, m)), f.grid, pts).conjugate();
    return out;
}

TraceFormulaReport trace_formula(const ModuleGeometry& geo, const LatticeFunction& f, const TraceQuadrature& q) {
    const long long c = geo.c, m = lines_of(geo);
    const HeisLattices L = heis_lattices(geo);
    const int R = q.lattice_radius;
    auto reduce = [m](HPoint x) {
        x.a1 = md(x.a1, m);
        x.a2 = md(x.a2, m);
        return x;
    };
    auto fx = [&](const HPoint& x, int i, int j) { return f(reduce(x), i, j); };
    auto lat = [&](int i, int j) { return i * L.w1 + j * L.w2; };

    TraceFormulaReport r{};
    const double hy = 2 * q.y_extent / (q.y_points - 1);
    const Grid& g = q.grid;
    double diag_peak = 0.0, diag_edge = 0.0, y_peak = 0.0, y_edge = 0.0;
    for (int i = -R; i <= R; ++i)
        for (int j = -R; j <= R; ++j) {
            const HPoint P = lat(i, j);
            for (long long b2 = 0; b2 < m; ++b2) {
                // y2-profile of f(-P1, -Pa1; y2, b2) with trapezoid weights
                std::vector<cplx> G(std::size_t(q.y_points));
                for (int s = 0; s < q.y_points; ++s) {
                    const double y = -q.y_extent + s * hy;
                    G[std::size_t(s)] = fx({-P.x1, -P.a1, y, b2}, i, j) * ((s == 0 || s == q.y_points - 1) ? 0.5 : 1.0) * hy;
                    y_peak = std::max(y_peak, std::abs(G[std::size_t(s)]));
                }
                y_edge = std::max({y_edge, std::abs(G.front()), std::abs(G.back())});
                for (long long a = 0; a < m; ++a) {
                    const cplx ph_a = cis_ratio(a * P.a2, c) * cis_ratio((a + P.a1) * b2, c) / double(m);
                    for (int n = 0; n < g.N; ++n) {
                        const double t = g.point(n);
                        cplx k = 0;
                        for (int s = 0; s < q.y_points; ++s) {
                            const double y = -q.y_extent + s * hy;
                            k += G[std::size_t(s)] * cis(y * (t + 0.5 * P.x1));
                        }
                        const cplx d = cis(0.5 * P.x1 * P.x2 + t * P.x2) * ph_a * k;
                        diag_peak = std::max(diag_peak, std::abs(d));
                        if (n < 2 || n >= g.N - 2) diag_edge = std::max(diag_edge, std::abs(d));
                        r.kernel_trace += d * g.step();
                    }
                }
            }
        }
    if (diag_edge > 1e-10 * std::max(diag_peak, 1e-300) || y_edge > 1e-12 * std::max(y_peak, 1e-300))
        throw DomainError("trace_formula: kernel does not decay on the quadrature grid");

    for (int i = -R; i <= R; ++i)
        for (int j = -R; j <= R; ++j) {
            const HPoint P = lat(i, j);
            r.contraction_at_zero += fx(-P, i, j) * heis_cocycle(c, P, -P);
            r.sum_statement += fx(P, -i, -j) * heis_cocycle(c, -P, P);
            r.sum_proof += fx(-P, i, j) * heis_cocycle(c, P, -P);
            // (sum_{l'} f(P, l') pi(l')) pi(P) in the e-twisted convolution algebra of L
            Coeffs prod;
            for (int u = -R; u <= R; ++u)
                for (int v = -R; v <= R; ++v) {
                    const cplx a = fx(P, u, v);
                    if (a != cplx(0)) prod[{u + i, v + j}] += a * heis_cocycle(c, lat(u, v), P);
                }
            const cplx phiB = prod.count({0, 0}) ? prod[{0, 0}] : cplx(0);
            r.sum_dual_trace += phiB;
            r.term_statement = std::max(r.term_statement, std::abs(phiB - fx(P, -i, -j) * heis_cocycle(c, -P, P)));
            r.term_proof = std::max(r.term_proof, std::abs(phiB - fx(-P, i, j) * heis_cocycle(c, -P, P)));
        }
    return r;
}

OrthogonalityReport orthogonality(const ModuleGeometry& geo, const SampledSection& f, const SampledSection& g,
                                  const SampledSection& h, const SampledSection& k, const OrthQuadrature& q) {
    require_lines(geo, f);
    require_same_grid(f, g);
    require_same_grid(f, h);
    require_same_grid(f, k);
    const long long c = geo.c, m = lines_of(geo);
    const int P = q.points, N = f.grid.N;
    const double hx = q.extent / (P - 1);
    std::vector<double> x(static_cast<std::size_t>(P)), w(static_cast<std::size_t>(P));
    for (int i = 0; i < P; ++i) {
        x[std::size_t(i)] = -0.5 * q.extent + i * hx;
        w[std::size_t(i)] = (i == 0 || i == P - 1) ? 0.5 * hx : hx;
    }
    // e^{-2 pi i t x2} on the grid for every x2 node
    Eigen::MatrixXcd E(N, P);
    for (int s = 0; s < P; ++s)
        for (int n = 0; n < N; ++n) E(n, s) = cis(-f.grid.point(n) * x[std::size_t(s)]);

    // <pi(x) u, v> = sum conj(e^{2 pi i (x1 x2/2 + t x2 + alpha b2/c)} u(t + x1, alpha + b1)) v(t, alpha)
    const double smax = 0.5 * q.extent;
    const SampledSection fp = padded(f, smax), gp = padded(g, smax), hp = padded(h, smax), kp = padded(k, smax);
    const int off = (fp.grid.N - N) / 2;
    auto ambiguity = [&](const SampledSection& u, const SampledSection& v, double x1, long long b1) {
        const SampledSection s = pull(u, x1, b1, false);
        Eigen::MatrixXcd p = s.values.middleRows(off, N).conjugate().cwiseProduct(v.values.middleRows(off, N)) *
                             f.grid.step();
        return Eigen::MatrixXcd(E.transpose() * p);  // rows: x2 nodes, cols: alpha
    };
    cplx lhs = 0;
    for (int i = 0; i < P; ++i)
        for (long long b1 = 0; b1 < m; ++b1) {
            const double x1 = x[std::size_t(i)];
            const Eigen::MatrixXcd A = ambiguity(fp, gp, x1, b1);
            const Eigen::MatrixXcd B = ambiguity(hp, kp, x1, b1);
            for (int s = 0; s < P; ++s) {
                const cplx ph = cis(-0.5 * x1 * x[std::size_t(s)]);
                for (long long b2 = 0; b2 < m; ++b2) {
                    cplx a = 0, b = 0;
                    for (long long al = 0; al < m; ++al) {
                        const cplx e = cis_ratio(-al * b2, c);
                        a += e * A(s, al);
                        b += e * B(s, al);
                    }
                    lhs += w[std::size_t(i)] * w[std::size_t(s)] * std::conj(ph * a) * (ph * b) / double(m);
                }
            }
        }
    return {lhs, std::conj(l2_product(f, h)) * l2_product(g, k)};
}

double poisson_check(const std::function<cplx(const Eigen::VectorXd&)>& f,
                     const std::function<cplx(const Eigen::VectorXd&)>& fhat, const Eigen::MatrixXd& basis,
                     int radius) {
    const int n = int(basis.rows());
    if (basis.cols() != n || n < 1) throw RejectedInput("poisson_check: basis must be square");
    const double vol = std::abs(basis.determinant());
    if (vol == 0.0) throw RejectedInput("poisson_check: degenerate lattice");
    const Eigen::MatrixXd dual = basis.inverse().transpose();
    cplx lhs = 0, rhs = 0;
    Eigen::VectorXi idx = Eigen::VectorXi::Constant(n, -radius);
    while (true) {
        const Eigen::VectorXd m = idx.cast<double>();
        lhs += f(basis * m);
        rhs += fhat(dual * m);
        int d = 0;
        while (d < n && idx(d) == radius) idx(d++) = -radius;
        if (d == n) break;
        ++idx(d);
    }
    return std::abs(lhs - rhs / vol);
}

double poisson_check_heisenberg(const ModuleGeometry& geo, const std::function<cplx(const HPoint&)>& f,
                                const std::function<cplx(const HPoint&)>& fhat, int radius) {
    const long long m = lines_of(geo);
    const HeisLattices L = heis_lattices(geo);
    auto reduce = [m](HPoint x) {
        x.a1 = md(x.a1, m);
        x.a2 = md(x.a2, m);
        return x;
    };
    cplx lhs = 0, rhs = 0;
    for (int i = -radius; i <= radius; ++i)
        for (int j = -radius; j <= radius; ++j) {
            lhs += f(reduce(i * L.w1 + j * L.w2));
            rhs += fhat(reduce(i * L.wt1 + j * L.wt2));
        }
    return std::abs(lhs - rhs / L.covolume);
}

void save_section(const SampledSection& f, const std::string& path) {
    std::ofstream bin(path + ".bin", std::ios::binary);
    bin.write(reinterpret_cast<const char*>(f.values.data()), std::streamsize(f.values.size() * sizeof(cplx)));
    std::ofstream js(path + ".json");
    js << nlohmann::json{{"L", f.grid.extent}, {"N", f.grid.N}, {"c", f.lines()}}.dump() << "\n";
    if (!bin || !js) throw Error("save_section: cannot write " + path);
}

SampledSection load_section(const std::string& path) {
    std::ifstream js(path + ".json");
    if (!js) throw RejectedInput("load_section: missing header " + path + ".json");
    nlohmann::json h;
    try {
        js >> h;
        SampledSection f(Grid{h.at("L").get<double>(), h.at("N").get<int>()}, h.at("c").get<int>());
        std::ifstream bin(path + ".bin", std::ios::binary);
        bin.read(reinterpret_cast<char*>(f.values.data()), std::streamsize(f.values.size() * sizeof(cplx)));
        if (bin.gcount() != std::streamsize(f.values.size() * sizeof(cplx)))
            throw RejectedInput("load_section: truncated data " + path + ".bin");
        return f;
    } catch (const nlohmann::json::exception& e) {
        throw RejectedInput(std::string("load_section: ") + e.what());
    }
}

}  // namespace nct
