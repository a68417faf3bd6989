#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nct/module_geometry.hpp"
#include "nct/nc_algebra.hpp"

namespace nct {

// Periodic sampling grid t_j = -extent/2 + j * extent/N on each line.
struct Grid {
    double extent = 12.0;
    int N = 1024;

    double step() const { return extent / N; }
    double point(int j) const { return -0.5 * extent + j * step(); }
};

// Section of S(R x Z_c): values(j, alpha) = f(t_j, alpha), alpha = 0..|c|-1.
struct SampledSection {
    Grid grid;
    Eigen::MatrixXcd values;

    SampledSection() = default;
    SampledSection(Grid g, int lines);
    static SampledSection from_function(Grid g, int lines, const std::function<cplx(double, int)>& f);

    int lines() const { return int(values.cols()); }
    SampledSection& operator+=(const SampledSection& o);
    SampledSection& operator-=(const SampledSection& o);
    SampledSection& operator*=(cplx s);
    friend SampledSection operator+(SampledSection a, const SampledSection& b) { return a += b; }
    friend SampledSection operator-(SampledSection a, const SampledSection& b) { return a -= b; }
    friend SampledSection operator*(SampledSection a, cplx s) { return a *= s; }
    friend SampledSection operator*(cplx s, SampledSection a) { return a *= s; }
};

double max_diff(const SampledSection& a, const SampledSection& b);
double max_abs(const SampledSection& a);
cplx l2_product(const SampledSection& f1, const SampledSection& f2);  // antilinear in f1

// Band-limited resampling; GridTooCoarse when the section does not decay at the grid
// boundary or carries spectral content near the Nyquist frequency.
struct GridCheck {
    double boundary_tol = 1e-10;
    double spectral_tol = 1e-10;
};
SampledSection translate(const SampledSection& f, double s, const GridCheck& chk = {});  // f(t - s)
SampledSection differentiate(const SampledSection& f, const GridCheck& chk = {});
cplx interpolate(const SampledSection& f, double t, int line);

// Generators (powers) of the right A_theta and left A_theta' actions.
SampledSection act_U(const ModuleGeometry& geo, int j, const SampledSection& f, int power = 1);
SampledSection act_V(const ModuleGeometry& geo, int j, const SampledSection& f, int power = 1);
// f . a for a in A_theta, and b . f for b in A_theta' (monomials V1^k V2^l).
SampledSection right_action(const ModuleGeometry& geo, const SampledSection& f, const FourierElement& a);
SampledSection left_action(const ModuleGeometry& geo, const FourierElement& b, const SampledSection& f);

// nabla_1 = d/dt, nabla_2 = 2 pi i mu t; holomorphic part nabla_1 + conj(tau) nabla_2 and its adjoint.
SampledSection connection(const ModuleGeometry& geo, int j, const SampledSection& f);
SampledSection holomorphic(const ModuleGeometry& geo, const SampledSection& f);
SampledSection holomorphic_adjoint(const ModuleGeometry& geo, const SampledSection& f);

// Point (x1, a1; x2, a2) of G = M x M^, M = R x Z_c.
struct HPoint {
    double x1 = 0.0;
    long long a1 = 0;
    double x2 = 0.0;
    long long a2 = 0;
};
HPoint operator+(const HPoint& x, const HPoint& y);
HPoint operator-(const HPoint& x);
HPoint operator*(long long n, const HPoint& x);

cplx heis_cocycle(long long c, const HPoint& x, const HPoint& y);  // e(x, y)
cplx heis_rho(long long c, const HPoint& x, const HPoint& y);      // e(x, y) conj e(y, x)
// (pi(y) u)(t, alpha) = e^{2 pi i (y1 y2 / 2 + t y2 + alpha b2 / c)} u(t + y1, alpha + b1).
SampledSection heis_pi(const ModuleGeometry& geo, const HPoint& y, const SampledSection& f);

// Generators of L (V1, V2) and of L^perp (U1, U2 in the op sense).
struct HeisLattices {
    HPoint w1, w2;    // L
    HPoint wt1, wt2;  // L^perp
    double covolume;  // vol(G / L) for the self-dual measure
};
HeisLattices heis_lattices(const ModuleGeometry& geo);

// pi_w(x) = e^{i <w, x>} pi_0(x), (pi_0(x) f)(t) = e^{pi i mu (x1 x2 + 2 x2 t)} f(t + x1).
SampledSection pi_w(const ModuleGeometry& geo, const std::array<double, 2>& w, const std::array<double, 2>& x,
                    const SampledSection& f);

// A_theta-valued (antilinear in f1) and A_theta'-valued (antilinear in f2) inner products
// as lattice sums over L^perp and L, truncated to |k|, |l| <= box.
struct InnerProducts {
    cplx l2;
    FourierElement right;
    FourierElement left;
    double tail;  // largest coefficient on the outer ring, relative
};
InnerProducts inner_products(const ModuleGeometry& geo, const SampledSection& f1, const SampledSection& f2,
                             int box = 8, double tail_tol = 1e-12);

// J(f)(x, alpha) = conj f(rk x, -d^{-1} alpha), a section over the dual geometry.
SampledSection j_map(const ModuleGeometry& geo, const SampledSection& f);

// Trace of pi(f) for f in S(G x L): f(x, m, n) is the coefficient at m w1 + n w2.
using LatticeFunction = std::function<cplx(const HPoint& x, int m, int n)>;
struct TraceQuadrature {
    Grid grid{12.0, 384};
    double y_extent = 8.0;  // y2 in [-y_extent, y_extent]
    int y_points = 257;
    int lattice_radius = 3;
};
struct TraceFormulaReport {
    cplx kernel_trace;         // sum over the diagonal of the discretized kernel
    cplx contraction_at_zero;  // Phi_L(f)(0)
    cplx sum_statement;        // sum f(l, -l) e(-l, l)
    cplx sum_proof;            // sum f(-l, l) e(l, -l)
    cplx sum_dual_trace;       // sum phi^B(f(l, .) pi(l)) via twisted products
    double term_statement;     // max_l |phi^B(f(l,.) pi(l)) - f(l,-l) e(-l,l)|
    double term_proof;         // max_l |phi^B(f(l,.) pi(l)) - f(-l,l) e(-l,l)|
};
TraceFormulaReport trace_formula(const ModuleGeometry& geo, const LatticeFunction& f, const TraceQuadrature& q = {});

// int_G conj<f, pi(x)^* g> <h, pi(x)^* k> dx against conj<f,h> <g,k>.
struct OrthogonalityReport {
    cplx lhs;
    cplx rhs;
};
struct OrthQuadrature {
    double extent = 12.0;  // x1, x2 in [-extent/2, extent/2]
    int points = 96;
};
OrthogonalityReport orthogonality(const ModuleGeometry& geo, const SampledSection& f, const SampledSection& g,
                                  const SampledSection& h, const SampledSection& k, const OrthQuadrature& q = {});

// |sum_Gamma f - (1/vol) sum_{Gamma^perp} fhat| with fhat(xi) = int f(x) e^{-2 pi i x.xi} dx.
double poisson_check(const std::function<cplx(const Eigen::VectorXd&)>& f,
                     const std::function<cplx(const Eigen::VectorXd&)>& fhat, const Eigen::MatrixXd& basis,
                     int radius = 12);
// Same on G with fhat(xi) = int_G rho(xi, x) f(x) dx and the lattices L, L^perp.
double poisson_check_heisenberg(const ModuleGeometry& geo, const std::function<cplx(const HPoint&)>& f,
                                const std::function<cplx(const HPoint&)>& fhat, int radius = 12);

// <path>.bin holds the values column-major, <path>.json the header {L, N, c}.
void save_section(const SampledSection& f, const std::string& path);
SampledSection load_section(const std::string& path);

}  // namespace nct
