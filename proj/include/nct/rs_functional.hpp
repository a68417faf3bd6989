#pragma once

#include <vector>

#include "nct/modular_calculus.hpp"
#include "nct/module_geometry.hpp"

namespace nct {

enum class Sign { plus, minus };

struct RsOptions {
    int taylor_order = 24;
};

struct CurvatureDensity {
    FourierElement plus;
    FourierElement minus;
    FourierElement graded;  // plus - minus
    double mu_term;         // 2 pi Im tau mu
};

// Intrinsic density -(K_pm(nabla)(Lambda h) + H^Re_pm(box^Re h) + H^Im_pm(box^Im h)), without the mu term.
FourierElement intrinsic_curvature(const FourierElement& h, cplx tau, Sign sign, const RsOptions& opt = {});
// Intrinsic density minus/plus 2 pi Im tau mu 1.
FourierElement curvature_density(const FourierElement& h, const ModuleGeometry& geo, Sign sign,
                                 const RsOptions& opt = {});
CurvatureDensity curvature_densities(const FourierElement& h, const ModuleGeometry& geo, const RsOptions& opt = {});

// a_2(a, Delta^pm) = |rk|/(4 pi Im tau) phi_0(a K^pm).
double a2_from_density(const FourierElement& a, const FourierElement& density, const ModuleGeometry& geo);
// a_0(a, Delta^pm) = |rk|/(4 pi Im tau) phi_0(a).
double a0_closed(const FourierElement& a, const ModuleGeometry& geo);

// Q(h) = (1/3) phi_0(h Lambda h) + phi_0(K_2(nabla^1)(box^Re h)).
double positivity_form(const FourierElement& h, cplx tau, const RsOptions& opt = {});

// log Det of the flat Laplacian, -zeta'(0) = -1/2 |deg| log(2 |mu| Im tau).
double logdet_flat(const ModuleGeometry& geo);
// log Det(flat) - 1/2 |deg| phi_0(h) + |rk|/(16 pi Im tau) Q(h).
// F = -log Det - 1/2 |deg| phi_0(h) = -log Det(flat) - |rk|/(16 pi Im tau) Q(h).
double rs_logdet_closed(const FourierElement& h, const ModuleGeometry& geo, const RsOptions& opt = {});
double F_functional(const FourierElement& h, const ModuleGeometry& geo, const RsOptions& opt = {});

// d/ds log Det at k^s = e^{s h / 2}: a_2(h, Delta^+) for the metric s h.
double logdet_variation(const FourierElement& h, const ModuleGeometry& geo, double s, const RsOptions& opt = {});

// grad F = -1/2 * 2 sinh(nabla/2)/(nabla/2)(k^{-1} K^+_k k) = -(e^nabla - 1)/nabla (K^+_k).
// The heat density of k d d^* k is the conjugate k^{-1} K^+ k = e^{nabla/2}(K^+).
FourierElement gradient(const FourierElement& h, cplx tau, const RsOptions& opt = {});
// -1/2 * 2 sinh(nabla/2)/(nabla/2)(K^+_k), without the conjugation.
FourierElement gradient_printed(const FourierElement& h, cplx tau, const RsOptions& opt = {});
const ModularFunction& gradient_kernel();
inline FourierElement gradient(const FourierElement& h, const ModuleGeometry& geo, const RsOptions& opt = {}) {
    return gradient(h, geo.tau, opt);
}
// <x, a> = |rk|/(4 pi Im tau) Re phi_0(a x).
double pairing(const FourierElement& x, const FourierElement& a, const ModuleGeometry& geo);

struct FlowOptions {
    int max_steps = 200;
    double initial_rate = 0.05;
    double armijo = 0.5;
    int max_halvings = 40;
    double tol = 1e-6;  // stop when ||h - phi_0(h) 1||_1 <= tol
    int box = -1;       // coefficient box of the flow; -1 uses the box of h0
    RsOptions rs;
};

struct FlowStep {
    int step;
    double F;
    double grad_norm;
    double dist;  // ||h - phi_0(h) 1||_1
    double rate;
};

struct FlowResult {
    int orientation;  // +1: flow ascends F, -1: descends
    bool converged;
    FourierElement h;
    std::vector<FlowStep> trajectory;
};

// Orientation of the flow toward the extremum at constants, from the sign of Q on a probe
// (negative Q means F is minimal at constants, so the flow descends: -1).
int measured_orientation(cplx tau, const Theta& theta, const RsOptions& opt = {});

// Gauge-projected gradient flow with backtracking (Armijo) line search,
// ascending when orientation = +1 and descending when -1.
FlowResult extremize(const FourierElement& h0, const ModuleGeometry& geo, int orientation, const FlowOptions& opt = {});

}  // namespace nct
