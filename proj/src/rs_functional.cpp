#include "nct/rs_functional.hpp"

#include <cmath>

#include "nct/errors.hpp"

namespace nct {

namespace {

double imtau(cplx tau) {
    if (!(tau.imag() > 0)) throw RejectedInput("Im tau must be positive");
    return tau.imag();
}

void require_sa(const FourierElement& h) {
    if (!is_self_adjoint(h, 1e-12)) throw RejectedInput("h must be self-adjoint");
}

FourierElement sa_part(const FourierElement& x) { return (x + star(x)) * cplx(0.5); }

ModularContext context_for(const FourierElement& h, int input_box, const RsOptions& opt) {
    return ModularContext::for_input(h, input_box, opt.taylor_order);
}

}  // namespace

FourierElement intrinsic_curvature(const FourierElement& h, cplx tau, Sign sign, const RsOptions& opt) {
    require_sa(h);
    imtau(tau);
    const FourierElement hp = h.project(h.support_box(0.0));
    const FourierElement lap = laplacian_tau(hp, tau);
    const FourierElement dt = derive(hp, Deriv::tau, tau);
    const FourierElement ds = derive(hp, Deriv::tau_star, tau);
    const auto ctx = context_for(hp, hp.box(), opt);
    const int e2 = sign == Sign::plus ? 0 : 1;
    auto K = lookup("K_eps", 0, e2);
    auto HR = lookup("HRe_eps", 0, e2);
    FourierElement out = apply_fn1(ctx, *K, lap);
    // H^Re on box^Re = (dt ds + ds dt)/2
    out += (apply_fn2(ctx, *HR, dt, ds) + apply_fn2(ctx, *HR, ds, dt)) * cplx(0.5);
    // H^Im_+ = 0; H^Im_- on box^Im = (dt ds - ds dt)/2
    if (sign == Sign::minus) {
        auto HI = lookup("HIm_eps", 0, 1);
        out += (apply_fn2(ctx, *HI, dt, ds) - apply_fn2(ctx, *HI, ds, dt)) * cplx(0.5);
    }
    // with 2 pi i-scaled derivations the density is the negative of this sum;
    // at h commuting it reduces to +1/6 Lambda h, the classical R/6 for the metric e^{-h}
    return -out;
}

FourierElement curvature_density(const FourierElement& h, const ModuleGeometry& geo, Sign sign, const RsOptions& opt) {
    const double mt = 2 * kPi * geo.tau.imag() * geo.mu();
    FourierElement k = intrinsic_curvature(h, geo.tau, sign, opt);
    k.add_to(0, 0, sign == Sign::plus ? -mt : mt);
    return k;
}

CurvatureDensity curvature_densities(const FourierElement& h, const ModuleGeometry& geo, const RsOptions& opt) {
    CurvatureDensity r{curvature_density(h, geo, Sign::plus, opt), curvature_density(h, geo, Sign::minus, opt),
                       FourierElement(h.theta(), 0), 2 * kPi * geo.tau.imag() * geo.mu()};
    r.graded = r.plus - r.minus;
    return r;
}

double a2_from_density(const FourierElement& a, const FourierElement& density, const ModuleGeometry& geo) {
    return std::abs(geo.rk()) / (4 * kPi * geo.tau.imag()) * trace(mul(a, density)).real();
}

double a0_closed(const FourierElement& a, const ModuleGeometry& geo) {
    return std::abs(geo.rk()) / (4 * kPi * geo.tau.imag()) * trace(a).real();
}

double positivity_form(const FourierElement& h, cplx tau, const RsOptions& opt) {
    require_sa(h);
    imtau(tau);
    const FourierElement hp = h.project(h.support_box(0.0));
    const FourierElement dt = derive(hp, Deriv::tau, tau);
    const FourierElement ds = derive(hp, Deriv::tau_star, tau);
    const auto ctx = context_for(hp, hp.box(), opt);
    auto K2 = lookup("K2");
    // K_2 acting on the first factor of box^Re h
    const cplx q = trace(mul(hp, laplacian_tau(hp, tau))) / 3.0 +
                   0.5 * (trace(mul(apply_fn1(ctx, *K2, dt), ds)) + trace(mul(apply_fn1(ctx, *K2, ds), dt)));
    return q.real();
}

double logdet_flat(const ModuleGeometry& geo) {
    return -0.5 * double(std::llabs(geo.deg())) * std::log(2 * std::abs(geo.mu()) * geo.tau.imag());
}

double rs_logdet_closed(const FourierElement& h, const ModuleGeometry& geo, const RsOptions& opt) {
    if (!(geo.mu() > 0)) throw UnsupportedOrientation("log Det formula requires mu > 0");
    const double deg = double(std::llabs(geo.deg()));
    return logdet_flat(geo) - 0.5 * deg * trace(h).real() +
           std::abs(geo.rk()) / (16 * kPi * geo.tau.imag()) * positivity_form(h, geo.tau, opt);
}

double F_functional(const FourierElement& h, const ModuleGeometry& geo, const RsOptions& opt) {
    if (!(geo.mu() > 0)) throw UnsupportedOrientation("functional F requires mu > 0");
    return -logdet_flat(geo) - std::abs(geo.rk()) / (16 * kPi * geo.tau.imag()) * positivity_form(h, geo.tau, opt);
}

double logdet_variation(const FourierElement& h, const ModuleGeometry& geo, double s, const RsOptions& opt) {
    if (!(geo.mu() > 0)) throw UnsupportedOrientation("variation formula requires mu > 0");
    // a_2(h, Delta^+) at the metric s h
    return a2_from_density(h, curvature_density(h * cplx(s), geo, Sign::plus, opt), geo);
}

const ModularFunction& gradient_kernel() {
    // 2 sinh(s/2)/(s/2) e^{s/2} = 2 (e^s - 1)/s
    static const ModularFunction f("gradient_kernel",
                                   ModularFunction::Fn1([](cplx s) { return 2.0 * (std::exp(s) - 1.0) / s; }));
    return f;
}

FourierElement gradient(const FourierElement& h, cplx tau, const RsOptions& opt) {
    const FourierElement kp = intrinsic_curvature(h, tau, Sign::plus, opt);
    const FourierElement hp = h.project(h.support_box(0.0));
    const auto ctx = context_for(hp, kp.box(), opt);
    return apply_fn1(ctx, gradient_kernel(), kp) * cplx(-0.5);
}

FourierElement gradient_printed(const FourierElement& h, cplx tau, const RsOptions& opt) {
    const FourierElement kp = intrinsic_curvature(h, tau, Sign::plus, opt);
    const FourierElement hp = h.project(h.support_box(0.0));
    const auto ctx = context_for(hp, kp.box(), opt);
    return sinhc_half(ctx, kp) * cplx(-0.5);
}

double pairing(const FourierElement& x, const FourierElement& a, const ModuleGeometry& geo) {
    return std::abs(geo.rk()) / (4 * kPi * geo.tau.imag()) * trace(mul(a, x)).real();
}

int measured_orientation(cplx tau, const Theta& theta, const RsOptions& opt) {
    const FourierElement probe =
        (FourierElement::monomial(theta, 1, 0) + FourierElement::monomial(theta, -1, 0)) * cplx(0.1);
    // F = -log Det(flat) - c Q: negative Q means a minimum at constants
    return positivity_form(probe, tau, opt) < 0 ? -1 : +1;
}

FlowResult extremize(const FourierElement& h0, const ModuleGeometry& geo, int orientation, const FlowOptions& opt) {
    if (orientation != 1 && orientation != -1) throw RejectedInput("orientation must be +1 or -1");
    require_sa(h0);
    const int box = opt.box >= 0 ? opt.box : h0.support_box(0.0);
    auto gauge = [&](FourierElement x) {
        x = sa_part(x.project(box));
        x.set(0, 0, 0.0);
        return x;
    };
    auto dist = [](const FourierElement& x) {
        FourierElement y = x;
        y.set(0, 0, 0.0);
        return y.l1_norm();
    };
    if (!(geo.mu() > 0)) throw UnsupportedOrientation("functional F requires mu > 0");
    // F = -log Det(flat) - c Q; line-search differences are taken on -c Q alone
    const double base = -logdet_flat(geo);
    const double cq = -std::abs(geo.rk()) / (16 * kPi * geo.tau.imag());
    FlowResult res{orientation, false, gauge(h0), {}};
    double FQ = cq * positivity_form(res.h, geo.tau, opt.rs);
    double rate = opt.initial_rate;
    for (int step = 0;; ++step) {
        const FourierElement g = gauge(gradient(res.h, geo.tau, opt.rs));
        const double gg = pairing(g, g, geo);
        const double d = dist(res.h);
        res.trajectory.push_back({step, base + FQ, std::sqrt(std::max(gg, 0.0)), d, rate});
        if (d <= opt.tol) {
            res.converged = true;
            break;
        }
        if (step >= opt.max_steps) break;
        int halvings = 0;
        for (;; ++halvings) {
            if (halvings > opt.max_halvings) throw Error("gradient flow: no admissible step after 40 halvings");
            FourierElement trial = gauge(res.h + g * cplx(orientation * rate));
            const double Ft = cq * positivity_form(trial, geo.tau, opt.rs);
            if (orientation * (Ft - FQ) >= opt.armijo * rate * gg) {
                res.h = std::move(trial);
                FQ = Ft;
                break;
            }
            rate *= 0.5;
        }
        if (halvings == 0) rate *= 2;
    }
    return res;
}

}  // namespace nct
