#include "nct/modular_calculus.hpp"

#include <atomic>
#include <cmath>

#include <spdlog/spdlog.h>

#include "nct/errors.hpp"

namespace nct {

namespace {

constexpr double kNormWarn = 0.5;

cplx taylor_eval1(const std::vector<double>& c, cplx s) {
    cplx acc = 0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * s + *it;
    return acc;
}

cplx taylor_eval2(const Eigen::MatrixXd& C, cplx s, cplx t) {
    cplx acc = 0, sm = 1;
    const int N = int(C.rows()) - 1;
    for (int m = 0; m <= N; ++m, sm *= s) {
        cplx tn = 1, row = 0;
        for (int n = 0; m + n <= N; ++n, tn *= t) row += C(m, n) * tn;
        acc += sm * row;
    }
    return acc;
}

void note(SeriesDiagnostics* diag, const std::string& msg) {
    spdlog::warn("{}", msg);
    if (diag) diag->warnings.push_back(msg);
}

void check_input(const ModularContext& ctx, const FourierElement& x, const char* what) {
    if (!(x.theta() == ctx.h().theta())) throw RejectedInput(std::string(what) + ": theta mismatch");
    if (x.box() > ctx.max_input_box())
        throw BoxError(std::string(what) + ": input box " + std::to_string(x.box()) + " exceeds " +
                       std::to_string(ctx.max_input_box()) + " allowed by the ambient box");
}

// Terms growing at the end of the series.
void check_growth(const std::vector<double>& norms, SeriesDiagnostics* diag, const std::string& name) {
    const std::size_t N = norms.size();
    if (N < 4) return;
    const double tail = norms[N - 1];
    const double mid = norms[N / 2];
    if (tail > 1e-14 && tail > mid) {
        if (diag) diag->diverging = true;
        note(diag, "series for " + name + " is not converging (last term " + std::to_string(tail) + ")");
    }
}

}  // namespace

ModularContext::ModularContext(FourierElement h, int ambient_box, int taylor_order)
    : h_(std::move(h)), ambient_(ambient_box), order_(taylor_order) {
    if (taylor_order < 0) throw RejectedInput("taylor order must be non-negative");
    if (!is_self_adjoint(h_, 1e-12)) throw RejectedInput("modular context: h is not self-adjoint");
    if (max_input_box() < 0) throw BoxError("ambient box too small for taylor order");
    static std::atomic<bool> warned{false};
    if (h_.l1_norm() > kNormWarn && !warned.exchange(true))
        spdlog::warn("||h||_1 = {} exceeds {}; the modular series may converge slowly", h_.l1_norm(), kNormWarn);
}

ModularContext ModularContext::for_input(FourierElement h, int input_box, int taylor_order) {
    const int hb = h.support_box(0.0);
    FourierElement hp = h.project(hb);
    return ModularContext(std::move(hp), input_box + taylor_order * hb, taylor_order);
}

FourierElement nabla(const ModularContext& ctx, const FourierElement& x) {
    if (!(x.theta() == ctx.h().theta())) throw RejectedInput("nabla: theta mismatch");
    if (x.box() + ctx.h().box() > ctx.ambient_box()) {
        FourierElement r = mul(x, ctx.h()) - mul(ctx.h(), x);
        if (r.support_box(0.0) > ctx.ambient_box()) throw BoxError("nabla: result leaves the ambient box");
        return r.project(ctx.ambient_box());
    }
    return mul(x, ctx.h()) - mul(ctx.h(), x);
}

FourierElement nabla_power(const ModularContext& ctx, const FourierElement& x, int n) {
    FourierElement r = x;
    for (int i = 0; i < n; ++i) r = nabla(ctx, r);
    return r;
}

FourierElement apply_series1(const ModularContext& ctx, const std::vector<double>& c, const FourierElement& x,
                             SeriesDiagnostics* diag) {
    check_input(ctx, x, "apply_fn1");
    const int N = std::min<int>(ctx.taylor_order(), int(c.size()) - 1);
    FourierElement acc = x * cplx(c.empty() ? 0.0 : c[0]);
    FourierElement p = x;
    std::vector<double> norms{acc.l1_norm()};
    for (int n = 1; n <= N; ++n) {
        p = nabla(ctx, p);
        const FourierElement term = p * cplx(c[std::size_t(n)]);
        norms.push_back(term.l1_norm());
        acc += term;
    }
    if (diag && N >= 0) {
        diag->tail_bound = std::abs(c[std::size_t(N)]) * std::pow(2 * ctx.h().l1_norm(), N) * x.l1_norm();
        diag->last_term_norm = norms.back();
    }
    check_growth(norms, diag, "F(nabla)");
    return acc.project(ctx.ambient_box());
}

FourierElement apply_series2(const ModularContext& ctx, const Eigen::MatrixXd& C, const FourierElement& x,
                             const FourierElement& y, SeriesDiagnostics* diag) {
    check_input(ctx, x, "apply_fn2");
    check_input(ctx, y, "apply_fn2");
    const int N = std::min<int>(ctx.taylor_order(), int(C.rows()) - 1);
    // powers of nabla on y, then sum_m nabla^m(x) (sum_n C(m,n) nabla^n(y))
    std::vector<FourierElement> ny{y};
    for (int n = 1; n <= N; ++n) ny.push_back(nabla(ctx, ny.back()));
    FourierElement acc(x.theta(), 0);
    FourierElement px = x;
    std::vector<double> norms;
    for (int m = 0; m <= N; ++m) {
        if (m > 0) px = nabla(ctx, px);
        FourierElement inner(y.theta(), ny[std::size_t(N - m)].box());
        for (int n = 0; m + n <= N; ++n) inner += ny[std::size_t(n)] * cplx(C(m, n));
        const FourierElement term = mul(px, inner);
        norms.push_back(term.l1_norm());
        acc += term;
    }
    if (diag) {
        double cmax = 0;
        for (int m = 0; m <= N; ++m) cmax = std::max(cmax, std::abs(C(m, N - m)));
        diag->tail_bound = cmax * (N + 1) * std::pow(2 * ctx.h().l1_norm(), N) * x.l1_norm() * y.l1_norm();
        diag->last_term_norm = norms.back();
    }
    check_growth(norms, diag, "H(nabla1, nabla2)");
    return acc;
}

void require_entire_at_origin(const ModularFunction& F) {
    // Compare the Taylor polynomial with the closed form on |s| = 1/2.
    const int K = 8;
    double err = 0;
    for (int j = 0; j < K; ++j) {
        const cplx s = std::polar(0.5, kTwoPi * (j + 0.25) / K);
        if (F.arity() == 1) {
            const cplx v = F.raw(s);
            err = std::max(err, std::abs(v - taylor_eval1(F.taylor1(), s)) / std::max(1.0, std::abs(v)));
        } else {
            const cplx t = std::polar(0.4, kTwoPi * (j + 0.6) / K);
            const cplx v = F.raw(s, t);
            err = std::max(err, std::abs(v - taylor_eval2(F.taylor2(), s, t)) / std::max(1.0, std::abs(v)));
        }
        if (!std::isfinite(err)) break;
    }
    if (!(err < 1e-7))
        throw RejectedInput("function " + F.name() + " is not analytic at the origin (Taylor mismatch " +
                            std::to_string(err) + ")");
}

FourierElement apply_fn1(const ModularContext& ctx, const ModularFunction& F, const FourierElement& x,
                         SeriesDiagnostics* diag) {
    if (F.arity() != 1) throw RejectedInput("apply_fn1 needs a one-variable function");
    require_entire_at_origin(F);
    return apply_series1(ctx, F.taylor1(), x, diag);
}

FourierElement apply_fn2(const ModularContext& ctx, const ModularFunction& H, const FourierElement& x,
                         const FourierElement& y, SeriesDiagnostics* diag) {
    if (H.arity() != 2) throw RejectedInput("apply_fn2 needs a two-variable function");
    require_entire_at_origin(H);
    return apply_series2(ctx, H.taylor2(), x, y, diag);
}

Eigen::SparseMatrix<cplx> nabla_matrix(const ModularContext& ctx) {
    const int D = ctx.ambient_box(), S = 2 * D + 1;
    const FourierElement& h = ctx.h();
    const Theta& th = h.theta();
    const int hb = h.box();
    std::vector<Eigen::Triplet<cplx>> trip;
    auto idx = [&](int k, int l) { return (k + D) * S + (l + D); };
    for (int k = -D; k <= D; ++k)
        for (int l = -D; l <= D; ++l)
            for (int a = -hb; a <= hb; ++a)
                for (int b = -hb; b <= hb; ++b) {
                    const cplx hc = h.coeff(a, b);
                    if (hc == cplx(0.0)) continue;
                    const int k2 = k + a, l2 = l + b;
                    if (std::abs(k2) > D || std::abs(l2) > D) continue;
                    // U^{kl} U^{ab} - U^{ab} U^{kl}
                    const cplx v = hc * (th.phase(static_cast<long long>(l) * a) - th.phase(static_cast<long long>(b) * k));
                    if (v != cplx(0.0)) trip.emplace_back(idx(k2, l2), idx(k, l), v);
                }
    Eigen::SparseMatrix<cplx> M(S * S, S * S);
    M.setFromTriplets(trip.begin(), trip.end());
    return M;
}

FourierElement apply_fn1_matrix(const ModularContext& ctx, const ModularFunction& F, const FourierElement& x) {
    if (F.arity() != 1) throw RejectedInput("apply_fn1_matrix needs a one-variable function");
    require_entire_at_origin(F);
    check_input(ctx, x, "apply_fn1_matrix");
    const auto M = nabla_matrix(ctx);
    const int D = ctx.ambient_box();
    const FourierElement xa = x.project(D);
    Eigen::Map<const Eigen::VectorXcd> xv(xa.data().data(), Eigen::Index(xa.data().size()));
    const auto& c = F.taylor1();
    const int N = std::min<int>(ctx.taylor_order(), int(c.size()) - 1);
    Eigen::VectorXcd y = c[std::size_t(N)] * xv;
    for (int n = N - 1; n >= 0; --n) y = (M * y).eval() + c[std::size_t(n)] * xv;
    FourierElement r(x.theta(), D);
    for (Eigen::Index i = 0; i < y.size(); ++i) r.data()[std::size_t(i)] = y[i];
    return r;
}

const ModularFunction& sinhc_half_function() {
    static const ModularFunction f("sinhc_half", ModularFunction::Fn1([](cplx s) { return 4.0 * std::sinh(s / 2.0) / s; }));
    return f;
}

FourierElement sinhc_half(const ModularContext& ctx, const FourierElement& x, SeriesDiagnostics* diag) {
    return apply_fn1(ctx, sinhc_half_function(), x, diag);
}

}  // namespace nct
