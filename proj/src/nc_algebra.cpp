#include "nct/nc_algebra.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>

#include "nct/errors.hpp"

namespace nct {

namespace {

__int128 pow10_i128(int p) {
    __int128 r = 1;
    for (int i = 0; i < p; ++i) r *= 10;
    return r;
}

// (a * b) mod m for 0 <= a < m, b >= 0, without overflow.
__int128 mulmod(__int128 a, unsigned long long b, __int128 m) {
    __int128 r = 0;
    while (b) {
        if (b & 1ULL) {
            r += a;
            if (r >= m) r -= m;
        }
        a += a;
        if (a >= m) a -= m;
        b >>= 1;
    }
    return r;
}

std::string i128_to_string(__int128 v) {
    if (v == 0) return "0";
    bool neg = v < 0;
    if (neg) v = -v;
    std::string s;
    while (v > 0) {
        s.push_back(char('0' + int(v % 10)));
        v /= 10;
    }
    if (neg) s.push_back('-');
    std::reverse(s.begin(), s.end());
    return s;
}

}  // namespace

Theta::Theta(const std::string& decimal) {
    std::string s;
    for (char ch : decimal)
        if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
    if (s.empty()) throw RejectedInput("empty theta string");
    std::size_t i = 0;
    bool neg = false;
    if (s[i] == '+' || s[i] == '-') neg = (s[i++] == '-');
    std::string mant;
    int frac_digits = 0;
    bool seen_point = false;
    for (; i < s.size() && s[i] != 'e' && s[i] != 'E'; ++i) {
        if (s[i] == '.') {
            if (seen_point) throw RejectedInput("bad theta: " + decimal);
            seen_point = true;
        } else if (std::isdigit(static_cast<unsigned char>(s[i]))) {
            mant.push_back(s[i]);
            if (seen_point) ++frac_digits;
        } else {
            throw RejectedInput("bad theta: " + decimal);
        }
    }
    int expo = 0;
    if (i < s.size()) expo = std::stoi(s.substr(i + 1));
    if (mant.empty()) throw RejectedInput("bad theta: " + decimal);
    int digits = frac_digits - expo;
    if (digits < 0) {
        mant.append(static_cast<std::size_t>(-digits), '0');
        digits = 0;
    }
    while (digits > 0 && mant.size() > 1 && mant.back() == '0') {
        mant.pop_back();
        --digits;
    }
    if (mant.size() > 36 || digits > 36) throw RejectedInput("theta has too many digits: " + decimal);
    __int128 n = 0;
    for (char ch : mant) n = n * 10 + (ch - '0');
    numer_ = neg ? -n : n;
    digits_ = digits;
    value_ = std::stod(s);
    // canonical text
    std::string t = i128_to_string(n);
    if (digits_ > 0) {
        if (static_cast<int>(t.size()) <= digits_) t.insert(0, std::size_t(digits_ - int(t.size()) + 1), '0');
        t.insert(t.size() - std::size_t(digits_), ".");
    }
    text_ = (neg && n != 0) ? "-" + t : t;
}

Theta Theta::from_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return Theta(buf);
}

Theta Theta::negated() const {
    if (numer_ == 0) return *this;
    return Theta(text_[0] == '-' ? text_.substr(1) : "-" + text_);
}

long double Theta::frac_times(long long n) const {
    const __int128 m = pow10_i128(digits_);
    __int128 a = numer_ % m;
    if (a < 0) a += m;
    unsigned long long un = static_cast<unsigned long long>(n < 0 ? -n : n);
    __int128 r = mulmod(a, un, m);
    if (n < 0 && r != 0) r = m - r;
    return static_cast<long double>(r) / static_cast<long double>(m);
}

cplx Theta::phase(long long n) const {
    const long double f = frac_times(n);
    const long double ang = 2.0L * 3.14159265358979323846264338327950288L * f;
    return {static_cast<double>(std::cos(ang)), static_cast<double>(std::sin(ang))};
}

// ---------------------------------------------------------------------------

FourierElement::FourierElement(Theta theta, int box)
    : theta_(std::move(theta)), box_(box), c_(std::size_t(2 * box + 1) * std::size_t(2 * box + 1)) {
    if (box < 0) throw RejectedInput("negative box");
}

FourierElement FourierElement::scalar(const Theta& theta, cplx c) {
    FourierElement a(theta, 0);
    a.c_[0] = c;
    return a;
}

FourierElement FourierElement::monomial(const Theta& theta, int k, int l, cplx c) {
    FourierElement a(theta, std::max(std::abs(k), std::abs(l)));
    a.set(k, l, c);
    return a;
}

cplx FourierElement::coeff(int k, int l) const {
    if (std::abs(k) > box_ || std::abs(l) > box_) return 0.0;
    return c_[std::size_t(k + box_) * std::size_t(side()) + std::size_t(l + box_)];
}

void FourierElement::set(int k, int l, cplx c) {
    if (std::abs(k) > box_ || std::abs(l) > box_) throw BoxError("mode outside box");
    c_[std::size_t(k + box_) * std::size_t(side()) + std::size_t(l + box_)] = c;
}

void FourierElement::add_to(int k, int l, cplx c) {
    if (std::abs(k) > box_ || std::abs(l) > box_) throw BoxError("mode outside box");
    c_[std::size_t(k + box_) * std::size_t(side()) + std::size_t(l + box_)] += c;
}

FourierElement FourierElement::project(int box) const {
    FourierElement r(theta_, box);
    const int b = std::min(box, box_);
    for (int k = -b; k <= b; ++k)
        for (int l = -b; l <= b; ++l) r.set(k, l, coeff(k, l));
    return r;
}

int FourierElement::support_box(double tol) const {
    int b = 0;
    for (int k = -box_; k <= box_; ++k)
        for (int l = -box_; l <= box_; ++l)
            if (std::abs(coeff(k, l)) > tol) b = std::max({b, std::abs(k), std::abs(l)});
    return b;
}

double FourierElement::l1_norm() const {
    double s = 0;
    for (const auto& z : c_) s += std::abs(z);
    return s;
}

double FourierElement::max_abs() const {
    double s = 0;
    for (const auto& z : c_) s = std::max(s, std::abs(z));
    return s;
}

void FourierElement::require_same_theta(const FourierElement& o) const {
    if (!(theta_ == o.theta_)) throw RejectedInput("theta mismatch: " + theta_.str() + " vs " + o.theta_.str());
}

void FourierElement::grow_to(int box) {
    if (box > box_) *this = project(box);
}

FourierElement& FourierElement::operator+=(const FourierElement& o) {
    require_same_theta(o);
    grow_to(o.box_);
    for (int k = -o.box_; k <= o.box_; ++k)
        for (int l = -o.box_; l <= o.box_; ++l) add_to(k, l, o.coeff(k, l));
    return *this;
}

FourierElement& FourierElement::operator-=(const FourierElement& o) {
    require_same_theta(o);
    grow_to(o.box_);
    for (int k = -o.box_; k <= o.box_; ++k)
        for (int l = -o.box_; l <= o.box_; ++l) add_to(k, l, -o.coeff(k, l));
    return *this;
}

FourierElement& FourierElement::operator*=(cplx s) {
    for (auto& z : c_) z *= s;
    return *this;
}

// ---------------------------------------------------------------------------

namespace {

struct Mode {
    int k, l;
    cplx c;
};

std::vector<Mode> nonzero_modes(const FourierElement& a) {
    std::vector<Mode> out;
    const int D = a.box();
    for (int k = -D; k <= D; ++k)
        for (int l = -D; l <= D; ++l) {
            cplx c = a.coeff(k, l);
            if (c != cplx(0.0)) out.push_back({k, l, c});
        }
    return out;
}

}  // namespace

FourierElement mul(const FourierElement& a, const FourierElement& b) {
    if (!(a.theta() == b.theta())) throw RejectedInput("theta mismatch in mul");
    const int D = a.box() + b.box();
    FourierElement r(a.theta(), D);
    const auto ma = nonzero_modes(a);
    const auto mb = nonzero_modes(b);
    // U1^k U2^l U1^k' U2^l' = e^{2 pi i theta l k'} U1^{k+k'} U2^{l+l'}
    const long long span = static_cast<long long>(a.box()) * b.box();
    std::vector<cplx> ph(std::size_t(2 * span + 1));
    for (long long n = -span; n <= span; ++n) ph[std::size_t(n + span)] = a.theta().phase(n);
    auto& out = r.data();
    const int S = r.side();
    for (const auto& x : ma)
        for (const auto& y : mb) {
            const long long n = static_cast<long long>(x.l) * y.k;
            out[std::size_t(x.k + y.k + D) * std::size_t(S) + std::size_t(x.l + y.l + D)] +=
                x.c * y.c * ph[std::size_t(n + span)];
        }
    return r;
}

FourierElement commutator(const FourierElement& a, const FourierElement& b) { return mul(a, b) - mul(b, a); }

FourierElement star(const FourierElement& a) {
    FourierElement r(a.theta(), a.box());
    const int D = a.box();
    for (int k = -D; k <= D; ++k)
        for (int l = -D; l <= D; ++l) {
            cplx c = a.coeff(k, l);
            if (c != cplx(0.0)) r.set(-k, -l, std::conj(c) * a.theta().phase(static_cast<long long>(k) * l));
        }
    return r;
}

cplx trace(const FourierElement& a) { return a.coeff(0, 0); }

FourierElement derive(const FourierElement& a, Deriv which, cplx tau) {
    FourierElement r = a;
    const int D = a.box();
    for (int k = -D; k <= D; ++k)
        for (int l = -D; l <= D; ++l) {
            cplx m;
            switch (which) {
                case Deriv::d1: m = double(k); break;
                case Deriv::d2: m = double(l); break;
                case Deriv::tau: m = double(k) + std::conj(tau) * double(l); break;
                case Deriv::tau_star: m = double(k) + tau * double(l); break;
            }
            r.set(k, l, a.coeff(k, l) * cplx(0, kTwoPi) * m);
        }
    return r;
}

FourierElement laplacian_tau(const FourierElement& a, cplx tau) {
    return derive(derive(a, Deriv::tau_star, tau), Deriv::tau, tau);
}

FourierElement square_re(const FourierElement& h, cplx tau) {
    const auto dh = derive(h, Deriv::tau, tau);
    const auto dsh = derive(h, Deriv::tau_star, tau);
    return (mul(dh, dsh) + mul(dsh, dh)) * cplx(0.5);
}

FourierElement square_im(const FourierElement& h, cplx tau) {
    const auto dh = derive(h, Deriv::tau, tau);
    const auto dsh = derive(h, Deriv::tau_star, tau);
    return (mul(dh, dsh) - mul(dsh, dh)) * cplx(0.5);
}

double max_diff(const FourierElement& a, const FourierElement& b) { return (a - b).max_abs(); }

bool is_self_adjoint(const FourierElement& a, double tol) { return max_diff(a, star(a)) <= tol; }

// ---------------------------------------------------------------------------

FourierElement exp(const FourierElement& a, const SeriesOptions& opt) {
    FourierElement sum = FourierElement::scalar(a.theta(), 1.0);
    FourierElement term = sum;
    for (int n = 1; n <= opt.max_terms; ++n) {
        term = mul(term, a) * cplx(1.0 / n);
        if (term.box() > opt.box_limit) term = term.project(opt.box_limit);
        sum += term;
        if (term.l1_norm() < opt.tol * std::max(1.0, sum.l1_norm()) * 1e-4) return sum;
    }
    throw Error("exp series did not converge");
}

FourierElement log(const FourierElement& a, const SeriesOptions& opt) {
    const cplx c = a.coeff(0, 0);
    if (std::abs(c) == 0.0) throw DomainError("log: vanishing constant term");
    FourierElement y = a * (1.0 / c) - FourierElement::scalar(a.theta(), 1.0);
    const double ny = y.l1_norm();
    if (ny >= 1.0) throw DomainError("log: ||a/a00 - 1||_1 >= 1, series does not converge");
    FourierElement sum = FourierElement::scalar(a.theta(), std::log(c));
    FourierElement pw = FourierElement::scalar(a.theta(), 1.0);
    for (int n = 1; n <= opt.max_terms; ++n) {
        pw = mul(pw, y);
        if (pw.box() > opt.box_limit) pw = pw.project(opt.box_limit);
        sum += pw * cplx((n % 2 ? 1.0 : -1.0) / n);
        if (std::pow(ny, n) / n < opt.tol * 1e-4) return sum;
    }
    throw Error("log series did not converge");
}

FourierElement inverse(const FourierElement& a, const SeriesOptions& opt) {
    const auto one = FourierElement::scalar(a.theta(), 1.0);
    const double na = a.l1_norm();
    if (na == 0.0) throw SingularMetric("inverse of zero");
    // X0 = a^*/||a||_1^2 gives ||1 - aX0|| < 1 for a close to a positive scalar;
    // for elements dominated by their constant term 1/a00 is a better start.
    FourierElement X = std::abs(a.coeff(0, 0)) > 0.5 * na ? FourierElement::scalar(a.theta(), 1.0 / a.coeff(0, 0))
                                                          : star(a) * cplx(1.0 / (na * na));
    double prev = 1e300;
    int stall = 0;
    for (int it = 0; it < opt.max_terms; ++it) {
        auto R = one - mul(a, X).project(opt.box_limit);
        const double res = R.l1_norm();
        if (res < opt.tol) return X;
        if (!(res < prev * 0.999)) {
            if (++stall > 5) throw SingularMetric("inverse: Newton residual stalls at " + std::to_string(res));
        } else {
            stall = 0;
        }
        prev = std::min(prev, res);
        X = (X + mul(X, R)).project(opt.box_limit);
    }
    throw SingularMetric("inverse: Newton iteration did not reach tolerance");
}

ConformalDatum make_conformal(const FourierElement& h, cplx tau, const SeriesOptions& opt) {
    if (!(tau.imag() > 0)) throw RejectedInput("Im tau must be positive");
    if (!is_self_adjoint(h, 1e-12 * std::max(1.0, h.l1_norm()))) throw RejectedInput("h is not self-adjoint");
    return {h, exp(h, opt), tau};
}

ConnectionForms hermitian_connection(const FourierElement& K, cplx z, cplx tau, double deriv_scale,
                                     const SeriesOptions& opt) {
    if (!is_self_adjoint(K, 1e-10 * std::max(1.0, K.l1_norm()))) throw RejectedInput("K is not self-adjoint");
    const auto Kinv = inverse(K, opt);
    const auto dK = derive(K, Deriv::tau, tau) * cplx(deriv_scale);
    auto w2s = mul(dK - K * z - K * std::conj(z), Kinv) * (1.0 / (std::conj(tau) - tau));
    auto w2 = star(w2s);
    auto w1 = FourierElement::scalar(K.theta(), z) - w2 * std::conj(tau);
    return {w1, w2, z};
}

double connection_residual(const FourierElement& K, const ConnectionForms& w, cplx tau, double deriv_scale) {
    (void)tau;
    double r = 0;
    const Deriv ds[2] = {Deriv::d1, Deriv::d2};
    const FourierElement* om[2] = {&w.omega1, &w.omega2};
    for (int j = 0; j < 2; ++j) {
        auto lhs = derive(K, ds[j]) * cplx(deriv_scale);
        auto rhs = mul(K, *om[j]) + mul(star(*om[j]), K);
        r = std::max(r, (lhs - rhs).l1_norm());
    }
    return r;
}

// ---------------------------------------------------------------------------

nlohmann::json to_json(const FourierElement& a) {
    nlohmann::json j;
    j["theta"] = a.theta().str();
    auto arr = nlohmann::json::array();
    const int D = a.box();
    for (int k = -D; k <= D; ++k)
        for (int l = -D; l <= D; ++l) {
            cplx c = a.coeff(k, l);
            if (c != cplx(0.0)) arr.push_back({k, l, c.real(), c.imag()});
        }
    j["coeffs"] = arr;
    return j;
}

FourierElement element_from_json(const nlohmann::json& j) {
    if (!j.contains("theta") || !j.contains("coeffs")) throw RejectedInput("element JSON needs theta and coeffs");
    Theta th = j["theta"].is_string() ? Theta(j["theta"].get<std::string>()) : Theta::from_double(j["theta"].get<double>());
    int D = 0;
    for (const auto& e : j["coeffs"]) D = std::max({D, std::abs(e.at(0).get<int>()), std::abs(e.at(1).get<int>())});
    FourierElement a(th, D);
    for (const auto& e : j["coeffs"]) {
        const double im = e.size() > 3 ? e.at(3).get<double>() : 0.0;
        a.add_to(e.at(0).get<int>(), e.at(1).get<int>(), cplx(e.at(2).get<double>(), im));
    }
    return a;
}

}  // namespace nct
