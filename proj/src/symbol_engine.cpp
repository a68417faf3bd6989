#include "nct/symbol_engine.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <deque>
#include <functional>
#include <random>
#include <sstream>

#include "nct/errors.hpp"

namespace nct::sym {

// ---------------------------------------------------------------------------
// Coefficients

QI& QI::operator+=(const QI& o) {
    re += o.re;
    im += o.im;
    return *this;
}

QI& QI::operator-=(const QI& o) {
    re -= o.re;
    im -= o.im;
    return *this;
}

QI& QI::operator*=(const QI& o) {
    const Q r = re * o.re - im * o.im;
    im = re * o.im + im * o.re;
    re = r;
    return *this;
}

std::string QI::str() const {
    if (im == 0) return re.str();
    if (re == 0) return (im == 1 ? std::string("i") : im == -1 ? std::string("-i") : im.str() + "i");
    return "(" + re.str() + (im > 0 ? "+" : "") + im.str() + "i)";
}

Q parse_q(const std::string& s) {
    if (s.empty()) throw RejectedInput("empty rational");
    const auto slash = s.find('/');
    if (slash != std::string::npos) {
        const Q d(s.substr(slash + 1));
        if (d == 0) throw RejectedInput("rational with zero denominator: " + s);
        return Q(boost::multiprecision::cpp_int(s.substr(0, slash))) / d;
    }
    const auto dot = s.find('.');
    if (dot == std::string::npos) return Q(boost::multiprecision::cpp_int(s));
    const std::string frac = s.substr(dot + 1);
    std::string whole = s.substr(0, dot);
    const bool neg = !whole.empty() && whole[0] == '-';
    if (whole.empty() || whole == "-" || whole == "+") whole += "0";
    boost::multiprecision::cpp_int den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    const boost::multiprecision::cpp_int w(whole), f(frac.empty() ? std::string("0") : frac);
    const boost::multiprecision::cpp_int n = (neg ? -1 : 1) * (abs(w) * den + f);
    return Q(n) / Q(den);
}

// ---------------------------------------------------------------------------
// Expressions

namespace {

Mono zero_mono() { return Mono{}; }

Mono operator+(Mono a, const Mono& b) {
    for (int i = 0; i < kNumVars; ++i) a[std::size_t(i)] += b[std::size_t(i)];
    return a;
}

Mono unit(Var v, int n = 1) {
    Mono m{};
    m[std::size_t(v)] = n;
    return m;
}

Word concat(const Word& a, const Word& b) {
    Word w = a;
    w.insert(w.end(), b.begin(), b.end());
    return w;
}

Q factorial(int n) {
    Q f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

}  // namespace

SymbolExpr SymbolExpr::scalar(QI c) { return term(std::move(c), zero_mono(), {}); }

SymbolExpr SymbolExpr::var(Var v, int power) { return term(1, unit(v, power), {}); }

SymbolExpr SymbolExpr::letter(const Letter& l) { return term(1, zero_mono(), {l}); }

SymbolExpr SymbolExpr::term(QI c, const Mono& m, Word w) {
    SymbolExpr e;
    e.add(m, w, c);
    return e;
}

void SymbolExpr::add(const Mono& m, const Word& w, const QI& c) {
    if (c.is_zero()) return;
    auto [it, fresh] = terms_.try_emplace(Key{m, w}, c);
    if (!fresh) {
        it->second += c;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

SymbolExpr& SymbolExpr::operator+=(const SymbolExpr& o) {
    for (const auto& [k, c] : o.terms_) add(k.first, k.second, c);
    return *this;
}

SymbolExpr& SymbolExpr::operator-=(const SymbolExpr& o) {
    for (const auto& [k, c] : o.terms_) add(k.first, k.second, -c);
    return *this;
}

SymbolExpr operator*(const SymbolExpr& a, const SymbolExpr& b) {
    SymbolExpr r;
    for (const auto& [ka, ca] : a.terms_)
        for (const auto& [kb, cb] : b.terms_) r.add(ka.first + kb.first, concat(ka.second, kb.second), ca * cb);
    return r;
}

SymbolExpr operator*(const SymbolExpr& a, const QI& c) {
    SymbolExpr r;
    for (const auto& [k, v] : a.terms_) r.add(k.first, k.second, v * c);
    return r;
}

int SymbolExpr::order(const Mono& m, const Word& w) {
    const int nb = int(std::count_if(w.begin(), w.end(), [](const Letter& l) { return l.kind == Letter::B; }));
    return m[ETA] + m[ETABAR] + 2 * m[LAMBDA] - 2 * nb;
}

int SymbolExpr::max_order() const {
    int o = INT_MIN;
    for (const auto& [k, c] : terms_) o = std::max(o, order(k.first, k.second));
    return o;
}

int SymbolExpr::min_order() const {
    int o = INT_MAX;
    for (const auto& [k, c] : terms_) o = std::min(o, order(k.first, k.second));
    return o;
}

SymbolExpr SymbolExpr::truncated(int drop_order) const {
    SymbolExpr r;
    for (const auto& [k, c] : terms_)
        if (order(k.first, k.second) >= drop_order) r.add(k.first, k.second, c);
    return r;
}

namespace {

std::string derivs(int p, int q, bool tex) {
    std::string s;
    auto one = [&](const char* plain, const char* t, int n) {
        if (n == 0) return;
        if (!s.empty()) s += " ";
        s += tex ? t : plain;
        if (n > 1) s += (tex ? "^{" : "^") + std::to_string(n) + (tex ? "}" : "");
    };
    one("d", "\\partial_\\tau", p);
    one("ds", "\\partial^*_\\tau", q);
    return s;
}

std::string letter_str(const Letter& l, bool tex) {
    std::string base;
    switch (l.kind) {
        case Letter::B: return "b";
        case Letter::K: base = "k^2"; break;
        case Letter::A0: base = tex ? "a_0" : "a0"; break;
        case Letter::Named: base = l.name; break;
    }
    if (l.p == 0 && l.q == 0) return base;
    return tex ? "(" + derivs(l.p, l.q, true) + " " + base + ")" : derivs(l.p, l.q, false) + "(" + base + ")";
}

std::string mono_str(const Mono& m, bool tex) {
    static const char* plain[kNumVars] = {"eta", "etabar", "lambda", "eps1", "eps2", "kappa"};
    static const char* texn[kNumVars] = {"\\eta", "\\bar\\eta", "\\lambda", "\\varepsilon_1", "\\varepsilon_2",
                                         "\\kappa"};
    std::string s;
    for (int v = 0; v < kNumVars; ++v) {
        const int n = m[std::size_t(v)];
        if (n == 0) continue;
        if (!s.empty()) s += " ";
        s += tex ? texn[v] : plain[v];
        if (n != 1) s += (tex ? "^{" : "^") + std::to_string(n) + (tex ? "}" : "");
    }
    return s;
}

std::string coeff_tex(const QI& c) {
    auto q = [](const Q& x) {
        if (denominator(x) == 1) return numerator(x).str();
        return std::string(x < 0 ? "-" : "") + "\\frac{" + boost::multiprecision::cpp_int(abs(numerator(x))).str() + "}{" + denominator(x).str() + "}";
    };
    if (c.im == 0) return q(c.re);
    if (c.re == 0) return q(c.im) + "i";
    return "(" + q(c.re) + (c.im > 0 ? "+" : "") + q(c.im) + "i)";
}

std::string render(const std::map<SymbolExpr::Key, QI>& terms, bool tex) {
    if (terms.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [k, c] : terms) {
        std::string factors = mono_str(k.first, tex);
        for (const auto& l : k.second) factors += (factors.empty() ? "" : " ") + letter_str(l, tex);
        const bool unit_coeff = (c.im == 0 && (c.re == 1 || c.re == -1)) && !factors.empty();
        const bool negative = c.im == 0 && c.re < 0;
        if (!first) os << (negative ? " - " : " + ");
        else if (negative) os << "-";
        first = false;
        const QI shown = negative ? -c : c;
        if (!unit_coeff) os << (tex ? coeff_tex(shown) : shown.str()) << (factors.empty() ? "" : " ");
        os << factors;
    }
    return os.str();
}

}  // namespace

std::string SymbolExpr::str() const { return render(terms_, false); }
std::string SymbolExpr::latex() const { return render(terms_, true); }

// ---------------------------------------------------------------------------
// Derivations

namespace {

// Leibniz extension of a letter rule and a monomial rule.
using LetterRule = std::function<SymbolExpr(const Letter&)>;  // zero when the letter is constant
using MonoRule = std::function<SymbolExpr(const Mono&)>;

SymbolExpr derive(const SymbolExpr& e, const MonoRule& mono_rule, const LetterRule& letter_rule) {
    SymbolExpr r;
    for (const auto& [k, c] : e.terms()) {
        const auto& [m, w] = k;
        if (mono_rule) r += mono_rule(m) * SymbolExpr::term(c, zero_mono(), w);
        for (std::size_t i = 0; i < w.size(); ++i) {
            const SymbolExpr dl = letter_rule(w[i]);
            if (dl.is_zero()) continue;
            const Word left(w.begin(), w.begin() + long(i)), right(w.begin() + long(i) + 1, w.end());
            r += SymbolExpr::term(c, m, left) * dl * SymbolExpr::term(1, zero_mono(), right);
        }
    }
    return r;
}

SymbolExpr tau_rule(const Letter& l, bool star_dir) {
    if (l.kind == Letter::B) {
        // d b = -b (d k^2) |eta|^2 b
        return SymbolExpr::term(-1, unit(ETA) + unit(ETABAR), {Letter::b(), Letter::k(!star_dir, star_dir), Letter::b()});
    }
    Letter d = l;
    (star_dir ? d.q : d.p) += 1;
    return SymbolExpr::letter(d);
}

}  // namespace

SymbolExpr d_tau(const SymbolExpr& e) { return derive(e, nullptr, [](const Letter& l) { return tau_rule(l, false); }); }

SymbolExpr d_tau_star(const SymbolExpr& e) {
    return derive(e, nullptr, [](const Letter& l) { return tau_rule(l, true); });
}

SymbolExpr laplace_tau(const SymbolExpr& e) { return d_tau_star(d_tau(e)); }

namespace {

SymbolExpr eta_derivative(const SymbolExpr& e, Var v, Var other) {
    return derive(
        e,
        [v](const Mono& m) {
            if (m[std::size_t(v)] == 0) return SymbolExpr{};
            Mono d = m;
            d[std::size_t(v)] -= 1;
            return SymbolExpr::term(QI(m[std::size_t(v)]), d, {});
        },
        [other](const Letter& l) {
            // d_eta b = -etabar k^2 b^2, written b k^2 b
            if (l.kind != Letter::B) return SymbolExpr{};
            return SymbolExpr::term(-1, unit(other), {Letter::b(), Letter::k(), Letter::b()});
        });
}

}  // namespace

SymbolExpr d_eta(const SymbolExpr& e) { return eta_derivative(e, ETA, ETABAR); }
SymbolExpr d_etabar(const SymbolExpr& e) { return eta_derivative(e, ETABAR, ETA); }

SymbolExpr star(const SymbolExpr& e) {
    SymbolExpr r;
    for (const auto& [k, c] : e.terms()) {
        Mono m = k.first;
        std::swap(m[ETA], m[ETABAR]);
        Word w(k.second.rbegin(), k.second.rend());
        int sign = 1;
        for (auto& l : w) {
            // (d x)^* = -ds (x^*) for the self-adjoint generators
            if ((l.p + l.q) % 2) sign = -sign;
            std::swap(l.p, l.q);
        }
        r.add(m, w, c.conj() * QI(sign));
    }
    return r;
}

namespace atoms {
SymbolExpr b() { return SymbolExpr::letter(Letter::b()); }
SymbolExpr k2() { return SymbolExpr::letter(Letter::k()); }
SymbolExpr a0() { return SymbolExpr::letter(Letter::a0()); }
SymbolExpr eta() { return SymbolExpr::var(ETA); }
SymbolExpr etabar() { return SymbolExpr::var(ETABAR); }
SymbolExpr abs_eta2() { return SymbolExpr::term(1, unit(ETA) + unit(ETABAR), {}); }
SymbolExpr lambda() { return SymbolExpr::var(LAMBDA); }
SymbolExpr eps1() { return SymbolExpr::var(EPS1); }
SymbolExpr eps2() { return SymbolExpr::var(EPS2); }
SymbolExpr one() { return SymbolExpr::scalar(1); }
}  // namespace atoms

// ---------------------------------------------------------------------------
// Product and adjoint

SymbolExpr symbol_product(const SymbolExpr& f, const SymbolExpr& g, int drop_order, const TwistData& twist) {
    if (f.is_zero() || g.is_zero()) return {};
    const int top = f.max_order() + g.max_order();
    if (twist.b12 != 0 && drop_order < top - 2)
        throw RejectedInput("symbol_product: twisted expansion is only known through order m+m'-2");
    const int M = top - drop_order;
    SymbolExpr h;
    std::vector<SymbolExpr> fa{f}, ga{g};  // d_eta^a f, d^a g
    for (int a = 0; a <= M; ++a) {
        if (a > 0) {
            fa.push_back(d_eta(fa.back()));
            ga.push_back(d_tau(ga.back()));
        }
        SymbolExpr fab = fa[std::size_t(a)], gab = ga[std::size_t(a)];
        for (int b = 0; a + b <= M; ++b) {
            if (b > 0) {
                fab = d_etabar(fab);
                gab = d_tau_star(gab);
            }
            if (fab.is_zero() || gab.is_zero()) break;
            h += (fab * gab) * QI(1 / (factorial(a) * factorial(b)));
        }
    }
    if (twist.b12 != 0) {
        const SymbolExpr c = SymbolExpr::term(QI(twist.c_tau() / 2), unit(KAPPA), {});
        h += c * (d_eta(f) * d_etabar(g) - d_etabar(f) * d_eta(g));
    }
    return h.truncated(drop_order);
}

SymbolExpr adjoint_symbol(const SymbolExpr& f, int drop_order) {
    const bool has_b = std::any_of(f.terms().begin(), f.terms().end(), [](const auto& t) {
        return std::any_of(t.first.second.begin(), t.first.second.end(),
                           [](const Letter& l) { return l.kind == Letter::B; });
    });
    if (has_b && drop_order == -1000) throw RejectedInput("adjoint_symbol: symbols containing b need a drop order");
    if (f.is_zero()) return {};
    const SymbolExpr fs = star(f);
    const int M = f.max_order() - drop_order;
    SymbolExpr h;
    SymbolExpr fa = fs;
    for (int a = 0; a <= M && !fa.is_zero(); ++a) {
        if (a > 0) fa = d_eta(d_tau(fa));
        SymbolExpr fab = fa;
        for (int b = 0; a + b <= M && !fab.is_zero(); ++b) {
            if (b > 0) fab = d_etabar(d_tau_star(fab));
            h += fab * QI(1 / (factorial(a) * factorial(b)));
        }
    }
    return h.truncated(drop_order);
}

SymbolExpr operator_symbol(const SymbolExpr& eps1, const SymbolExpr& eps2, const SymbolExpr& a0) {
    using namespace atoms;
    return k2() * abs_eta2() + eps1 * SymbolExpr::letter(Letter::k(1, 0)) * etabar() +
           eps2 * SymbolExpr::letter(Letter::k(0, 1)) * eta() + a0;
}

// ---------------------------------------------------------------------------
// Resolvent

ResolventTerms resolvent_recursion(const TwistData&) {
    // The twist enters the product only below order -2 here (a_2 and b are functions
    // of |eta|^2), so the three terms do not depend on it.
    using namespace atoms;
    const SymbolExpr B = b(), K = k2();
    const SymbolExpr rho1 = eps1() * SymbolExpr::letter(Letter::k(1, 0));
    const SymbolExpr rho2 = eps2() * SymbolExpr::letter(Letter::k(0, 1));
    const SymbolExpr a1 = rho1 * etabar() + rho2 * eta();
    auto D1 = [&](const SymbolExpr& x) { return etabar() * d_tau(x) + eta() * d_tau_star(x); };
    ResolventTerms r;
    r.b2 = B;
    r.b3 = -(B * K * D1(B)) - B * a1 * B;
    r.b4 = -(B * K * D1(r.b3)) - B * a1 * r.b3 - B * K * laplace_tau(B) -
           B * (rho1 * d_tau_star(B) + rho2 * d_tau(B)) - B * a0() * B;
    return r;
}

std::vector<std::pair<std::string, SymbolExpr>> b4_closed_summands() {
    using namespace atoms;
    const SymbolExpr B = b(), K = k2(), dk = SymbolExpr::letter(Letter::k(1, 0)),
                     dsk = SymbolExpr::letter(Letter::k(0, 1));
    return {
        {"(2 b k^2 |eta|^2 - 1 - eps1 - eps2) b k^2 Lap b",
         (QI(2) * B * K * abs_eta2() - one() - eps1() - eps2()) * B * K * laplace_tau(B)},
        {"lambda b k^2 ((ds b)(d b) + (d b)(ds b))",
         lambda() * B * K * (d_tau_star(B) * d_tau(B) + d_tau(B) * d_tau_star(B))},
        {"eps1 lambda b (d k^2) b ds b", eps1() * lambda() * B * dk * B * d_tau_star(B)},
        {"eps2 lambda b (ds k^2) b d b", eps2() * lambda() * B * dsk * B * d_tau(B)},
        {"eps1 eps2 |eta|^2 b ((d k^2) b (ds k^2) + (ds k^2) b (d k^2)) b",
         eps1() * eps2() * abs_eta2() * B * (dk * B * dsk + dsk * B * dk) * B},
        {"-b a0 b", -(B * a0() * B)},
    };
}

SymbolExpr b4_closed() {
    SymbolExpr s;
    for (const auto& [name, e] : b4_closed_summands()) s += e;
    return s;
}

// ---------------------------------------------------------------------------
// Canonical form

namespace {

using Exps = std::vector<int>;
using Poly = std::map<Exps, QI>;

void poly_add(Poly& p, const Exps& e, const QI& c) {
    if (c.is_zero()) return;
    auto [it, fresh] = p.try_emplace(e, c);
    if (!fresh) {
        it->second += c;
        if (it->second.is_zero()) p.erase(it);
    }
}

// Multiply by (x_j eta etabar - lambda).
Poly times_factor(const Poly& p, int j) {
    Poly r;
    for (const auto& [e, c] : p) {
        Exps a = e;
        a[std::size_t(ETA)] += 1;
        a[std::size_t(ETABAR)] += 1;
        a[std::size_t(kNumVars + j)] += 1;
        poly_add(r, a, c);
        Exps l = e;
        l[std::size_t(LAMBDA)] += 1;
        poly_add(r, l, -c);
    }
    return r;
}

// Exact division by (x_j eta etabar - lambda) when the remainder vanishes.
bool divide_factor(Poly& p, int j) {
    // Coefficients c_k of lambda^k; divide by (lambda - r), r = x_j eta etabar.
    std::map<int, Poly> byk;
    for (const auto& [e, c] : p) {
        Exps z = e;
        const int k = z[std::size_t(LAMBDA)];
        z[std::size_t(LAMBDA)] = 0;
        poly_add(byk[k], z, c);
    }
    auto shift_r = [j](const Poly& q) {
        Poly r;
        for (const auto& [e, c] : q) {
            Exps a = e;
            a[std::size_t(ETA)] += 1;
            a[std::size_t(ETABAR)] += 1;
            a[std::size_t(kNumVars + j)] += 1;
            poly_add(r, a, c);
        }
        return r;
    };
    const int n = byk.rbegin()->first;
    if (n == 0) return false;
    std::map<int, Poly> quo;
    Poly carry;  // q_k
    for (int k = n; k >= 1; --k) {
        Poly qk = byk.count(k) ? byk[k] : Poly{};
        for (const auto& [e, c] : shift_r(carry)) poly_add(qk, e, c);
        quo[k - 1] = qk;
        carry = qk;
    }
    Poly rem = byk.count(0) ? byk[0] : Poly{};
    for (const auto& [e, c] : shift_r(carry)) poly_add(rem, e, c);
    if (!rem.empty()) return false;
    Poly out;
    for (const auto& [k, q] : quo)
        for (const auto& [e, c] : q) {
            Exps a = e;
            a[std::size_t(LAMBDA)] = k;
            poly_add(out, a, -c);  // (x eta etabar - lambda) = -(lambda - r)
        }
    p = std::move(out);
    return true;
}

struct SlotTerm {
    Word key;
    std::vector<int> den;
    Exps exps;
};

SlotTerm split(const Mono& m, const Word& w) {
    SlotTerm t;
    const int slots = 1 + int(std::count_if(w.begin(), w.end(), [](const Letter& l) { return !l.is_slot(); }));
    t.den.assign(std::size_t(slots), 0);
    t.exps.assign(std::size_t(kNumVars + slots), 0);
    for (int v = 0; v < kNumVars; ++v) t.exps[std::size_t(v)] = m[std::size_t(v)];
    int j = 0;
    for (const auto& l : w) {
        if (l.kind == Letter::B) ++t.den[std::size_t(j)];
        else if (l.is_slot()) ++t.exps[std::size_t(kNumVars + j)];
        else {
            t.key.push_back(l);
            ++j;
        }
    }
    return t;
}

}  // namespace

CanonicalForm canonical(const SymbolExpr& e) {
    std::map<Word, std::vector<std::pair<SlotTerm, QI>>> groups;
    for (const auto& [k, c] : e.terms()) {
        SlotTerm t = split(k.first, k.second);
        groups[t.key].emplace_back(std::move(t), c);
    }
    CanonicalForm out;
    for (auto& [key, list] : groups) {
        const std::size_t slots = key.size() + 1;
        std::vector<int> D(slots, 0);
        for (const auto& [t, c] : list)
            for (std::size_t j = 0; j < slots; ++j) D[j] = std::max(D[j], t.den[j]);
        Poly num;
        for (const auto& [t, c] : list) {
            Poly p{{t.exps, c}};
            for (std::size_t j = 0; j < slots; ++j)
                for (int r = t.den[j]; r < D[j]; ++r) p = times_factor(p, int(j));
            for (const auto& [ex, cc] : p) poly_add(num, ex, cc);
        }
        if (num.empty()) continue;
        for (std::size_t j = 0; j < slots; ++j)
            while (D[j] > 0 && divide_factor(num, int(j))) --D[j];
        out[key] = SlotRational{D, std::move(num)};
    }
    return out;
}

SymbolExpr from_canonical(const CanonicalForm& c) {
    SymbolExpr r;
    for (const auto& [key, sr] : c)
        for (const auto& [ex, coeff] : sr.num) {
            Mono m{};
            for (int v = 0; v < kNumVars; ++v) m[std::size_t(v)] = ex[std::size_t(v)];
            Word w;
            for (std::size_t j = 0; j < sr.den.size(); ++j) {
                for (int i = 0; i < ex[kNumVars + j]; ++i) w.push_back(Letter::k());
                for (int i = 0; i < sr.den[j]; ++i) w.push_back(Letter::b());
                if (j < key.size()) w.push_back(key[j]);
            }
            r.add(m, w, coeff);
        }
    return apply_rewrite(r);
}

bool equal_elements(const SymbolExpr& a, const SymbolExpr& b) { return canonical(a) == canonical(b); }

SymbolExpr apply_rewrite(const SymbolExpr& e, RewriteOrder order, unsigned seed) {
    std::mt19937 rng(seed);
    std::deque<std::tuple<Mono, Word, QI>> work;
    for (const auto& [k, c] : e.terms()) work.emplace_back(k.first, k.second, c);
    SymbolExpr out;
    while (!work.empty()) {
        auto [m, w, c] = std::move(work.front());
        work.pop_front();
        std::vector<std::size_t> redex;
        if (m[ETA] > 0 && m[ETABAR] > 0)
            for (std::size_t i = 0; i + 1 < w.size(); ++i) {
                const bool bk = w[i].kind == Letter::B && w[i + 1] == Letter::k();
                const bool kb = w[i] == Letter::k() && w[i + 1].kind == Letter::B;
                if (bk || kb) redex.push_back(i);
            }
        if (redex.empty()) {
            out.add(m, w, c);
            continue;
        }
        std::size_t i = redex.front();
        if (order == RewriteOrder::rightmost) i = redex.back();
        if (order == RewriteOrder::random)
            i = redex[std::uniform_int_distribution<std::size_t>(0, redex.size() - 1)(rng)];
        // b k^2 |eta|^2 = 1 + lambda b
        Mono m1 = m;
        m1[ETA] -= 1;
        m1[ETABAR] -= 1;
        Word w1 = w;
        w1.erase(w1.begin() + long(i), w1.begin() + long(i) + 2);
        Mono m2 = m1;
        m2[LAMBDA] += 1;
        Word w2 = w1;
        w2.insert(w2.begin() + long(i), Letter::b());
        work.emplace_back(m1, std::move(w1), c);
        work.emplace_back(m2, std::move(w2), c);
    }
    return out;
}

SymbolExpr normalize_mod_integral(const SymbolExpr& e) {
    SymbolExpr kept;
    for (const auto& [k, c] : e.terms())
        if (k.first[ETA] == k.first[ETABAR]) kept.add(k.first, k.second, c);
    return from_canonical(canonical(kept));
}

namespace {

SymbolExpr substitute(const SymbolExpr& e, const std::vector<std::pair<Var, Q>>& vals) {
    SymbolExpr r;
    for (const auto& [k, c] : e.terms()) {
        Mono m = k.first;
        QI cc = c;
        for (const auto& [v, x] : vals) {
            for (int i = 0; i < m[std::size_t(v)]; ++i) cc *= QI(x);
            m[std::size_t(v)] = 0;
        }
        r.add(m, k.second, cc);
    }
    return r;
}

}  // namespace

SymbolExpr substitute_eps(const SymbolExpr& e, const Q& eps1, const Q& eps2) {
    return substitute(e, {{EPS1, eps1}, {EPS2, eps2}});
}

SymbolExpr substitute_lambda(const SymbolExpr& e, const Q& lambda) { return substitute(e, {{LAMBDA, lambda}}); }

SymbolExpr flat(const SymbolExpr& e) {
    SymbolExpr r;
    for (const auto& [k, c] : e.terms()) {
        const bool derivative = std::any_of(k.second.begin(), k.second.end(),
                                            [](const Letter& l) { return l.kind == Letter::K && l.p + l.q > 0; });
        if (!derivative) r.add(k.first, k.second, c);
    }
    return r;
}

namespace {

VerifyReport compare(const SymbolExpr& rec, const SymbolExpr& closed) {
    VerifyReport v;
    v.recursion = normalize_mod_integral(rec);
    v.closed = normalize_mod_integral(closed);
    v.diff = normalize_mod_integral(rec - closed);
    v.equal = v.diff.is_zero();
    return v;
}

}  // namespace

VerifyReport verify_theorem_resexp(const TwistData& twist) {
    return compare(resolvent_recursion(twist).b4, b4_closed());
}

VerifyReport verify_theorem_resexp(const TwistData& twist, const Q& eps1, const Q& eps2) {
    return compare(substitute_eps(resolvent_recursion(twist).b4, eps1, eps2), substitute_eps(b4_closed(), eps1, eps2));
}

// ---------------------------------------------------------------------------
// Integration of b_{-4}

std::string target_name(Target t) {
    switch (t) {
        case Target::F: return "F";
        case Target::GRe: return "GRe";
        case Target::GIm: return "GIm";
        case Target::A0: return "a0";
    }
    return "?";
}

double HTerm::value(double u, double v, double e1, double e2) const {
    double c = 0.0;
    for (const auto& [deg, q] : eps) c += q.convert_to<double>() * std::pow(e1, deg.first) * std::pow(e2, deg.second);
    if (c == 0.0) return 0.0;
    const std::vector<double> w{1.0, u, u * v};
    // int x^m prod (1 + x w_j)^{-n_j} = prod w_j^{-n_j} int x^m prod (x + 1/w_j)^{-n_j}
    std::vector<std::pair<double, int>> nodes;
    double scale = 1.0;
    int N = 0;
    for (std::size_t j = 0; j < n.size(); ++j) {
        if (n[j] == 0) continue;
        nodes.emplace_back(1.0 / w[j], n[j]);
        scale *= std::pow(w[j], -n[j]);
        N += n[j];
    }
    bool close = false;
    for (std::size_t a = 0; a < nodes.size(); ++a)
        for (std::size_t b = a + 1; b < nodes.size(); ++b) {
            const double x = nodes[a].first, y = nodes[b].first;
            if (x != y && std::abs(x - y) < 1e-3 * std::max(x, y)) close = true;
        }
    double integral;
    if (close) {
        auto at = [&](std::size_t j) { return j < n.size() ? n[j] : 0; };
        integral = b_integral(m, at(0), at(1), at(2), u, u * v);
    } else {
        // sign (-1)^{m+N} times the divided difference of x^m log x
        std::sort(nodes.begin(), nodes.end());
        std::vector<std::pair<double, int>> merged;
        for (const auto& nd : nodes) {
            if (!merged.empty() && merged.back().first == nd.first) merged.back().second += nd.second;
            else merged.push_back(nd);
        }
        integral = (((m + N) % 2) ? -1.0 : 1.0) * scale * divided_diff_idm_log(merged, m);
    }
    return c * std::pow(u, pu) * std::pow(v, pv) * integral;
}

double B4Contribution::value(double u, double v, double e1, double e2) const {
    double s = 0.0;
    for (const auto& t : terms) s += t.value(u, v, e1, e2);
    return s;
}

namespace {

std::string word_str(const Word& w) {
    std::string s;
    for (const auto& l : w) s += (s.empty() ? "" : " ") + letter_str(l, false);
    return s.empty() ? "(empty word)" : s;
}

}  // namespace

std::vector<B4Contribution> integrate_b4(const std::vector<std::pair<std::string, SymbolExpr>>& summands) {
    const Letter F = Letter::k(1, 1), A = Letter::a0(), P = Letter::k(1, 0), S = Letter::k(0, 1);
    std::vector<B4Contribution> out;
    for (const auto& [name, e] : summands) {
        SymbolExpr kept;
        for (const auto& [k, c] : e.terms())
            if (k.first[ETA] == k.first[ETABAR]) kept.add(k.first, k.second, c);
        std::map<Target, B4Contribution> parts;
        for (const auto& [key, sr] : canonical(kept)) {
            std::vector<std::pair<Target, int>> targets;  // target, sign
            const int letters = int(key.size());
            if (key == Word{F}) targets = {{Target::F, 1}};
            else if (key == Word{A}) targets = {{Target::A0, 1}};
            else if (key == Word{P, S}) targets = {{Target::GRe, 1}, {Target::GIm, 1}};
            else if (key == Word{S, P}) targets = {{Target::GRe, 1}, {Target::GIm, -1}};
            else throw StructuralError("integrate_b4: unclassifiable word " + word_str(key) + " in " + name);
            // lambda = -1; group numerator monomials by (m, x exponents)
            std::map<std::tuple<int, int, int, int>, std::map<std::pair<int, int>, Q>> pattern;
            for (const auto& [ex, c] : sr.num) {
                if (c.im != 0) throw StructuralError("integrate_b4: complex coefficient in " + name);
                if (ex[ETA] != ex[ETABAR] || ex[KAPPA] != 0)
                    throw StructuralError("integrate_b4: unexpected symbol in " + name);
                const int m = ex[ETA];
                int deg = -m - 1;
                for (int j = 0; j <= letters; ++j) deg += ex[std::size_t(kNumVars + j)];
                if (deg != -letters) throw StructuralError("integrate_b4: inhomogeneous term in " + name);
                int N = 0;
                for (int d : sr.den) N += d;
                if (m >= N - 1) throw StructuralError("integrate_b4: divergent x-integral in " + name);
                const Q sign = (ex[LAMBDA] % 2) ? -1 : 1;
                const int e1 = letters >= 1 ? ex[std::size_t(kNumVars + 1)] : 0;
                const int e2 = letters >= 2 ? ex[std::size_t(kNumVars + 2)] : 0;
                pattern[{m, e1, e2, 0}][{ex[EPS1], ex[EPS2]}] += sign * c.re;
            }
            for (const auto& [tg, sgn] : targets) {
                auto& part = parts[tg];
                part.summand = name;
                part.target = tg;
                for (const auto& [pat, eps] : pattern) {
                    HTerm h;
                    h.m = std::get<0>(pat);
                    h.n = sr.den;
                    // x_1 = u, x_2 = u v; G(u, v) = u Phi(1, u, u v)
                    h.pu = std::get<1>(pat) + std::get<2>(pat) + (letters == 2 ? 1 : 0);
                    h.pv = std::get<2>(pat);
                    for (const auto& [d, q] : eps)
                        if (q != 0) h.eps[d] = q * sgn;
                    if (!h.eps.empty()) part.terms.push_back(std::move(h));
                }
            }
        }
        for (auto& [t, c] : parts)
            if (!c.terms.empty()) out.push_back(std::move(c));
    }
    return out;
}

std::vector<B4Contribution> integrate_b4() { return integrate_b4(b4_closed_summands()); }

double b4_total(const std::vector<B4Contribution>& c, Target t, double u, double v, double e1, double e2) {
    double s = 0.0;
    for (const auto& x : c)
        if (x.target == t) s += x.value(u, v, e1, e2);
    return s;
}

}  // namespace nct::sym
