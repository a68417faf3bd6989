#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "nct/curvature_functions.hpp"

namespace nct::sym {

using Q = boost::multiprecision::cpp_rational;

// Gaussian rational p + i q.
struct QI {
    Q re, im;
    QI() = default;
    QI(Q r, Q i = 0) : re(std::move(r)), im(std::move(i)) {}
    QI(long long r) : re(r), im(0) {}
    bool is_zero() const { return re == 0 && im == 0; }
    QI conj() const { return {re, -im}; }
    QI& operator+=(const QI& o);
    QI& operator-=(const QI& o);
    QI& operator*=(const QI& o);
    friend QI operator+(QI a, const QI& b) { return a += b; }
    friend QI operator-(QI a, const QI& b) { return a -= b; }
    friend QI operator*(QI a, const QI& b) { return a *= b; }
    friend QI operator-(QI a) { return {-a.re, -a.im}; }
    friend bool operator==(const QI& a, const QI& b) { return a.re == b.re && a.im == b.im; }
    friend bool operator<(const QI& a, const QI& b) { return a.re != b.re ? a.re < b.re : a.im < b.im; }
    std::string str() const;
};

// Noncommuting generators. K(p,q) = d^p ds^q (k^2), A0(p,q) likewise for a_0,
// Named(p,q) an opaque self-adjoint coefficient; B = (k^2 |eta|^2 - lambda)^{-1}.
struct Letter {
    enum Kind : std::uint8_t { B, K, A0, Named };
    Kind kind = B;
    int p = 0;
    int q = 0;
    std::string name;

    static Letter b() { return {B, 0, 0, {}}; }
    static Letter k(int p = 0, int q = 0) { return {K, p, q, {}}; }
    static Letter a0(int p = 0, int q = 0) { return {A0, p, q, {}}; }
    static Letter named(std::string n, int p = 0, int q = 0) { return {Named, p, q, std::move(n)}; }

    // b and k^2 commute and live in the "slots" between the other letters.
    bool is_slot() const { return kind == B || (kind == K && p == 0 && q == 0); }
    auto tie() const { return std::tie(kind, p, q, name); }
    friend bool operator==(const Letter& a, const Letter& b) { return a.tie() == b.tie(); }
    friend bool operator<(const Letter& a, const Letter& b) { return a.tie() < b.tie(); }
};
using Word = std::vector<Letter>;

// Exponents of the commuting symbols.
enum Var : int { ETA = 0, ETABAR, LAMBDA, EPS1, EPS2, KAPPA, kNumVars };
using Mono = std::array<int, kNumVars>;  // KAPPA is the formal constant pi mu of the twist

// Sum of terms coeff * (commuting monomial) * word, like terms combined.
class SymbolExpr {
public:
    using Key = std::pair<Mono, Word>;

    SymbolExpr() = default;
    static SymbolExpr scalar(QI c);
    static SymbolExpr var(Var v, int power = 1);
    static SymbolExpr letter(const Letter& l);
    static SymbolExpr term(QI c, const Mono& m, Word w);

    const std::map<Key, QI>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }
    void add(const Mono& m, const Word& w, const QI& c);

    SymbolExpr& operator+=(const SymbolExpr& o);
    SymbolExpr& operator-=(const SymbolExpr& o);
    friend SymbolExpr operator+(SymbolExpr a, const SymbolExpr& b) { return a += b; }
    friend SymbolExpr operator-(SymbolExpr a, const SymbolExpr& b) { return a -= b; }
    friend SymbolExpr operator-(const SymbolExpr& a) { return a * QI(-1); }
    friend SymbolExpr operator*(const SymbolExpr& a, const SymbolExpr& b);
    friend SymbolExpr operator*(const SymbolExpr& a, const QI& c);
    friend SymbolExpr operator*(const QI& c, const SymbolExpr& a) { return a * c; }
    friend bool operator==(const SymbolExpr& a, const SymbolExpr& b) { return a.terms_ == b.terms_; }

    // Order of homogeneity: eta, etabar count 1, lambda 2, b -2.
    static int order(const Mono& m, const Word& w);
    int max_order() const;
    int min_order() const;
    SymbolExpr truncated(int drop_order) const;  // terms of order >= drop_order

    std::string str() const;
    std::string latex() const;

private:
    std::map<Key, QI> terms_;
};

// Derivations of the coefficient algebra (d_tau, d_tau^*) and of the symbol in eta, etabar.
SymbolExpr d_tau(const SymbolExpr& e);
SymbolExpr d_tau_star(const SymbolExpr& e);
SymbolExpr laplace_tau(const SymbolExpr& e);  // d_tau^* d_tau = d_tau d_tau^*
SymbolExpr d_eta(const SymbolExpr& e);
SymbolExpr d_etabar(const SymbolExpr& e);
SymbolExpr star(const SymbolExpr& e);  // formal adjoint, coefficients conjugated

// Common symbols.
namespace atoms {
SymbolExpr b();
SymbolExpr k2();
SymbolExpr a0();
SymbolExpr eta();
SymbolExpr etabar();
SymbolExpr abs_eta2();
SymbolExpr lambda();
SymbolExpr eps1();
SymbolExpr eps2();
SymbolExpr one();
}  // namespace atoms

// Twist B = [[0, b12], [-b12, 0]] in units of kappa = pi mu; c_tau = -4 Im(tau) b12.
struct TwistData {
    Q b12 = 0;
    Q im_tau = 1;
    Q c_tau() const { return -4 * im_tau * b12; }
};

// Twisted product of symbols, truncated below drop_order. Untwisted part
// sum_{a,b} (1/(a! b!)) d_eta^a d_etabar^b f . d^a ds^b g plus the first order
// twist (c_tau/2)(f_eta g_etabar - f_etabar g_eta). RejectedInput when drop_order
// asks for orders where higher twist corrections would enter.
SymbolExpr symbol_product(const SymbolExpr& f, const SymbolExpr& g, int drop_order, const TwistData& twist = {});

// sum_{a,b} (1/(a! b!)) d_eta^a d_etabar^b d^a ds^b (f^*). Exact for polynomial symbols;
// symbols containing b need an explicit drop order.
SymbolExpr adjoint_symbol(const SymbolExpr& f, int drop_order = -1000);

// Symbol of P_{eps1,eps2} = k^2 Lap + eps1 (d k^2) ds + eps2 (ds k^2) d + a0.
SymbolExpr operator_symbol(const SymbolExpr& eps1, const SymbolExpr& eps2, const SymbolExpr& a0);

struct ResolventTerms {
    SymbolExpr b2, b3, b4;
};
ResolventTerms resolvent_recursion(const TwistData& twist = {});
// b_{-4} as stated in closed form, one entry per displayed summand.
std::vector<std::pair<std::string, SymbolExpr>> b4_closed_summands();
SymbolExpr b4_closed();

// Exact canonical form: per word of non-slot letters, a reduced rational function
// in the slot values x_j of k^2 (and eta, etabar, lambda, eps, kappa) whose
// denominator is a product of powers of (x_j eta etabar - lambda).
struct SlotRational {
    std::vector<int> den;                 // power of (x_j |eta|^2 - lambda) per slot
    std::map<std::vector<int>, QI> num;   // exponents: kNumVars symbols, then x_0..x_p
    friend bool operator==(const SlotRational& a, const SlotRational& b) { return a.den == b.den && a.num == b.num; }
};
using CanonicalForm = std::map<Word, SlotRational>;  // words of non-slot letters
CanonicalForm canonical(const SymbolExpr& e);
SymbolExpr from_canonical(const CanonicalForm& c);  // display form, rewrite applied
bool equal_elements(const SymbolExpr& a, const SymbolExpr& b);

// Rewrite b k^2 |eta|^2 -> 1 + lambda b (either adjacency order) until none applies.
enum class RewriteOrder { leftmost, rightmost, random };
SymbolExpr apply_rewrite(const SymbolExpr& e, RewriteOrder order = RewriteOrder::leftmost, unsigned seed = 0);

// Representative of the class modulo symbols of vanishing xi-integral:
// terms with eta-degree != etabar-degree dropped.
SymbolExpr normalize_mod_integral(const SymbolExpr& e);

// Substitute values for eps1, eps2 (and optionally lambda).
SymbolExpr substitute_eps(const SymbolExpr& e, const Q& eps1, const Q& eps2);
SymbolExpr substitute_lambda(const SymbolExpr& e, const Q& lambda);
SymbolExpr flat(const SymbolExpr& e);  // all derivatives of k^2 set to 0

struct VerifyReport {
    bool equal;
    SymbolExpr recursion;  // normalized b_{-4} from the recursion
    SymbolExpr closed;     // normalized closed form
    SymbolExpr diff;       // recursion - closed, canonical
};
VerifyReport verify_theorem_resexp(const TwistData& twist = {});
VerifyReport verify_theorem_resexp(const TwistData& twist, const Q& eps1, const Q& eps2);

// x-integral int_0^inf x^m b(x)^{n0} b(x u)^{n1} b(x u v)^{n2} dx, b(x) = (1+x)^{-1},
// times u^{pu} v^{pv} and an eps polynomial coefficient.
struct HTerm {
    std::map<std::pair<int, int>, Q> eps;  // (deg eps1, deg eps2) -> coefficient
    int m = 0;
    std::vector<int> n;  // n0, n1[, n2]
    int pu = 0, pv = 0;
    double value(double u, double v, double e1, double e2) const;
};
enum class Target { F, GRe, GIm, A0 };
std::string target_name(Target t);
struct B4Contribution {
    std::string summand;
    Target target;
    std::vector<HTerm> terms;
    double value(double u, double v, double e1, double e2) const;
};
// lambda = -1; every summand classified by its words: [d ds k2] -> F(Delta)(k^{-2} Lap k^2),
// [a0] -> a0 term, [d k2, ds k2] / [ds k2, d k2] -> G^Re, G^Im. StructuralError otherwise.
std::vector<B4Contribution> integrate_b4(const std::vector<std::pair<std::string, SymbolExpr>>& summands);
std::vector<B4Contribution> integrate_b4();
double b4_total(const std::vector<B4Contribution>& c, Target t, double u, double v, double e1, double e2);

// Exact rational values for CLI arguments ("1/2", "-3", "0.25").
Q parse_q(const std::string& s);

}  // namespace nct::sym
