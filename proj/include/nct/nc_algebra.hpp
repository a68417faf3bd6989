#pragma once

#include <complex>
#include <string>
#include <vector>

#include <json.hpp>

namespace nct {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Deformation parameter stored as an exact decimal so that e^{2 pi i theta n}
// can be reduced mod 1 in integer arithmetic.
class Theta {
public:
    Theta() = default;
    explicit Theta(const std::string& decimal);
    static Theta from_double(double x);

    double value() const { return value_; }
    const std::string& str() const { return text_; }

    // frac(theta * n) in [0,1), exact up to the final division.
    long double frac_times(long long n) const;
    cplx phase(long long n) const;  // e^{2 pi i theta n}

    Theta negated() const;

    friend bool operator==(const Theta& a, const Theta& b) {
        return a.numer_ == b.numer_ && a.digits_ == b.digits_;
    }

private:
    std::string text_ = "0";
    __int128 numer_ = 0;  // theta = numer_ / 10^digits_
    int digits_ = 0;
    double value_ = 0.0;
};

enum class Deriv { d1, d2, tau, tau_star };

// Truncated Fourier series sum a_{kl} U1^k U2^l with |k|,|l| <= box.
class FourierElement {
public:
    FourierElement() = default;
    FourierElement(Theta theta, int box);

    static FourierElement scalar(const Theta& theta, cplx c);
    static FourierElement monomial(const Theta& theta, int k, int l, cplx c = 1.0);

    const Theta& theta() const { return theta_; }
    int box() const { return box_; }
    int side() const { return 2 * box_ + 1; }

    cplx coeff(int k, int l) const;
    void set(int k, int l, cplx c);
    void add_to(int k, int l, cplx c);

    // Raw dense storage, index (k+box)*side + (l+box).
    const std::vector<cplx>& data() const { return c_; }
    std::vector<cplx>& data() { return c_; }

    // Explicit change of box: enlarging pads with zeros, shrinking drops modes.
    FourierElement project(int box) const;
    // Smallest box containing all modes with |a_kl| > tol.
    int support_box(double tol = 0.0) const;
    FourierElement trimmed(double tol = 0.0) const { return project(support_box(tol)); }

    double l1_norm() const;
    double max_abs() const;

    FourierElement& operator+=(const FourierElement& o);
    FourierElement& operator-=(const FourierElement& o);
    FourierElement& operator*=(cplx s);

    friend FourierElement operator+(FourierElement a, const FourierElement& b) { return a += b; }
    friend FourierElement operator-(FourierElement a, const FourierElement& b) { return a -= b; }
    friend FourierElement operator*(FourierElement a, cplx s) { return a *= s; }
    friend FourierElement operator*(cplx s, FourierElement a) { return a *= s; }
    FourierElement operator-() const { return (*this) * cplx(-1.0); }

private:
    void require_same_theta(const FourierElement& o) const;
    void grow_to(int box);

    Theta theta_;
    int box_ = 0;
    std::vector<cplx> c_ = std::vector<cplx>(1);
};

FourierElement mul(const FourierElement& a, const FourierElement& b);
inline FourierElement operator*(const FourierElement& a, const FourierElement& b) { return mul(a, b); }
FourierElement commutator(const FourierElement& a, const FourierElement& b);

FourierElement star(const FourierElement& a);
cplx trace(const FourierElement& a);

FourierElement derive(const FourierElement& a, Deriv which, cplx tau = cplx(0, 1));
// delta_tau delta_tau^*, with delta_tau^* := delta_1 + tau delta_2.
FourierElement laplacian_tau(const FourierElement& a, cplx tau);
FourierElement square_re(const FourierElement& h, cplx tau);
FourierElement square_im(const FourierElement& h, cplx tau);

double max_diff(const FourierElement& a, const FourierElement& b);
bool is_self_adjoint(const FourierElement& a, double tol = 1e-12);

struct SeriesOptions {
    double tol = 1e-12;     // stop when term (or Newton residual) l1 norm < tol
    int max_terms = 200;
    int box_limit = 40;     // ambient box for products; larger modes are projected out
};

FourierElement exp(const FourierElement& a, const SeriesOptions& opt = {});
// log via the series of log(1+y), y = a/a00 - 1; requires ||y||_1 < 1.
FourierElement log(const FourierElement& a, const SeriesOptions& opt = {});
// Newton iteration X <- X(2 - aX); throws SingularMetric when it stalls.
FourierElement inverse(const FourierElement& a, const SeriesOptions& opt = {});

struct ConformalDatum {
    FourierElement h;
    FourierElement k2;
    cplx tau;
};
ConformalDatum make_conformal(const FourierElement& h, cplx tau, const SeriesOptions& opt = {});

struct ConnectionForms {
    FourierElement omega1;
    FourierElement omega2;
    cplx z;
};

// Hermitian connection compatible with the holomorphic structure delta'_tau + z
// for the metric K; delta' = deriv_scale * delta.
ConnectionForms hermitian_connection(const FourierElement& K, cplx z, cplx tau,
                                     double deriv_scale = 1.0, const SeriesOptions& opt = {});
// Max over j of || delta'_j K - (K w_j + w_j^* K) ||_1.
double connection_residual(const FourierElement& K, const ConnectionForms& w, cplx tau,
                           double deriv_scale = 1.0);

nlohmann::json to_json(const FourierElement& a);
FourierElement element_from_json(const nlohmann::json& j);

}  // namespace nct
