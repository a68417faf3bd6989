#pragma once

#include <array>
#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace nct {

using cplx = std::complex<double>;

struct Rational {
    long long num = 0;
    long long den = 1;
    Rational() = default;
    Rational(long long n, long long d = 1);
    static Rational parse(const std::string& s);  // "p", "p/q" or a short decimal
    double value() const { return double(num) / double(den); }
    std::string str() const;
    friend bool operator==(const Rational& a, const Rational& b) { return a.num == b.num && a.den == b.den; }
};

// Scalar curvature function of one variable s = log u or two variables
// (s,t) = (log u, log v). Closed forms are written over complex arguments;
// removable singularities on {s=0}, {t=0}, {s+t=0} are handled by averaging
// over a complex circle around the point (mean-value property), and Taylor
// data at the origin by the Cauchy integral.
class ModularFunction {
public:
    using Fn1 = std::function<cplx(cplx)>;
    using Fn2 = std::function<cplx(cplx, cplx)>;

    ModularFunction(std::string name, Fn1 f);
    ModularFunction(std::string name, Fn2 f);

    const std::string& name() const { return name_; }
    int arity() const { return arity_; }

    // Closed form, no singularity handling.
    cplx raw(cplx s) const { return f1_(s); }
    cplx raw(cplx s, cplx t) const { return f2_(s, t); }

    double eval_s(double s) const;
    double eval_st(double s, double t) const;
    double eval_u(double u) const;
    double eval_uv(double u, double v) const;

    // Taylor coefficients at the origin: c[n] of s^n, or C(m,n) of s^m t^n.
    const std::vector<double>& taylor1() const { return t1_; }
    const Eigen::MatrixXd& taylor2() const { return t2_; }
    int taylor_order() const { return order_; }

    // Distance (in s,t) below which the circle patch replaces the closed form.
    static constexpr double kPatchRadius = 0.1;

private:
    void build_taylor();

    std::string name_;
    int arity_;
    Fn1 f1_;
    Fn2 f2_;
    int order_ = 40;
    std::vector<double> t1_;
    Eigen::MatrixXd t2_;
};

using ModularFunctionPtr = std::shared_ptr<const ModularFunction>;

// Registry lookup. Names: L0, F_gamma, G1, G2, G3, GRe_gamma, GIm_gamma,
// K_gamma, HRe_gamma, HIm_gamma, K2, K0_CM, K1_CM, H0_CM, H1_CM, S_CM,
// H1_CM_printed, S_CM_printed, and the eps families F_eps, GRe_eps, GIm_eps,
// K_eps, HRe_eps, HIm_eps which take (eps1, eps2).
ModularFunctionPtr lookup(const std::string& name, Rational eps1 = {}, Rational eps2 = {});
std::vector<std::string> registered_names();
bool is_eps_family(const std::string& name);

// Transforms from x-integral functions to modular functions.
ModularFunctionPtr transform_F_to_K(const ModularFunctionPtr& F);
enum class HKind { Re, Im };
ModularFunctionPtr transform_G_to_H(const ModularFunctionPtr& F, const ModularFunctionPtr& G, HKind kind);

// Modified logarithm L_alpha(u) = (-1)^alpha [1^{alpha+1}, u] log.
double modified_log(int alpha, double u);

// Confluent divided difference of x -> x^m log x over nodes (value, multiplicity).
double divided_diff_idm_log(const std::vector<std::pair<double, int>>& nodes, int m);

// H^{(p)}_alpha(s, m) = int_0^inf x^m (1+x)^{-alpha_0-1} prod_j (x+s_j)^{-alpha_j-1} dx.
double h_integral_quadrature(int p, const std::vector<int>& alpha, const std::vector<double>& s, int m);
// Same value from the divided-difference closed form.
double h_integral_closed(int p, const std::vector<int>& alpha, const std::vector<double>& s, int m);

// int_0^inf x^m b(x)^a b(xu)^b b(xw)^c dx with b(x) = 1/(1+x), by quadrature.
double b_integral(int m, int a, int b, int c, double u, double w);

// Independent value of a registered x-integral function (L0, F_gamma, G1..G3,
// GRe_gamma, GIm_gamma, F_eps, GRe_eps, GIm_eps) from quadrature.
double quadrature_oracle(const std::string& name, double u, double v = 1.0, Rational eps1 = {},
                         Rational eps2 = {});
bool has_quadrature_oracle(const std::string& name);

struct IdentityResult {
    std::string name;
    double max_err;
    double tol;
    bool pass;
    bool informational = false;  // reported but not part of the verdict
};

struct IdentityReport {
    std::vector<IdentityResult> results;
    bool all_pass() const;
};

// Log-spaced n x n grid on [lo, hi]^2 in (u,v).
std::vector<std::pair<double, double>> log_grid(double lo, double hi, int n);

IdentityReport identity_suite(const std::vector<std::pair<double, double>>& grid);
IdentityReport quadrature_suite(const std::vector<std::pair<double, double>>& grid);
IdentityReport limit_suite();

}  // namespace nct
