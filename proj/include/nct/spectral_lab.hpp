#pragma once

#include <vector>

#include <Eigen/Dense>

#include "nct/module_geometry.hpp"
#include "nct/nc_algebra.hpp"
#include "nct/rs_functional.hpp"

namespace nct {

// Hermite functions phi_n of -d^2/dt^2 + omega^2 t^2, omega = 2 pi |mu| |tau|,
// one copy per line alpha in Z_c; index alpha * M + n.
struct HermiteBasis {
    int M;
    int lines;
    double omega;
};
HermiteBasis hermite_basis(const ModuleGeometry& geo, int M);

// D = d/dt + lambda t, lambda = 2 pi i mu conj(tau), on each line.
// DDstar and H = D^* D are exact compressions; D, Dstar are compressions of D, D^*.
struct Ladder {
    HermiteBasis basis;
    double c_tau;  // [D, D^*] = 4 pi mu Im tau
    Eigen::MatrixXcd D;
    Eigen::MatrixXcd Dstar;
    Eigen::MatrixXcd H;
    Eigen::MatrixXcd DDstar;
};
Ladder build_ladder(const ModuleGeometry& geo, int M);

struct ZetaClosed {
    double zeta0;
    double zetaprime0;
    double residue;
};
// Zeta function of the oscillator Laplacian: |deg| (4 pi |mu| Im tau)^{-s} zeta_R(s).
ZetaClosed zeta_closed(const ModuleGeometry& geo);

// Compressions of the right action f -> f a to the first m Hermite functions per line.
// Multiplications are diagonal at the Gauss-Hermite nodes of an extended basis of
// size M + pad; translations are conjugates of multiplications by diag(i^n).
class RightAction {
public:
    RightAction(const ModuleGeometry& geo, int M, int pad = 64);
    Eigen::MatrixXcd matrix(const FourierElement& a) const;
    int M() const { return M_; }
    // f(t) -> e^{i w t} f(t) and f(t) -> f(t - s) on one line, M x (M + pad) and (M + pad) x M blocks.
    Eigen::MatrixXcd modulation_rows(double w) const;
    Eigen::MatrixXcd modulation_cols(const Eigen::VectorXcd& g_at_nodes) const;
    Eigen::MatrixXcd translation_rows(double s) const;
    const Eigen::VectorXd& nodes() const { return x_; }

private:
    ModuleGeometry geo_;
    int M_;
    int Me_;
    double omega_;
    Eigen::VectorXd x_;
    Eigen::MatrixXd Q_;  // Hermite coefficients of the node eigenvectors
};

struct HermiteOperator {
    ModuleGeometry geometry;
    HermiteBasis basis;
    Eigen::MatrixXcd matrix;
};

// Delta^+ = k d d^* k, Delta^- = d^* k^2 d with k acting on the right.
HermiteOperator build_twisted_laplacian(const ModuleGeometry& geo, const FourierElement& k, Sign sign, int M,
                                        int pad = 64);

// Eigendecomposition cache for traces Tr(R_a e^{-tA}).
class HeatKernel {
public:
    explicit HeatKernel(const HermiteOperator& A);
    const Eigen::VectorXd& eigenvalues() const { return evals_; }
    // diag(V^* R V)
    Eigen::VectorXd weights(const Eigen::MatrixXcd& Ra) const;
    double trace(double t) const;
    double trace(const Eigen::VectorXd& w, double t) const;

private:
    Eigen::VectorXd evals_;
    Eigen::MatrixXcd evecs_;
};

double heat_trace(const HermiteOperator& A, const FourierElement& a, double t);

struct HeatFit {
    std::vector<double> t;
    std::vector<double> values;
    std::vector<double> coeffs;  // a_0, a_2, a_4, ... of sum a_{2j} t^{j-1}
    double residual;             // max |fit - value|
    double condition;            // of the column-scaled design matrix
};
HeatFit fit_expansion(const std::vector<double>& t, const std::vector<double>& values, int terms = 3);
std::vector<double> log_spaced(double lo, double hi, int n);

// Flat traces: closed geometric series for d^* d (Sign::minus) and d d^* (Sign::plus).
double flat_heat_trace_closed(const ModuleGeometry& geo, Sign sign, double t);

struct ThetaCheck {
    double direct;   // sum_k exp(-4 pi^2 t / rk^2 (k1^2 + |tau|^2 k2^2 + 2 Re tau k1 k2))
    double dual;     // Poisson dual sum
    double leading;  // rk^2 / (4 pi Im tau t)
};
ThetaCheck theta_trace(const ModuleGeometry& geo, double t);

// The window must lie below the non-asymptotic terms exp(-x/t) of the trace
// and above the truncation scale: lambda_max * fit_lo >= 20.
struct LogDetOptions {
    double T = 0.004;  // Mellin split point
    double fit_lo = 0.003;
    double fit_hi = 0.006;
    int fit_points = 24;
    int fit_terms = 5;
    double max_error = 1e-2;  // raise FitError above this estimate
};
struct LogDetResult {
    double value;   // -zeta'(0)
    double error;   // spread over split points T/2, T, 2T
    double zeta0;   // fitted a_2 (kernel excluded)
    HeatFit fit;
};
// -zeta'(0) by the Mellin split: sum_j E_1(lambda_j T) on [T, inf) and the fitted
// expansion on [0, T]; zero modes are excluded.
LogDetResult logdet_numeric(const HermiteOperator& A, const LogDetOptions& opt = {});

// Image of a in A_theta^op = A_{-theta}: U1^k U2^l -> e^{-2 pi i theta k l} U1^k U2^l.
// The right action on E(g, theta) is a left action of this algebra.
FourierElement to_opposite(const FourierElement& a);

struct HeatExperiment {
    HeatFit fit;
    double a0_expected;  // |rk|/(4 pi Im tau) phi_0(a k^{-2})
    double a2_expected;  // a_2 from the curvature density, evaluated in A_theta^op
};
// Heat trace of Delta^pm for k = e^{h/2} weighted by a, fitted on a log grid.
HeatExperiment heat_experiment(const ModuleGeometry& geo, const FourierElement& h, const FourierElement& a, Sign sign,
                               int M, double tmin, double tmax, int npoints = 20, int terms = 4);

}  // namespace nct
