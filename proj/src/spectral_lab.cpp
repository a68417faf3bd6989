#include "nct/spectral_lab.hpp"

#include <cmath>

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/expint.hpp>

#include "nct/errors.hpp"

namespace nct {

namespace {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

cplx lambda_of(const ModuleGeometry& geo) { return cplx(0, kTwoPi * geo.mu()) * std::conj(geo.tau); }

// D = [(omega + lambda) a + (lambda - omega) a^*] / sqrt(2 omega) on one line, rows x cols block.
MatrixXcd ladder_block(double omega, cplx lambda, int rows, int cols) {
    MatrixXcd D = MatrixXcd::Zero(rows, cols);
    const double s = std::sqrt(2 * omega);
    for (int n = 0; n < rows; ++n) {
        if (n + 1 < cols) D(n, n + 1) = (omega + lambda) * std::sqrt(double(n + 1)) / s;
        if (n >= 1 && n - 1 < cols) D(n, n - 1) = (lambda - omega) * std::sqrt(double(n)) / s;
    }
    return D;
}

MatrixXcd block_diag(const MatrixXcd& b, int lines) {
    MatrixXcd out = MatrixXcd::Zero(b.rows() * lines, b.cols() * lines);
    for (int a = 0; a < lines; ++a) out.block(a * b.rows(), a * b.cols(), b.rows(), b.cols()) = b;
    return out;
}

MatrixXcd hermitize(const MatrixXcd& A) { return (A + A.adjoint()) * 0.5; }

}  // namespace

HermiteBasis hermite_basis(const ModuleGeometry& geo, int M) {
    if (M < 2) throw RejectedInput("hermite basis: M must be at least 2");
    if (geo.mu() == 0.0) throw RejectedInput("hermite basis: mu = 0");
    return {M, int(std::llabs(geo.c)), kTwoPi * std::abs(geo.mu()) * std::abs(geo.tau)};
}

Ladder build_ladder(const ModuleGeometry& geo, int M) {
    const HermiteBasis b = hermite_basis(geo, M);
    const cplx lam = lambda_of(geo);
    const MatrixXcd rows = ladder_block(b.omega, lam, M, M + 1);  // D restricted to the first M rows
    const MatrixXcd cols = ladder_block(b.omega, lam, M + 1, M);  // D on the first M columns
    Ladder l{b, 4 * kPi * geo.mu() * geo.tau.imag(), {}, {}, {}, {}};
    l.D = block_diag(rows.leftCols(M), b.lines);
    l.Dstar = l.D.adjoint();
    l.H = block_diag(cols.adjoint() * cols, b.lines);
    l.DDstar = block_diag(rows * rows.adjoint(), b.lines);
    return l;
}

ZetaClosed zeta_closed(const ModuleGeometry& geo) {
    const double deg = double(std::llabs(geo.deg()));
    return {-0.5 * deg, 0.5 * deg * std::log(2 * std::abs(geo.mu()) * geo.tau.imag()),
            std::abs(geo.rk()) / (4 * kPi * geo.tau.imag())};
}

RightAction::RightAction(const ModuleGeometry& geo, int M, int pad)
    : geo_(geo), M_(M), Me_(M + std::max(pad, 0)), omega_(hermite_basis(geo, M).omega) {
    // position operator t = (a + a^*)/sqrt(2 omega) is tridiagonal
    VectorXd diag = VectorXd::Zero(Me_), sub(Me_ - 1);
    for (int n = 0; n + 1 < Me_; ++n) sub(n) = std::sqrt(double(n + 1) / (2 * omega_));
    Eigen::SelfAdjointEigenSolver<MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (es.info() != Eigen::Success) throw Error("right action: node computation failed");
    x_ = es.eigenvalues();
    Q_ = es.eigenvectors();
}

Eigen::MatrixXcd RightAction::modulation_rows(double w) const {
    VectorXcd g(Me_);
    for (int j = 0; j < Me_; ++j) g(j) = std::exp(cplx(0, w * x_(j)));
    return Q_.topRows(M_).cast<cplx>() * g.asDiagonal() * Q_.transpose().cast<cplx>();
}

Eigen::MatrixXcd RightAction::modulation_cols(const Eigen::VectorXcd& g) const {
    return Q_.cast<cplx>() * g.asDiagonal() * Q_.topRows(M_).transpose().cast<cplx>();
}

Eigen::MatrixXcd RightAction::translation_rows(double s) const {
    // f(t - s) = e^{-s d/dt} = S^* e^{i s omega t} S with S = diag(i^n)
    MatrixXcd T = modulation_rows(s * omega_);
    static const cplx ipow[4] = {1.0, cplx(0, 1), -1.0, cplx(0, -1)};
    for (int n = 0; n < T.rows(); ++n)
        for (int m = 0; m < T.cols(); ++m) T(n, m) *= ipow[((m - n) % 4 + 4) % 4];
    return T;
}

Eigen::MatrixXcd RightAction::matrix(const FourierElement& a) const {
    if (!(a.theta() == geo_.theta)) throw RejectedInput("right action: theta of the element differs from the module");
    const int lines = int(std::llabs(geo_.c));
    const double q = geo_.rk() / double(geo_.c);
    const double dc = double(geo_.d) / double(geo_.c);
    const int box = a.support_box(0.0);
    MatrixXcd R = MatrixXcd::Zero(M_ * lines, M_ * lines);
    const MatrixXcd QM = Q_.topRows(M_).cast<cplx>();
    for (int l = -box; l <= box; ++l) {
        bool any = false;
        for (int k = -box; k <= box; ++k) any = any || a.coeff(k, l) != 0.0;
        if (!any) continue;
        const MatrixXcd T = l == 0 ? MatrixXcd() : translation_rows(l * q);
        for (int beta = 0; beta < lines; ++beta) {
            // f U1^k U2^l = T_{l q} (e^{2 pi i k (t - beta d / c)} f) mapped from line beta to beta + l
            VectorXcd g = VectorXcd::Zero(Me_);
            for (int k = -box; k <= box; ++k) {
                const cplx akl = a.coeff(k, l);
                if (akl == 0.0) continue;
                for (int j = 0; j < Me_; ++j) g(j) += akl * std::exp(cplx(0, kTwoPi * k * (x_(j) - beta * dc)));
            }
            const int alpha = ((beta + l) % lines + lines) % lines;
            auto blk = R.block(alpha * M_, beta * M_, M_, M_);
            if (l == 0)
                blk += QM * g.asDiagonal() * QM.transpose();
            else
                blk += T * modulation_cols(g);
        }
    }
    return R;
}

HermiteOperator build_twisted_laplacian(const ModuleGeometry& geo, const FourierElement& k, Sign sign, int M,
                                        int pad) {
    const HermiteBasis b = hermite_basis(geo, M);
    const FourierElement kt = k.trimmed(1e-18 * k.max_abs());
    if (!is_self_adjoint(kt, 1e-10)) throw RejectedInput("twisted laplacian: k must be self-adjoint");
    if (sign == Sign::plus) {
        const MatrixXcd R = RightAction(geo, M, pad).matrix(kt);
        const Ladder l = build_ladder(geo, M);
        return {geo, b, hermitize(R * l.DDstar * R)};
    }
    // d^* k^2 d needs k^2 on the first M + 1 functions
    const MatrixXcd R2 = RightAction(geo, M + 1, pad).matrix(mul(kt, kt));
    const MatrixXcd Dc = block_diag(ladder_block(b.omega, lambda_of(geo), M + 1, M), b.lines);
    return {geo, b, hermitize(Dc.adjoint() * R2 * Dc)};
}

HeatKernel::HeatKernel(const HermiteOperator& A) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(A.matrix);
    if (es.info() != Eigen::Success) throw Error("heat kernel: eigensolver failed");
    evals_ = es.eigenvalues();
    evecs_ = es.eigenvectors();
}

Eigen::VectorXd HeatKernel::weights(const Eigen::MatrixXcd& Ra) const {
    const MatrixXcd RV = Ra * evecs_;
    return evecs_.conjugate().cwiseProduct(RV).colwise().sum().real().transpose();
}

double HeatKernel::trace(double t) const { return (-t * evals_.array()).exp().sum(); }

double HeatKernel::trace(const Eigen::VectorXd& w, double t) const {
    return (w.array() * (-t * evals_.array()).exp()).sum();
}

double heat_trace(const HermiteOperator& A, const FourierElement& a, double t) {
    const HeatKernel hk(A);
    return hk.trace(hk.weights(RightAction(A.geometry, A.basis.M).matrix(a)), t);
}

std::vector<double> log_spaced(double lo, double hi, int n) {
    if (!(lo > 0 && hi > lo) || n < 2) throw RejectedInput("log grid: need 0 < lo < hi and n >= 2");
    std::vector<double> t(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) t[std::size_t(i)] = lo * std::pow(hi / lo, double(i) / (n - 1));
    return t;
}

HeatFit fit_expansion(const std::vector<double>& t, const std::vector<double>& values, int terms) {
    if (t.size() != values.size() || int(t.size()) < terms || terms < 1)
        throw FitError("heat fit: need at least as many points as terms");
    const int n = int(t.size());
    MatrixXd X(n, terms);
    VectorXd y(n);
    for (int i = 0; i < n; ++i) {
        y(i) = values[std::size_t(i)];
        for (int j = 0; j < terms; ++j) X(i, j) = std::pow(t[std::size_t(i)], j - 1);
    }
    const VectorXd scale = X.colwise().norm().transpose();
    const MatrixXd Xs = X * scale.cwiseInverse().asDiagonal();
    Eigen::JacobiSVD<MatrixXd> svd(Xs, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const VectorXd sv = svd.singularValues();
    HeatFit f{t, values, {}, 0.0, sv(0) / sv(sv.size() - 1)};
    if (!(f.condition < 1e13)) throw FitError("heat fit: design matrix is ill-conditioned");
    const VectorXd c = svd.solve(y).cwiseQuotient(scale);
    f.coeffs.assign(c.data(), c.data() + c.size());
    f.residual = (X * c - y).cwiseAbs().maxCoeff();
    return f;
}

double flat_heat_trace_closed(const ModuleGeometry& geo, Sign sign, double t) {
    const double lines = double(std::llabs(geo.c));
    const double g = 4 * kPi * std::abs(geo.mu()) * geo.tau.imag() * t;
    // d^* d has a kernel for mu > 0, d d^* for mu < 0
    const bool kernel = (sign == Sign::minus) == (geo.mu() > 0);
    return kernel ? lines / (-std::expm1(-g)) : lines / std::expm1(g);
}

ThetaCheck theta_trace(const ModuleGeometry& geo, double t) {
    if (!(t > 0)) throw RejectedInput("theta trace: t must be positive");
    const double rk = geo.rk();
    const double s = 4 * kPi * kPi * t / (rk * rk);
    Eigen::Matrix2d A;
    A << 1.0, geo.tau.real(), geo.tau.real(), std::norm(geo.tau);
    A *= s;
    auto lattice_sum = [](const Eigen::Matrix2d& B) {
        const double lmin = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(B).eigenvalues()(0);
        const int R = int(std::ceil(std::sqrt(60.0 / lmin))) + 2;
        double acc = 0.0;
        for (int i = -R; i <= R; ++i)
            for (int j = -R; j <= R; ++j) {
                const Eigen::Vector2d k(i, j);
                acc += std::exp(-k.dot(B * k));
            }
        return acc;
    };
    const double direct = lattice_sum(A);
    const double dual = kPi / std::sqrt(A.determinant()) * lattice_sum(kPi * kPi * A.inverse());
    return {direct, dual, rk * rk / (4 * kPi * geo.tau.imag() * t)};
}

LogDetResult logdet_numeric(const HermiteOperator& A, const LogDetOptions& opt) {
    const HeatKernel hk(A);
    const double scale = 4 * kPi * std::abs(A.geometry.mu()) * A.geometry.tau.imag();
    std::vector<double> lam;
    for (int i = 0; i < hk.eigenvalues().size(); ++i) {
        const double l = hk.eigenvalues()(i);
        if (l < -1e-8 * scale) throw RejectedInput("logdet: operator is not positive");
        if (l > 1e-8 * scale) lam.push_back(l);
    }
    if (lam.empty()) throw RejectedInput("logdet: no positive spectrum");
    if (lam.back() * opt.fit_lo < 20) throw FitError("logdet: fit window is dominated by truncation; increase M");
    // Theta(t) on the positive spectrum, fitted on the window
    const auto tg = log_spaced(opt.fit_lo, opt.fit_hi, opt.fit_points);
    std::vector<double> vals;
    for (double t : tg) {
        double s = 0.0;
        for (double l : lam) s += std::exp(-t * l);
        vals.push_back(s);
    }
    HeatFit fit = fit_expansion(tg, vals, opt.fit_terms);
    const double gamma = boost::math::constants::euler<double>();
    auto zeta_prime = [&](double T) {
        double acc = 0.0;
        for (double l : lam) {
            const double x = l * T;
            if (x < 700) acc += boost::math::expint(1, x);
        }
        const auto& a = fit.coeffs;
        acc += -a[0] / T + a[1] * (gamma + std::log(T));
        for (std::size_t j = 2; j < a.size(); ++j) acc += a[j] * std::pow(T, double(j) - 1) / (double(j) - 1);
        return acc;
    };
    const double z = zeta_prime(opt.T);
    const double err = std::max(std::abs(zeta_prime(opt.T / 2) - z), std::abs(zeta_prime(2 * opt.T) - z));
    if (err > opt.max_error) throw FitError("logdet: split-point dependence " + std::to_string(err));
    return {-z, err, fit.coeffs[1], std::move(fit)};
}

FourierElement to_opposite(const FourierElement& a) {
    FourierElement b(a.theta().negated(), a.box());
    for (int k = -a.box(); k <= a.box(); ++k)
        for (int l = -a.box(); l <= a.box(); ++l)
            b.set(k, l, a.coeff(k, l) * std::conj(a.theta().phase(static_cast<long long>(k) * l)));
    return b;
}

HeatExperiment heat_experiment(const ModuleGeometry& geo, const FourierElement& h, const FourierElement& a, Sign sign,
                               int M, double tmin, double tmax, int npoints, int terms) {
    const FourierElement k = nct::exp(h * cplx(0.5));
    const HermiteOperator A = build_twisted_laplacian(geo, k, sign, M);
    const HeatKernel hk(A);
    const Eigen::VectorXd w = hk.weights(RightAction(geo, M).matrix(a));
    const auto tg = log_spaced(tmin, tmax, npoints);
    std::vector<double> vals;
    for (double t : tg) vals.push_back(hk.trace(w, t));
    HeatExperiment r{fit_expansion(tg, vals, terms), 0.0, 0.0};
    const FourierElement ho = to_opposite(h), ao = to_opposite(a);
    r.a0_expected = a0_closed(mul(ao, nct::exp(-ho)), geo);
    r.a2_expected = a2_from_density(ao, curvature_density(ho, geo, sign), geo);
    return r;
}

}  // namespace nct
