#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "nct/curvature_functions.hpp"
#include "nct/nc_algebra.hpp"

namespace nct {

// Modular derivation nabla = -ad h on elements whose modes stay inside the
// ambient box through taylor_order applications.
class ModularContext {
public:
    ModularContext(FourierElement h, int ambient_box, int taylor_order = 24);
    // Smallest ambient box that carries an input of the given box through N powers.
    static ModularContext for_input(FourierElement h, int input_box, int taylor_order = 24);

    const FourierElement& h() const { return h_; }
    int ambient_box() const { return ambient_; }
    int taylor_order() const { return order_; }
    // Largest input box for which the series never leaves the ambient box.
    int max_input_box() const { return ambient_ - order_ * h_.box(); }

private:
    FourierElement h_;
    int ambient_;
    int order_;
};

struct SeriesDiagnostics {
    double tail_bound = 0.0;      // |c_N| (2 ||h||_1)^N, or its bivariate analogue
    double last_term_norm = 0.0;  // l1 norm of the last series term
    bool diverging = false;
    std::vector<std::string> warnings;
};

FourierElement nabla(const ModularContext& ctx, const FourierElement& x);
FourierElement nabla_power(const ModularContext& ctx, const FourierElement& x, int n);

// sum_{n <= N} c_n nabla^n(x).
FourierElement apply_series1(const ModularContext& ctx, const std::vector<double>& c, const FourierElement& x,
                             SeriesDiagnostics* diag = nullptr);
// sum_{m+n <= N} C(m,n) nabla^m(x) nabla^n(y).
FourierElement apply_series2(const ModularContext& ctx, const Eigen::MatrixXd& C, const FourierElement& x,
                             const FourierElement& y, SeriesDiagnostics* diag = nullptr);

FourierElement apply_fn1(const ModularContext& ctx, const ModularFunction& F, const FourierElement& x,
                         SeriesDiagnostics* diag = nullptr);
FourierElement apply_fn2(const ModularContext& ctx, const ModularFunction& H, const FourierElement& x,
                         const FourierElement& y, SeriesDiagnostics* diag = nullptr);

// nabla as a sparse matrix on the coefficient vector of the ambient box
// (index (k+D)*side + (l+D)), with modes leaving the box dropped.
Eigen::SparseMatrix<cplx> nabla_matrix(const ModularContext& ctx);
// Truncated Taylor polynomial of F applied to nabla_matrix by Horner's rule.
FourierElement apply_fn1_matrix(const ModularContext& ctx, const ModularFunction& F, const FourierElement& x);

// 2 sinh(nabla/2)/(nabla/2) applied to x.
FourierElement sinhc_half(const ModularContext& ctx, const FourierElement& x, SeriesDiagnostics* diag = nullptr);
const ModularFunction& sinhc_half_function();

// Throws RejectedInput if the Taylor data of F does not reproduce F near 0
// (F has a pole or another singularity inside the Taylor disc).
void require_entire_at_origin(const ModularFunction& F);

}  // namespace nct
