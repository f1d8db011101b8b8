#pragma once

#include "llr/estimator.hpp"
#include "llr/kernels.hpp"
#include "llr/lattice.hpp"

#include <Eigen/Core>

#include <functional>

namespace llr {

/// Analytic description of the data-generating process at a point: marginal
/// covariate density f, regression function g with gradient and Hessian, and
/// the conditional response variance Var(Y | X = x). `hessian` may be left
/// empty; a central finite-difference of `gradient` (step 1e-4 * (1 + |x_k|)
/// per coordinate) is used instead.
struct TrueModel {
    std::function<double(const Eigen::VectorXd&)> density;
    std::function<double(const Eigen::VectorXd&)> regression;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> hessian;
    std::function<double(const Eigen::VectorXd&)> cond_variance;
};

/// Population limits of the local-linear fit at a point x.
///
///   u_limit     (d+1)x(d+1)  f(x) * [ ∫K      ∫u'K   ]
///                            [ ∫uK     ∫uu'K  ]
///   sigma_limit (d+1)x(d+1)  same blocks with K replaced by K²,
///                            scaled by Var(Y|X=x) f(x)
///   b0          ½ f(x) Σ_ij g_ij(x) ∫ u_i u_j K
///   b1          ½ f(x) Σ_ij g_ij(x) ∫ u_i u_j u K      (vector in R^d)
///   bg          ½ Σ_i g_ii(x) ∫ u_i² K
///   var0        Var(Y|X=x) ∫K² / f(x)
///   var1        Var(Y|X=x)/f(x) * [∫uu'K]⁻¹ [∫uu'K²] [∫uu'K]⁻¹
struct AsymptoticQuantities {
    Eigen::MatrixXd u_limit;
    Eigen::MatrixXd sigma_limit;
    double b0 = 0.0;
    Eigen::VectorXd b1;
    double bg = 0.0;
    double var0 = 0.0;
    Eigen::MatrixXd var1;
};

AsymptoticQuantities limit_quantities(const TrueModel& model, const Eigen::VectorXd& x,
                                      const KernelSpec& kernel);

/// Bias and variances at a univariate left boundary point x = c*b: same
/// formulas as the interior ones with every kernel integral truncated to
/// [-c, ∞), evaluated with the model at 0+.
struct BoundaryQuantities {
    double bg = 0.0;
    double var0 = 0.0;
    double var1 = 0.0;
};

BoundaryQuantities boundary_quantities(const TrueModel& model, double c,
                                       const KernelSpec& kernel);

/// Theorem-scale standardized estimation errors:
///   z0 = (n̂ b^d)^{1/2} (ĝ(x) - g(x) - bg b²) / sqrt(var0)
///   z1 = (n̂ b^{d+2})^{1/2} var1^{-1/2} (ĝ'(x) - g'(x))
/// both asymptotically standard normal and mutually independent.
struct StandardizedError {
    double z0 = 0.0;
    Eigen::VectorXd z1;
};

StandardizedError standardize_error(const LocalFit& fit, const TrueModel& model,
                                    const Eigen::VectorXd& x, const BandwidthSpec& bw,
                                    const LatticeShape& shape, const KernelSpec& kernel);

/// Hessian of the model at x, falling back to finite differences of the
/// gradient when no analytic Hessian is supplied.
Eigen::MatrixXd model_hessian(const TrueModel& model, const Eigen::VectorXd& x);

} // namespace llr
