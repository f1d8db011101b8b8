#pragma once

#include "llr/kernels.hpp"
#include "llr/lattice.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <utility>
#include <variant>
#include <vector>

namespace llr {

/// Scalar bandwidth b applied componentwise to (X_j - x)/b.
struct BandwidthSpec {
    explicit BandwidthSpec(double bandwidth);
    double b;
};

/// One local-linear fit at an evaluation point x.
///
/// The weighted least-squares system is kept in the scaled parameterization:
/// with design entries ((X_j - x)/b)_i, i = 0..d and the convention that
/// entry 0 is 1,
///
///   u_matrix(i,l) = (n̂ b^d)^{-1} Σ_j ((X_j-x)/b)_i ((X_j-x)/b)_l K((X_j-x)/b)
///   v_vector(i)   = (n̂ b^d)^{-1} Σ_j Y_j ((X_j-x)/b)_i K((X_j-x)/b)
///
/// and the solve yields s = (ĝ(x), ĝ'(x)·b); grad_hat stores the unscaled
/// gradient s.tail(d)/b. The (n̂ b^d)^{-1} normalization cancels in the
/// solution but makes u_matrix directly comparable to its population limit.
struct LocalFit {
    Eigen::VectorXd x;
    double g_hat = 0.0;
    Eigen::VectorXd grad_hat;
    Eigen::MatrixXd u_matrix;
    Eigen::VectorXd v_vector;
    double rcond = 0.0;
    std::int64_t support_count = 0;
};

/// Why a fit could not be produced: no site carried positive kernel weight
/// (empty_window, compact-support kernels with too small a bandwidth), or
/// the design matrix is numerically rank-deficient (singular_system,
/// reciprocal condition estimate below 1e-12).
struct FitFailure {
    enum class Reason { singular_system, empty_window };
    Reason reason = Reason::empty_window;
    double rcond = 0.0;
    std::int64_t support_count = 0;
};

using FitResult = std::variant<LocalFit, FitFailure>;

inline bool fit_ok(const FitResult& r) { return std::holds_alternative<LocalFit>(r); }
inline const LocalFit& fit_value(const FitResult& r) { return std::get<LocalFit>(r); }
inline const FitFailure& fit_failure(const FitResult& r) { return std::get<FitFailure>(r); }

/// Minimizer of Σ_j (Y_j - a0 - a1'(X_j - x))^2 K((X_j - x)/b) over (a0, a1).
FitResult local_linear_fit(const LatticeField& field, const Eigen::VectorXd& x,
                           const BandwidthSpec& bw, const KernelSpec& kernel);

/// local_linear_fit applied to each evaluation point, order preserved.
std::vector<std::pair<Eigen::VectorXd, FitResult>>
fit_curve(const LatticeField& field, const std::vector<Eigen::VectorXd>& xs,
          const BandwidthSpec& bw, const KernelSpec& kernel);

/// Local-constant baseline Σ Y_j K((X_j-x)/b) / Σ K((X_j-x)/b).
std::variant<double, FitFailure> nadaraya_watson(const LatticeField& field,
                                                 const Eigen::VectorXd& x,
                                                 const BandwidthSpec& bw,
                                                 const KernelSpec& kernel);

/// Kernel density estimate (n̂ b^d)^{-1} Σ_j K((X_j - x)/b).
double kde(const LatticeField& field, const Eigen::VectorXd& x, const BandwidthSpec& bw,
           const KernelSpec& kernel);

} // namespace llr
