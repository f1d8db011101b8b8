#pragma once

#include <Eigen/Core>

#include <string>
#include <string_view>
#include <vector>

namespace llr {

enum class KernelFamily { gaussian, epanechnikov, uniform };

KernelFamily kernel_family_from_name(std::string_view name);
std::string_view kernel_family_name(KernelFamily family);

/// Product kernel on R^d built from one symmetric univariate density, so
/// K(u) = prod_k k1(u_k) with k1 >= 0, integral one, k1(-u) = k1(u). Every
/// moment the asymptotics need then factors into univariate integrals.
class KernelSpec {
public:
    KernelSpec(KernelFamily family, int dimension);

    KernelFamily family() const noexcept { return family_; }
    int dimension() const noexcept { return dimension_; }

    /// True for the compactly supported families (support = unit cube).
    bool compact_support() const noexcept { return family_ != KernelFamily::gaussian; }

    /// Half-width of the univariate support; the gaussian tail is treated as
    /// zero beyond 8 standard deviations for quadrature purposes.
    double support_radius() const noexcept;

private:
    KernelFamily family_;
    int dimension_;
};

/// Tilt coefficients c = (c0, c1) of the linearly tilted kernel
/// (c0 + c1'u) K(u).
struct TiltCoefficients {
    double c0 = 1.0;
    Eigen::VectorXd c1;
};

/// Univariate kernel factor k1(u).
double eval_kernel1(KernelFamily family, double u);

/// K(u) at a point of R^d.
double eval_kernel(const KernelSpec& spec, const Eigen::VectorXd& u);

/// (c0 + c1'u) K(u); may be negative.
double eval_tilted(const KernelSpec& spec, const TiltCoefficients& c, const Eigen::VectorXd& u);

/// Full-range univariate moment ∫ u^degree k1(u)^power du, degree <= 4,
/// power in {1, 2}. Closed forms for all shipped families.
double kernel_moment_1d(KernelFamily family, int degree, int power);

/// Product moment ∫ u^alpha K(u)^power du over R^d with |alpha| <= 4.
double kernel_moment(const KernelSpec& spec, const std::vector<int>& alpha, int power);

/// Truncated univariate moment ∫_lower^∞ u^degree k1(u)^power du by adaptive
/// quadrature (absolute tolerance 1e-8); results are cached.
double truncated_moment_1d(KernelFamily family, int degree, int power, double lower);

} // namespace llr
