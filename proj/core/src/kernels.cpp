#include "llr/kernels.hpp"

#include "llr/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

namespace llr {

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267794; // 1/sqrt(2*pi)
constexpr double kGaussianCut = 8.0;

// Univariate full-range moments m[degree] = ∫ u^degree k1(u)^power du.
// Gaussian: E[U^{2m}] = (2m-1)!!; phi^2 integrates like a N(0, 1/2) density
// scaled by 1/(2*sqrt(pi)). Epanechnikov and uniform are short polynomials.
double closed_form_moment(KernelFamily family, int degree, int power) {
    if (degree % 2 == 1) {
        return 0.0;
    }
    const double inv_2sqrtpi = 0.5 / std::sqrt(std::numbers::pi);
    switch (family) {
    case KernelFamily::gaussian:
        if (power == 1) {
            return degree == 0 ? 1.0 : (degree == 2 ? 1.0 : 3.0);
        }
        return degree == 0 ? inv_2sqrtpi
                           : (degree == 2 ? 0.5 * inv_2sqrtpi : 0.75 * inv_2sqrtpi);
    case KernelFamily::epanechnikov:
        if (power == 1) {
            return degree == 0 ? 1.0 : (degree == 2 ? 0.2 : 3.0 / 35.0);
        }
        return degree == 0 ? 0.6 : (degree == 2 ? 3.0 / 35.0 : 1.0 / 35.0);
    case KernelFamily::uniform:
        if (power == 1) {
            return 1.0 / (degree + 1);
        }
        return 0.5 / (degree + 1);
    }
    return 0.0;
}

double adaptive_simpson_step(const std::function<double(double)>& f, double a, double b,
                             double fa, double fm, double fb, double whole, double tol,
                             int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return adaptive_simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol) {
    if (!(a < b)) {
        return 0.0;
    }
    const double m = 0.5 * (a + b);
    const double fa = f(a);
    const double fm = f(m);
    const double fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson_step(f, a, b, fa, fm, fb, whole, tol, 48);
}

} // namespace

KernelFamily kernel_family_from_name(std::string_view name) {
    if (name == "gaussian") {
        return KernelFamily::gaussian;
    }
    if (name == "epanechnikov") {
        return KernelFamily::epanechnikov;
    }
    if (name == "uniform") {
        return KernelFamily::uniform;
    }
    throw ConfigError("unknown kernel '" + std::string(name) +
                      "' (expected gaussian, epanechnikov or uniform)");
}

std::string_view kernel_family_name(KernelFamily family) {
    switch (family) {
    case KernelFamily::gaussian:
        return "gaussian";
    case KernelFamily::epanechnikov:
        return "epanechnikov";
    case KernelFamily::uniform:
        return "uniform";
    }
    return "?";
}

KernelSpec::KernelSpec(KernelFamily family, int dimension)
    : family_(family), dimension_(dimension) {
    if (dimension < 1) {
        throw DimensionMismatchError("kernel dimension must be positive");
    }
}

double KernelSpec::support_radius() const noexcept {
    return compact_support() ? 1.0 : kGaussianCut;
}

double eval_kernel1(KernelFamily family, double u) {
    switch (family) {
    case KernelFamily::gaussian:
        return kInvSqrt2Pi * std::exp(-0.5 * u * u);
    case KernelFamily::epanechnikov:
        return std::abs(u) <= 1.0 ? 0.75 * (1.0 - u * u) : 0.0;
    case KernelFamily::uniform:
        return std::abs(u) <= 1.0 ? 0.5 : 0.0;
    }
    return 0.0;
}

double eval_kernel(const KernelSpec& spec, const Eigen::VectorXd& u) {
    if (u.size() != spec.dimension()) {
        throw DimensionMismatchError("kernel argument has wrong length");
    }
    double v = 1.0;
    for (int k = 0; k < u.size(); ++k) {
        v *= eval_kernel1(spec.family(), u(k));
        if (v == 0.0) {
            return 0.0;
        }
    }
    return v;
}

double eval_tilted(const KernelSpec& spec, const TiltCoefficients& c, const Eigen::VectorXd& u) {
    if (c.c1.size() != spec.dimension()) {
        throw DimensionMismatchError("tilt coefficients have wrong length");
    }
    return (c.c0 + c.c1.dot(u)) * eval_kernel(spec, u);
}

double kernel_moment_1d(KernelFamily family, int degree, int power) {
    if (degree < 0 || degree > 4) {
        throw UnsupportedMomentError("univariate moment degree must be in [0, 4]");
    }
    if (power != 1 && power != 2) {
        throw UnsupportedMomentError("moment power must be 1 or 2");
    }
    return closed_form_moment(family, degree, power);
}

double kernel_moment(const KernelSpec& spec, const std::vector<int>& alpha, int power) {
    if (static_cast<int>(alpha.size()) != spec.dimension()) {
        throw DimensionMismatchError("multi-index length does not match kernel dimension");
    }
    int total = 0;
    for (int a : alpha) {
        if (a < 0) {
            throw UnsupportedMomentError("multi-index entries must be nonnegative");
        }
        total += a;
    }
    if (total > 4) {
        throw UnsupportedMomentError("moments above total order 4 are not supported");
    }
    if (power != 1 && power != 2) {
        throw UnsupportedMomentError("moment power must be 1 or 2");
    }
    double v = 1.0;
    for (int a : alpha) {
        v *= closed_form_moment(spec.family(), a, power);
        if (v == 0.0) {
            return 0.0;
        }
    }
    return v;
}

double truncated_moment_1d(KernelFamily family, int degree, int power, double lower) {
    if (degree < 0 || degree > 4) {
        throw UnsupportedMomentError("univariate moment degree must be in [0, 4]");
    }
    if (power != 1 && power != 2) {
        throw UnsupportedMomentError("moment power must be 1 or 2");
    }

    const double hi = family == KernelFamily::gaussian ? kGaussianCut : 1.0;
    if (lower <= -hi) {
        return kernel_moment_1d(family, degree, power);
    }
    if (lower >= hi) {
        return 0.0;
    }

    using Key = std::tuple<KernelFamily, int, int, double>;
    static std::map<Key, double> cache;
    static std::mutex cache_mutex;
    const Key key{family, degree, power, lower};
    {
        std::lock_guard<std::mutex> lock(cache_mutex);
        if (auto it = cache.find(key); it != cache.end()) {
            return it->second;
        }
    }

    auto integrand = [family, degree, power](double u) {
        const double k = eval_kernel1(family, u);
        return std::pow(u, degree) * (power == 1 ? k : k * k);
    };
    const double value = adaptive_simpson(integrand, lower, hi, 1e-8);

    std::lock_guard<std::mutex> lock(cache_mutex);
    cache.emplace(key, value);
    return value;
}

} // namespace llr
