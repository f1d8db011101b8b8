#include "llr/asymptotics.hpp"

#include "llr/errors.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace llr {

namespace {

Eigen::MatrixXd moment_block(const KernelSpec& kernel, int power) {
    const int d = kernel.dimension();
    Eigen::MatrixXd block(d + 1, d + 1);
    std::vector<int> alpha(d, 0);
    block(0, 0) = kernel_moment(kernel, alpha, power);
    for (int i = 0; i < d; ++i) {
        alpha.assign(d, 0);
        alpha[i] = 1;
        block(0, i + 1) = block(i + 1, 0) = kernel_moment(kernel, alpha, power);
        for (int l = i; l < d; ++l) {
            alpha.assign(d, 0);
            alpha[i] = 1;
            alpha[l] += 1;
            block(i + 1, l + 1) = block(l + 1, i + 1) = kernel_moment(kernel, alpha, power);
        }
    }
    return block;
}

Eigen::MatrixXd second_moment_matrix(const KernelSpec& kernel, int power) {
    const int d = kernel.dimension();
    Eigen::MatrixXd m(d, d);
    std::vector<int> alpha(d, 0);
    for (int i = 0; i < d; ++i) {
        for (int l = i; l < d; ++l) {
            alpha.assign(d, 0);
            alpha[i] = 1;
            alpha[l] += 1;
            m(i, l) = m(l, i) = kernel_moment(kernel, alpha, power);
        }
    }
    return m;
}

// Symmetric inverse square root with an absolute eigenvalue cutoff; matrices
// below the cutoff are treated as singular.
Eigen::MatrixXd inverse_sqrt(const Eigen::MatrixXd& m, const char* what) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    const Eigen::VectorXd evals = es.eigenvalues();
    if (evals.minCoeff() < 1e-12) {
        throw SingularMatrixError(std::string(what) + " is singular or not positive definite");
    }
    return es.eigenvectors() * evals.cwiseSqrt().cwiseInverse().asDiagonal() *
           es.eigenvectors().transpose();
}

} // namespace

Eigen::MatrixXd model_hessian(const TrueModel& model, const Eigen::VectorXd& x) {
    if (model.hessian) {
        return model.hessian(x);
    }
    if (!model.gradient) {
        throw ConfigError("model supplies neither a Hessian nor a gradient");
    }
    const int d = static_cast<int>(x.size());
    Eigen::MatrixXd h(d, d);
    Eigen::VectorXd xp = x;
    Eigen::VectorXd xm = x;
    for (int k = 0; k < d; ++k) {
        const double step = 1e-4 * (1.0 + std::abs(x(k)));
        xp(k) = x(k) + step;
        xm(k) = x(k) - step;
        h.col(k) = (model.gradient(xp) - model.gradient(xm)) / (2.0 * step);
        xp(k) = x(k);
        xm(k) = x(k);
    }
    return 0.5 * (h + h.transpose());
}

AsymptoticQuantities limit_quantities(const TrueModel& model, const Eigen::VectorXd& x,
                                      const KernelSpec& kernel) {
    const int d = kernel.dimension();
    if (x.size() != d) {
        throw DimensionMismatchError("point dimension does not match kernel");
    }
    const double f = model.density(x);
    if (!(f > 0.0)) {
        throw ZeroDensityError("marginal density is not positive at the evaluation point");
    }
    const double cv = model.cond_variance(x);
    const Eigen::MatrixXd hess = model_hessian(model, x);

    AsymptoticQuantities q;
    q.u_limit = f * moment_block(kernel, 1);
    q.sigma_limit = cv * f * moment_block(kernel, 2);

    // Bias functionals of the second derivatives.
    std::vector<int> alpha(d, 0);
    q.b0 = 0.0;
    q.b1 = Eigen::VectorXd::Zero(d);
    q.bg = 0.0;
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            alpha.assign(d, 0);
            alpha[i] += 1;
            alpha[j] += 1;
            const double m2 = kernel_moment(kernel, alpha, 1);
            q.b0 += 0.5 * f * hess(i, j) * m2;
            if (i == j) {
                q.bg += 0.5 * hess(i, i) * m2;
            }
            for (int k = 0; k < d; ++k) {
                std::vector<int> alpha3 = alpha;
                alpha3[k] += 1;
                q.b1(k) += 0.5 * f * hess(i, j) * kernel_moment(kernel, alpha3, 1);
            }
        }
    }

    q.var0 = cv * kernel_moment(kernel, std::vector<int>(d, 0), 2) / f;

    const Eigen::MatrixXd m2k = second_moment_matrix(kernel, 1);
    const Eigen::MatrixXd m2k2 = second_moment_matrix(kernel, 2);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(m2k);
    if (!lu.isInvertible()) {
        throw SingularMatrixError("second kernel moment matrix is singular");
    }
    const Eigen::MatrixXd inv = lu.inverse();
    q.var1 = (cv / f) * inv * m2k2 * inv;
    return q;
}

BoundaryQuantities boundary_quantities(const TrueModel& model, double c,
                                       const KernelSpec& kernel) {
    if (kernel.dimension() != 1) {
        throw DimensionMismatchError("boundary quantities are defined for d = 1 only");
    }
    if (!(c > 0.0)) {
        throw ConfigError("boundary offset c must be positive");
    }
    const Eigen::VectorXd origin = Eigen::VectorXd::Zero(1);
    const double f = model.density(origin);
    if (!(f > 0.0)) {
        throw ZeroDensityError("marginal density is not positive at the boundary");
    }
    const double cv = model.cond_variance(origin);
    const double g2 = model_hessian(model, origin)(0, 0);

    const double u2k = truncated_moment_1d(kernel.family(), 2, 1, -c);
    const double k2 = truncated_moment_1d(kernel.family(), 0, 2, -c);
    const double u2k2 = truncated_moment_1d(kernel.family(), 2, 2, -c);

    BoundaryQuantities out;
    out.bg = 0.5 * g2 * u2k;
    out.var0 = cv * k2 / f;
    out.var1 = (cv / f) * u2k2 / (u2k * u2k);
    return out;
}

StandardizedError standardize_error(const LocalFit& fit, const TrueModel& model,
                                    const Eigen::VectorXd& x, const BandwidthSpec& bw,
                                    const LatticeShape& shape, const KernelSpec& kernel) {
    const int d = kernel.dimension();
    const AsymptoticQuantities q = limit_quantities(model, x, kernel);
    if (!(q.var0 > 0.0)) {
        throw ZeroVarianceError("asymptotic variance of the level estimate is zero");
    }
    const double n_hat = static_cast<double>(shape.total_sites());
    const double b = bw.b;
    const double scale0 = std::sqrt(n_hat * std::pow(b, d));
    const double scale1 = std::sqrt(n_hat * std::pow(b, d + 2));

    StandardizedError z;
    z.z0 = scale0 * (fit.g_hat - model.regression(x) - q.bg * b * b) / std::sqrt(q.var0);
    const Eigen::VectorXd grad_err = fit.grad_hat - model.gradient(x);
    z.z1 = scale1 * (inverse_sqrt(q.var1, "var1") * grad_err);
    return z;
}

} // namespace llr
