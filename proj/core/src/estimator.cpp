#include "llr/estimator.hpp"

#include "llr/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>

namespace llr {

namespace {

constexpr double kRcondThreshold = 1e-12;

void check_point(const LatticeField& field, const Eigen::VectorXd& x) {
    if (x.size() != field.covariate_dim()) {
        throw DimensionMismatchError("evaluation point has wrong length");
    }
}

} // namespace

BandwidthSpec::BandwidthSpec(double bandwidth) : b(bandwidth) {
    if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
        throw ConfigError("bandwidth must be positive and finite");
    }
}

FitResult local_linear_fit(const LatticeField& field, const Eigen::VectorXd& x,
                           const BandwidthSpec& bw, const KernelSpec& kernel) {
    check_point(field, x);
    if (kernel.dimension() != field.covariate_dim()) {
        throw DimensionMismatchError("kernel dimension does not match field");
    }
    const int d = field.covariate_dim();
    const std::int64_t n = field.size();
    const double b = bw.b;

    Eigen::MatrixXd u_mat = Eigen::MatrixXd::Zero(d + 1, d + 1);
    Eigen::VectorXd v_vec = Eigen::VectorXd::Zero(d + 1);
    Eigen::VectorXd a(d + 1);
    a(0) = 1.0;

    std::int64_t support = 0;
    for (std::int64_t j = 0; j < n; ++j) {
        double w = 1.0;
        for (int k = 0; k < d; ++k) {
            const double u = (field.xs()(j, k) - x(k)) / b;
            w *= eval_kernel1(kernel.family(), u);
            if (w == 0.0) {
                break;
            }
            a(k + 1) = u;
        }
        if (w == 0.0) {
            continue;
        }
        ++support;
        u_mat.selfadjointView<Eigen::Lower>().rankUpdate(a, w);
        v_vec.noalias() += (w * field.y(j)) * a;
    }

    const double norm = 1.0 / (static_cast<double>(n) * std::pow(b, d));
    u_mat *= norm;
    v_vec *= norm;
    u_mat.triangularView<Eigen::StrictlyUpper>() = u_mat.transpose();

    if (support == 0) {
        return FitFailure{FitFailure::Reason::empty_window, 0.0, 0};
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(u_mat);
    const Eigen::VectorXd evals = es.eigenvalues().cwiseAbs();
    const double lambda_max = evals.maxCoeff();
    const double lambda_min = evals.minCoeff();
    const double rcond = lambda_max > 0.0 ? lambda_min / lambda_max : 0.0;
    if (rcond < kRcondThreshold) {
        return FitFailure{FitFailure::Reason::singular_system, rcond, support};
    }

    const Eigen::VectorXd s =
        es.eigenvectors() *
        (es.eigenvalues().cwiseInverse().asDiagonal() * (es.eigenvectors().transpose() * v_vec));

    LocalFit fit;
    fit.x = x;
    fit.g_hat = s(0);
    fit.grad_hat = s.tail(d) / b;
    fit.u_matrix = std::move(u_mat);
    fit.v_vector = std::move(v_vec);
    fit.rcond = rcond;
    fit.support_count = support;
    return fit;
}

std::vector<std::pair<Eigen::VectorXd, FitResult>>
fit_curve(const LatticeField& field, const std::vector<Eigen::VectorXd>& xs,
          const BandwidthSpec& bw, const KernelSpec& kernel) {
    std::vector<std::pair<Eigen::VectorXd, FitResult>> out;
    out.reserve(xs.size());
    for (const Eigen::VectorXd& x : xs) {
        out.emplace_back(x, local_linear_fit(field, x, bw, kernel));
    }
    return out;
}

std::variant<double, FitFailure> nadaraya_watson(const LatticeField& field,
                                                 const Eigen::VectorXd& x,
                                                 const BandwidthSpec& bw,
                                                 const KernelSpec& kernel) {
    check_point(field, x);
    const int d = field.covariate_dim();
    double num = 0.0;
    double den = 0.0;
    for (std::int64_t j = 0; j < field.size(); ++j) {
        double w = 1.0;
        for (int k = 0; k < d; ++k) {
            w *= eval_kernel1(kernel.family(), (field.xs()(j, k) - x(k)) / bw.b);
            if (w == 0.0) {
                break;
            }
        }
        num += field.y(j) * w;
        den += w;
    }
    if (den == 0.0) {
        return FitFailure{FitFailure::Reason::empty_window, 0.0, 0};
    }
    return num / den;
}

double kde(const LatticeField& field, const Eigen::VectorXd& x, const BandwidthSpec& bw,
           const KernelSpec& kernel) {
    check_point(field, x);
    const int d = field.covariate_dim();
    double sum = 0.0;
    for (std::int64_t j = 0; j < field.size(); ++j) {
        double w = 1.0;
        for (int k = 0; k < d; ++k) {
            w *= eval_kernel1(kernel.family(), (field.xs()(j, k) - x(k)) / bw.b);
            if (w == 0.0) {
                break;
            }
        }
        sum += w;
    }
    return sum / (static_cast<double>(field.size()) * std::pow(bw.b, d));
}

} // namespace llr
