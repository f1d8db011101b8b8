#pragma once

#include "llr/asymptotics.hpp"
#include "llr/estimator.hpp"
#include "llr/kernels.hpp"
#include "llr/simulator.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace llr {

/// A replicated simulate-then-estimate run. Replication r draws its field
/// with seed split_seed(base_seed, r); the curve is fitted over x_grid and
/// the in-sample fit at every site's own covariate feeds the noise-to-signal
/// ratio.
struct ExperimentConfig {
    ModelSpec model;
    int replications = 10;
    double bandwidth = 0.5;
    KernelFamily kernel = KernelFamily::gaussian;
    std::vector<double> x_grid;
    std::uint64_t base_seed = 0;
};

struct ReplicationResult {
    std::vector<FitResult> curve;       // one entry per x_grid point
    double nsr = 0.0;                   // fitted-prediction reading
    std::optional<double> nsr_true;     // against the analytic g when known
    std::int64_t failures = 0;          // failed fits, curve and in-sample
};

struct GridPointSummary {
    double mean = 0.0;
    double sd = 0.0;
    int n_ok = 0;
};

struct ExperimentResult {
    std::vector<double> x_grid;
    std::vector<ReplicationResult> replications;
    double nsr_mean = 0.0;
    std::optional<double> nsr_true_mean;
    std::int64_t failures = 0;
    std::vector<GridPointSummary> summary; // per x_grid point, over successes
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Var(Y - fitted) / Var(fitted), both unbiased sample variances.
double noise_to_signal(std::span<const double> y, std::span<const double> fitted);
double noise_to_signal(const LatticeField& field, std::span<const double> fitted_at_sites);

/// 101 equispaced points spanning the central `coverage` quantile range of
/// the covariates in replication 1 (the experiment's default grid).
std::vector<double> default_x_grid(const ModelSpec& model, std::uint64_t base_seed,
                                   int count = 101, double coverage = 0.98);

/// Empirical check of the limiting law at a point x0: replications are
/// standardized with standardize_error, then summarized by the moments of
/// z0, its Kolmogorov-Smirnov distance from the standard normal, and the
/// correlation between the level and slope estimates. When `truth.density`
/// is empty, the density is plugged in per replication via kde. d = 1 only.
struct NormalityDiagnostics {
    double mean_z0 = 0.0;
    double var_z0 = 0.0;
    double ks_stat = 0.0;
    double ks_pvalue = 0.0;
    double corr_g_grad = 0.0;
    int n_success = 0;
};

NormalityDiagnostics normality_diagnostics(const ExperimentConfig& cfg, const TrueModel& truth,
                                           const Eigen::VectorXd& x0);

/// Exact one-sample Kolmogorov-Smirnov statistic against the standard
/// normal, and its asymptotic p-value.
double ks_statistic(std::span<const double> sample);
double ks_asymptotic_pvalue(double stat, std::size_t n);

double normal_cdf(double z);

double sample_variance(std::span<const double> v);
double sample_correlation(std::span<const double> a, std::span<const double> b);

/// Worker count for replication-level parallelism: LATTICE_LLR_THREADS if
/// set and positive, hardware concurrency otherwise, never more than the
/// task count. Results are always reduced in replication order, so the
/// thread count cannot change any output.
int effective_thread_count(int task_count);

} // namespace llr
