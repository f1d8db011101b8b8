#include "llr/experiment.hpp"

#include "llr/errors.hpp"
#include "llr/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <numbers>
#include <thread>

namespace llr {

namespace {

void validate_config(const ExperimentConfig& cfg) {
    if (cfg.replications < 1) {
        throw ConfigError("replications must be >= 1");
    }
    if (cfg.x_grid.empty()) {
        throw ConfigError("x_grid must be nonempty");
    }
    if (!std::is_sorted(cfg.x_grid.begin(), cfg.x_grid.end(),
                        [](double a, double b) { return a <= b; })) {
        throw ConfigError("x_grid must be strictly increasing");
    }
}

ModelSpec replication_spec(const ExperimentConfig& cfg, int r) {
    ModelSpec spec = cfg.model;
    spec.protocol.seed = split_seed(cfg.base_seed, static_cast<std::uint64_t>(r));
    return spec;
}

// Runs fn(0..count-1) on a small pool; exceptions are rethrown on the caller
// thread. Each index writes only its own slot, so scheduling is free to vary.
void parallel_for_index(int count, const std::function<void(int)>& fn) {
    const int workers = effective_thread_count(count);
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&]() {
        while (true) {
            const int i = next.fetch_add(1);
            if (i >= count) {
                return;
            }
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) {
        pool.emplace_back(body);
    }
    for (auto& th : pool) {
        th.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

// Type-7 (linear interpolation) sample quantile.
double quantile(std::vector<double> sorted, double p) {
    const double h = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - std::floor(h)) * (sorted[hi] - sorted[lo]);
}

ReplicationResult run_replication(const ExperimentConfig& cfg, int r) {
    const ModelSpec spec = replication_spec(cfg, r);
    const LatticeField field = simulate(spec);
    const BandwidthSpec bw(cfg.bandwidth);
    const KernelSpec kernel(cfg.kernel, field.covariate_dim());

    ReplicationResult result;
    result.curve.reserve(cfg.x_grid.size());
    Eigen::VectorXd point(1);
    for (double x : cfg.x_grid) {
        point(0) = x;
        FitResult fit = local_linear_fit(field, point, bw, kernel);
        if (!fit_ok(fit)) {
            ++result.failures;
        }
        result.curve.push_back(std::move(fit));
    }

    // In-sample fit at each site's own covariate.
    std::vector<double> y_ok;
    std::vector<double> fitted_ok;
    y_ok.reserve(static_cast<std::size_t>(field.size()));
    fitted_ok.reserve(static_cast<std::size_t>(field.size()));
    for (std::int64_t j = 0; j < field.size(); ++j) {
        point(0) = field.xs()(j, 0);
        const FitResult fit = local_linear_fit(field, point, bw, kernel);
        if (fit_ok(fit)) {
            y_ok.push_back(field.y(j));
            fitted_ok.push_back(fit_value(fit).g_hat);
        } else {
            ++result.failures;
        }
    }
    try {
        result.nsr = noise_to_signal(y_ok, fitted_ok);
    } catch (const NumericalError&) {
        result.nsr = std::numeric_limits<double>::quiet_NaN();
    }

    if (spec.kind == ModelKind::model1) {
        std::vector<double> g_true(static_cast<std::size_t>(field.size()));
        std::vector<double> ys(static_cast<std::size_t>(field.size()));
        for (std::int64_t j = 0; j < field.size(); ++j) {
            g_true[static_cast<std::size_t>(j)] = model1_regression(field.xs()(j, 0));
            ys[static_cast<std::size_t>(j)] = field.y(j);
        }
        result.nsr_true = noise_to_signal(ys, g_true);
    }
    return result;
}

} // namespace

int effective_thread_count(int task_count) {
    if (task_count <= 1) {
        return 1;
    }
    int requested = 0;
    if (const char* env = std::getenv("LATTICE_LLR_THREADS")) {
        requested = std::atoi(env);
    }
    if (requested <= 0) {
        requested = static_cast<int>(std::thread::hardware_concurrency());
        if (requested <= 0) {
            requested = 1;
        }
    }
    return std::min(requested, task_count);
}

double sample_variance(std::span<const double> v) {
    if (v.size() < 2) {
        throw DegenerateSignalError("sample variance needs at least two values");
    }
    double mean = 0.0;
    for (double x : v) {
        mean += x;
    }
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) {
        ss += (x - mean) * (x - mean);
    }
    return ss / static_cast<double>(v.size() - 1);
}

double sample_correlation(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.size() < 2) {
        throw DegenerateSignalError("correlation needs two equal-length samples");
    }
    const auto n = static_cast<double>(a.size());
    double ma = 0.0;
    double mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double saa = 0.0;
    double sbb = 0.0;
    double sab = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
        sab += (a[i] - ma) * (b[i] - mb);
    }
    if (saa == 0.0 || sbb == 0.0) {
        throw DegenerateSignalError("correlation of a constant sample");
    }
    return sab / std::sqrt(saa * sbb);
}

double noise_to_signal(std::span<const double> y, std::span<const double> fitted) {
    if (y.size() != fitted.size()) {
        throw DimensionMismatchError("fitted values do not match responses");
    }
    std::vector<double> resid(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        resid[i] = y[i] - fitted[i];
    }
    const double var_fit = sample_variance(fitted);
    if (var_fit == 0.0) {
        throw DegenerateSignalError("fitted values are constant");
    }
    return sample_variance(resid) / var_fit;
}

double noise_to_signal(const LatticeField& field, std::span<const double> fitted_at_sites) {
    if (static_cast<std::int64_t>(fitted_at_sites.size()) != field.size()) {
        throw DimensionMismatchError("one fitted value per site required");
    }
    return noise_to_signal(std::span<const double>(field.ys().data(),
                                                   static_cast<std::size_t>(field.size())),
                           fitted_at_sites);
}

std::vector<double> default_x_grid(const ModelSpec& model, std::uint64_t base_seed, int count,
                                   double coverage) {
    if (count < 2 || !(coverage > 0.0) || coverage > 1.0) {
        throw ConfigError("invalid grid request");
    }
    ModelSpec spec = model;
    spec.protocol.seed = split_seed(base_seed, 1);
    const LatticeField field = simulate(spec);
    std::vector<double> xs(field.xs().col(0).data(),
                           field.xs().col(0).data() + field.size());
    std::sort(xs.begin(), xs.end());
    const double tail = 0.5 * (1.0 - coverage);
    const double lo = quantile(xs, tail);
    const double hi = quantile(std::move(xs), 1.0 - tail);
    std::vector<double> grid(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        grid[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (count - 1);
    }
    return grid;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    validate_config(cfg);
    ExperimentResult result;
    result.x_grid = cfg.x_grid;
    result.replications.resize(static_cast<std::size_t>(cfg.replications));

    parallel_for_index(cfg.replications, [&](int i) {
        result.replications[static_cast<std::size_t>(i)] = run_replication(cfg, i + 1);
    });

    double nsr_sum = 0.0;
    double nsr_true_sum = 0.0;
    bool have_true = !result.replications.empty();
    for (const ReplicationResult& rep : result.replications) {
        nsr_sum += rep.nsr;
        result.failures += rep.failures;
        if (rep.nsr_true) {
            nsr_true_sum += *rep.nsr_true;
        } else {
            have_true = false;
        }
    }
    result.nsr_mean = nsr_sum / static_cast<double>(cfg.replications);
    if (have_true) {
        result.nsr_true_mean = nsr_true_sum / static_cast<double>(cfg.replications);
    }

    result.summary.resize(cfg.x_grid.size());
    std::vector<double> values;
    for (std::size_t k = 0; k < cfg.x_grid.size(); ++k) {
        values.clear();
        for (const ReplicationResult& rep : result.replications) {
            if (fit_ok(rep.curve[k])) {
                values.push_back(fit_value(rep.curve[k]).g_hat);
            }
        }
        GridPointSummary& s = result.summary[k];
        s.n_ok = static_cast<int>(values.size());
        if (!values.empty()) {
            double mean = 0.0;
            for (double v : values) {
                mean += v;
            }
            s.mean = mean / static_cast<double>(values.size());
        }
        s.sd = values.size() >= 2 ? std::sqrt(sample_variance(values))
                                  : std::numeric_limits<double>::quiet_NaN();
    }
    return result;
}

double normal_cdf(double z) {
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

double ks_statistic(std::span<const double> sample) {
    if (sample.empty()) {
        throw DegenerateSignalError("empty sample");
    }
    std::vector<double> z(sample.begin(), sample.end());
    std::sort(z.begin(), z.end());
    const auto n = static_cast<double>(z.size());
    double d = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double cdf = normal_cdf(z[i]);
        d = std::max(d, (static_cast<double>(i) + 1.0) / n - cdf);
        d = std::max(d, cdf - static_cast<double>(i) / n);
    }
    return d;
}

double ks_asymptotic_pvalue(double stat, std::size_t n) {
    const double lambda = std::sqrt(static_cast<double>(n)) * stat;
    if (lambda <= 0.0) {
        return 1.0;
    }
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += sign * term;
        sign = -sign;
        if (term < 1e-14) {
            break;
        }
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

NormalityDiagnostics normality_diagnostics(const ExperimentConfig& cfg, const TrueModel& truth,
                                           const Eigen::VectorXd& x0) {
    validate_config(cfg);
    if (x0.size() != 1) {
        throw DimensionMismatchError("normality diagnostics are defined for d = 1");
    }
    const BandwidthSpec bw(cfg.bandwidth);
    const KernelSpec kernel(cfg.kernel, 1);

    struct Cell {
        bool ok = false;
        double z0 = 0.0;
        double g_hat = 0.0;
        double grad = 0.0;
    };
    std::vector<Cell> cells(static_cast<std::size_t>(cfg.replications));

    parallel_for_index(cfg.replications, [&](int i) {
        const ModelSpec spec = replication_spec(cfg, i + 1);
        const LatticeField field = simulate(spec);
        const FitResult fit = local_linear_fit(field, x0, bw, kernel);
        if (!fit_ok(fit)) {
            return;
        }
        TrueModel model = truth;
        if (!model.density) {
            const double fhat = kde(field, x0, bw, kernel);
            model.density = [fhat](const Eigen::VectorXd&) { return fhat; };
        }
        const StandardizedError z =
            standardize_error(fit_value(fit), model, x0, bw, field.shape(), kernel);
        Cell& c = cells[static_cast<std::size_t>(i)];
        c.ok = true;
        c.z0 = z.z0;
        c.g_hat = fit_value(fit).g_hat;
        c.grad = fit_value(fit).grad_hat(0);
    });

    std::vector<double> z0s;
    std::vector<double> ghs;
    std::vector<double> grads;
    for (const Cell& c : cells) {
        if (c.ok) {
            z0s.push_back(c.z0);
            ghs.push_back(c.g_hat);
            grads.push_back(c.grad);
        }
    }
    if (z0s.size() < 30) {
        throw InsufficientReplicationsError(
            "fewer than 30 replications produced a successful fit");
    }

    NormalityDiagnostics out;
    out.n_success = static_cast<int>(z0s.size());
    double mean = 0.0;
    for (double v : z0s) {
        mean += v;
    }
    out.mean_z0 = mean / static_cast<double>(z0s.size());
    out.var_z0 = sample_variance(z0s);
    out.ks_stat = ks_statistic(z0s);
    out.ks_pvalue = ks_asymptotic_pvalue(out.ks_stat, z0s.size());
    out.corr_g_grad = sample_correlation(ghs, grads);
    return out;
}

} // namespace llr
