#include "llr/simulator.hpp"

#include "llr/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace llr {

namespace {

// Noise streams sharing one replication seed.
constexpr std::uint32_t kStreamSweepNoise = 0;
constexpr std::uint32_t kStreamResponseNoise = 1;
constexpr std::uint32_t kStreamIidUniform = 2;
constexpr std::uint32_t kStreamIidNoise = 3;

inline void sweep_site(Grid2& f, const Grid2& noise, int i, int j) {
    const double s = f.at_or_zero(i - 1, j) + f.at_or_zero(i, j - 1) +
                     f.at_or_zero(i + 1, j) + f.at_or_zero(i, j + 1);
    f(i, j) = std::sin(s) + noise(i, j);
}

void sweep_pass(Grid2& f, const Grid2& noise, SweepOrder order) {
    if (order == SweepOrder::raster) {
        for (int i = 0; i < f.rows(); ++i) {
            for (int j = 0; j < f.cols(); ++j) {
                sweep_site(f, noise, i, j);
            }
        }
        return;
    }
    for (int parity = 0; parity < 2; ++parity) {
        for (int i = 0; i < f.rows(); ++i) {
            for (int j = (i + parity) % 2; j < f.cols(); j += 2) {
                sweep_site(f, noise, i, j);
            }
        }
    }
}

// Noise values are indexed by window-relative coordinates, so the central
// window's noise does not depend on the margin size.
Grid2 draw_noise(const CounterRng& rng, const SimProtocol& p, int rows, int cols,
                 std::uint32_t sweep_index) {
    Grid2 noise(rows, cols);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            noise(i, j) = p.noise_sd * rng.normal(i - p.margin, j - p.margin, sweep_index);
        }
    }
    return noise;
}

Grid2 generate_extended(const ModelSpec& spec, std::uint32_t stream) {
    const SimProtocol& p = spec.protocol;
    if (p.margin < 0 || p.sweeps < 1 || !(p.noise_sd > 0.0)) {
        throw ConfigError("invalid simulation protocol");
    }
    const int rows = 2 * p.margin + spec.m;
    const int cols = 2 * p.margin + spec.n;
    const CounterRng rng(p.seed, stream);
    if (!p.redraw_noise) {
        return sweep_field(draw_noise(rng, p, rows, cols, 0), p.sweeps, p.order);
    }
    Grid2 f(rows, cols);
    for (int s = 0; s < p.sweeps; ++s) {
        const Grid2 noise = draw_noise(rng, p, rows, cols, static_cast<std::uint32_t>(s));
        sweep_pass(f, noise, p.order);
    }
    return f;
}

LatticeField window_to_field(const Grid2& y_grid, const Grid2& x_grid, int margin, int m,
                             int n, bool y_from_extended) {
    Eigen::VectorXd y(static_cast<std::int64_t>(m) * n);
    Eigen::MatrixXd x(static_cast<std::int64_t>(m) * n, 1);
    std::int64_t idx = 0;
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j, ++idx) {
            y(idx) = y_from_extended ? y_grid(margin + i, margin + j) : y_grid(i, j);
            x(idx, 0) = x_grid(i, j);
        }
    }
    return LatticeField(LatticeShape({m, n}), std::move(y), std::move(x));
}

} // namespace

SweepOrder sweep_order_from_name(std::string_view name) {
    if (name == "raster") {
        return SweepOrder::raster;
    }
    if (name == "checkerboard") {
        return SweepOrder::checkerboard;
    }
    throw ConfigError("unknown sweep order '" + std::string(name) + "'");
}

std::string_view sweep_order_name(SweepOrder order) {
    return order == SweepOrder::raster ? "raster" : "checkerboard";
}

LagSet::LagSet(std::vector<std::pair<int, int>> offsets) : offsets_(std::move(offsets)) {
    if (offsets_.empty()) {
        throw ConfigError("lag set must be nonempty");
    }
    std::set<std::pair<int, int>> seen;
    for (const auto& off : offsets_) {
        if (off == std::pair<int, int>{0, 0}) {
            throw ConfigError("lag set must not contain (0, 0)");
        }
        if (!seen.insert(off).second) {
            throw ConfigError("lag set contains duplicate offsets");
        }
    }
}

int LagSet::max_abs_offset() const noexcept {
    int m = 0;
    for (const auto& [a, b] : offsets_) {
        m = std::max({m, std::abs(a), std::abs(b)});
    }
    return m;
}

CovariatePreset covariate_preset_from_name(std::string_view name) {
    if (name == "X0" || name == "x0") {
        return CovariatePreset::x0;
    }
    if (name == "Xc" || name == "xc") {
        return CovariatePreset::xc;
    }
    if (name == "Xd" || name == "xd") {
        return CovariatePreset::xd;
    }
    if (name == "Xe" || name == "xe") {
        return CovariatePreset::xe;
    }
    if (name == "Xf" || name == "xf") {
        return CovariatePreset::xf;
    }
    throw ConfigError("unknown covariate preset '" + std::string(name) + "'");
}

std::string_view covariate_preset_name(CovariatePreset preset) {
    switch (preset) {
    case CovariatePreset::x0:
        return "X0";
    case CovariatePreset::xc:
        return "Xc";
    case CovariatePreset::xd:
        return "Xd";
    case CovariatePreset::xe:
        return "Xe";
    case CovariatePreset::xf:
        return "Xf";
    }
    return "?";
}

LagSet preset_lags(CovariatePreset preset) {
    switch (preset) {
    case CovariatePreset::x0:
        return LagSet({{-1, 0}, {0, -1}, {1, 0}, {0, 1}});
    case CovariatePreset::xc:
        return LagSet({{-2, 0}, {0, -2}, {-1, 0}, {0, -1}, {1, 0}, {0, 1}, {2, 0}, {0, 2}});
    case CovariatePreset::xd:
        return LagSet({{-1, 0}, {0, -1}});
    case CovariatePreset::xe:
        return LagSet({{1, 0}, {0, 1}});
    case CovariatePreset::xf:
        return LagSet({{-2, 0}, {0, -2}, {-1, 0}, {0, -1}});
    }
    throw ConfigError("unknown covariate preset");
}

ModelKind model_kind_from_name(std::string_view name) {
    if (name == "model1") {
        return ModelKind::model1;
    }
    if (name == "model2") {
        return ModelKind::model2;
    }
    if (name == "iid") {
        return ModelKind::iid;
    }
    throw ConfigError("unknown model kind '" + std::string(name) + "'");
}

std::string_view model_kind_name(ModelKind kind) {
    switch (kind) {
    case ModelKind::model1:
        return "model1";
    case ModelKind::model2:
        return "model2";
    case ModelKind::iid:
        return "iid";
    }
    return "?";
}

double model1_regression(double x) {
    return std::exp(x) / 3.0 + 2.0 * std::exp(-x) / 3.0;
}

double model1_regression_d1(double x) {
    return std::exp(x) / 3.0 - 2.0 * std::exp(-x) / 3.0;
}

Grid2 sweep_field(const Grid2& noise, int sweeps, SweepOrder order) {
    if (sweeps < 1) {
        throw ConfigError("sweep count must be positive");
    }
    Grid2 f(noise.rows(), noise.cols());
    for (int s = 0; s < sweeps; ++s) {
        sweep_pass(f, noise, order);
    }
    return f;
}

Grid2 apply_lags(const Grid2& extended_y, const LagSet& lags, int margin, int m, int n) {
    if (lags.max_abs_offset() > margin) {
        throw LagOutOfMarginError("lag offset exceeds the warm-up margin");
    }
    if (extended_y.rows() != 2 * margin + m || extended_y.cols() != 2 * margin + n) {
        throw DimensionMismatchError("extended grid does not match margin and window size");
    }
    Grid2 x(m, n);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (const auto& [a, b] : lags.offsets()) {
                s += extended_y(margin + i + a, margin + j + b);
            }
            x(i, j) = s;
        }
    }
    return x;
}

LatticeField simulate_model1(const ModelSpec& spec) {
    const SimProtocol& p = spec.protocol;
    const Grid2 x_full = generate_extended(spec, kStreamSweepNoise);
    const CounterRng rng(p.seed, kStreamResponseNoise);

    Grid2 x_win(spec.m, spec.n);
    Grid2 y_win(spec.m, spec.n);
    for (int i = 0; i < spec.m; ++i) {
        for (int j = 0; j < spec.n; ++j) {
            const double xv = x_full(p.margin + i, p.margin + j);
            x_win(i, j) = xv;
            y_win(i, j) = model1_regression(xv) + p.noise_sd * rng.normal(i, j);
        }
    }
    return window_to_field(y_win, x_win, 0, spec.m, spec.n, false);
}

LagSet model2_lags(const ModelSpec& spec) {
    return spec.custom_lags ? *spec.custom_lags : preset_lags(spec.covariate_preset);
}

Model2Realization simulate_model2_extended(const ModelSpec& spec) {
    const SimProtocol& p = spec.protocol;
    Grid2 y_full = generate_extended(spec, kStreamSweepNoise);
    const Grid2 x_win = apply_lags(y_full, model2_lags(spec), p.margin, spec.m, spec.n);
    LatticeField field = window_to_field(y_full, x_win, p.margin, spec.m, spec.n, true);
    return Model2Realization{std::move(y_full), std::move(field)};
}

LatticeField simulate_model2(const ModelSpec& spec) {
    return simulate_model2_extended(spec).field;
}

LatticeField simulate_iid(const ModelSpec& spec) {
    const SimProtocol& p = spec.protocol;
    if (!(spec.iid_halfwidth > 0.0)) {
        throw ConfigError("iid halfwidth must be positive");
    }
    const CounterRng ux(p.seed, kStreamIidUniform);
    const CounterRng ey(p.seed, kStreamIidNoise);
    Grid2 x_win(spec.m, spec.n);
    Grid2 y_win(spec.m, spec.n);
    for (int i = 0; i < spec.m; ++i) {
        for (int j = 0; j < spec.n; ++j) {
            const double xv = spec.iid_halfwidth * (2.0 * ux.uniform01(i, j) - 1.0);
            x_win(i, j) = xv;
            y_win(i, j) = xv * xv + p.noise_sd * ey.normal(i, j);
        }
    }
    return window_to_field(y_win, x_win, 0, spec.m, spec.n, false);
}

LatticeField simulate(const ModelSpec& spec) {
    if (spec.m < 1 || spec.n < 1) {
        throw ConfigError("sample window dimensions must be positive");
    }
    switch (spec.kind) {
    case ModelKind::model1:
        return simulate_model1(spec);
    case ModelKind::model2:
        return simulate_model2(spec);
    case ModelKind::iid:
        return simulate_iid(spec);
    }
    throw ConfigError("unknown model kind");
}

} // namespace llr
