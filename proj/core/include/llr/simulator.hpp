#pragma once

#include "llr/lattice.hpp"
#include "llr/rng.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

namespace llr {

/// Dense row-major 2-D grid of doubles.
class Grid2 {
public:
    Grid2(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {}

    int rows() const noexcept { return rows_; }
    int cols() const noexcept { return cols_; }

    double& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const {
        return data_[static_cast<std::size_t>(i) * cols_ + j];
    }

    /// Reads (i, j), returning 0 outside the grid.
    double at_or_zero(int i, int j) const {
        if (i < 0 || j < 0 || i >= rows_ || j >= cols_) {
            return 0.0;
        }
        return (*this)(i, j);
    }

    bool operator==(const Grid2&) const = default;

private:
    int rows_;
    int cols_;
    std::vector<double> data_;
};

/// Site visiting order of one in-place sweep. Raster updates run
/// lexicographically, so already-updated backward neighbors are seen within
/// the same pass; checkerboard updates even-parity sites first, then odd.
enum class SweepOrder { raster, checkerboard };

SweepOrder sweep_order_from_name(std::string_view name);
std::string_view sweep_order_name(SweepOrder order);

/// Generation protocol: the sampled m x n window sits inside an extended
/// grid with `margin` warm-up cells on every side, the recursion is swept
/// `sweeps` times, and the same noise realization drives every sweep unless
/// `redraw_noise` is set.
struct SimProtocol {
    int margin = 75;
    int sweeps = 20;
    double noise_sd = 1.0;
    std::uint64_t seed = 0;
    SweepOrder order = SweepOrder::raster;
    bool redraw_noise = false;
};

/// Spatial lags applied to Y to build a covariate; offsets are relative
/// (row, column) displacements, (0, 0) excluded.
class LagSet {
public:
    explicit LagSet(std::vector<std::pair<int, int>> offsets);

    const std::vector<std::pair<int, int>>& offsets() const noexcept { return offsets_; }
    int max_abs_offset() const noexcept;

private:
    std::vector<std::pair<int, int>> offsets_;
};

/// Named covariate constructions: x0 sums the four order-1 lags, xc extends
/// them by the four order-2 lags, xd keeps only the two backward order-1
/// lags, xe the two forward ones, xf the backward lags of orders 1 and 2.
enum class CovariatePreset { x0, xc, xd, xe, xf };

CovariatePreset covariate_preset_from_name(std::string_view name);
std::string_view covariate_preset_name(CovariatePreset preset);
LagSet preset_lags(CovariatePreset preset);

enum class ModelKind { model1, model2, iid };

ModelKind model_kind_from_name(std::string_view name);
std::string_view model_kind_name(ModelKind kind);

/// Which synthetic field to draw and at what size. model1 is a regression
/// field with a sin-link autoregressive covariate; model2 is the sin-link
/// autoregression itself with lagged-sum covariates; iid is a benchmark with
/// X uniform on [-iid_halfwidth, iid_halfwidth] and Y = X^2 + noise.
struct ModelSpec {
    ModelKind kind = ModelKind::model1;
    int m = 10;
    int n = 20;
    CovariatePreset covariate_preset = CovariatePreset::x0;
    std::optional<LagSet> custom_lags; // overrides covariate_preset when set
    double iid_halfwidth = 1.0;
    SimProtocol protocol;
};

/// Lag set a model2 spec resolves to (custom lags if given, else the preset).
LagSet model2_lags(const ModelSpec& spec);

/// Regression function of model 1, g(x) = e^x/3 + 2 e^{-x}/3.
double model1_regression(double x);
double model1_regression_d1(double x);

/// Runs `sweeps` full in-place passes of
///   F[i,j] <- sin(F[i-1,j] + F[i,j-1] + F[i+1,j] + F[i,j+1]) + noise[i,j]
/// over a zero-initialized grid, with out-of-grid neighbors read as zero and
/// the same noise grid reused in every pass.
Grid2 sweep_field(const Grid2& noise, int sweeps, SweepOrder order = SweepOrder::raster);

/// Covariate grid over the central m x n window: X[i,j] = sum of extended Y
/// at the lag offsets. Lagged values come from the warm-up zone where
/// needed; offsets larger than the margin are an error.
Grid2 apply_lags(const Grid2& extended_y, const LagSet& lags, int margin, int m, int n);

LatticeField simulate_model1(const ModelSpec& spec);
LatticeField simulate_model2(const ModelSpec& spec);

/// model2 field plus the extended grid it was windowed from.
struct Model2Realization {
    Grid2 extended_y;
    LatticeField field;
};
Model2Realization simulate_model2_extended(const ModelSpec& spec);

LatticeField simulate_iid(const ModelSpec& spec);

/// Dispatch on spec.kind.
LatticeField simulate(const ModelSpec& spec);

} // namespace llr
