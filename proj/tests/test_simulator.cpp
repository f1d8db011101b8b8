#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "llr/errors.hpp"
#include "llr/simulator.hpp"

#include <cmath>
#include <vector>

using namespace llr;

namespace {

// Independent reference implementation of one raster pass of the recurrence,
// written against the definition rather than the library loop.
Grid2 reference_raster_sweeps(const Grid2& noise, int sweeps) {
    Grid2 f(noise.rows(), noise.cols());
    for (int s = 0; s < sweeps; ++s) {
        for (int i = 0; i < noise.rows(); ++i) {
            for (int j = 0; j < noise.cols(); ++j) {
                double up = i > 0 ? f(i - 1, j) : 0.0;
                double left = j > 0 ? f(i, j - 1) : 0.0;
                double down = i + 1 < noise.rows() ? f(i + 1, j) : 0.0;
                double right = j + 1 < noise.cols() ? f(i, j + 1) : 0.0;
                f(i, j) = std::sin(up + left + down + right) + noise(i, j);
            }
        }
    }
    return f;
}

double mean_of(const LatticeField& f) {
    return f.ys().mean();
}

double var_of(const LatticeField& f) {
    const double m = mean_of(f);
    return (f.ys().array() - m).square().sum() / static_cast<double>(f.size() - 1);
}

} // namespace

TEST_CASE("zero noise is a fixed point") {
    const Grid2 noise(6, 7, 0.0);
    const Grid2 out = sweep_field(noise, 20);
    for (int i = 0; i < out.rows(); ++i) {
        for (int j = 0; j < out.cols(); ++j) {
            CHECK(out(i, j) == 0.0);
        }
    }
}

TEST_CASE("sweep output is bounded by 1 + max |noise|") {
    Grid2 noise(10, 10);
    double max_abs = 0.0;
    const CounterRng rng(1, 0);
    for (int i = 0; i < 10; ++i) {
        for (int j = 0; j < 10; ++j) {
            noise(i, j) = 4.0 * rng.uniform01(i, j) - 2.0;
            max_abs = std::max(max_abs, std::abs(noise(i, j)));
        }
    }
    const Grid2 out = sweep_field(noise, 20);
    for (int i = 0; i < 10; ++i) {
        for (int j = 0; j < 10; ++j) {
            CHECK(std::abs(out(i, j)) <= 1.0 + max_abs + 1e-15);
        }
    }
}

TEST_CASE("unit impulse on a 3x3 grid matches the reference sweep") {
    Grid2 noise(3, 3, 0.0);
    noise(1, 1) = 1.0;
    const Grid2 out = sweep_field(noise, 1);
    const Grid2 ref = reference_raster_sweeps(noise, 1);
    CHECK(out == ref);

    // Raster order resolved by hand: earlier sites stay zero, the impulse
    // then propagates to its forward neighbors within the same pass.
    CHECK(out(0, 0) == 0.0);
    CHECK(out(0, 1) == 0.0);
    CHECK(out(0, 2) == 0.0);
    CHECK(out(1, 0) == 0.0);
    CHECK(out(1, 1) == 1.0);
    CHECK(out(1, 2) == doctest::Approx(std::sin(1.0)).epsilon(1e-15));
    CHECK(out(2, 0) == 0.0);
    CHECK(out(2, 1) == doctest::Approx(std::sin(1.0)).epsilon(1e-15));
    CHECK(out(2, 2) == doctest::Approx(std::sin(2.0 * std::sin(1.0))).epsilon(1e-15));

    CHECK(sweep_field(noise, 3) == reference_raster_sweeps(noise, 3));
}

TEST_CASE("simulation is deterministic in the seed") {
    ModelSpec spec;
    spec.kind = ModelKind::model1;
    spec.m = 8;
    spec.n = 9;
    spec.protocol.margin = 20;
    spec.protocol.seed = 777;
    const LatticeField a = simulate(spec);
    const LatticeField b = simulate(spec);
    CHECK(a.ys() == b.ys());
    CHECK(a.xs() == b.xs());

    spec.protocol.seed = 778;
    const LatticeField c = simulate(spec);
    CHECK(a.ys() != c.ys());
}

TEST_CASE("model1 collapses to its noiseless values as noise vanishes") {
    ModelSpec spec;
    spec.kind = ModelKind::model1;
    spec.m = 6;
    spec.n = 6;
    spec.protocol.margin = 10;
    spec.protocol.noise_sd = 1e-12;
    spec.protocol.seed = 5;
    const LatticeField f = simulate(spec);
    for (std::int64_t j = 0; j < f.size(); ++j) {
        CHECK(std::abs(f.xs()(j, 0)) < 1e-9);
        CHECK(f.y(j) == doctest::Approx(1.0).epsilon(1e-9)); // g(0) = 1/3 + 2/3
    }
}

TEST_CASE("model2 covariate equals the lagged sums of the extended grid") {
    for (CovariatePreset preset : {CovariatePreset::x0, CovariatePreset::xf}) {
        ModelSpec spec;
        spec.kind = ModelKind::model2;
        spec.m = 12;
        spec.n = 9;
        spec.covariate_preset = preset;
        spec.protocol.margin = 15;
        spec.protocol.seed = 2024;
        const Model2Realization run = simulate_model2_extended(spec);
        const LagSet lags = preset_lags(preset);
        const int margin = spec.protocol.margin;
        std::int64_t idx = 0;
        for (int i = 0; i < spec.m; ++i) {
            for (int j = 0; j < spec.n; ++j, ++idx) {
                double expected = 0.0;
                for (const auto& [a, b] : lags.offsets()) {
                    expected += run.extended_y(margin + i + a, margin + j + b);
                }
                CHECK(run.field.xs()(idx, 0) == expected);
                CHECK(run.field.y(idx) == run.extended_y(margin + i, margin + j));
            }
        }
    }
}

TEST_CASE("preset lag definitions") {
    using P = std::pair<int, int>;
    CHECK(preset_lags(CovariatePreset::x0).offsets() ==
          std::vector<P>{{-1, 0}, {0, -1}, {1, 0}, {0, 1}});
    CHECK(preset_lags(CovariatePreset::xc).offsets() ==
          std::vector<P>{{-2, 0}, {0, -2}, {-1, 0}, {0, -1}, {1, 0}, {0, 1}, {2, 0}, {0, 2}});
    CHECK(preset_lags(CovariatePreset::xd).offsets() == std::vector<P>{{-1, 0}, {0, -1}});
    CHECK(preset_lags(CovariatePreset::xe).offsets() == std::vector<P>{{1, 0}, {0, 1}});
    CHECK(preset_lags(CovariatePreset::xf).offsets() ==
          std::vector<P>{{-2, 0}, {0, -2}, {-1, 0}, {0, -1}});
}

TEST_CASE("lagging a constant grid returns the constant") {
    const int margin = 3;
    const Grid2 y(2 * margin + 4, 2 * margin + 5, 6.25);
    const Grid2 x = apply_lags(y, LagSet({{-1, 0}}), margin, 4, 5);
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 5; ++j) {
            CHECK(x(i, j) == 6.25);
        }
    }
}

TEST_CASE("lag set validation") {
    CHECK_THROWS_AS(LagSet({}), ConfigError);
    CHECK_THROWS_AS(LagSet({{0, 0}}), ConfigError);
    CHECK_THROWS_AS(LagSet({{1, 0}, {1, 0}}), ConfigError);

    ModelSpec spec;
    spec.kind = ModelKind::model2;
    spec.m = 4;
    spec.n = 4;
    spec.custom_lags = LagSet({{-2, 0}});
    spec.protocol.margin = 1;
    CHECK_THROWS_AS(simulate(spec), LagOutOfMarginError);
}

TEST_CASE("margin growth only perturbs the central window through warm-up") {
    ModelSpec spec;
    spec.kind = ModelKind::model2;
    spec.m = 30;
    spec.n = 30;
    spec.protocol.seed = 90210;
    spec.protocol.margin = 75;
    const LatticeField narrow = simulate(spec);
    spec.protocol.margin = 100;
    const LatticeField wide = simulate(spec);

    // Window-relative noise indexing keeps the realization comparable; the
    // remaining drift is the warm-up truncation itself. "< 5%" reads as 5%
    // of the field scale for the mean and 5% relative for the variance.
    const double sd = std::sqrt(var_of(wide));
    CHECK(std::abs(mean_of(narrow) - mean_of(wide)) < 0.05 * sd);
    CHECK(std::abs(var_of(narrow) - var_of(wide)) / var_of(wide) < 0.05);
}

TEST_CASE("alternative sweep order and noise redraw are distinct modes") {
    ModelSpec spec;
    spec.kind = ModelKind::model2;
    spec.m = 10;
    spec.n = 10;
    spec.protocol.margin = 20;
    spec.protocol.seed = 11;
    const LatticeField raster = simulate(spec);

    spec.protocol.order = SweepOrder::checkerboard;
    const LatticeField checker = simulate(spec);
    CHECK(raster.ys() != checker.ys());

    spec.protocol.order = SweepOrder::raster;
    spec.protocol.redraw_noise = true;
    const LatticeField redraw = simulate(spec);
    CHECK(raster.ys() != redraw.ys());

    const LatticeField redraw2 = simulate(spec);
    CHECK(redraw.ys() == redraw2.ys());
}

TEST_CASE("iid benchmark field") {
    ModelSpec spec;
    spec.kind = ModelKind::iid;
    spec.m = 40;
    spec.n = 40;
    spec.iid_halfwidth = 2.5;
    spec.protocol.seed = 31415;
    const LatticeField f = simulate(spec);
    CHECK(f.size() == 1600);
    for (std::int64_t j = 0; j < f.size(); ++j) {
        CHECK(std::abs(f.xs()(j, 0)) <= 2.5);
    }
    // Y - X^2 is standard normal noise.
    const Eigen::VectorXd resid = f.ys() - f.xs().col(0).array().square().matrix();
    const double mean = resid.mean();
    const double var = (resid.array() - mean).square().sum() / (f.size() - 1);
    CHECK(std::abs(mean) < 0.1);
    CHECK(std::abs(var - 1.0) < 0.15);
}

TEST_CASE("names round-trip") {
    for (ModelKind kind : {ModelKind::model1, ModelKind::model2, ModelKind::iid}) {
        CHECK(model_kind_from_name(model_kind_name(kind)) == kind);
    }
    for (CovariatePreset p : {CovariatePreset::x0, CovariatePreset::xc, CovariatePreset::xd,
                              CovariatePreset::xe, CovariatePreset::xf}) {
        CHECK(covariate_preset_from_name(covariate_preset_name(p)) == p);
    }
    CHECK(sweep_order_from_name("checkerboard") == SweepOrder::checkerboard);
    CHECK_THROWS_AS(model_kind_from_name("nope"), ConfigError);
}
