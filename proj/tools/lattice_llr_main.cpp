// lattice-llr: simulate lattice random fields, fit local-linear regression
// curves, evaluate asymptotic quantities, and run Monte Carlo experiments.

#include "llr/asymptotics.hpp"
#include "llr/errors.hpp"
#include "llr/estimator.hpp"
#include "llr/experiment.hpp"
#include "llr/experiment_io.hpp"
#include "llr/io_util.hpp"
#include "llr/kernels.hpp"
#include "llr/lattice.hpp"
#include "llr/simulator.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>
#include <string>

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;

struct SimulateArgs {
    std::string model = "model1";
    int m = 10;
    int n = 20;
    std::uint64_t seed = 0;
    int margin = 75;
    int sweeps = 20;
    double noise_sd = 1.0;
    std::string preset = "X0";
    std::string order = "raster";
    bool redraw_noise = false;
    double halfwidth = 1.0;
    std::string out;
};

llr::ModelSpec to_model_spec(const SimulateArgs& a) {
    llr::ModelSpec spec;
    spec.kind = llr::model_kind_from_name(a.model);
    spec.m = a.m;
    spec.n = a.n;
    spec.covariate_preset = llr::covariate_preset_from_name(a.preset);
    spec.iid_halfwidth = a.halfwidth;
    spec.protocol.margin = a.margin;
    spec.protocol.sweeps = a.sweeps;
    spec.protocol.noise_sd = a.noise_sd;
    spec.protocol.seed = a.seed;
    spec.protocol.order = llr::sweep_order_from_name(a.order);
    spec.protocol.redraw_noise = a.redraw_noise;
    return spec;
}

int run_simulate(const SimulateArgs& a) {
    const llr::LatticeField field = llr::simulate(to_model_spec(a));
    llr::write_field_csv(field, a.out);
    return kExitOk;
}

struct EstimateArgs {
    std::string in;
    double bandwidth = 0.5;
    std::string kernel = "epanechnikov";
    std::string grid;
    std::string out;
};

int run_estimate(const EstimateArgs& a) {
    const llr::LatticeField field = llr::read_field_csv(a.in);
    if (field.covariate_dim() != 1) {
        throw llr::ConfigError("estimate expects a univariate covariate field");
    }
    const llr::BandwidthSpec bw(a.bandwidth);
    const llr::KernelSpec kernel(llr::kernel_family_from_name(a.kernel), 1);
    const std::vector<double> grid = llr::parse_grid_spec(a.grid);

    std::string out = "x,g_hat,grad_1,rcond,support_count,status\n";
    Eigen::VectorXd point(1);
    std::size_t ok_count = 0;
    for (double x : grid) {
        point(0) = x;
        const llr::FitResult fit = llr::local_linear_fit(field, point, bw, kernel);
        out += llr::format_double(x);
        out += ",";
        if (llr::fit_ok(fit)) {
            ++ok_count;
            const llr::LocalFit& f = llr::fit_value(fit);
            out += llr::format_double(f.g_hat);
            out += ",";
            out += llr::format_double(f.grad_hat(0));
            out += ",";
            out += llr::format_double(f.rcond);
            out += "," + std::to_string(f.support_count) + ",ok";
        } else {
            const llr::FitFailure& f = llr::fit_failure(fit);
            out += ",,";
            const bool singular = f.reason == llr::FitFailure::Reason::singular_system;
            if (singular) {
                out += llr::format_double(f.rcond);
            }
            out += "," + std::to_string(f.support_count);
            out += singular ? ",singular" : ",empty";
        }
        out += "\n";
    }
    if (ok_count == 0) {
        throw llr::AllFitsFailedError("no grid point produced a successful fit");
    }
    llr::write_file_atomic(a.out, out);
    return kExitOk;
}

struct AsymptoticsArgs {
    std::string kernel = "epanechnikov";
    double x = 0.0;
    double density = 1.0;
    double cond_var = 1.0;
    double g2 = 0.0;
    double boundary_c = 0.0;
    std::string out;
};

int run_asymptotics(const AsymptoticsArgs& a) {
    const llr::KernelSpec kernel(llr::kernel_family_from_name(a.kernel), 1);
    llr::TrueModel model;
    model.density = [&](const Eigen::VectorXd&) { return a.density; };
    model.regression = [](const Eigen::VectorXd&) { return 0.0; };
    model.gradient = [](const Eigen::VectorXd&) { return Eigen::VectorXd::Zero(1); };
    model.hessian = [&](const Eigen::VectorXd&) {
        return Eigen::MatrixXd::Constant(1, 1, a.g2);
    };
    model.cond_variance = [&](const Eigen::VectorXd&) { return a.cond_var; };

    Eigen::VectorXd x(1);
    x(0) = a.x;
    const llr::AsymptoticQuantities q = llr::limit_quantities(model, x, kernel);

    json j;
    j["kernel"] = a.kernel;
    j["x"] = a.x;
    j["density"] = a.density;
    j["cond_var"] = a.cond_var;
    j["g2"] = a.g2;
    j["u"] = {{q.u_limit(0, 0), q.u_limit(0, 1)}, {q.u_limit(1, 0), q.u_limit(1, 1)}};
    j["sigma"] = {{q.sigma_limit(0, 0), q.sigma_limit(0, 1)},
                  {q.sigma_limit(1, 0), q.sigma_limit(1, 1)}};
    j["b0"] = q.b0;
    j["b1"] = q.b1(0);
    j["bg"] = q.bg;
    j["var0"] = q.var0;
    j["var1"] = q.var1(0, 0);
    if (a.boundary_c > 0.0) {
        const llr::BoundaryQuantities b = llr::boundary_quantities(model, a.boundary_c, kernel);
        j["boundary"] = {{"c", a.boundary_c}, {"bg", b.bg}, {"var0", b.var0}, {"var1", b.var1}};
    }
    llr::write_file_atomic(a.out, j.dump(2) + "\n");
    return kExitOk;
}

struct ExperimentArgs {
    std::string config;
    std::string out_dir;
};

int run_experiment_cmd(const ExperimentArgs& a) {
    llr::ParsedExperimentConfig parsed = llr::load_experiment_config(a.config);
    llr::resolve_grid(parsed);
    const llr::ExperimentResult result = llr::run_experiment(parsed.config);
    llr::write_experiment_outputs(parsed.config, result, a.out_dir);
    return kExitOk;
}

struct DiagnoseArgs {
    std::string model = "iid";
    int m = 60;
    int n = 60;
    int replications = 100;
    double bandwidth = 0.4;
    std::string kernel = "gaussian";
    double x0 = 0.0;
    std::uint64_t seed = 0;
    double noise_sd = 1.0;
    double halfwidth = 1.0;
    int margin = 75;
    int sweeps = 20;
    std::string out;
};

int run_diagnose(const DiagnoseArgs& a) {
    llr::ExperimentConfig cfg;
    cfg.model.kind = llr::model_kind_from_name(a.model);
    cfg.model.m = a.m;
    cfg.model.n = a.n;
    cfg.model.iid_halfwidth = a.halfwidth;
    cfg.model.protocol.noise_sd = a.noise_sd;
    cfg.model.protocol.margin = a.margin;
    cfg.model.protocol.sweeps = a.sweeps;
    cfg.replications = a.replications;
    cfg.bandwidth = a.bandwidth;
    cfg.kernel = llr::kernel_family_from_name(a.kernel);
    cfg.x_grid = {a.x0};
    cfg.base_seed = a.seed;

    llr::TrueModel truth;
    const double sd = a.noise_sd;
    if (cfg.model.kind == llr::ModelKind::iid) {
        const double hw = a.halfwidth;
        truth.density = [hw](const Eigen::VectorXd& x) {
            return std::abs(x(0)) <= hw ? 0.5 / hw : 0.0;
        };
        truth.regression = [](const Eigen::VectorXd& x) { return x(0) * x(0); };
        truth.gradient = [](const Eigen::VectorXd& x) {
            return Eigen::VectorXd::Constant(1, 2.0 * x(0));
        };
        truth.hessian = [](const Eigen::VectorXd&) {
            return Eigen::MatrixXd::Constant(1, 1, 2.0);
        };
    } else if (cfg.model.kind == llr::ModelKind::model1) {
        // density left empty: plugged in per replication via kde
        truth.regression = [](const Eigen::VectorXd& x) {
            return llr::model1_regression(x(0));
        };
        truth.gradient = [](const Eigen::VectorXd& x) {
            return Eigen::VectorXd::Constant(1, llr::model1_regression_d1(x(0)));
        };
        truth.hessian = [](const Eigen::VectorXd& x) {
            return Eigen::MatrixXd::Constant(1, 1, llr::model1_regression(x(0)));
        };
    } else {
        throw llr::ConfigError(
            "diagnose supports models with a known regression function (iid, model1)");
    }
    truth.cond_variance = [sd](const Eigen::VectorXd&) { return sd * sd; };

    Eigen::VectorXd x0(1);
    x0(0) = a.x0;
    const llr::NormalityDiagnostics d = llr::normality_diagnostics(cfg, truth, x0);

    json j;
    j["model"] = a.model;
    j["m"] = a.m;
    j["n"] = a.n;
    j["replications"] = a.replications;
    j["bandwidth"] = a.bandwidth;
    j["kernel"] = a.kernel;
    j["x0"] = a.x0;
    j["base_seed"] = a.seed;
    j["n_success"] = d.n_success;
    j["mean_z0"] = d.mean_z0;
    j["var_z0"] = d.var_z0;
    j["ks_stat"] = d.ks_stat;
    j["ks_pvalue"] = d.ks_pvalue;
    j["corr_g_grad"] = d.corr_g_grad;
    llr::write_file_atomic(a.out, j.dump(2) + "\n");
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Local-linear kernel regression for lattice random fields"};
    app.require_subcommand(1);

    SimulateArgs sim;
    CLI::App* simulate = app.add_subcommand("simulate", "Draw a synthetic field");
    simulate->add_option("--model", sim.model, "model1 | model2 | iid")->capture_default_str();
    simulate->add_option("--m", sim.m, "Window rows")->capture_default_str();
    simulate->add_option("--n", sim.n, "Window columns")->capture_default_str();
    simulate->add_option("--seed", sim.seed, "Generator seed")->capture_default_str();
    simulate->add_option("--margin", sim.margin, "Warm-up margin")->capture_default_str();
    simulate->add_option("--sweeps", sim.sweeps, "Recursion sweeps")->capture_default_str();
    simulate->add_option("--noise-sd", sim.noise_sd, "Innovation sd")->capture_default_str();
    simulate->add_option("--preset", sim.preset, "model2 covariate preset (X0|Xc|Xd|Xe|Xf)")
        ->capture_default_str();
    simulate->add_option("--order", sim.order, "Sweep order (raster|checkerboard)")
        ->capture_default_str();
    simulate->add_flag("--redraw-noise", sim.redraw_noise, "Fresh noise each sweep");
    simulate->add_option("--halfwidth", sim.halfwidth, "iid covariate halfwidth")
        ->capture_default_str();
    simulate->add_option("--out", sim.out, "Output field CSV")->required();

    EstimateArgs est;
    CLI::App* estimate = app.add_subcommand("estimate", "Fit a local-linear curve");
    estimate->add_option("--in", est.in, "Input field CSV")->required();
    estimate->add_option("--bandwidth", est.bandwidth, "Kernel bandwidth")
        ->capture_default_str();
    estimate->add_option("--kernel", est.kernel, "gaussian | epanechnikov | uniform")
        ->capture_default_str();
    estimate->add_option("--grid", est.grid, "Evaluation grid lo:hi:count")->required();
    estimate->add_option("--out", est.out, "Output curve CSV")->required();

    AsymptoticsArgs asy;
    CLI::App* asymptotics =
        app.add_subcommand("asymptotics", "Closed-form limit quantities at a point");
    asymptotics->add_option("--kernel", asy.kernel, "Kernel family")->capture_default_str();
    asymptotics->add_option("--x", asy.x, "Evaluation point")->capture_default_str();
    asymptotics->add_option("--f", asy.density, "Covariate density at x")->required();
    asymptotics->add_option("--cond-var", asy.cond_var, "Var(Y|X=x)")->required();
    asymptotics->add_option("--g2", asy.g2, "Second derivative of the regression at x")
        ->required();
    asymptotics->add_option("--boundary-c", asy.boundary_c,
                            "Also report boundary quantities at x = c*b");
    asymptotics->add_option("--out", asy.out, "Output JSON")->required();

    ExperimentArgs exp;
    CLI::App* experiment = app.add_subcommand("experiment", "Replicated simulate-then-fit run");
    experiment->add_option("--config", exp.config, "Experiment config JSON")->required();
    experiment->add_option("--out-dir", exp.out_dir, "Output directory")->required();

    DiagnoseArgs diag;
    CLI::App* diagnose =
        app.add_subcommand("diagnose", "Empirical normality check of the limit law");
    diagnose->add_option("--model", diag.model, "iid | model1")->capture_default_str();
    diagnose->add_option("--m", diag.m, "Window rows")->capture_default_str();
    diagnose->add_option("--n", diag.n, "Window columns")->capture_default_str();
    diagnose->add_option("--replications", diag.replications, "Replication count")
        ->capture_default_str();
    diagnose->add_option("--bandwidth", diag.bandwidth, "Kernel bandwidth")
        ->capture_default_str();
    diagnose->add_option("--kernel", diag.kernel, "Kernel family")->capture_default_str();
    diagnose->add_option("--x0", diag.x0, "Evaluation point")->capture_default_str();
    diagnose->add_option("--seed", diag.seed, "Base seed")->capture_default_str();
    diagnose->add_option("--noise-sd", diag.noise_sd, "Innovation sd")->capture_default_str();
    diagnose->add_option("--halfwidth", diag.halfwidth, "iid covariate halfwidth")
        ->capture_default_str();
    diagnose->add_option("--margin", diag.margin, "Warm-up margin")->capture_default_str();
    diagnose->add_option("--sweeps", diag.sweeps, "Recursion sweeps")->capture_default_str();
    diagnose->add_option("--out", diag.out, "Output JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (simulate->parsed()) {
            return run_simulate(sim);
        }
        if (estimate->parsed()) {
            return run_estimate(est);
        }
        if (asymptotics->parsed()) {
            return run_asymptotics(asy);
        }
        if (experiment->parsed()) {
            return run_experiment_cmd(exp);
        }
        if (diagnose->parsed()) {
            return run_diagnose(diag);
        }
        return kExitUsage;
    } catch (const llr::NumericalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const llr::DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
}
