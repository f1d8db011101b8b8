#include "llr/experiment_io.hpp"

#include "llr/errors.hpp"
#include "llr/io_util.hpp"
#include "llr/rng.hpp"

#include <json.hpp>

#include <cmath>
#include <set>

namespace llr {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::set<std::string>& allowed, const char* where) {
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.contains(key)) {
            throw ConfigError(std::string("unknown key '") + key + "' in " + where);
        }
    }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
    if (!obj.contains(key)) {
        return fallback;
    }
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("bad value for '") + key + "'");
    }
}

std::string status_name(const FitResult& fit) {
    if (fit_ok(fit)) {
        return "ok";
    }
    return fit_failure(fit).reason == FitFailure::Reason::singular_system ? "singular"
                                                                          : "empty";
}

void append_fit_cells(std::string& out, const FitResult& fit) {
    if (fit_ok(fit)) {
        const LocalFit& f = fit_value(fit);
        out += format_double(f.g_hat);
        out += ",";
        out += format_double(f.grad_hat(0));
        out += ",";
        out += format_double(f.rcond);
        out += "," + std::to_string(f.support_count);
    } else {
        const FitFailure& f = fit_failure(fit);
        out += ",,";
        if (f.reason == FitFailure::Reason::singular_system) {
            out += format_double(f.rcond);
        }
        out += "," + std::to_string(f.support_count);
    }
    out += ",";
    out += status_name(fit);
}

} // namespace

std::vector<double> parse_grid_spec(const std::string& spec) {
    const auto p1 = spec.find(':');
    const auto p2 = spec.find(':', p1 == std::string::npos ? p1 : p1 + 1);
    double lo = 0.0;
    double hi = 0.0;
    long long count = 0;
    if (p1 == std::string::npos || p2 == std::string::npos ||
        !try_parse_double(std::string_view(spec).substr(0, p1), lo) ||
        !try_parse_double(std::string_view(spec).substr(p1 + 1, p2 - p1 - 1), hi) ||
        !try_parse_long(std::string_view(spec).substr(p2 + 1), count)) {
        throw ConfigError("grid must have the form lo:hi:count");
    }
    if (count < 1 || (count == 1 && lo != hi) || (count > 1 && !(lo < hi))) {
        throw ConfigError("grid bounds must satisfy lo < hi with count >= 2, or lo == hi "
                          "with count == 1");
    }
    std::vector<double> grid(static_cast<std::size_t>(count));
    if (count == 1) {
        grid[0] = lo;
        return grid;
    }
    for (long long i = 0; i < count; ++i) {
        grid[static_cast<std::size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) /
                                                     static_cast<double>(count - 1);
    }
    return grid;
}

ParsedExperimentConfig parse_experiment_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
    if (!root.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    check_keys(root, {"model", "replications", "bandwidth", "kernel", "grid", "base_seed"},
               "config");
    if (!root.contains("model") || !root.at("model").is_object()) {
        throw ConfigError("config needs a 'model' object");
    }
    const json& model = root.at("model");

    ParsedExperimentConfig parsed;
    ExperimentConfig& cfg = parsed.config;

    const std::string kind = get_or<std::string>(model, "kind", "");
    cfg.model.kind = model_kind_from_name(kind);

    std::set<std::string> model_keys = {"kind",     "m",     "n",         "margin",
                                        "sweeps",   "noise_sd", "order", "redraw_noise"};
    if (cfg.model.kind == ModelKind::model2) {
        model_keys.insert("covariate_preset");
    }
    if (cfg.model.kind == ModelKind::iid) {
        model_keys.insert("halfwidth");
    }
    check_keys(model, model_keys, "model");

    cfg.model.m = get_or<int>(model, "m", 0);
    cfg.model.n = get_or<int>(model, "n", 0);
    if (cfg.model.m < 1 || cfg.model.n < 1) {
        throw ConfigError("model needs positive sample dimensions m and n");
    }
    cfg.model.protocol.margin = get_or<int>(model, "margin", 75);
    cfg.model.protocol.sweeps = get_or<int>(model, "sweeps", 20);
    cfg.model.protocol.noise_sd = get_or<double>(model, "noise_sd", 1.0);
    cfg.model.protocol.order =
        sweep_order_from_name(get_or<std::string>(model, "order", "raster"));
    cfg.model.protocol.redraw_noise = get_or<bool>(model, "redraw_noise", false);
    if (cfg.model.kind == ModelKind::model2) {
        cfg.model.covariate_preset =
            covariate_preset_from_name(get_or<std::string>(model, "covariate_preset", "X0"));
    }
    if (cfg.model.kind == ModelKind::iid) {
        cfg.model.iid_halfwidth = get_or<double>(model, "halfwidth", 1.0);
    }

    cfg.replications = get_or<int>(root, "replications", 10);
    cfg.bandwidth = get_or<double>(root, "bandwidth", 0.5);
    cfg.kernel = kernel_family_from_name(get_or<std::string>(root, "kernel", "gaussian"));
    cfg.base_seed = get_or<std::uint64_t>(root, "base_seed", 0);

    const std::string grid = get_or<std::string>(root, "grid", "auto");
    if (grid == "auto") {
        parsed.grid_auto = true;
    } else {
        cfg.x_grid = parse_grid_spec(grid);
    }
    return parsed;
}

ParsedExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    return parse_experiment_config(read_file(path));
}

void resolve_grid(ParsedExperimentConfig& parsed) {
    if (parsed.grid_auto) {
        parsed.config.x_grid = default_x_grid(parsed.config.model, parsed.config.base_seed);
        parsed.grid_auto = false;
    }
}

std::string experiment_curves_csv(const ExperimentResult& result) {
    std::string out = "replication,x,g_hat,grad_1,rcond,support_count,status\n";
    for (std::size_t r = 0; r < result.replications.size(); ++r) {
        const ReplicationResult& rep = result.replications[r];
        for (std::size_t k = 0; k < result.x_grid.size(); ++k) {
            out += std::to_string(r + 1);
            out += ",";
            out += format_double(result.x_grid[k]);
            out += ",";
            append_fit_cells(out, rep.curve[k]);
            out += "\n";
        }
    }
    return out;
}

std::string experiment_summary_csv(const ExperimentResult& result) {
    std::string out = "x,mean,sd,n_ok\n";
    for (std::size_t k = 0; k < result.x_grid.size(); ++k) {
        const GridPointSummary& s = result.summary[k];
        out += format_double(result.x_grid[k]);
        out += ",";
        if (s.n_ok > 0) {
            out += format_double(s.mean);
        }
        out += ",";
        if (s.n_ok >= 2 && std::isfinite(s.sd)) {
            out += format_double(s.sd);
        }
        out += "," + std::to_string(s.n_ok) + "\n";
    }
    return out;
}

std::string experiment_nsr_csv(const ExperimentResult& result) {
    const bool with_true = result.nsr_true_mean.has_value();
    std::string out = with_true ? "replication,nsr,nsr_true\n" : "replication,nsr\n";
    for (std::size_t r = 0; r < result.replications.size(); ++r) {
        const ReplicationResult& rep = result.replications[r];
        out += std::to_string(r + 1);
        out += ",";
        out += format_double(rep.nsr);
        if (with_true) {
            out += ",";
            out += format_double(*rep.nsr_true);
        }
        out += "\n";
    }
    return out;
}

std::string experiment_summary_json(const ExperimentConfig& cfg,
                                    const ExperimentResult& result) {
    json j;
    j["model"]["kind"] = std::string(model_kind_name(cfg.model.kind));
    j["model"]["m"] = cfg.model.m;
    j["model"]["n"] = cfg.model.n;
    j["model"]["margin"] = cfg.model.protocol.margin;
    j["model"]["sweeps"] = cfg.model.protocol.sweeps;
    j["model"]["noise_sd"] = cfg.model.protocol.noise_sd;
    j["model"]["order"] = std::string(sweep_order_name(cfg.model.protocol.order));
    j["model"]["redraw_noise"] = cfg.model.protocol.redraw_noise;
    if (cfg.model.kind == ModelKind::model2) {
        j["model"]["covariate_preset"] =
            std::string(covariate_preset_name(cfg.model.covariate_preset));
    }
    if (cfg.model.kind == ModelKind::iid) {
        j["model"]["halfwidth"] = cfg.model.iid_halfwidth;
    }
    j["replications"] = cfg.replications;
    j["bandwidth"] = cfg.bandwidth;
    j["kernel"] = std::string(kernel_family_name(cfg.kernel));
    j["base_seed"] = cfg.base_seed;
    j["grid"] = {{"lo", result.x_grid.front()},
                 {"hi", result.x_grid.back()},
                 {"count", result.x_grid.size()}};
    j["nsr_mean"] = result.nsr_mean;
    json nsr = json::array();
    for (const ReplicationResult& rep : result.replications) {
        nsr.push_back(rep.nsr);
    }
    j["nsr"] = std::move(nsr);
    if (result.nsr_true_mean) {
        j["nsr_true_mean"] = *result.nsr_true_mean;
        json nsr_true = json::array();
        for (const ReplicationResult& rep : result.replications) {
            nsr_true.push_back(*rep.nsr_true);
        }
        j["nsr_true"] = std::move(nsr_true);
    }
    j["failures"] = result.failures;
    return j.dump(2) + "\n";
}

std::string scatter_csv(const LatticeField& field) {
    std::string out = "x,y\n";
    for (std::int64_t j = 0; j < field.size(); ++j) {
        out += format_double(field.xs()(j, 0));
        out += ",";
        out += format_double(field.y(j));
        out += "\n";
    }
    return out;
}

void write_experiment_outputs(const ExperimentConfig& cfg, const ExperimentResult& result,
                              const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    write_file_atomic(out_dir / "curves.csv", experiment_curves_csv(result));
    write_file_atomic(out_dir / "summary.csv", experiment_summary_csv(result));
    write_file_atomic(out_dir / "nsr.csv", experiment_nsr_csv(result));
    write_file_atomic(out_dir / "summary.json", experiment_summary_json(cfg, result));

    ModelSpec scatter_spec = cfg.model;
    scatter_spec.protocol.seed = split_seed(cfg.base_seed, 1);
    write_file_atomic(out_dir / "scatter.csv", scatter_csv(simulate(scatter_spec)));
}

} // namespace llr
