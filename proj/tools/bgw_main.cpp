#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "bgw/config.hpp"
#include "bgw/report_io.hpp"

namespace {

using nlohmann::json;

struct CliOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<unsigned> threads;
    std::optional<std::string> format;
};

// Seed precedence: --seed, then BGW_SEED (CI override), then config.
void apply_overrides(bgw::RunConfig& cfg, const CliOverrides& ov) {
    if (const char* env = std::getenv("BGW_SEED"); env && !ov.seed) {
        cfg.seed = std::strtoull(env, nullptr, 10);
    }
    if (ov.seed) cfg.seed = *ov.seed;
    if (ov.out) cfg.out_dir = *ov.out;
    if (ov.threads) cfg.threads = *ov.threads;
    if (ov.format) cfg.format = *ov.format;
}

// Every artifact echoes the config it actually ran with.
json resolved_config(const bgw::RunConfig& cfg) {
    json j = cfg.raw;
    j["seed"] = cfg.seed;
    j["out"] = cfg.out_dir;
    j["threads"] = cfg.threads;
    j["format"] = cfg.format;
    return j;
}

void ensure_out_dir(const bgw::RunConfig& cfg) {
    std::filesystem::create_directories(cfg.out_dir);
}

std::string out_path(const bgw::RunConfig& cfg, const std::string& name) {
    return (std::filesystem::path(cfg.out_dir) / name).string();
}

template <typename T>
T field(const json& block, const std::string& key) {
    if (!block.contains(key)) throw bgw::ConfigError("experiment is missing key '" + key + "'");
    try {
        return block.at(key).get<T>();
    } catch (const json::exception&) {
        throw bgw::ConfigError("experiment key '" + key + "' has the wrong type");
    }
}

template <typename T>
T field_or(const json& block, const std::string& key, T def) {
    if (!block.contains(key)) return def;
    try {
        return block.at(key).get<T>();
    } catch (const json::exception&) {
        throw bgw::ConfigError("experiment key '" + key + "' has the wrong type");
    }
}

int cmd_eigen(bgw::RunConfig& cfg) {
    bgw::ValidatedModel model = bgw::ValidatedModel::create(cfg.model);
    auto [eigen, crit] = bgw::classify_model(model, cfg.eigen, cfg.seed);

    json result;
    if (eigen) {
        result = bgw::eigen_json(*eigen, crit);
        std::cout << "lambda_star=" << bgw::format_double(eigen->lambda_star) << "\n";
        std::cout << "z_star=[";
        for (std::size_t i = 0; i < eigen->z_star.size(); ++i) {
            std::cout << (i ? "," : "") << bgw::format_double(eigen->z_star[i]);
        }
        std::cout << "]\n";
        std::cout << "residual=" << bgw::format_double(eigen->residual) << "\n";
        std::cout << "iterations=" << eigen->iterations << "\n";
        std::cout << "primitivity_n0=" << eigen->primitivity_n0 << "\n";
    } else {
        result = json{{"class", bgw::to_string(crit)}};
    }
    std::cout << "class=" << bgw::to_string(crit) << "\n";

    result["config"] = resolved_config(cfg);
    result["fingerprint"] = model.fingerprint();
    ensure_out_dir(cfg);
    bgw::write_file(out_path(cfg, "eigen.json"), result.dump(2) + "\n");
    return eigen ? 0 : 2;
}

int cmd_simulate(bgw::RunConfig& cfg) {
    bgw::ValidatedModel model = bgw::ValidatedModel::create(cfg.model);
    bgw::ExtinctionSummary summary = bgw::batch_extinction(
        model.model(), cfg.z0, cfg.horizon, cfg.trials, cfg.seed, cfg.sim, cfg.threads);

    json result = bgw::extinction_json(summary);
    result["config"] = resolved_config(cfg);
    result["fingerprint"] = model.fingerprint();

    ensure_out_dir(cfg);
    bgw::write_file(out_path(cfg, "extinction.json"), result.dump(2) + "\n");
    for (std::uint64_t t = 0; t < std::min<std::uint64_t>(cfg.save_trajectories, cfg.trials);
         ++t) {
        bgw::Trajectory traj =
            bgw::simulate(model.model(), cfg.z0, cfg.horizon, cfg.seed, t, cfg.sim);
        bgw::write_file(out_path(cfg, "trajectory_" + std::to_string(t) + ".csv"),
                        bgw::trajectory_csv(traj, cfg.model.p, cfg.model.q));
    }
    std::cout << "q_hat=" << bgw::format_double(summary.q_hat) << " ci95=["
              << bgw::format_double(summary.ci95.lo) << ","
              << bgw::format_double(summary.ci95.hi) << "] extinct=" << summary.extinct << "/"
              << summary.trials << "\n";
    return 0;
}

bgw::ExperimentReport dispatch_experiment(bgw::RunConfig& cfg) {
    const json& je = cfg.experiment;
    std::string name = je.at("name").get<std::string>();

    if (name == "extinction_sweep") {
        // Each grid value patches the model block at a JSON pointer.
        std::string pointer = field<std::string>(je, "pointer");
        std::vector<double> values = field<std::vector<double>>(je, "values");
        std::vector<std::pair<std::string, bgw::ValidatedModel>> cells;
        for (double v : values) {
            json patched = cfg.model_block;
            patched[json::json_pointer(pointer)] = v;
            bgw::Model m = bgw::model_from_json(patched);
            cells.emplace_back("value=" + bgw::format_double(v),
                               bgw::ValidatedModel::create(std::move(m)));
        }
        bgw::SweepOptions opt;
        opt.sub_lambda = field_or<double>(je, "sub_lambda", 0.9);
        opt.sub_qmin = field_or<double>(je, "sub_qmin", 0.99);
        opt.super_lambda = field_or<double>(je, "super_lambda", 1.2);
        opt.super_qmax = field_or<double>(je, "super_qmax", 0.9);
        opt.eigen = cfg.eigen;
        opt.sim = cfg.sim;
        return bgw::extinction_sweep(cells, cfg.z0, cfg.horizon, cfg.trials, cfg.seed, opt,
                                     cfg.threads);
    }

    bgw::ValidatedModel model = bgw::ValidatedModel::create(cfg.model);
    if (name == "lln") {
        bgw::LlnOptions opt;
        opt.slack_se = field_or<double>(je, "slack_se", 2.0);
        opt.sim = cfg.sim;
        return bgw::lln_experiment(model, field<bgw::Vec>(je, "z_inf"), field<int>(je, "n"),
                                   field<std::vector<std::uint64_t>>(je, "m_grid"), cfg.trials,
                                   cfg.seed, opt, cfg.threads);
    }
    if (name == "corridor") {
        bgw::CorridorOptions opt;
        opt.min_fraction = field_or<double>(je, "min_fraction", 0.95);
        opt.sim = cfg.sim;
        return bgw::corridor_experiment(model, cfg.z0, cfg.horizon, cfg.trials,
                                        field<double>(je, "epsilon"), cfg.seed, opt, cfg.threads);
    }
    if (name == "domination") {
        bgw::DominationOptions opt;
        opt.sigma = field_or<double>(je, "sigma", 3.0);
        opt.sim = cfg.sim;
        return bgw::domination_experiment(model, cfg.z0, field<bgw::Counts>(je, "z0_tilde"),
                                          field<bgw::Counts>(je, "z1"),
                                          field<bgw::Counts>(je, "z1_tilde"),
                                          field<std::uint64_t>(je, "n"), cfg.trials, cfg.seed,
                                          opt, cfg.threads);
    }

    // profile and supermartingale need the eigenpair first.
    bgw::EigenResult eigen = bgw::solve_eigen(model, cfg.eigen, cfg.seed);
    if (name == "profile") {
        bgw::ProfileOptions opt;
        opt.median_dir_bound = field_or<double>(je, "median_dir_bound", 0.05);
        opt.ratio_lo = field_or<double>(je, "ratio_lo", 0.0);
        opt.ratio_hi = field_or<double>(je, "ratio_hi", 0.0);
        opt.c_floor = field_or<double>(je, "c_floor", 1e-6);
        opt.scale_tol = field_or<double>(je, "scale_tol", 1e-7);
        opt.scale_max_iter = field_or<int>(je, "scale_max_iter", 400);
        opt.sim = cfg.sim;
        return bgw::profile_experiment(model, cfg.z0, cfg.horizon, cfg.trials, cfg.seed, eigen,
                                       opt, cfg.threads);
    }
    if (name == "supermartingale") {
        bgw::SupermartingaleOptions opt;
        opt.sigma = field_or<double>(je, "sigma", 3.0);
        opt.fine_bins = field_or<bool>(je, "fine_bins", false);
        opt.scale_tol = field_or<double>(je, "scale_tol", 1e-7);
        opt.scale_max_iter = field_or<int>(je, "scale_max_iter", 400);
        opt.sim = cfg.sim;
        return bgw::supermartingale_experiment(model, cfg.z0, cfg.horizon, cfg.trials, cfg.seed,
                                               eigen, opt, cfg.threads);
    }
    throw bgw::ConfigError("unknown experiment '" + name + "'");
}

int cmd_experiment(bgw::RunConfig& cfg) {
    if (!cfg.has_experiment) throw bgw::ConfigError("config has no experiment block");
    bgw::ExperimentReport report = dispatch_experiment(cfg);

    json result = bgw::report_json(report);
    result["config"] = resolved_config(cfg);
    std::string csv = bgw::report_csv(report);

    ensure_out_dir(cfg);
    bgw::write_file(out_path(cfg, report.name + "_report.csv"), csv);
    bgw::write_file(out_path(cfg, report.name + "_summary.json"), result.dump(2) + "\n");

    if (cfg.format == "csv") {
        std::cout << csv;
    } else {
        std::cout << result.dump(2) << "\n";
    }
    return report.all_pass ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-type two-sex branching process toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    CliOverrides ov;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "Path to the JSON run config")->required();
        sub->add_option_function<std::string>(
            "--seed",
            [&](const std::string& s) { ov.seed = std::strtoull(s.c_str(), nullptr, 10); },
            "Master seed (overrides BGW_SEED and the config)");
        sub->add_option_function<std::string>(
            "--out", [&](const std::string& s) { ov.out = s; }, "Output directory");
        sub->add_option_function<std::string>(
            "--threads",
            [&](const std::string& s) {
                ov.threads = static_cast<unsigned>(std::strtoul(s.c_str(), nullptr, 10));
            },
            "Worker cap; 0 = all cores");
        sub->add_option_function<std::string>(
                "--format", [&](const std::string& s) { ov.format = s; },
                "Stdout rendering: json or csv")
            ->check(CLI::IsMember({"json", "csv"}));
    };

    CLI::App* eigen_cmd = app.add_subcommand("eigen", "Solve the growth eigenpair and classify");
    CLI::App* sim_cmd = app.add_subcommand("simulate", "Run trajectories and estimate extinction");
    CLI::App* exp_cmd = app.add_subcommand("experiment", "Run a named verification experiment");
    add_common(eigen_cmd);
    add_common(sim_cmd);
    add_common(exp_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        bgw::RunConfig cfg = bgw::load_config(config_path);
        apply_overrides(cfg, ov);
        if (eigen_cmd->parsed()) return cmd_eigen(cfg);
        if (sim_cmd->parsed()) return cmd_simulate(cfg);
        return cmd_experiment(cfg);
    } catch (const bgw::ValidationError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const bgw::InfiniteOperatorError& e) {
        std::cout << "class=" << bgw::to_string(bgw::Criticality::SurvivalFromLargeStates) << "\n";
        std::cerr << "error (" << e.kind() << "): " << e.what() << "\n";
        return 2;
    } catch (const bgw::Error& e) {
        std::cerr << "error (" << e.kind() << "): " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
