#include "bgw/config.hpp"

#include <fstream>
#include <set>

namespace bgw {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& block, const std::set<std::string>& allowed,
                         const std::string& where) {
    if (!block.is_object()) throw ConfigError(where + " must be an object");
    for (auto it = block.begin(); it != block.end(); ++it) {
        if (!allowed.count(it.key())) {
            throw ConfigError("unknown key '" + it.key() + "' in " + where);
        }
    }
}

template <typename T>
T get_or(const json& block, const std::string& key, T def) {
    if (!block.contains(key)) return def;
    try {
        return block.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("key '" + key + "' has the wrong type");
    }
}

template <typename T>
T get_required(const json& block, const std::string& key, const std::string& where) {
    if (!block.contains(key)) throw ConfigError("missing key '" + key + "' in " + where);
    try {
        return block.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("key '" + key + "' in " + where + " has the wrong type");
    }
}

Matrix matrix_from_json(const json& j, const std::string& where) {
    std::vector<std::vector<double>> rows;
    try {
        rows = j.get<std::vector<std::vector<double>>>();
    } catch (const json::exception&) {
        throw ConfigError(where + " must be a matrix (array of numeric rows)");
    }
    if (rows.empty()) throw ConfigError(where + " must be non-empty");
    return Matrix::from_rows(rows);
}

MatingFunction mating_from_json(const json& block, std::size_t p, std::size_t q) {
    reject_unknown_keys(block, {"kind", "d", "alpha", "a", "b"}, "model.mating");
    std::string kind = get_required<std::string>(block, "kind", "model.mating");
    if (kind == "identity") {
        if (q != p) throw ConfigError("identity mating requires q == p");
        return MatingFunction::identity(p);
    }
    if (kind == "perfect_fidelity") {
        if (q != 2 * p) throw ConfigError("perfect_fidelity requires q == 2p");
        return MatingFunction::perfect_fidelity(p);
    }
    if (kind == "polygamous") {
        if (q != 2 * p) throw ConfigError("polygamous mating requires q == 2p");
        return MatingFunction::polygamous(p, get_required<std::uint64_t>(block, "d", "model.mating"));
    }
    if (kind == "promiscuous_single") {
        if (p != 1 || q != 2) throw ConfigError("promiscuous_single requires p == 1 and q == 2");
        return MatingFunction::promiscuous_single();
    }
    if (kind == "completely_promiscuous") {
        if (q <= p) throw ConfigError("completely_promiscuous requires q > p (males = q - p)");
        return MatingFunction::completely_promiscuous(p, q - p);
    }
    if (kind == "min_of_linear") {
        Matrix a = matrix_from_json(block.at("a"), "model.mating.a");
        Matrix b = matrix_from_json(block.at("b"), "model.mating.b");
        if (a.rows != q || a.cols != p) throw ConfigError("min_of_linear matrices must be q x p");
        return MatingFunction::min_of_linear(std::move(a), std::move(b));
    }
    if (kind == "capped_identity") {
        if (q != p) throw ConfigError("capped_identity requires q == p");
        return MatingFunction::capped_identity(p, get_required<double>(block, "alpha", "model.mating"));
    }
    throw ConfigError("unknown mating kind '" + kind + "'");
}

OffspringLaw offspring_from_json(const json& block, std::size_t p, std::size_t q) {
    reject_unknown_keys(block, {"kind", "rates", "means", "rows", "totals", "alpha", "total_kind"},
                        "model.offspring");
    std::string kind = get_required<std::string>(block, "kind", "model.offspring");
    auto check_dims = [&](const Matrix& m, const char* what) {
        if (m.rows != p || m.cols != q) {
            throw ConfigError(std::string(what) + " must be a p x q matrix");
        }
    };
    if (kind == "poisson_product") {
        Matrix rates = matrix_from_json(block.at("rates"), "model.offspring.rates");
        check_dims(rates, "poisson rates");
        return OffspringLaw::poisson_product(std::move(rates));
    }
    if (kind == "geometric_product") {
        Matrix means = matrix_from_json(block.at("means"), "model.offspring.means");
        check_dims(means, "geometric means");
        return OffspringLaw::geometric_product(std::move(means));
    }
    if (kind == "deterministic") {
        auto rows = get_required<std::vector<Counts>>(block, "rows", "model.offspring");
        if (rows.size() != p || rows.front().size() != q) {
            throw ConfigError("deterministic rows must form a p x q table");
        }
        return OffspringLaw::deterministic(std::move(rows));
    }
    if (kind == "total_then_thin") {
        Matrix totals = matrix_from_json(block.at("totals"), "model.offspring.totals");
        if (totals.rows != p || 2 * totals.cols != q) {
            throw ConfigError("total_then_thin needs a p x (q/2) total matrix");
        }
        double alpha = get_required<double>(block, "alpha", "model.offspring");
        std::string tk = get_or<std::string>(block, "total_kind", "poisson");
        TotalKind total_kind;
        if (tk == "poisson") {
            total_kind = TotalKind::Poisson;
        } else if (tk == "deterministic") {
            total_kind = TotalKind::Deterministic;
        } else {
            throw ConfigError("total_kind must be 'poisson' or 'deterministic'");
        }
        return OffspringLaw::total_then_thin(std::move(totals), alpha, total_kind);
    }
    if (kind == "empirical") {
        if (!block.contains("rows") || !block.at("rows").is_array()) {
            throw ConfigError("empirical law needs a 'rows' array");
        }
        std::vector<EmpiricalRow> rows;
        for (const auto& jr : block.at("rows")) {
            reject_unknown_keys(jr, {"support", "weights"}, "model.offspring.rows[]");
            EmpiricalRow row;
            row.support = get_required<std::vector<Counts>>(jr, "support", "empirical row");
            row.weights = get_required<std::vector<double>>(jr, "weights", "empirical row");
            rows.push_back(std::move(row));
        }
        if (rows.size() != p) throw ConfigError("empirical law needs one row per couple type");
        return OffspringLaw::empirical(q, std::move(rows));
    }
    throw ConfigError("unknown offspring kind '" + kind + "'");
}

}  // namespace

Model model_from_json(const json& block) {
    reject_unknown_keys(block, {"p", "q", "split", "mating", "offspring"}, "model");
    Model m;
    m.p = get_required<std::uint64_t>(block, "p", "model");
    m.q = get_required<std::uint64_t>(block, "q", "model");
    if (m.p < 1 || m.q < 1) throw ConfigError("model needs p >= 1 and q >= 1");
    if (block.contains("split")) {
        const json& js = block.at("split");
        reject_unknown_keys(js, {"females", "males"}, "model.split");
        BisexualSplit split;
        split.females = get_required<std::uint64_t>(js, "females", "model.split");
        split.males = get_required<std::uint64_t>(js, "males", "model.split");
        m.split = split;
    }
    if (!block.contains("mating")) throw ConfigError("missing key 'mating' in model");
    if (!block.contains("offspring")) throw ConfigError("missing key 'offspring' in model");
    m.mating = mating_from_json(block.at("mating"), m.p, m.q);
    m.offspring = offspring_from_json(block.at("offspring"), m.p, m.q);
    return m;
}

RunConfig parse_config(const json& doc) {
    reject_unknown_keys(doc,
                        {"seed", "out", "threads", "format", "model", "solver", "simulation",
                         "experiment"},
                        "config");
    RunConfig cfg;
    cfg.raw = doc;

    cfg.seed = get_or<std::uint64_t>(doc, "seed", 0x5eed);
    cfg.out_dir = get_or<std::string>(doc, "out", "out");
    cfg.threads = get_or<unsigned>(doc, "threads", 0);
    cfg.format = get_or<std::string>(doc, "format", "json");
    if (cfg.format != "json" && cfg.format != "csv") {
        throw ConfigError("format must be 'json' or 'csv'");
    }

    if (!doc.contains("model")) throw ConfigError("missing key 'model' in config");
    cfg.model_block = doc.at("model");
    cfg.model = model_from_json(cfg.model_block);

    if (doc.contains("solver")) {
        const json& js = doc.at("solver");
        reject_unknown_keys(js,
                            {"tol", "r_max", "max_iter", "starts", "critical_band",
                             "primitivity_max", "finiteness_samples", "diverge_cap", "extension"},
                            "solver");
        cfg.eigen.tol = get_or<double>(js, "tol", 1e-8);
        cfg.eigen.growth.tol = cfg.eigen.tol;
        cfg.eigen.growth.r_max = get_or<double>(js, "r_max", 1099511627776.0);
        cfg.eigen.growth.diverge_cap = get_or<double>(js, "diverge_cap", 1e12);
        cfg.eigen.max_iter = get_or<int>(js, "max_iter", 10'000);
        cfg.eigen.starts = get_or<int>(js, "starts", 5);
        cfg.eigen.critical_band = get_or<double>(js, "critical_band", 1e-6);
        cfg.eigen.primitivity.n_max = get_or<int>(js, "primitivity_max", 64);
        cfg.eigen.finiteness_samples = get_or<int>(js, "finiteness_samples", 100);
        std::string ext = get_or<std::string>(js, "extension", "natural");
        if (ext == "natural") {
            cfg.eigen.growth.extension = Extension::Natural;
        } else if (ext == "floor") {
            cfg.eigen.growth.extension = Extension::Floor;
        } else {
            throw ConfigError("extension must be 'natural' or 'floor'");
        }
    }

    if (doc.contains("simulation")) {
        const json& js = doc.at("simulation");
        reject_unknown_keys(js,
                            {"z0", "horizon", "trials", "couple_threshold", "allow_normal_approx",
                             "escape_mass", "save_trajectories"},
                            "simulation");
        cfg.z0 = get_or<Counts>(js, "z0", Counts{});
        cfg.horizon = get_or<std::uint64_t>(js, "horizon", 50);
        cfg.trials = get_or<std::uint64_t>(js, "trials", 1'000);
        cfg.sim.sampling.per_couple_threshold =
            get_or<std::uint64_t>(js, "couple_threshold", 1'000'000);
        cfg.sim.sampling.allow_normal_approx = get_or<bool>(js, "allow_normal_approx", false);
        cfg.sim.escape_mass = get_or<std::uint64_t>(js, "escape_mass", 1'000'000'000'000ull);
        cfg.save_trajectories = get_or<std::uint64_t>(js, "save_trajectories", 1);
    }
    if (cfg.z0.empty()) cfg.z0 = Counts(cfg.model.p, 1);
    if (cfg.z0.size() != cfg.model.p) throw ConfigError("simulation.z0 must have length p");

    if (doc.contains("experiment")) {
        const json& je = doc.at("experiment");
        reject_unknown_keys(je,
                            {"name", "z_inf", "n", "m_grid", "slack_se", "median_dir_bound",
                             "ratio_lo", "ratio_hi", "c_floor", "scale_tol", "scale_max_iter",
                             "epsilon", "min_fraction", "sigma", "fine_bins", "z0_tilde", "z1",
                             "z1_tilde", "pointer", "values", "sub_lambda", "sub_qmin",
                             "super_lambda", "super_qmax"},
                            "experiment");
        static const std::set<std::string> known = {"lln",         "profile",
                                                    "corridor",    "supermartingale",
                                                    "domination",  "extinction_sweep"};
        std::string name = get_required<std::string>(je, "name", "experiment");
        if (!known.count(name)) throw ConfigError("unknown experiment '" + name + "'");
        cfg.has_experiment = true;
        cfg.experiment = je;
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    json doc;
    try {
        doc = json::parse(f);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(doc);
}

}  // namespace bgw
