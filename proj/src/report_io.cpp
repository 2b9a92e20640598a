#include "bgw/report_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <system_error>

namespace bgw {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string report_csv(const ExperimentReport& r) {
    std::string out = "experiment,cell,stat,value,se,n,bound,pass\n";
    for (const auto& c : r.cells) {
        out += r.name;
        out += ',';
        out += c.cell;
        out += ',';
        out += c.stat;
        out += ',';
        out += format_double(c.value);
        out += ',';
        out += format_double(c.se);
        out += ',';
        out += std::to_string(c.n);
        out += ',';
        out += c.bound ? format_double(*c.bound) : std::string();
        out += ',';
        out += c.pass ? (*c.pass ? "pass" : "FAIL") : std::string();
        out += '\n';
    }
    return out;
}

nlohmann::json report_json(const ExperimentReport& r) {
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& c : r.cells) {
        nlohmann::json jc = {
            {"cell", c.cell}, {"stat", c.stat}, {"value", c.value}, {"se", c.se}, {"n", c.n}};
        if (c.bound) jc["bound"] = *c.bound;
        if (c.pass) jc["pass"] = *c.pass;
        cells.push_back(std::move(jc));
    }
    return nlohmann::json{{"experiment", r.name},
                          {"fingerprint", r.fingerprint},
                          {"seed", r.seed},
                          {"all_pass", r.all_pass},
                          {"notes", r.notes},
                          {"cells", std::move(cells)}};
}

nlohmann::json eigen_json(const EigenResult& r, Criticality c) {
    return nlohmann::json{{"lambda_star", r.lambda_star},
                          {"z_star", r.z_star},
                          {"residual", r.residual},
                          {"iterations", r.iterations},
                          {"primitivity_n0", r.primitivity_n0},
                          {"class", to_string(c)}};
}

nlohmann::json extinction_json(const ExtinctionSummary& s) {
    return nlohmann::json{{"q_hat", s.q_hat},
                          {"ci95", {s.ci95.lo, s.ci95.hi}},
                          {"extinct", s.extinct},
                          {"escaped", s.escaped},
                          {"trials", s.trials},
                          {"survivor_mass_quantiles", s.survivor_mass_quantiles}};
}

std::string trajectory_csv(const Trajectory& t, std::size_t p, std::size_t q) {
    std::string out = "n";
    for (std::size_t i = 1; i <= p; ++i) out += ",z" + std::to_string(i);
    for (std::size_t j = 1; j <= q; ++j) out += ",w" + std::to_string(j);
    out += '\n';
    for (std::size_t n = 0; n < t.z_path.size(); ++n) {
        out += std::to_string(n);
        for (std::size_t i = 0; i < p; ++i) out += ',' + std::to_string(t.z_path[n][i]);
        for (std::size_t j = 0; j < q; ++j) {
            out += ',';
            if (n >= 1) out += std::to_string(t.w_path[n - 1][j]);
        }
        out += '\n';
    }
    return out;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open output file: " + path);
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw ConfigError("failed writing output file: " + path);
}

}  // namespace bgw
