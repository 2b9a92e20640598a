#pragma once

#include <string>

#include <json.hpp>

#include "bgw/eigen_solver.hpp"
#include "bgw/experiments.hpp"
#include "bgw/simulate.hpp"

namespace bgw {

// Shortest round-trip decimal rendering ('.' decimal point, no locale).
std::string format_double(double v);

// CSV with a header row, '.' decimals and LF line endings. Reruns with the
// same config and seed are byte-identical.
std::string report_csv(const ExperimentReport& r);
nlohmann::json report_json(const ExperimentReport& r);

nlohmann::json eigen_json(const EigenResult& r, Criticality c);
nlohmann::json extinction_json(const ExtinctionSummary& s);

// One row per generation: n, Z entries, W entries (W is empty at n = 0).
std::string trajectory_csv(const Trajectory& t, std::size_t p, std::size_t q);

void write_file(const std::string& path, const std::string& content);

}  // namespace bgw
