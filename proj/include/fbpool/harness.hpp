#pragma once

#include "fbpool/minimize2d.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace fbpool {

struct VerifyConfig {
    std::vector<double> N_list{5, 10, 20};
    double alpha = 0.1;
    double hy = 1.0 / 64;
    double hx_max = 1.0 / 32;
    double delta = 0.1;   // margin kept from the side walls
    double theta = 0.15;  // confinement target where f >= 1
    // c1 (slack per unit free-boundary length per unit h), strip_slack, lipschitz_bound,
    // stability_C. Missing keys take the defaults from default_tolerances().
    std::map<std::string, double> tolerances;
    std::uint64_t seed = 1;
    int max_iter = 3000;
    double rel_tol = 1e-7;
    int n_boxes = 20;
    bool expect_subcritical = false;
    std::string export_dir;  // CSV exports when nonempty

    double tol(const std::string& key) const;
    void validate() const;
};

std::map<std::string, double> default_tolerances();

struct CheckResult {
    std::string name;
    std::string ref;
    double N = 0.0;
    std::map<std::string, double> measured;
    double bound = 0.0;
    bool passed = false;
    std::string note;
};

struct RadialReport {
    std::vector<double> N_list;
    std::vector<double> energies;
    double alpha = 0.0;
    double fitted_A = 0.0;
    double max_rel_err = 0.0;
    bool monotone = false;
    bool passed = false;
};

struct VerifyReport {
    VerifyConfig config;
    std::vector<CheckResult> checks;
    std::map<std::string, double> first_passing_N;  // absent if never passing
    std::map<double, double> theta_curve;           // N -> measured confinement width
    RadialReport radial;
    bool all_passed = false;  // every check at every N
    bool final_passed = false;  // every check at the largest N

    nlohmann::json to_json() const;
};

// Default-parameter solve of the strip problem for one N.
SolveResult solve_for(const VerifyConfig& cfg, double N);
// Every per-N check on a finished solve.
std::vector<CheckResult> checks_for(const VerifyConfig& cfg, double N, const SolveResult& res);
// Perimeter-scaled discretization slack: c1 * hy * (free-boundary length) + rel_tol * |J|.
double discretization_slack(const VerifyConfig& cfg, const SolveResult& res);

VerifyReport run_verify(const VerifyConfig& cfg);

// Radial profile slice-field energy E(N) = integral over the 3D cylinder of |dv/dr|^2.
// alpha may be 0 here.
double radial_energy(double N, double alpha);
RadialReport radial_decay_check(const std::vector<double>& N_list, double alpha);

nlohmann::json to_json(const RadialReport& r);

int cli_main(int argc, char** argv);

}  // namespace fbpool
