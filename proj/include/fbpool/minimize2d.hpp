#pragma once

#include "fbpool/boundary.hpp"
#include "fbpool/energy.hpp"
#include "fbpool/geometry.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fbpool {

// Grid on [-3N,3N]x[-1,1] with spacing hy and the coarsest even nx giving hx <= hx_max.
Grid solver_grid(const ProfileParams& p, double hy, double hx_max = 1.0 / 32);

// Continuation widths 1/4, 1/8, ... while above hy/4, then hy/4.
std::vector<double> default_eps_schedule(double hy);

ScalarField2D slice_field(const ProfileParams& p, const Grid& g);
ScalarField2D slice_field(const ProfileParams& p, const Grid& g, const ProfileFn& f);

struct SolveConfig {
    ProfileParams profile;
    Grid grid;
    std::vector<double> eps_schedule;
    int max_iter = 3000;  // per stage
    double rel_tol = 1e-7;
    std::uint64_t seed = 1;
    ProfileFn profile_fn;         // boundary profile override; empty means f_flat
    double truncation_tol = 0.0;  // nodes below this in |u| are truncation candidates; 0 means last eps
    int window = 50;
};

struct StageSummary {
    double eps = 0.0;
    int iterations = 0;
    double energy_start = 0.0;
    double energy_end = 0.0;
    bool converged = false;
};

struct SolveResult {
    ScalarField2D u;
    ScalarField2D initial;
    std::vector<double> energy_history;
    std::vector<int> history_stage;
    std::vector<StageSummary> stages;
    bool converged = false;
    EnergyReport final_energy;
    double zero_tol = 0.0;
    int truncated_nodes = 0;
    bool harmonic_pass_kept = false;
    bool odd_symmetric = false;
};

SolveResult solve(const SolveConfig& cfg);

// Smoothed energy sum |grad u|^2 + min(|m|/eps, 1) per cell, times cell area.
double smoothed_energy(const ScalarField2D& u, double eps);

// Nodes strictly inside a ball and the cells touching them.
struct Ball {
    Point c;
    double r;
};
struct BallStencil {
    std::vector<std::size_t> nodes;
    std::vector<std::pair<int, int>> cells;
};
BallStencil ball_stencil(const Grid& g, const Ball& b);

// Discrete harmonic values on the stencil nodes with every other node held fixed.
std::vector<double> harmonic_in_ball(const ScalarField2D& u, const BallStencil& s);

struct AuditEntry {
    Ball ball;
    std::string competitor;
    double energy_u = 0.0;
    double energy_v = 0.0;
    double margin = 0.0;  // J_B(v) - J_B(u)
    double tol = 0.0;
};

struct AuditReport {
    std::vector<AuditEntry> entries;
    double worst_margin = 0.0;
    int worst_index = -1;
    int violations = 0;
    double c_audit = 0.0;
    bool passed = true;
};

AuditReport competitor_audit(const SolveResult& r, const Weights& w, int n_balls,
                             std::uint64_t seed, double c_audit = 4.0);

}  // namespace fbpool
