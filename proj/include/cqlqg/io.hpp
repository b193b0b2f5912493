#pragma once

#include <string>
#include <vector>

#include "cqlqg/optimizer.hpp"

namespace cqlqg::io {

// Plant documents: JSON with keys dims {n, m1, m2, p1, p2, r}, row-major
// matrices A, B, C, D, E, F, G, d, and an optional theta1 override.
PlantModel load_plant(const std::string& path);
void save_plant(const std::string& path, const PlantModel& plant);

// Controller documents carry the (R, b, e) triple; derived fields written by
// save_controller (a, c, PR report, cost, closed-loop spectrum) are ignored
// on load.  Numbers are shortest round-trip decimals, keys sorted, so
// save(load(x)) is byte-identical for canonical files.
ControllerParams load_controller(const std::string& path);
void save_controller(const std::string& path, const PlantModel& plant,
                     const ControllerParams& u, double pr_tol = kPrTol);

// Partial JSON override of SolverConfig fields; unknown keys are rejected.
SolverConfig load_config(const std::string& path, SolverConfig base = {});

// Comma-separated iterate table: k,cost,grad_norm,horizon,stepsize,armijo_j,
// u_norm with a mandatory header; 17 significant digits.
void save_trace(const std::string& path,
                const std::vector<IterateRecord>& trace);
std::vector<IterateRecord> load_trace(const std::string& path);

// Flow table: k,cost,u_norm,balance_residual,dir_dot_u.
void save_flow_trace(const std::string& path,
                     const std::vector<FlowRecord>& records);

// Log-scale plot of cost/emin - 1 against k (rows with non-positive
// deviation are dropped); emin must be positive.
void write_svg_plot(const std::string& path,
                    const std::vector<IterateRecord>& trace, double emin);

}  // namespace cqlqg::io
