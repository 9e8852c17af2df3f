#pragma once

#include <functional>
#include <vector>

namespace greenlab {

struct SimplexOptions {
    long max_evaluations = 20000;
    double tolerance = 1e-10;       // stop when the value spread falls below this
    double initial_step_rel = 0.15; // first simplex edge, relative to |x0|
    int max_restarts = 6;           // shrinking re-inits around the incumbent
};

struct SimplexResult {
    std::vector<double> x;
    double value = 0.0;
    long evaluations = 0;
    bool converged = false;  // spread fell below tolerance (not the eval cap)
};

// Nelder-Mead with box bounds enforced by clamping every candidate before
// evaluation. Returns the best point ever evaluated, never worse than x0.
SimplexResult minimize_simplex(const std::function<double(const std::vector<double>&)>& f,
                               std::vector<double> x0, const std::vector<double>& lower,
                               const std::vector<double>& upper, const SimplexOptions& options);

}  // namespace greenlab
