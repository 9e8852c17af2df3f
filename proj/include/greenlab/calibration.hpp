#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "greenlab/model_core.hpp"
#include "greenlab/targets.hpp"

namespace greenlab {

// Hidden parameters the optimizer may move. The blade potential and every
// pa1 coefficient stay fixed at 1; E stays fixed so R can absorb it.
std::vector<std::string> free_parameter_names(Treatment treatment);

double get_parameter(const ParameterSet& params, const std::string& name);
void set_parameter(ParameterSet& params, const std::string& name, double value);

struct ParameterBounds {
    double lower = 0.0;
    double upper = 0.0;
};

// Defaults: sink potentials and pa2 coefficients (0, 5]; alpha/beta [1, 10];
// R and S_p (0, 10*init].
ParameterBounds default_bounds(const std::string& name, double init);

struct FitConfig {
    std::vector<std::string> free;                // names to optimize
    std::map<std::string, ParameterBounds> bounds; // per-name overrides
    std::map<std::string, double> initial;         // per-name overrides
    long max_evaluations = 40000;                  // total across all starts
    double tolerance = 1e-12;
    int starts = 3;       // first start is the configured init
    std::uint64_t seed = 0;
};

// Same key=value format as parameter files. "free" is a comma-separated name
// list; "bound.<name> = lo, hi" and "init.<name> = v" override defaults.
FitConfig parse_fit_config(const std::string& text);

// Per-(organ, measure) weights: inverse squared mean of the observed values,
// making mass and length classes commensurate.
std::map<std::pair<TargetOrgan, TargetMeasure>, double> class_weights(const TargetSet& targets);

// Weighted least squares of simulated vs observed values, summed in canonical
// record order so file order never matters. Simulation failures count as +inf.
double objective(const ParameterSet& params, const TargetSet& targets);

struct ResidualRecord {
    TargetRecord target;
    double model = 0.0;
    double weight = 0.0;
    double weighted_residual = 0.0;  // sqrt(weight) * (model - observed)
};

struct FitResult {
    std::vector<std::string> free_names;
    std::vector<double> estimates;            // parallel to free_names
    std::vector<double> standard_errors;      // empty when unavailable
    std::vector<std::string> non_identifiable; // parameters with a flat/confounded direction
    double rss = 0.0;
    std::vector<ResidualRecord> residuals;
    long evaluations = 0;
    bool converged = false;
    ParameterSet best;
};

// Multi-start bounded Nelder-Mead. Start 1 is the configured init; the rest
// are sampled log-uniform inside the bounds from the seed. Never returns a
// point worse than the best evaluated start.
FitResult fit(const FitConfig& config, const ParameterSet& fixed, const TargetSet& targets);

struct StandardErrorReport {
    std::vector<double> errors;                // parallel to free names; empty when singular
    std::vector<std::string> non_identifiable; // nonempty when J'J is singular
};

// Asymptotic least-squares errors at the optimum: sqrt(s^2 * inv(J'J)_jj)
// with s^2 = rss/(n-p) and J the central-difference Jacobian of the weighted
// residuals (relative step 1e-4). A singular J'J yields the offending
// parameter subset instead of numbers.
StandardErrorReport standard_errors(const ParameterSet& best, const std::vector<std::string>& free,
                                    const TargetSet& targets);

// Parameter-file text of the best fit plus "# SE", "# rss", "# evals" comments.
std::string write_fit_result(const FitResult& result);

// CSV: stage_gc,pa,rank,organ,measure,observed,model,weight,weighted_residual.
std::string residuals_csv(const FitResult& result);

}  // namespace greenlab
