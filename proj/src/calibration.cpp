#include "greenlab/calibration.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <string>

#include "greenlab/errors.hpp"
#include "greenlab/nelder_mead.hpp"
#include "greenlab/params_io.hpp"
#include "text_util.hpp"

namespace greenlab {

namespace {

double& parameter_ref(ParameterSet& p, const std::string& name) {
    if (name == "P_p") return p.petiole.potential;
    if (name == "P_e") return p.pith.potential;
    if (name == "P_c") return p.ring_potential;
    if (name == "R") return p.production.resistance;
    if (name == "S_p") return p.production.projection_area;
    if (name == "alpha_b") return p.blade.shape.alpha;
    if (name == "beta_b") return p.blade.shape.beta;
    if (name == "alpha_p") return p.petiole.shape.alpha;
    if (name == "beta_p") return p.petiole.shape.beta;
    if (name == "alpha_e") return p.pith.shape.alpha;
    if (name == "beta_e") return p.pith.shape.beta;
    if (name == "C_b.pa2" && p.blade.pa_coefficients.size() > 1)
        return p.blade.pa_coefficients[1];
    if (name == "C_p.pa2" && p.petiole.pa_coefficients.size() > 1)
        return p.petiole.pa_coefficients[1];
    if (name == "C_e.pa2" && p.pith.pa_coefficients.size() > 1)
        return p.pith.pa_coefficients[1];
    throw InputError("unknown or fixed parameter \"" + name + "\"");
}

std::array<int, 5> record_key(const TargetRecord& r) {
    return {r.stage_gc, r.pa, r.rank, static_cast<int>(r.organ), static_cast<int>(r.measure)};
}

double model_measure(const SimulationTrace& trace, const ParameterSet& params,
                     const TargetRecord& rec) {
    if (rec.stage_gc < 1 || rec.stage_gc > static_cast<int>(trace.states.size()))
        throw ValidationError("stage " + std::to_string(rec.stage_gc) +
                              " is beyond the simulated horizon");
    const PlantState& state = trace.states[static_cast<std::size_t>(rec.stage_gc - 1)];

    const Axis* axis = nullptr;
    for (const auto& a : state.structure.axes)
        if (a.pa == rec.pa) {
            axis = &a;
            break;
        }
    if (!axis)
        throw ValidationError("no axis with physiological age " + std::to_string(rec.pa));
    const auto idx = state.structure.phytomer_index(axis->id, rec.rank);
    if (idx < 0)
        throw ValidationError("no phytomer at rank " + std::to_string(rec.rank) + " for pa " +
                              std::to_string(rec.pa) + " at stage " +
                              std::to_string(rec.stage_gc));
    const auto i = static_cast<std::size_t>(idx);

    switch (rec.organ) {
        case TargetOrgan::Blade:
            if (rec.measure == TargetMeasure::MassG) return state.organs[i].blade;
            if (rec.measure == TargetMeasure::AreaCm2) return blade_area_of(state, i, params);
            break;
        case TargetOrgan::Petiole:
            if (rec.measure == TargetMeasure::MassG) return state.organs[i].petiole;
            break;
        case TargetOrgan::Internode:
            if (rec.measure == TargetMeasure::MassG) return internode_mass_of(state, i);
            if (rec.measure == TargetMeasure::LengthCm) return pith_length_of(state, i, params);
            break;
    }
    throw ValidationError(std::string(to_token(rec.measure)) + " is not available for organ " +
                          to_token(rec.organ));
}

// Residuals in canonical record order, so sums never depend on file order.
std::vector<ResidualRecord> residual_records(const ParameterSet& params,
                                             const TargetSet& targets) {
    if (params.treatment != targets.treatment)
        throw ValidationError("targets were built for a different treatment");
    std::vector<ResidualRecord> out;
    if (targets.records.empty()) return out;

    std::vector<const TargetRecord*> sorted;
    sorted.reserve(targets.records.size());
    for (const auto& r : targets.records) sorted.push_back(&r);
    std::sort(sorted.begin(), sorted.end(), [](const TargetRecord* a, const TargetRecord* b) {
        return record_key(*a) < record_key(*b);
    });

    const auto weights = class_weights(targets);
    const SimulationTrace trace = run(params, targets.stages().back());

    out.reserve(sorted.size());
    for (const TargetRecord* r : sorted) {
        ResidualRecord rr;
        rr.target = *r;
        rr.model = model_measure(trace, params, *r);
        rr.weight = weights.at({r->organ, r->measure});
        rr.weighted_residual = std::sqrt(rr.weight) * (rr.model - r->value);
        out.push_back(rr);
    }
    return out;
}

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

bool is_shape_parameter(const std::string& name) {
    return name.starts_with("alpha_") || name.starts_with("beta_");
}

}  // namespace

std::vector<std::string> free_parameter_names(Treatment treatment) {
    std::vector<std::string> names{"P_p",     "P_e",    "P_c",    "alpha_b", "beta_b", "alpha_p",
                                   "beta_p",  "alpha_e", "beta_e", "R",      "S_p"};
    if (treatment == Treatment::T2) {
        names.insert(names.begin() + 3, {"C_b.pa2", "C_p.pa2", "C_e.pa2"});
    }
    return names;
}

double get_parameter(const ParameterSet& params, const std::string& name) {
    return parameter_ref(const_cast<ParameterSet&>(params), name);
}

void set_parameter(ParameterSet& params, const std::string& name, double value) {
    parameter_ref(params, name) = value;
}

ParameterBounds default_bounds(const std::string& name, double init) {
    if (is_shape_parameter(name)) return {1.0, 10.0};
    if (name == "R" || name == "S_p") {
        if (!(init > 0.0))
            throw InputError("cannot derive default bounds for " + name +
                             " from a nonpositive initial value");
        return {1e-3 * init, 10.0 * init};
    }
    return {1e-6, 5.0};  // potentials and pa2 coefficients
}

FitConfig parse_fit_config(const std::string& text) {
    FitConfig c;
    for (const auto& [key, value] : text::parse_key_values(text)) {
        if (key == "free") {
            for (const auto field : text::split(value, ',')) {
                const auto name = text::trim(field);
                if (!name.empty()) c.free.emplace_back(name);
            }
        } else if (key == "max_evals") {
            double v = 0.0;
            if (!text::parse_double(value, v) || v < 1)
                throw InputError("key max_evals: expected a positive count");
            c.max_evaluations = static_cast<long>(v);
        } else if (key == "tolerance") {
            if (!text::parse_double(value, c.tolerance) || !(c.tolerance > 0.0))
                throw InputError("key tolerance: expected a positive number");
        } else if (key == "starts") {
            if (!text::parse_int(value, c.starts) || c.starts < 1)
                throw InputError("key starts: expected a positive integer");
        } else if (key == "seed") {
            unsigned long long v = 0;
            const auto sv = text::trim(std::string_view(value));
            const auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), v);
            if (ec != std::errc{} || ptr != sv.data() + sv.size())
                throw InputError("key seed: expected an unsigned integer");
            c.seed = v;
        } else if (key.starts_with("bound.")) {
            const auto fields = text::split(value, ',');
            ParameterBounds b;
            if (fields.size() != 2 || !text::parse_double(fields[0], b.lower) ||
                !text::parse_double(fields[1], b.upper))
                throw InputError("key " + key + ": expected \"lower, upper\"");
            c.bounds[key.substr(6)] = b;
        } else if (key.starts_with("init.")) {
            double v = 0.0;
            if (!text::parse_double(value, v))
                throw InputError("key " + key + ": expected a number");
            c.initial[key.substr(5)] = v;
        } else {
            throw InputError("unknown key: " + key);
        }
    }
    return c;
}

std::map<std::pair<TargetOrgan, TargetMeasure>, double> class_weights(const TargetSet& targets) {
    std::map<std::pair<TargetOrgan, TargetMeasure>, std::pair<double, long>> sums;
    for (const auto& r : targets.records) {
        auto& [sum, count] = sums[{r.organ, r.measure}];
        sum += r.value;
        ++count;
    }
    std::map<std::pair<TargetOrgan, TargetMeasure>, double> weights;
    for (const auto& [key, sc] : sums) {
        const double mean = sc.first / static_cast<double>(sc.second);
        weights[key] = mean > 0.0 ? 1.0 / (mean * mean) : 1.0;
    }
    return weights;
}

double objective(const ParameterSet& params, const TargetSet& targets) {
    try {
        double sum = 0.0;
        for (const auto& r : residual_records(params, targets))
            sum += r.weighted_residual * r.weighted_residual;
        return sum;
    } catch (const SimulationError&) {
        return std::numeric_limits<double>::infinity();
    } catch (const ParameterError&) {
        return std::numeric_limits<double>::infinity();
    }
}

FitResult fit(const FitConfig& config, const ParameterSet& fixed, const TargetSet& targets) {
    validate(fixed);
    if (fixed.treatment != targets.treatment)
        throw ValidationError("targets were built for a different treatment");

    const auto universe = free_parameter_names(fixed.treatment);
    std::set<std::string> seen;
    for (const auto& name : config.free) {
        if (std::find(universe.begin(), universe.end(), name) == universe.end())
            throw InputError("parameter \"" + name + "\" is not free for this treatment");
        if (!seen.insert(name).second)
            throw InputError("parameter \"" + name + "\" listed twice in the free set");
    }

    FitResult result;
    result.free_names = config.free;
    const std::size_t dim = config.free.size();

    if (dim == 0) {
        result.rss = objective(fixed, targets);
        if (!std::isfinite(result.rss))
            throw CalibrationError("the fixed parameter set cannot be simulated");
        result.evaluations = 1;
        result.converged = true;
        result.best = fixed;
        result.residuals = residual_records(fixed, targets);
        return result;
    }

    std::vector<double> init(dim), lo(dim), hi(dim);
    for (std::size_t j = 0; j < dim; ++j) {
        const auto& name = config.free[j];
        const auto it_init = config.initial.find(name);
        init[j] = it_init != config.initial.end() ? it_init->second : get_parameter(fixed, name);
        const auto it_bound = config.bounds.find(name);
        const ParameterBounds b =
            it_bound != config.bounds.end() ? it_bound->second : default_bounds(name, init[j]);
        if (!(b.lower < b.upper))
            throw InputError("bounds for " + name + " must satisfy lower < upper");
        const double floor = is_shape_parameter(name) ? 1.0 : 0.0;
        if (!(b.lower > floor) && !(b.lower == floor && floor == 1.0))
            throw InputError("lower bound for " + name + " must be " +
                             (floor == 1.0 ? "at least 1" : "positive"));
        if (init[j] < b.lower || init[j] > b.upper)
            throw InputError("initial value for " + name + " is outside its bounds");
        lo[j] = b.lower;
        hi[j] = b.upper;
    }

    long total_evals = 0;
    auto with = [&](const std::vector<double>& x) {
        ParameterSet q = fixed;
        for (std::size_t j = 0; j < dim; ++j) set_parameter(q, config.free[j], x[j]);
        return q;
    };
    auto f = [&](const std::vector<double>& x) {
        ++total_evals;
        return objective(with(x), targets);
    };

    std::mt19937_64 rng(config.seed);
    const int starts = std::max(1, config.starts);
    const long per_start =
        std::max<long>(static_cast<long>(dim) + 2, config.max_evaluations / starts);

    SimplexResult best;
    best.value = std::numeric_limits<double>::infinity();
    bool have_best = false;
    for (int s = 0; s < starts; ++s) {
        std::vector<double> x0(dim);
        if (s == 0) {
            x0 = init;
        } else {
            for (std::size_t j = 0; j < dim; ++j)
                x0[j] = std::exp(std::log(lo[j]) +
                                 uniform01(rng) * (std::log(hi[j]) - std::log(lo[j])));
        }
        SimplexOptions so;
        so.max_evaluations = per_start;
        so.tolerance = config.tolerance;
        const SimplexResult r = minimize_simplex(f, x0, lo, hi, so);
        if (!have_best || r.value < best.value) {
            best = r;
            have_best = true;
        }
    }
    if (!std::isfinite(best.value))
        throw CalibrationError("no start produced a finite objective");

    result.estimates = best.x;
    result.best = with(best.x);
    result.rss = best.value;
    result.evaluations = total_evals;
    result.converged = best.converged;
    result.residuals = residual_records(result.best, targets);
    if (result.residuals.size() > dim) {
        const auto se = standard_errors(result.best, config.free, targets);
        result.standard_errors = se.errors;
        result.non_identifiable = se.non_identifiable;
    }
    return result;
}

StandardErrorReport standard_errors(const ParameterSet& best, const std::vector<std::string>& free,
                                    const TargetSet& targets) {
    StandardErrorReport report;
    const std::size_t p = free.size();
    if (p == 0) return report;

    auto residual_vector = [&](const ParameterSet& q) {
        const auto rr = residual_records(q, targets);
        std::vector<double> r(rr.size());
        for (std::size_t i = 0; i < rr.size(); ++i) r[i] = rr[i].weighted_residual;
        return r;
    };

    const auto r0 = residual_vector(best);
    const std::size_t n = r0.size();
    if (n <= p)
        throw InputError("standard errors need more residuals than free parameters");

    Eigen::MatrixXd jac(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    for (std::size_t j = 0; j < p; ++j) {
        const double theta = get_parameter(best, free[j]);
        const double h = 1e-4 * std::max(std::abs(theta), 1e-12);

        auto residuals_at = [&](double value, std::vector<double>& out) {
            ParameterSet q = best;
            set_parameter(q, free[j], value);
            try {
                out = residual_vector(q);
                return true;
            } catch (const Error&) {
                return false;
            }
        };

        std::vector<double> r_hi, r_lo;
        double t_hi = theta + h, t_lo = theta - h;
        if (!residuals_at(t_hi, r_hi)) {
            t_hi = theta;
            r_hi = r0;
        }
        if (!residuals_at(t_lo, r_lo)) {
            t_lo = theta;
            r_lo = r0;
        }
        if (t_hi == t_lo)
            throw CalibrationError("cannot differentiate residuals at " + free[j]);
        for (std::size_t i = 0; i < n; ++i)
            jac(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                (r_hi[i] - r_lo[i]) / (t_hi - t_lo);
    }

    double rss = 0.0;
    for (double r : r0) rss += r * r;
    const double s2 = rss / static_cast<double>(n - p);

    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jtj);
    const auto& lambda = eig.eigenvalues();  // ascending
    const double lam_max = lambda(static_cast<Eigen::Index>(p - 1));
    const double lam_tol = lam_max > 0.0 ? lam_max * 1e-10 : 0.0;

    if (!(lam_max > 0.0) || lambda(0) <= lam_tol) {
        // Name every parameter with real weight in a flat direction.
        std::vector<bool> flagged(p, false);
        for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(p); ++i) {
            if (lam_max > 0.0 && lambda(i) > lam_tol) continue;
            for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(p); ++j)
                if (std::abs(eig.eigenvectors()(j, i)) > 0.1)
                    flagged[static_cast<std::size_t>(j)] = true;
        }
        for (std::size_t j = 0; j < p; ++j)
            if (flagged[j]) report.non_identifiable.push_back(free[j]);
        return report;
    }

    const Eigen::MatrixXd cov = eig.eigenvectors() *
                                lambda.cwiseInverse().asDiagonal() *
                                eig.eigenvectors().transpose();
    report.errors.resize(p);
    for (std::size_t j = 0; j < p; ++j)
        report.errors[j] = std::sqrt(
            s2 * cov(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)));
    return report;
}

std::string write_fit_result(const FitResult& result) {
    using text::format_double;
    std::string out = write_params(result.best);
    out += "\n# fit report\n";
    if (!result.non_identifiable.empty()) {
        out += "# non-identifiable:";
        for (const auto& name : result.non_identifiable) out += " " + name;
        out += "\n# SE unavailable: J'J is singular along the directions above\n";
    } else if (!result.standard_errors.empty()) {
        for (std::size_t j = 0; j < result.free_names.size(); ++j)
            out += "# SE " + result.free_names[j] + " = " +
                   format_double(result.standard_errors[j]) + "\n";
    } else if (!result.free_names.empty()) {
        out += "# SE unavailable: degrees of freedom <= 0\n";
    }
    out += "# rss = " + format_double(result.rss) + "\n";
    out += "# evals = " + std::to_string(result.evaluations) + "\n";
    out += std::string("# converged = ") + (result.converged ? "true" : "false") + "\n";
    return out;
}

std::string residuals_csv(const FitResult& result) {
    using text::format_double;
    std::string out = "stage_gc,pa,rank,organ,measure,observed,model,weight,weighted_residual\n";
    for (const auto& r : result.residuals) {
        out += std::to_string(r.target.stage_gc) + "," + std::to_string(r.target.pa) + "," +
               std::to_string(r.target.rank) + "," + to_token(r.target.organ) + "," +
               to_token(r.target.measure) + "," + format_double(r.target.value) + "," +
               format_double(r.model) + "," + format_double(r.weight) + "," +
               format_double(r.weighted_residual) + "\n";
    }
    return out;
}

}  // namespace greenlab
