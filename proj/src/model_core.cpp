#include "greenlab/model_core.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "greenlab/errors.hpp"

namespace greenlab {

namespace {

double beta_profile(const BetaShape& s, int k) {
    const double x = (k - 0.5) / s.expansion_time;
    return std::pow(x, s.alpha - 1.0) * std::pow(1.0 - x, s.beta - 1.0);
}

void check_shape(const BetaShape& s) {
    if (!(s.alpha >= 1.0) || !(s.beta >= 1.0))
        throw ParameterError("sink shape needs alpha >= 1 and beta >= 1");
    if (s.expansion_time < 1)
        throw ParameterError("sink shape needs expansion_time >= 1");
}

}  // namespace

const SinkRule& ParameterSet::sink(OrganKind kind) const {
    switch (kind) {
        case OrganKind::Blade: return blade;
        case OrganKind::Petiole: return petiole;
        default: return pith;
    }
}

double sink_variation(const BetaShape& shape, int age) {
    check_shape(shape);
    if (age < 1) throw ParameterError("organ age starts at 1");
    if (age > shape.expansion_time) return 0.0;
    double peak = 0.0;
    for (int k = 1; k <= shape.expansion_time; ++k)
        peak = std::max(peak, beta_profile(shape, k));
    if (!(peak > 0.0))
        throw ParameterError("sink profile underflows to zero over its whole domain");
    return beta_profile(shape, age) / peak;
}

double organ_sink(const SinkRule& rule, int pa, int age) {
    if (pa < 1 || static_cast<std::size_t>(pa) > rule.pa_coefficients.size())
        throw ParameterError("no sink coefficient for physiological age " + std::to_string(pa));
    return rule.pa_coefficients[pa - 1] * rule.potential * sink_variation(rule.shape, age);
}

double ring_demand(double ring_potential, const std::vector<int>& functional_leaf_counts) {
    if (ring_potential < 0.0) throw ParameterError("ring potential must be nonnegative");
    long total = 0;
    for (int n : functional_leaf_counts) {
        if (n < 0) throw ParameterError("functional leaf counts must be nonnegative");
        total += n;
    }
    return ring_potential * static_cast<double>(total);
}

double production(const ProductionRule& rule, double total_functional_blade_area) {
    if (total_functional_blade_area < 0.0)
        throw ParameterError("blade area must be nonnegative");
    return rule.e_potential * rule.projection_area / rule.resistance *
           (1.0 - std::exp(-total_functional_blade_area / rule.projection_area));
}

double allocate_increment(double q_produced, double organ_demand, double total_demand) {
    if (q_produced < 0.0) throw ParameterError("produced biomass must be nonnegative");
    if (q_produced == 0.0) return 0.0;
    if (!(total_demand > 0.0))
        throw AllocationDeadlockError("biomass produced but total demand is zero");
    return q_produced * organ_demand / total_demand;
}

PithGeometry pith_geometry(double volume, double pith_b, double pith_a) {
    if (!(volume > 0.0)) throw ParameterError("pith volume must be positive");
    if (!(pith_b > 0.0)) throw ParameterError("pith allometry scale must be positive");
    const double length = std::sqrt(pith_b) * std::pow(volume, (1.0 + pith_a) / 2.0);
    return {length, volume / length};
}

double blade_area(double blade_mass, double specific_leaf_weight) {
    if (blade_mass < 0.0) throw ParameterError("blade mass must be nonnegative");
    if (!(specific_leaf_weight > 0.0))
        throw ParameterError("specific leaf weight must be positive");
    return blade_mass / specific_leaf_weight;
}

double ring_increment(double ring_mass_share, double density, double pith_length) {
    if (ring_mass_share < 0.0) throw ParameterError("ring share must be nonnegative");
    if (!(density > 0.0)) throw ParameterError("density must be positive");
    if (!(pith_length > 0.0))
        throw ParameterError("ring growth needs a positive pith length");
    return ring_mass_share / (density * pith_length);
}

std::vector<BranchSpec> default_branches(Treatment treatment) {
    if (treatment == Treatment::T1) return {};
    return {{5, 6}, {6, 5}};
}

void validate(const ParameterSet& p) {
    std::vector<std::string> bad;
    auto expect = [&bad](bool ok, const char* what) {
        if (!ok) bad.emplace_back(what);
    };

    expect(p.production.e_potential > 0.0, "E must be positive");
    expect(p.production.resistance > 0.0, "R must be positive");
    expect(p.production.projection_area > 0.0, "S_p must be positive");
    expect(p.seed_mass > 0.0, "Q_s must be positive");
    expect(p.blade_functional_time >= 1, "T_f must be at least 1");
    expect(p.ring_potential >= 0.0, "P_c must be nonnegative");
    expect(p.blade.potential == 1.0, "P_b is the reference sink and must equal 1");

    const std::size_t pa_n = static_cast<std::size_t>(p.pa_count());
    struct Named {
        const char* name;
        const SinkRule* rule;
    };
    for (const auto& [name, rule] : {Named{"blade", &p.blade}, Named{"petiole", &p.petiole},
                                     Named{"pith", &p.pith}}) {
        if (!(rule->potential >= 0.0)) bad.push_back(std::string(name) + " potential must be nonnegative");
        if (!(rule->shape.alpha >= 1.0) || !(rule->shape.beta >= 1.0))
            bad.push_back(std::string(name) + " shape needs alpha >= 1 and beta >= 1");
        if (rule->shape.expansion_time < 1)
            bad.push_back(std::string(name) + " expansion time must be at least 1");
        if (rule->pa_coefficients.size() != pa_n)
            bad.push_back(std::string(name) + " needs one coefficient per physiological age");
        else {
            if (rule->pa_coefficients[0] != 1.0)
                bad.push_back(std::string(name) + " pa1 coefficient is fixed at 1");
            for (double c : rule->pa_coefficients)
                if (!(c >= 0.0)) bad.push_back(std::string(name) + " coefficients must be nonnegative");
        }
    }

    if (p.allometry.size() != pa_n)
        bad.emplace_back("one allometry entry per physiological age is required");
    for (const auto& a : p.allometry) {
        if (!(a.specific_leaf_weight > 0.0)) bad.emplace_back("epsilon must be positive");
        if (!(a.pith_b > 0.0)) bad.emplace_back("b_e must be positive");
        if (!(a.density > 0.0)) bad.emplace_back("rho must be positive");
    }

    if (p.treatment == Treatment::T1) {
        expect(p.branches.empty(), "a single-stem plant carries no branches");
    } else {
        if (p.branches.size() != 2) {
            bad.emplace_back("two vegetative branches are required");
        } else {
            expect(p.branches[0].bearing_rank == 5 && p.branches[1].bearing_rank == 6,
                   "branch bearing ranks are fixed at nodes 5 and 6");
            for (const auto& b : p.branches)
                if (b.delay_gc < 0) bad.emplace_back("branch delay must be nonnegative");
        }
    }

    if (!bad.empty()) {
        std::string msg = "invalid parameters: ";
        for (std::size_t i = 0; i < bad.size(); ++i) {
            if (i) msg += "; ";
            msg += bad[i];
        }
        throw ParameterError(msg);
    }
}

}  // namespace greenlab
