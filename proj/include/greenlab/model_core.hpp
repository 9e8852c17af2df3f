#pragma once

#include <vector>

namespace greenlab {

// Expanding organ kinds. The ring compartment (secondary growth) is a single
// plant-wide sink handled separately from these.
enum class OrganKind { Blade, Petiole, Pith };

// T1: single stem. T2: two vegetative branches kept at main-stem nodes 5 and 6.
enum class Treatment { T1, T2 };

// Beta-law sink profile on the integer cycle grid.
// g(k) = ((k-0.5)/T)^(alpha-1) * (1-(k-0.5)/T)^(beta-1), normalized by its
// maximum over k = 1..T. alpha, beta >= 1 keeps the profile bounded.
struct BetaShape {
    double alpha = 1.0;
    double beta = 1.0;
    int expansion_time = 1;  // T, growth cycles

    friend bool operator==(const BetaShape&, const BetaShape&) = default;
};

// Sink strength of one organ kind: coefficient * potential * profile(age).
// The blade potential is the reference and is fixed at 1, as is the
// coefficient of physiological age 1.
struct SinkRule {
    double potential = 1.0;
    std::vector<double> pa_coefficients{1.0};  // index pa-1; first entry is 1
    BetaShape shape;

    friend bool operator==(const SinkRule&, const SinkRule&) = default;
};

// Biomass acquisition: Q = E*S_p/R * (1 - exp(-area/S_p)).
// E is held constant; the conventional value is 1 so that the fitted
// resistance absorbs it.
struct ProductionRule {
    double e_potential = 1.0;     // g cm^-2 per cycle
    double resistance = 1.0;      // R, dimensionless
    double projection_area = 1.0; // S_p, cm^2

    friend bool operator==(const ProductionRule&, const ProductionRule&) = default;
};

// Mass-to-geometry conversions, one set per physiological age.
struct AllometryRule {
    double specific_leaf_weight = 1.0;  // g cm^-2, blade mass per area
    double pith_b = 1.0;                // allometric scale for pith length
    double pith_a = 0.0;                // allometric exponent shift
    double density = 1.0;               // g cm^-3, pith and rings alike

    friend bool operator==(const AllometryRule&, const AllometryRule&) = default;
};

// A vegetative branch kept on the main stem: it emerges a fixed number of
// cycles after its bearing internode appeared.
struct BranchSpec {
    int bearing_rank = 0;  // main-stem node index
    int delay_gc = 0;      // cycles between bearing internode and first branch phytomer

    friend bool operator==(const BranchSpec&, const BranchSpec&) = default;
};

// Everything one treatment needs to simulate: measured inputs plus the hidden
// source-sink parameters. Physiological age (pa) 1 is the main stem; pa 2 the
// branches (T2 only). Vectors indexed pa-1.
struct ParameterSet {
    Treatment treatment = Treatment::T1;
    ProductionRule production;
    SinkRule blade;    // potential fixed at 1 (reference)
    SinkRule petiole;
    SinkRule pith;
    double ring_potential = 0.0;           // P_c, sink scale of the ring compartment
    std::vector<AllometryRule> allometry;  // one entry per pa
    double seed_mass = 0.0;                // g, feeds the first cycle
    int blade_functional_time = 1;         // cycles a blade contributes area
    std::vector<BranchSpec> branches;      // empty for T1

    const SinkRule& sink(OrganKind kind) const;
    int pa_count() const { return treatment == Treatment::T2 ? 2 : 1; }

    friend bool operator==(const ParameterSet&, const ParameterSet&) = default;
};

// Normalized sink variation f(age) in [0, 1]; 0 past the expansion time.
// Exactly one grid age attains 1 (ties share the same maximum value).
double sink_variation(const BetaShape& shape, int age);

// Sink strength of an organ of the given physiological age and chronological age.
double organ_sink(const SinkRule& rule, int pa, int age);

// Demand of the ring compartment: potential times the total functional leaf
// count across physiological ages.
double ring_demand(double ring_potential, const std::vector<int>& functional_leaf_counts);

// Biomass produced from the total functional blade area, cm^2 -> g.
// Saturates below e_potential * projection_area / resistance.
double production(const ProductionRule& rule, double total_functional_blade_area);

// Share of produced biomass for one sink. Throws AllocationDeadlockError when
// there is biomass to place but no demand.
double allocate_increment(double q_produced, double organ_demand, double total_demand);

struct PithGeometry {
    double length;         // cm
    double cross_section;  // cm^2; length * cross_section == volume
};

// Cylinder dimensions from pith volume: l = sqrt(b) * V^((1+a)/2), sigma = V/l.
PithGeometry pith_geometry(double volume, double pith_b, double pith_a);

// Blade area from cumulative blade mass, g -> cm^2.
double blade_area(double blade_mass, double specific_leaf_weight);

// Cross-section gained by one internode from its ring biomass share.
double ring_increment(double ring_mass_share, double density, double pith_length);

// Checks every domain invariant; throws ParameterError listing all violations.
void validate(const ParameterSet& params);

// Branch layout of a treatment: nodes 5 and 6, delays 6 and 5 cycles.
std::vector<BranchSpec> default_branches(Treatment treatment);

}  // namespace greenlab
