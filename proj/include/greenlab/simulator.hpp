#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "greenlab/model_core.hpp"
#include "greenlab/topology.hpp"

namespace greenlab {

// Cumulative biomass of the organs of one phytomer, g. Blade, petiole and
// pith stop growing after their expansion time; rings keep accumulating.
struct OrganMasses {
    double blade = 0.0;
    double petiole = 0.0;
    double pith = 0.0;
    double ring = 0.0;                // total ring biomass of this internode
    double ring_cross_section = 0.0;  // accumulated cross-section gain, cm^2

    friend bool operator==(const OrganMasses&, const OrganMasses&) = default;
};

struct PlantState {
    int gc = 0;
    PlantStructure structure;
    std::vector<OrganMasses> organs;  // parallel to structure.phytomers
    double production = 0.0;          // biomass produced this cycle, g
    double total_demand = 0.0;        // sum of all sink strengths this cycle

    friend bool operator==(const PlantState&, const PlantState&) = default;
};

struct SimulationTrace {
    std::vector<PlantState> states;  // states[i] is cycle i+1

    friend bool operator==(const SimulationTrace&, const SimulationTrace&) = default;
};

// Cycle 1: one main-stem phytomer, seed biomass split by the age-1 sinks.
PlantState initialize(const ParameterSet& params);

// One cycle: develop, produce from beginning-of-cycle blade area, allocate.
PlantState step(const PlantState& state, const ParameterSet& params);

// Full deterministic trace over n_gc cycles.
SimulationTrace run(const ParameterSet& params, int n_gc);

// Derived per-phytomer quantities (index into state.organs).
double blade_area_of(const PlantState& state, std::size_t idx, const ParameterSet& params);
double pith_length_of(const PlantState& state, std::size_t idx, const ParameterSet& params);
double pith_cross_section_of(const PlantState& state, std::size_t idx, const ParameterSet& params);
double internode_cross_section_of(const PlantState& state, std::size_t idx,
                                  const ParameterSet& params);
double internode_diameter_of(const PlantState& state, std::size_t idx, const ParameterSet& params);
double internode_mass_of(const PlantState& state, std::size_t idx);
double total_plant_mass(const PlantState& state);

struct SkeletonSegment {
    int axis_id = 0;
    int rank = 0;
    std::array<double, 3> base{};  // cm
    std::array<double, 3> tip{};
    double diameter = 0.0;         // cm, pith plus rings
    double blade_area = 0.0;       // cm^2 at the distal node
};

struct Skeleton {
    std::vector<SkeletonSegment> segments;
};

// Schematic 3D skeleton: main stem vertical, branches inserted at their
// bearing node at the given angle from the stem, opposite azimuths.
Skeleton snapshot_geometry(const PlantState& state, const ParameterSet& params,
                           double insertion_angle_deg = 45.0);

// CSV with one row per (gc, axis, rank, organ, age, mass, derived dimension).
// The dimension column is blade area, pith length or internode diameter.
std::string trace_csv(const SimulationTrace& trace, const ParameterSet& params);

// One line per internode segment: axis rank x0 y0 z0 x1 y1 z1 diameter blade_area.
std::string skeleton_text(const Skeleton& skeleton);

// Sink variation profiles per organ kind, one row per cycle age.
std::string sink_curves_csv(const ParameterSet& params);

}  // namespace greenlab
