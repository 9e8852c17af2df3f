#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "greenlab/model_core.hpp"

namespace greenlab {

struct Axis {
    int id = 0;
    int pa = 1;                          // physiological age
    std::optional<int> bearing_rank;     // main-stem node carrying this branch; empty for the stem
    int emergence_gc = 1;                // cycle of the first phytomer

    friend bool operator==(const Axis&, const Axis&) = default;
};

struct Phytomer {
    int axis_id = 0;
    int rank = 1;          // position along its axis, 1-based
    int appearance_gc = 1; // == axis emergence + rank - 1

    friend bool operator==(const Phytomer&, const Phytomer&) = default;
};

// Which phytomers exist, on which axis, after developing up to some cycle.
// Snapshots are plain values; develop() returns a new one.
struct PlantStructure {
    Treatment treatment = Treatment::T1;
    std::vector<Axis> axes;
    std::vector<Phytomer> phytomers;  // in order of appearance
    int developed_gc = 0;

    const Axis& axis(int id) const;
    int phytomer_count(int axis_id) const;
    // Index into phytomers for (axis, rank); npos-like -1 when absent.
    std::ptrdiff_t phytomer_index(int axis_id, int rank) const;

    friend bool operator==(const PlantStructure&, const PlantStructure&) = default;
};

// Fresh undeveloped structure. T1 takes no branches; T2 takes two.
PlantStructure make_structure(Treatment treatment, const std::vector<BranchSpec>& branches);

// Advances development by exactly one cycle: every axis already emerged (or
// emerging now) gains one phytomer. Throws SequencingError out of order.
PlantStructure develop(const PlantStructure& s, int gc);

// Blades of the given physiological age whose appearance cycle j satisfies
// 1 <= gc - j <= functional_time. A blade never contributes the cycle it appears.
int functional_leaf_count(const PlantStructure& s, int gc, int pa, int functional_time);

struct FunctionalBlade {
    std::size_t phytomer_index;
    int pa;
    int age;  // gc - appearance_gc

    friend bool operator==(const FunctionalBlade&, const FunctionalBlade&) = default;
};

// Every blade counted by functional_leaf_count, across all physiological ages.
std::vector<FunctionalBlade> functional_blade_cohort(const PlantStructure& s, int gc,
                                                     int functional_time);

}  // namespace greenlab
