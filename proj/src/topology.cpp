#include "greenlab/topology.hpp"

#include <algorithm>
#include <string>

#include "greenlab/errors.hpp"

namespace greenlab {

const Axis& PlantStructure::axis(int id) const {
    for (const auto& a : axes)
        if (a.id == id) return a;
    throw SequencingError("unknown axis id " + std::to_string(id));
}

int PlantStructure::phytomer_count(int axis_id) const {
    const Axis& a = axis(axis_id);
    return std::max(0, developed_gc - a.emergence_gc + 1);
}

std::ptrdiff_t PlantStructure::phytomer_index(int axis_id, int rank) const {
    for (std::size_t i = 0; i < phytomers.size(); ++i)
        if (phytomers[i].axis_id == axis_id && phytomers[i].rank == rank)
            return static_cast<std::ptrdiff_t>(i);
    return -1;
}

PlantStructure make_structure(Treatment treatment, const std::vector<BranchSpec>& branches) {
    if (treatment == Treatment::T1 && !branches.empty())
        throw ParameterError("a single-stem plant carries no branches");
    PlantStructure s;
    s.treatment = treatment;
    s.axes.push_back(Axis{0, 1, std::nullopt, 1});
    int next_id = 1;
    for (const auto& b : branches) {
        if (b.bearing_rank < 1) throw ParameterError("branch bearing rank must be at least 1");
        if (b.delay_gc < 0) throw ParameterError("branch delay must be nonnegative");
        // The bearing internode appears at the cycle equal to its main-stem rank.
        s.axes.push_back(Axis{next_id++, 2, b.bearing_rank, b.bearing_rank + b.delay_gc});
    }
    return s;
}

PlantStructure develop(const PlantStructure& s, int gc) {
    if (gc != s.developed_gc + 1)
        throw SequencingError("develop expects cycle " + std::to_string(s.developed_gc + 1) +
                              ", got " + std::to_string(gc));
    PlantStructure next = s;
    next.developed_gc = gc;
    for (const auto& a : next.axes)
        if (a.emergence_gc <= gc)
            next.phytomers.push_back(Phytomer{a.id, gc - a.emergence_gc + 1, gc});
    return next;
}

int functional_leaf_count(const PlantStructure& s, int gc, int pa, int functional_time) {
    int n = 0;
    for (const auto& ph : s.phytomers) {
        if (s.axis(ph.axis_id).pa != pa) continue;
        const int age = gc - ph.appearance_gc;
        if (age >= 1 && age <= functional_time) ++n;
    }
    return n;
}

std::vector<FunctionalBlade> functional_blade_cohort(const PlantStructure& s, int gc,
                                                     int functional_time) {
    std::vector<FunctionalBlade> out;
    for (std::size_t i = 0; i < s.phytomers.size(); ++i) {
        const int age = gc - s.phytomers[i].appearance_gc;
        if (age >= 1 && age <= functional_time)
            out.push_back(FunctionalBlade{i, s.axis(s.phytomers[i].axis_id).pa, age});
    }
    return out;
}

}  // namespace greenlab
