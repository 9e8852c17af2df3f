#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "greenlab/model_core.hpp"
#include "greenlab/simulator.hpp"

namespace greenlab {

// Measured organ of a target record. The internode aggregates pith and rings;
// its length is the pith length.
enum class TargetOrgan { Blade, Petiole, Internode };

enum class TargetMeasure { MassG, LengthCm, AreaCm2 };

// CSV tokens: blade/petiole/internode, mass_g/length_cm/area_cm2.
const char* to_token(TargetOrgan organ);
const char* to_token(TargetMeasure measure);

struct TargetRecord {
    int stage_gc = 0;
    int pa = 1;
    int rank = 1;
    TargetOrgan organ = TargetOrgan::Blade;
    TargetMeasure measure = TargetMeasure::MassG;
    double value = 0.0;

    friend bool operator==(const TargetRecord&, const TargetRecord&) = default;
};

struct TargetSet {
    Treatment treatment = Treatment::T1;
    std::vector<TargetRecord> records;

    // Sorted distinct stage cycles.
    std::vector<int> stages() const;

    friend bool operator==(const TargetSet&, const TargetSet&) = default;
};

// Parses CSV with header "stage_gc,pa,rank,organ,measure,value". Malformed
// rows raise ParseError with the line number; semantic problems (duplicates,
// impossible ranks, negative values, measures the model cannot produce) are
// collected and raised together as one ValidationError.
TargetSet parse_targets(const std::string& text, Treatment treatment,
                        const std::vector<BranchSpec>& branches);

std::string write_targets(const TargetSet& targets);

// Extracts blade mass, petiole mass, internode mass and internode length for
// every phytomer present at each stage. noise_relative_sd > 0 multiplies each
// value by (1 + sd*z) with z standard gaussian, clamped at zero; the draw
// sequence is fully determined by the seed.
TargetSet synthesize_targets(const SimulationTrace& trace, const ParameterSet& params,
                             const std::vector<int>& stages, double noise_relative_sd,
                             std::uint64_t seed);

}  // namespace greenlab
