#include "greenlab/targets.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <string>

#include "greenlab/errors.hpp"
#include "text_util.hpp"

namespace greenlab {

const char* to_token(TargetOrgan o) {
    switch (o) {
        case TargetOrgan::Blade: return "blade";
        case TargetOrgan::Petiole: return "petiole";
        default: return "internode";
    }
}

const char* to_token(TargetMeasure m) {
    switch (m) {
        case TargetMeasure::MassG: return "mass_g";
        case TargetMeasure::LengthCm: return "length_cm";
        default: return "area_cm2";
    }
}

namespace {

bool organ_from(std::string_view s, TargetOrgan& out) {
    if (s == "blade") out = TargetOrgan::Blade;
    else if (s == "petiole") out = TargetOrgan::Petiole;
    else if (s == "internode") out = TargetOrgan::Internode;
    else return false;
    return true;
}

bool measure_from(std::string_view s, TargetMeasure& out) {
    if (s == "mass_g") out = TargetMeasure::MassG;
    else if (s == "length_cm") out = TargetMeasure::LengthCm;
    else if (s == "area_cm2") out = TargetMeasure::AreaCm2;
    else return false;
    return true;
}

// The measures the model can reproduce; anything else cannot be fitted.
bool supported_measure(TargetOrgan organ, TargetMeasure measure) {
    switch (organ) {
        case TargetOrgan::Blade:
            return measure == TargetMeasure::MassG || measure == TargetMeasure::AreaCm2;
        case TargetOrgan::Petiole:
            return measure == TargetMeasure::MassG;
        default:
            return measure == TargetMeasure::MassG || measure == TargetMeasure::LengthCm;
    }
}

constexpr const char* kHeader = "stage_gc,pa,rank,organ,measure,value";

// Uniform in (0, 1], identical on every platform.
double next_uniform(std::mt19937_64& rng) {
    return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
}

double next_gaussian(std::mt19937_64& rng) {
    const double u1 = next_uniform(rng);
    const double u2 = next_uniform(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace

std::vector<int> TargetSet::stages() const {
    std::set<int> s;
    for (const auto& r : records) s.insert(r.stage_gc);
    return {s.begin(), s.end()};
}

TargetSet parse_targets(const std::string& text, Treatment treatment,
                        const std::vector<BranchSpec>& branches) {
    const auto lines = text::split_lines(text);
    if (lines.empty() || text::trim(lines[0]) != kHeader)
        throw ParseError("line 1: expected header \"" + std::string(kHeader) + "\"");

    const PlantStructure skeleton = make_structure(treatment, branches);
    const int pa_max = treatment == Treatment::T2 ? 2 : 1;

    TargetSet set;
    set.treatment = treatment;
    std::map<std::string, std::size_t> first_line;  // record key -> line number
    std::vector<std::string> violations;

    for (std::size_t li = 1; li < lines.size(); ++li) {
        const auto line = text::trim(lines[li]);
        if (line.empty()) continue;
        const std::size_t line_no = li + 1;
        const auto fields = text::split(line, ',');
        if (fields.size() != 6)
            throw ParseError("line " + std::to_string(line_no) + ": expected 6 fields, got " +
                             std::to_string(fields.size()));

        TargetRecord rec;
        if (!text::parse_int(fields[0], rec.stage_gc))
            throw ParseError("line " + std::to_string(line_no) + ": bad stage_gc");
        if (!text::parse_int(fields[1], rec.pa))
            throw ParseError("line " + std::to_string(line_no) + ": bad pa");
        if (!text::parse_int(fields[2], rec.rank))
            throw ParseError("line " + std::to_string(line_no) + ": bad rank");
        if (!organ_from(text::trim(fields[3]), rec.organ))
            throw ParseError("line " + std::to_string(line_no) + ": unknown organ \"" +
                             std::string(text::trim(fields[3])) + "\"");
        if (!measure_from(text::trim(fields[4]), rec.measure))
            throw ParseError("line " + std::to_string(line_no) + ": unknown measure \"" +
                             std::string(text::trim(fields[4])) + "\"");
        if (!text::parse_double(fields[5], rec.value))
            throw ParseError("line " + std::to_string(line_no) + ": bad value");

        const std::string where = "line " + std::to_string(line_no) + ": ";
        if (rec.stage_gc < 1) violations.push_back(where + "stage_gc must be at least 1");
        if (rec.value < 0.0) violations.push_back(where + "value must be nonnegative");
        if (!std::isfinite(rec.value)) violations.push_back(where + "value must be finite");
        if (rec.pa < 1 || rec.pa > pa_max) {
            violations.push_back(where + "pa " + std::to_string(rec.pa) +
                                 " is not valid for this treatment");
        } else if (rec.stage_gc >= 1) {
            int max_rank = 0;
            for (const auto& a : skeleton.axes)
                if (a.pa == rec.pa)
                    max_rank = std::max(max_rank, rec.stage_gc - a.emergence_gc + 1);
            if (rec.rank < 1 || rec.rank > max_rank)
                violations.push_back(where + "rank " + std::to_string(rec.rank) +
                                     " does not exist for pa " + std::to_string(rec.pa) +
                                     " at stage " + std::to_string(rec.stage_gc));
        }
        if (!supported_measure(rec.organ, rec.measure))
            violations.push_back(where + std::string(to_token(rec.measure)) +
                                 " is not available for organ " + to_token(rec.organ));

        const std::string key = std::to_string(rec.stage_gc) + "|" + std::to_string(rec.pa) +
                                "|" + std::to_string(rec.rank) + "|" + to_token(rec.organ) +
                                "|" + to_token(rec.measure);
        const auto [it, inserted] = first_line.emplace(key, line_no);
        if (!inserted)
            violations.push_back("lines " + std::to_string(it->second) + " and " +
                                 std::to_string(line_no) + ": duplicate record (" + key + ")");

        set.records.push_back(rec);
    }

    if (!violations.empty()) {
        std::string msg = "invalid targets: ";
        for (std::size_t i = 0; i < violations.size(); ++i) {
            if (i) msg += "; ";
            msg += violations[i];
        }
        throw ValidationError(msg);
    }
    return set;
}

std::string write_targets(const TargetSet& targets) {
    std::string out = std::string(kHeader) + "\n";
    for (const auto& r : targets.records) {
        out += std::to_string(r.stage_gc) + "," + std::to_string(r.pa) + "," +
               std::to_string(r.rank) + "," + to_token(r.organ) + "," +
               to_token(r.measure) + "," + text::format_double(r.value) + "\n";
    }
    return out;
}

TargetSet synthesize_targets(const SimulationTrace& trace, const ParameterSet& params,
                             const std::vector<int>& stages, double noise_relative_sd,
                             std::uint64_t seed) {
    if (noise_relative_sd < 0.0) throw ParameterError("noise sd must be nonnegative");
    const int horizon = static_cast<int>(trace.states.size());
    std::set<int> wanted(stages.begin(), stages.end());
    for (int s : wanted)
        if (s < 1 || s > horizon)
            throw ValidationError("stage " + std::to_string(s) + " is beyond the simulated horizon " +
                                  std::to_string(horizon));

    std::mt19937_64 rng(seed);
    TargetSet set;
    set.treatment = params.treatment;

    auto emit = [&](int stage, int pa, int rank, TargetOrgan organ, TargetMeasure measure,
                    double value) {
        if (noise_relative_sd > 0.0)
            value = std::max(0.0, value * (1.0 + noise_relative_sd * next_gaussian(rng)));
        set.records.push_back(TargetRecord{stage, pa, rank, organ, measure, value});
    };

    for (int stage : wanted) {
        const PlantState& state = trace.states[static_cast<std::size_t>(stage - 1)];
        for (int pa = 1; pa <= params.pa_count(); ++pa) {
            // First axis of the physiological age stands for all of them.
            const Axis* axis = nullptr;
            for (const auto& a : state.structure.axes)
                if (a.pa == pa) {
                    axis = &a;
                    break;
                }
            if (!axis) continue;
            for (int rank = 1; rank <= state.structure.phytomer_count(axis->id); ++rank) {
                const auto idx =
                    static_cast<std::size_t>(state.structure.phytomer_index(axis->id, rank));
                emit(stage, pa, rank, TargetOrgan::Blade, TargetMeasure::MassG,
                     state.organs[idx].blade);
                emit(stage, pa, rank, TargetOrgan::Petiole, TargetMeasure::MassG,
                     state.organs[idx].petiole);
                emit(stage, pa, rank, TargetOrgan::Internode, TargetMeasure::MassG,
                     internode_mass_of(state, idx));
                emit(stage, pa, rank, TargetOrgan::Internode, TargetMeasure::LengthCm,
                     pith_length_of(state, idx, params));
            }
        }
    }
    return set;
}

}  // namespace greenlab
