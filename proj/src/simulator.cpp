#include "greenlab/simulator.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "greenlab/errors.hpp"
#include "text_util.hpp"

namespace greenlab {

namespace {

// f(k) per organ kind, precomputed once per run.
struct SinkTables {
    std::vector<double> blade, petiole, pith;
};

std::vector<double> tabulate(const BetaShape& shape) {
    std::vector<double> f(static_cast<std::size_t>(shape.expansion_time));
    for (int k = 1; k <= shape.expansion_time; ++k)
        f[static_cast<std::size_t>(k - 1)] = sink_variation(shape, k);
    return f;
}

SinkTables build_tables(const ParameterSet& p) {
    return {tabulate(p.blade.shape), tabulate(p.petiole.shape), tabulate(p.pith.shape)};
}

double sink_at(const SinkRule& rule, const std::vector<double>& table, int pa, int age) {
    if (age > rule.shape.expansion_time) return 0.0;
    return rule.pa_coefficients[static_cast<std::size_t>(pa - 1)] * rule.potential *
           table[static_cast<std::size_t>(age - 1)];
}

double pith_length_from_mass(double pith_mass, const AllometryRule& al) {
    if (pith_mass <= 0.0) return 0.0;
    return pith_geometry(pith_mass / al.density, al.pith_b, al.pith_a).length;
}

PlantState step_impl(const PlantState& state, const ParameterSet& params,
                     const SinkTables& tables) {
    const int gc = state.gc + 1;
    PlantState next;
    next.gc = gc;
    next.structure = develop(state.structure, gc);
    next.organs = state.organs;
    next.organs.resize(next.structure.phytomers.size());

    // Blade area at the beginning of the cycle: masses accumulated through
    // the previous cycle. Newly appended phytomers are outside the window.
    double area = 0.0;
    const auto cohort =
        functional_blade_cohort(next.structure, gc, params.blade_functional_time);
    for (const auto& b : cohort)
        area += blade_area(next.organs[b.phytomer_index].blade,
                           params.allometry[static_cast<std::size_t>(b.pa - 1)].specific_leaf_weight);

    const double q = production(params.production, area);

    const std::size_t n = next.structure.phytomers.size();
    std::vector<std::array<double, 3>> demand(n);
    double organ_demand = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& ph = next.structure.phytomers[i];
        const int pa = next.structure.axis(ph.axis_id).pa;
        const int age = gc - ph.appearance_gc + 1;
        demand[i] = {sink_at(params.blade, tables.blade, pa, age),
                     sink_at(params.petiole, tables.petiole, pa, age),
                     sink_at(params.pith, tables.pith, pa, age)};
        organ_demand += demand[i][0] + demand[i][1] + demand[i][2];
    }

    std::vector<int> leaf_counts(static_cast<std::size_t>(params.pa_count()), 0);
    for (const auto& b : cohort) ++leaf_counts[static_cast<std::size_t>(b.pa - 1)];
    const double d_ring = ring_demand(params.ring_potential, leaf_counts);
    const double d_total = organ_demand + d_ring;

    next.production = q;
    next.total_demand = d_total;
    if (q == 0.0) return next;

    if (!(d_total > 0.0))
        throw AllocationDeadlockError("cycle " + std::to_string(gc) +
                                      ": biomass produced but total demand is zero");

    for (std::size_t i = 0; i < n; ++i) {
        next.organs[i].blade += allocate_increment(q, demand[i][0], d_total);
        next.organs[i].petiole += allocate_increment(q, demand[i][1], d_total);
        next.organs[i].pith += allocate_increment(q, demand[i][2], d_total);
    }

    const double ring_pool = allocate_increment(q, d_ring, d_total);
    if (ring_pool > 0.0) {
        // Share weights use beginning-of-cycle pith lengths, so an internode
        // appearing this cycle receives its first ring the cycle after.
        std::vector<double> length(n, 0.0);
        double length_total = 0.0;
        for (std::size_t i = 0; i < state.organs.size(); ++i) {
            const int pa = next.structure.axis(next.structure.phytomers[i].axis_id).pa;
            length[i] = pith_length_from_mass(state.organs[i].pith,
                                              params.allometry[static_cast<std::size_t>(pa - 1)]);
            length_total += length[i];
        }
        if (!(length_total > 0.0))
            throw AllocationDeadlockError("cycle " + std::to_string(gc) +
                                          ": ring biomass with no internode to receive it");
        for (std::size_t i = 0; i < n; ++i) {
            if (length[i] <= 0.0) continue;
            const int pa = next.structure.axis(next.structure.phytomers[i].axis_id).pa;
            const double share = ring_pool * length[i] / length_total;
            next.organs[i].ring += share;
            next.organs[i].ring_cross_section += ring_increment(
                share, params.allometry[static_cast<std::size_t>(pa - 1)].density, length[i]);
        }
    }
    return next;
}

}  // namespace

PlantState initialize(const ParameterSet& params) {
    validate(params);
    PlantState st;
    st.gc = 1;
    st.structure = develop(make_structure(params.treatment, params.branches), 1);
    st.organs.resize(1);

    // No blade predates the first cycle, so the ring compartment idles and the
    // seed splits across the first phytomer's organs at age 1.
    const double d_blade = organ_sink(params.blade, 1, 1);
    const double d_petiole = organ_sink(params.petiole, 1, 1);
    const double d_pith = organ_sink(params.pith, 1, 1);
    const double d_total = d_blade + d_petiole + d_pith;

    st.production = params.seed_mass;
    st.total_demand = d_total;
    st.organs[0].blade = allocate_increment(params.seed_mass, d_blade, d_total);
    st.organs[0].petiole = allocate_increment(params.seed_mass, d_petiole, d_total);
    st.organs[0].pith = allocate_increment(params.seed_mass, d_pith, d_total);
    return st;
}

PlantState step(const PlantState& state, const ParameterSet& params) {
    return step_impl(state, params, build_tables(params));
}

SimulationTrace run(const ParameterSet& params, int n_gc) {
    if (n_gc < 1) throw ParameterError("horizon must be at least one growth cycle");
    SimulationTrace trace;
    trace.states.reserve(static_cast<std::size_t>(n_gc));
    trace.states.push_back(initialize(params));
    const SinkTables tables = build_tables(params);
    for (int gc = 2; gc <= n_gc; ++gc)
        trace.states.push_back(step_impl(trace.states.back(), params, tables));
    return trace;
}

namespace {

const AllometryRule& allometry_of(const PlantState& state, std::size_t idx,
                                  const ParameterSet& params) {
    const int pa = state.structure.axis(state.structure.phytomers[idx].axis_id).pa;
    return params.allometry[static_cast<std::size_t>(pa - 1)];
}

}  // namespace

double blade_area_of(const PlantState& state, std::size_t idx, const ParameterSet& params) {
    return blade_area(state.organs[idx].blade,
                      allometry_of(state, idx, params).specific_leaf_weight);
}

double pith_length_of(const PlantState& state, std::size_t idx, const ParameterSet& params) {
    return pith_length_from_mass(state.organs[idx].pith, allometry_of(state, idx, params));
}

double pith_cross_section_of(const PlantState& state, std::size_t idx,
                             const ParameterSet& params) {
    const double m = state.organs[idx].pith;
    if (m <= 0.0) return 0.0;
    const auto& al = allometry_of(state, idx, params);
    return pith_geometry(m / al.density, al.pith_b, al.pith_a).cross_section;
}

double internode_cross_section_of(const PlantState& state, std::size_t idx,
                                  const ParameterSet& params) {
    return pith_cross_section_of(state, idx, params) + state.organs[idx].ring_cross_section;
}

double internode_diameter_of(const PlantState& state, std::size_t idx,
                             const ParameterSet& params) {
    const double total = internode_cross_section_of(state, idx, params);
    if (total <= 0.0) return 0.0;
    return 2.0 * std::sqrt(total / std::numbers::pi);
}

double internode_mass_of(const PlantState& state, std::size_t idx) {
    return state.organs[idx].pith + state.organs[idx].ring;
}

double total_plant_mass(const PlantState& state) {
    double total = 0.0;
    for (const auto& o : state.organs) total += o.blade + o.petiole + o.pith + o.ring;
    return total;
}

Skeleton snapshot_geometry(const PlantState& state, const ParameterSet& params,
                           double insertion_angle_deg) {
    const double angle = insertion_angle_deg * std::numbers::pi / 180.0;
    Skeleton sk;

    // Main-stem node heights; branch bases sit on them.
    const Axis& stem = state.structure.axes.front();
    std::vector<double> stem_top{0.0};
    for (int rank = 1; rank <= state.structure.phytomer_count(stem.id); ++rank) {
        const auto idx = state.structure.phytomer_index(stem.id, rank);
        stem_top.push_back(stem_top.back() +
                           pith_length_of(state, static_cast<std::size_t>(idx), params));
    }

    int branch_seen = 0;
    for (const auto& axis : state.structure.axes) {
        std::array<double, 3> base{0.0, 0.0, 0.0};
        std::array<double, 3> dir{0.0, 0.0, 1.0};
        if (axis.bearing_rank) {
            const int bearing = *axis.bearing_rank;
            if (bearing >= static_cast<int>(stem_top.size())) continue;  // not borne yet
            base = {0.0, 0.0, stem_top[static_cast<std::size_t>(bearing)]};
            const double azimuth = branch_seen++ % 2 == 0 ? 1.0 : -1.0;
            dir = {azimuth * std::sin(angle), 0.0, std::cos(angle)};
        }
        std::array<double, 3> cursor = base;
        for (int rank = 1; rank <= state.structure.phytomer_count(axis.id); ++rank) {
            const auto idx = static_cast<std::size_t>(state.structure.phytomer_index(axis.id, rank));
            const double len = pith_length_of(state, idx, params);
            SkeletonSegment seg;
            seg.axis_id = axis.id;
            seg.rank = rank;
            seg.base = cursor;
            seg.tip = {cursor[0] + len * dir[0], cursor[1] + len * dir[1],
                       cursor[2] + len * dir[2]};
            seg.diameter = internode_diameter_of(state, idx, params);
            seg.blade_area = blade_area_of(state, idx, params);
            sk.segments.push_back(seg);
            cursor = seg.tip;
        }
    }
    return sk;
}

std::string trace_csv(const SimulationTrace& trace, const ParameterSet& params) {
    using text::format_double;
    std::string out = "gc,axis,rank,organ,age,mass_g,dimension\n";
    for (const auto& state : trace.states) {
        for (std::size_t i = 0; i < state.structure.phytomers.size(); ++i) {
            const auto& ph = state.structure.phytomers[i];
            const std::string prefix = std::to_string(state.gc) + "," +
                                       std::to_string(ph.axis_id) + "," +
                                       std::to_string(ph.rank) + ",";
            const std::string age = std::to_string(state.gc - ph.appearance_gc + 1);
            out += prefix + "blade," + age + "," + format_double(state.organs[i].blade) + "," +
                   format_double(blade_area_of(state, i, params)) + "\n";
            out += prefix + "petiole," + age + "," + format_double(state.organs[i].petiole) +
                   ",0\n";
            out += prefix + "pith," + age + "," + format_double(state.organs[i].pith) + "," +
                   format_double(pith_length_of(state, i, params)) + "\n";
            out += prefix + "internode," + age + "," + format_double(internode_mass_of(state, i)) +
                   "," + format_double(internode_diameter_of(state, i, params)) + "\n";
        }
    }
    return out;
}

std::string skeleton_text(const Skeleton& skeleton) {
    using text::format_double;
    std::string out = "# axis rank x0 y0 z0 x1 y1 z1 diameter_cm blade_area_cm2\n";
    for (const auto& s : skeleton.segments) {
        out += std::to_string(s.axis_id) + " " + std::to_string(s.rank);
        for (double v : s.base) out += " " + format_double(v);
        for (double v : s.tip) out += " " + format_double(v);
        out += " " + format_double(s.diameter) + " " + format_double(s.blade_area) + "\n";
    }
    return out;
}

std::string sink_curves_csv(const ParameterSet& params) {
    using text::format_double;
    const int max_t = std::max({params.blade.shape.expansion_time,
                                params.petiole.shape.expansion_time,
                                params.pith.shape.expansion_time});
    std::string out = "k,blade,petiole,pith\n";
    for (int k = 1; k <= max_t; ++k) {
        out += std::to_string(k) + "," + format_double(sink_variation(params.blade.shape, k)) +
               "," + format_double(sink_variation(params.petiole.shape, k)) + "," +
               format_double(sink_variation(params.pith.shape, k)) + "\n";
    }
    return out;
}

}  // namespace greenlab
