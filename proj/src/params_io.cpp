#include "greenlab/params_io.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "greenlab/errors.hpp"
#include "text_util.hpp"

namespace greenlab {

namespace {

class Reader {
public:
    explicit Reader(std::map<std::string, std::string, std::less<>> kv) : kv_(std::move(kv)) {}

    bool has(const std::string& key) const { return kv_.count(key) != 0; }

    double number(const std::string& key) {
        const auto it = kv_.find(key);
        if (it == kv_.end()) {
            missing_.push_back(key);
            return 0.0;
        }
        double v = 0.0;
        if (!text::parse_double(it->second, v))
            throw ParseError("key " + key + ": \"" + it->second + "\" is not a number");
        consumed_.push_back(key);
        return v;
    }

    double number_or(const std::string& key, double fallback) {
        return has(key) ? number(key) : fallback;
    }

    int integer(const std::string& key) {
        const auto it = kv_.find(key);
        if (it == kv_.end()) {
            missing_.push_back(key);
            return 0;
        }
        int v = 0;
        if (!text::parse_int(it->second, v))
            throw ParseError("key " + key + ": \"" + it->second + "\" is not an integer");
        consumed_.push_back(key);
        return v;
    }

    int integer_or(const std::string& key, int fallback) {
        return has(key) ? integer(key) : fallback;
    }

    std::string word(const std::string& key) {
        const auto it = kv_.find(key);
        if (it == kv_.end()) {
            missing_.push_back(key);
            return {};
        }
        consumed_.push_back(key);
        return it->second;
    }

    void finish() const {
        std::vector<std::string> unknown;
        for (const auto& [key, value] : kv_) {
            bool used = false;
            for (const auto& c : consumed_)
                if (c == key) {
                    used = true;
                    break;
                }
            if (!used) unknown.push_back(key);
        }
        std::string msg;
        if (!missing_.empty()) {
            msg += "missing required key(s): ";
            for (std::size_t i = 0; i < missing_.size(); ++i)
                msg += (i ? ", " : "") + missing_[i];
        }
        if (!unknown.empty()) {
            if (!msg.empty()) msg += "; ";
            msg += "unknown key(s): ";
            for (std::size_t i = 0; i < unknown.size(); ++i)
                msg += (i ? ", " : "") + unknown[i];
        }
        if (!msg.empty()) throw InputError(msg);
    }

private:
    std::map<std::string, std::string, std::less<>> kv_;
    std::vector<std::string> consumed_;
    std::vector<std::string> missing_;
};

}  // namespace

ParameterSet parse_params(const std::string& text) {
    Reader in(text::parse_key_values(text));

    ParameterSet p;
    const std::string treatment = in.word("treatment");
    if (treatment == "T1") p.treatment = Treatment::T1;
    else if (treatment == "T2") p.treatment = Treatment::T2;
    else if (!treatment.empty())
        throw InputError("key treatment: expected T1 or T2, got \"" + treatment + "\"");

    p.seed_mass = in.number("Q_s");
    p.production.e_potential = in.number_or("E", 1.0);
    p.production.resistance = in.number("R");
    p.production.projection_area = in.number("S_p");

    p.blade.potential = in.number_or("P_b", 1.0);
    p.petiole.potential = in.number("P_p");
    p.pith.potential = in.number("P_e");
    p.ring_potential = in.number("P_c");

    p.blade.shape = {in.number("alpha_b"), in.number("beta_b"), in.integer("T_b")};
    p.petiole.shape = {in.number("alpha_p"), in.number("beta_p"), in.integer("T_p")};
    p.pith.shape = {in.number("alpha_e"), in.number("beta_e"), in.integer("T_e")};
    p.blade_functional_time = in.integer("T_f");

    const double rho = in.number("rho");
    AllometryRule pa1{in.number("epsilon.pa1"), in.number("b_e.pa1"), in.number("a_e.pa1"), rho};
    p.allometry = {pa1};
    p.blade.pa_coefficients = {1.0};
    p.petiole.pa_coefficients = {1.0};
    p.pith.pa_coefficients = {1.0};

    if (p.treatment == Treatment::T2) {
        p.blade.pa_coefficients.push_back(in.number("C_b.pa2"));
        p.petiole.pa_coefficients.push_back(in.number("C_p.pa2"));
        p.pith.pa_coefficients.push_back(in.number("C_e.pa2"));
        p.allometry.push_back(AllometryRule{in.number("epsilon.pa2"), in.number("b_e.pa2"),
                                            in.number("a_e.pa2"), rho});
        p.branches = default_branches(Treatment::T2);
        p.branches[0].delay_gc = in.integer_or("branch_delay_1", p.branches[0].delay_gc);
        p.branches[1].delay_gc = in.integer_or("branch_delay_2", p.branches[1].delay_gc);
    }

    in.finish();

    std::vector<std::string> bad;
    auto demand = [&bad](bool ok, const std::string& key, const char* rule) {
        if (!ok) bad.push_back("key " + key + ": " + rule);
    };
    demand(p.seed_mass > 0.0, "Q_s", "must be positive");
    demand(p.production.e_potential > 0.0, "E", "must be positive");
    demand(p.production.resistance > 0.0, "R", "must be positive");
    demand(p.production.projection_area > 0.0, "S_p", "must be positive");
    demand(p.blade.potential == 1.0, "P_b", "is the reference sink and must equal 1");
    demand(p.petiole.potential >= 0.0, "P_p", "must be nonnegative");
    demand(p.pith.potential >= 0.0, "P_e", "must be nonnegative");
    demand(p.ring_potential >= 0.0, "P_c", "must be nonnegative");
    demand(p.blade.shape.alpha >= 1.0, "alpha_b", "must be at least 1");
    demand(p.blade.shape.beta >= 1.0, "beta_b", "must be at least 1");
    demand(p.blade.shape.expansion_time >= 1, "T_b", "must be at least 1");
    demand(p.petiole.shape.alpha >= 1.0, "alpha_p", "must be at least 1");
    demand(p.petiole.shape.beta >= 1.0, "beta_p", "must be at least 1");
    demand(p.petiole.shape.expansion_time >= 1, "T_p", "must be at least 1");
    demand(p.pith.shape.alpha >= 1.0, "alpha_e", "must be at least 1");
    demand(p.pith.shape.beta >= 1.0, "beta_e", "must be at least 1");
    demand(p.pith.shape.expansion_time >= 1, "T_e", "must be at least 1");
    demand(p.blade_functional_time >= 1, "T_f", "must be at least 1");
    demand(p.allometry[0].density > 0.0, "rho", "must be positive");
    demand(p.allometry[0].specific_leaf_weight > 0.0, "epsilon.pa1", "must be positive");
    demand(p.allometry[0].pith_b > 0.0, "b_e.pa1", "must be positive");
    if (p.treatment == Treatment::T2) {
        demand(p.blade.pa_coefficients[1] >= 0.0, "C_b.pa2", "must be nonnegative");
        demand(p.petiole.pa_coefficients[1] >= 0.0, "C_p.pa2", "must be nonnegative");
        demand(p.pith.pa_coefficients[1] >= 0.0, "C_e.pa2", "must be nonnegative");
        demand(p.allometry[1].specific_leaf_weight > 0.0, "epsilon.pa2", "must be positive");
        demand(p.allometry[1].pith_b > 0.0, "b_e.pa2", "must be positive");
        demand(p.branches[0].delay_gc >= 0, "branch_delay_1", "must be nonnegative");
        demand(p.branches[1].delay_gc >= 0, "branch_delay_2", "must be nonnegative");
    }
    if (!bad.empty()) {
        std::string msg = "domain violation(s): ";
        for (std::size_t i = 0; i < bad.size(); ++i) {
            if (i) msg += "; ";
            msg += bad[i];
        }
        throw ParameterError(msg);
    }

    validate(p);
    return p;
}

std::string write_params(const ParameterSet& p) {
    using text::format_double;
    std::string out;
    auto put = [&out](const std::string& key, const std::string& value) {
        out += key + " = " + value + "\n";
    };
    auto putd = [&](const std::string& key, double v) { put(key, format_double(v)); };
    auto puti = [&](const std::string& key, int v) { put(key, std::to_string(v)); };

    put("treatment", p.treatment == Treatment::T2 ? "T2" : "T1");
    putd("Q_s", p.seed_mass);
    out += "\n# biomass acquisition\n";
    putd("E", p.production.e_potential);
    putd("R", p.production.resistance);
    putd("S_p", p.production.projection_area);
    out += "\n# sink potentials\n";
    putd("P_b", p.blade.potential);
    putd("P_p", p.petiole.potential);
    putd("P_e", p.pith.potential);
    putd("P_c", p.ring_potential);
    out += "\n# sink variation shapes\n";
    putd("alpha_b", p.blade.shape.alpha);
    putd("beta_b", p.blade.shape.beta);
    puti("T_b", p.blade.shape.expansion_time);
    putd("alpha_p", p.petiole.shape.alpha);
    putd("beta_p", p.petiole.shape.beta);
    puti("T_p", p.petiole.shape.expansion_time);
    putd("alpha_e", p.pith.shape.alpha);
    putd("beta_e", p.pith.shape.beta);
    puti("T_e", p.pith.shape.expansion_time);
    puti("T_f", p.blade_functional_time);
    out += "\n# allometry\n";
    putd("rho", p.allometry.empty() ? 0.0 : p.allometry[0].density);
    putd("epsilon.pa1", p.allometry.empty() ? 0.0 : p.allometry[0].specific_leaf_weight);
    putd("b_e.pa1", p.allometry.empty() ? 0.0 : p.allometry[0].pith_b);
    putd("a_e.pa1", p.allometry.empty() ? 0.0 : p.allometry[0].pith_a);
    if (p.treatment == Treatment::T2) {
        out += "\n# branch physiological age\n";
        putd("C_b.pa2", p.blade.pa_coefficients.size() > 1 ? p.blade.pa_coefficients[1] : 0.0);
        putd("C_p.pa2", p.petiole.pa_coefficients.size() > 1 ? p.petiole.pa_coefficients[1] : 0.0);
        putd("C_e.pa2", p.pith.pa_coefficients.size() > 1 ? p.pith.pa_coefficients[1] : 0.0);
        putd("epsilon.pa2", p.allometry.size() > 1 ? p.allometry[1].specific_leaf_weight : 0.0);
        putd("b_e.pa2", p.allometry.size() > 1 ? p.allometry[1].pith_b : 0.0);
        putd("a_e.pa2", p.allometry.size() > 1 ? p.allometry[1].pith_a : 0.0);
        if (p.branches.size() == 2) {
            puti("branch_delay_1", p.branches[0].delay_gc);
            puti("branch_delay_2", p.branches[1].delay_gc);
        }
    }
    return out;
}

std::string comparison_csv(const ParameterSet& a, const ParameterSet& b) {
    using text::format_double;
    std::string out = "quantity,value_a,value_b,difference,ratio\n";
    auto row = [&out](const std::string& name, double va, double vb) {
        out += name + "," + format_double(va) + "," + format_double(vb) + "," +
               format_double(vb - va) + "," + (va != 0.0 ? format_double(vb / va) : "") + "\n";
    };

    row("P_b", a.blade.potential, b.blade.potential);
    row("P_p", a.petiole.potential, b.petiole.potential);
    row("P_e", a.pith.potential, b.pith.potential);
    row("P_c", a.ring_potential, b.ring_potential);
    row("R", a.production.resistance, b.production.resistance);
    row("S_p", a.production.projection_area, b.production.projection_area);
    row("E", a.production.e_potential, b.production.e_potential);
    row("Q_s", a.seed_mass, b.seed_mass);
    row("T_f", a.blade_functional_time, b.blade_functional_time);
    row("alpha_b", a.blade.shape.alpha, b.blade.shape.alpha);
    row("beta_b", a.blade.shape.beta, b.blade.shape.beta);
    row("T_b", a.blade.shape.expansion_time, b.blade.shape.expansion_time);
    row("alpha_p", a.petiole.shape.alpha, b.petiole.shape.alpha);
    row("beta_p", a.petiole.shape.beta, b.petiole.shape.beta);
    row("T_p", a.petiole.shape.expansion_time, b.petiole.shape.expansion_time);
    row("alpha_e", a.pith.shape.alpha, b.pith.shape.alpha);
    row("beta_e", a.pith.shape.beta, b.pith.shape.beta);
    row("T_e", a.pith.shape.expansion_time, b.pith.shape.expansion_time);

    struct OrganShapes {
        const char* name;
        const BetaShape* sa;
        const BetaShape* sb;
    };
    for (const auto& [name, sa, sb] :
         {OrganShapes{"blade", &a.blade.shape, &b.blade.shape},
          OrganShapes{"petiole", &a.petiole.shape, &b.petiole.shape},
          OrganShapes{"pith", &a.pith.shape, &b.pith.shape}}) {
        const int max_t = std::max(sa->expansion_time, sb->expansion_time);
        for (int k = 1; k <= max_t; ++k)
            row("f_" + std::string(name) + "(" + std::to_string(k) + ")",
                sink_variation(*sa, k), sink_variation(*sb, k));
    }
    return out;
}

}  // namespace greenlab
