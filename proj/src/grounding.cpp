#include <algorithm>
#include <map>

#include "normforge/engine.hpp"
#include "normforge/error.hpp"

namespace normforge {

std::vector<std::string> GroundProgram::binding(std::size_t i) const {
    std::vector<std::string> out;
    for (auto c : binding_ids(i)) out.push_back(universe_[c]);
    return out;
}

std::span<const std::uint32_t> GroundProgram::binding_ids(std::size_t i) const {
    const auto& inst = instances_[i];
    return {bindings_.data() + inst.offset, schema_vars_[inst.schema].size()};
}

std::string GroundProgram::rule_id(std::size_t i) const {
    const auto& inst = instances_[i];
    const auto& vars = schema_vars_[inst.schema];
    std::string id = schemas_[inst.schema].id;
    if (vars.empty()) return id;
    std::vector<std::pair<std::string, std::string>> named;
    auto ids = binding_ids(i);
    for (std::size_t v = 0; v < vars.size(); ++v) named.emplace_back(vars[v], universe_[ids[v]]);
    std::sort(named.begin(), named.end());
    id += '[';
    for (std::size_t v = 0; v < named.size(); ++v) {
        if (v) id += ',';
        id += named[v].first + "=" + format_term(Term::constant(named[v].second));
    }
    id += ']';
    return id;
}

Rule GroundProgram::rule(std::size_t i) const {
    const auto& inst = instances_[i];
    const auto& vars = schema_vars_[inst.schema];
    auto ids = binding_ids(i);
    auto subst = [&](Atom a) {
        for (auto& t : a.args) {
            if (!t.is_variable()) continue;
            auto pos = static_cast<std::size_t>(std::find(vars.begin(), vars.end(), t.name) - vars.begin());
            t = Term::constant(universe_[ids[pos]]);
        }
        return a;
    };
    Rule r = schemas_[inst.schema];
    r.id = rule_id(i);
    r.head.atom = subst(r.head.atom);
    for (auto& b : r.body) b.literal.atom = subst(b.literal.atom);
    return r;
}

bool GroundProgram::overrides(std::size_t t, std::size_t s) const {
    return schema_overrides_.count({instances_[t].schema, instances_[s].schema}) != 0;
}

GroundProgram ground(const CoreProgram& cp, const FactBase& fb) {
    GroundProgram gp;
    std::set<std::string> universe;
    for (const auto& a : fb)
        for (const auto& t : a.args) universe.insert(t.name);
    for (const auto& r : cp.rules) {
        auto cs = r.constants();
        universe.insert(cs.begin(), cs.end());
    }
    gp.universe_.assign(universe.begin(), universe.end());
    gp.schemas_ = cp.rules;
    gp.overrides_ = cp.overrides;
    gp.facts_ = fb;

    std::map<std::string, std::size_t> schema_index;
    for (std::size_t s = 0; s < cp.rules.size(); ++s) schema_index.emplace(cp.rules[s].id, s);
    for (const auto& [sup, inf] : cp.overrides) {
        auto a = schema_index.find(sup), b = schema_index.find(inf);
        if (a != schema_index.end() && b != schema_index.end())
            gp.schema_overrides_.emplace(a->second, b->second);
    }

    const auto n = static_cast<std::uint32_t>(gp.universe_.size());
    for (std::size_t s = 0; s < cp.rules.size(); ++s) {
        auto vars = cp.rules[s].variables();
        const std::size_t k = vars.size();
        gp.schema_vars_.push_back(std::move(vars));
        if (k > 0 && n == 0) continue;
        // Odometer over universe^k.
        std::vector<std::uint32_t> digits(k, 0);
        for (;;) {
            gp.instances_.push_back(
                {static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(gp.bindings_.size())});
            gp.bindings_.insert(gp.bindings_.end(), digits.begin(), digits.end());
            std::size_t pos = k;
            while (pos > 0) {
                if (++digits[pos - 1] < n) break;
                digits[pos - 1] = 0;
                --pos;
            }
            if (pos == 0) break;
        }
    }
    return gp;
}

} // namespace normforge
