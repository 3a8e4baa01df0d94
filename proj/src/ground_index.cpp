#include "ground_index.hpp"

#include <algorithm>
#include <set>
#include <utility>

namespace normforge::detail {

namespace {

// Argument slot: constant id, or variable position encoded as ~position.
struct LiteralTemplate {
    std::uint32_t predicate;
    bool negated;
    std::vector<std::int64_t> args;
};

// Fills `start` (size n + 1) and `data` from (bucket, value) pairs.
void build_csr(std::size_t n, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& pairs,
               std::vector<std::uint32_t>& start, std::vector<std::uint32_t>& data) {
    start.assign(n + 1, 0);
    for (const auto& [b, v] : pairs) ++start[b + 1];
    for (std::size_t i = 0; i < n; ++i) start[i + 1] += start[i];
    data.resize(pairs.size());
    std::vector<std::uint32_t> fill(start.begin(), start.end() - 1);
    for (const auto& [b, v] : pairs) data[fill[b]++] = v;
}

} // namespace

void GroundIndex::append(std::string& key, std::uint32_t v) const {
    for (unsigned i = 0; i < width_; ++i) key.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

std::uint32_t GroundIndex::read(const std::string& key, std::size_t pos) const {
    std::uint32_t v = 0;
    for (unsigned i = 0; i < width_; ++i)
        v |= static_cast<std::uint32_t>(static_cast<unsigned char>(key[pos * width_ + i])) << (8 * i);
    return v;
}

GroundIndex::GroundIndex(GroundProgram program) : gp_(std::move(program)) {
    const GroundProgram& gp = gp_;
    const auto& universe = gp.universe();
    for (std::uint32_t i = 0; i < universe.size(); ++i) constant_ids_.emplace(universe[i], i);

    std::set<std::string> names;
    for (const auto& a : gp.facts()) names.insert(a.predicate);
    for (const auto& r : gp.schemas()) {
        names.insert(r.head.atom.predicate);
        for (const auto& b : r.body) names.insert(b.literal.atom.predicate);
    }
    for (const auto& n : names) {
        predicate_ids_.emplace(n, static_cast<std::uint32_t>(predicates_.size()));
        predicates_.push_back(n);
    }
    if (std::max(universe.size(), predicates_.size()) > 0xffffu) width_ = 4;

    std::string key;
    for (const auto& atom : gp.facts()) {
        key.clear();
        append(key, predicate_ids_.at(atom.predicate));
        for (const auto& t : atom.args) append(key, constant_ids_.at(t.name));
        LitId l = intern(key, false);
        facts_.resize(atom_keys_.size(), 0);
        facts_[atom_of(l)] = 1;
    }

    std::vector<std::vector<LiteralTemplate>> templates;  // per schema: head, then body
    for (const auto& rule : gp.schemas()) {
        auto vars = rule.variables();
        auto make = [&](const Literal& lit) {
            LiteralTemplate t{predicate_ids_.at(lit.atom.predicate), lit.negated, {}};
            for (const auto& term : lit.atom.args) {
                if (term.is_variable()) {
                    auto pos = std::find(vars.begin(), vars.end(), term.name) - vars.begin();
                    t.args.push_back(~static_cast<std::int64_t>(pos));
                } else {
                    t.args.push_back(constant_ids_.at(term.name));
                }
            }
            return t;
        };
        std::vector<LiteralTemplate> ts{make(rule.head)};
        for (const auto& b : rule.body) ts.push_back(make(b.literal));
        templates.push_back(std::move(ts));
    }

    struct Offsets {
        std::uint32_t begin, positive, naf;
    };
    std::vector<Offsets> offsets;
    offsets.reserve(gp.size());
    rules_.reserve(gp.size());
    std::vector<LitId> naf;
    for (std::size_t i = 0; i < gp.size(); ++i) {
        auto schema = gp.schema_of(i);
        const auto& rule = gp.schemas()[schema];
        const auto& ts = templates[schema];
        auto bound = gp.binding_ids(i);

        auto instantiate = [&](const LiteralTemplate& t) {
            key.clear();
            append(key, t.predicate);
            for (auto a : t.args)
                append(key, a >= 0 ? static_cast<std::uint32_t>(a) : bound[static_cast<std::size_t>(~a)]);
            return intern(key, t.negated);
        };

        LitId head = instantiate(ts[0]);
        auto begin = static_cast<std::uint32_t>(bodies_.size());
        naf.clear();
        for (std::size_t b = 0; b < rule.body.size(); ++b) {
            LitId l = instantiate(ts[b + 1]);
            if (rule.body[b].naf)
                naf.push_back(l);
            else
                bodies_.push_back(l);
        }
        auto npos = static_cast<std::uint32_t>(bodies_.size()) - begin;
        bodies_.insert(bodies_.end(), naf.begin(), naf.end());
        offsets.push_back({begin, npos, static_cast<std::uint32_t>(naf.size())});
        rules_.push_back({head, rule.strength, {}, {}, static_cast<std::uint32_t>(i)});
    }
    for (std::size_t r = 0; r < rules_.size(); ++r) {
        const auto& o = offsets[r];
        rules_[r].positive = {bodies_.data() + o.begin, o.positive};
        rules_[r].naf = {bodies_.data() + o.begin + o.positive, o.naf};
    }

    facts_.resize(atom_keys_.size(), 0);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> heads, occurrences;
    heads.reserve(rules_.size());
    occurrences.reserve(bodies_.size());
    for (std::uint32_t r = 0; r < rules_.size(); ++r) {
        const auto& ir = rules_[r];
        heads.emplace_back(ir.head, r);
        for (auto l : ir.positive) occurrences.emplace_back(l, r);
        for (auto l : ir.naf) occurrences.emplace_back(l, r);
    }
    std::sort(occurrences.begin(), occurrences.end());
    occurrences.erase(std::unique(occurrences.begin(), occurrences.end()), occurrences.end());
    build_csr(literal_count(), heads, rules_for_start_, rules_for_);
    build_csr(literal_count(), occurrences, occurs_in_start_, occurs_in_);
}

LitId GroundIndex::intern(const std::string& key, bool negated) {
    auto [it, fresh] = atom_ids_.try_emplace(key, static_cast<std::uint32_t>(atom_keys_.size()));
    if (fresh) atom_keys_.push_back(&it->first);
    return 2 * it->second + (negated ? 1u : 0u);
}

const std::string& GroundIndex::predicate_of(LitId l) const { return predicates_[read(*atom_keys_[atom_of(l)], 0)]; }

std::optional<LitId> GroundIndex::find(const Literal& lit) const {
    auto p = predicate_ids_.find(lit.atom.predicate);
    if (p == predicate_ids_.end()) return std::nullopt;
    std::string key;
    append(key, p->second);
    for (const auto& t : lit.atom.args) {
        if (t.is_variable()) return std::nullopt;
        auto c = constant_ids_.find(t.name);
        if (c == constant_ids_.end()) return std::nullopt;
        append(key, c->second);
    }
    auto it = atom_ids_.find(key);
    if (it == atom_ids_.end()) return std::nullopt;
    return 2 * it->second + (lit.negated ? 1u : 0u);
}

Literal GroundIndex::literal(LitId l) const {
    const auto& key = *atom_keys_[atom_of(l)];
    Literal lit;
    lit.negated = (l & 1u) != 0;
    lit.atom.predicate = predicates_[read(key, 0)];
    for (std::size_t i = 1; i < key.size() / width_; ++i)
        lit.atom.args.push_back(Term::constant(gp_.universe()[read(key, i)]));
    return lit;
}

} // namespace normforge::detail
