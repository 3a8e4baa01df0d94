#include "normforge/engine.hpp"

#include <algorithm>
#include <deque>
#include <memory>
#include <mutex>

#include "ground_index.hpp"
#include "json.hpp"
#include "normforge/error.hpp"

namespace normforge {

using detail::complement;
using detail::GroundIndex;
using detail::IndexedRule;
using detail::LitId;

std::string_view to_string(ProofTag tag) noexcept {
    switch (tag) {
    case ProofTag::PlusDelta: return "+D";
    case ProofTag::MinusDelta: return "-D";
    case ProofTag::PlusPartial: return "+d";
    case ProofTag::MinusPartial: return "-d";
    }
    return "?";
}

std::vector<ProofTag> TagSet::list() const {
    std::vector<ProofTag> out;
    for (auto t : {ProofTag::PlusDelta, ProofTag::MinusDelta, ProofTag::PlusPartial, ProofTag::MinusPartial})
        if (contains(t)) out.push_back(t);
    return out;
}

std::string format_tags(const TagSet& tags) {
    std::string out = "{";
    bool first = true;
    for (auto t : tags.list()) {
        if (!first) out += ", ";
        first = false;
        out += to_string(t);
    }
    return out + "}";
}

struct ConclusionSet::Cache {
    std::mutex mutex;
    std::optional<std::map<Literal, TagSet>> entries;
};

ConclusionSet::ConclusionSet() : cache_(std::make_shared<Cache>()) {}

const std::map<Literal, TagSet>& ConclusionSet::entries() const {
    std::lock_guard lock(cache_->mutex);
    if (!cache_->entries) {
        std::map<Literal, TagSet> m;
        for (LitId l = 0; l < tags_.size(); ++l) m.emplace_hint(m.end(), index_->literal(l), tags_[l]);
        cache_->entries = std::move(m);
    }
    return *cache_->entries;
}

std::optional<std::size_t> ConclusionSet::step(const Literal& lit, ProofTag tag) const {
    if (tag != ProofTag::PlusDelta && tag != ProofTag::PlusPartial) return std::nullopt;
    if (!index_) return std::nullopt;
    auto l = index_->find(lit);
    if (!l) return std::nullopt;
    auto v = (tag == ProofTag::PlusDelta ? delta_step_ : partial_step_)[*l];
    if (v == 0) return std::nullopt;
    return v;
}

bool ConclusionSet::in_vocabulary(const Literal& lit) const {
    auto it = arities_.find(lit.atom.predicate);
    if (it == arities_.end() || !it->second.count(lit.atom.args.size())) return false;
    for (const auto& t : lit.atom.args)
        if (t.is_variable() || !universe_.count(t.name)) return false;
    return true;
}

namespace {

enum : char { kOpen = 0, kPlus = 1, kMinus = 2 };

class Solver {
public:
    explicit Solver(const GroundIndex& ix) : ix_(ix), n_(ix.literal_count()) {}

    void run() {
        for (const auto& r : ix_.rules())
            if (r.strength == Strength::Strict && !r.naf.empty())
                throw Error(ErrorKind::Schema, "strict rule with negation as failure: " +
                                                   ix_.program().rule_id(r.instance),
                            ix_.program().rule_id(r.instance));
        compute_delta();
        compute_partial();
    }

    std::vector<std::size_t> take_delta_steps() { return std::move(d_step_); }
    std::vector<std::size_t> take_partial_steps() { return std::move(p_step_); }

    bool delta(LitId l) const { return d_[l] != 0; }
    char partial(LitId l) const { return p_[l]; }

private:
    void compute_delta() {
        d_.assign(n_, 0);
        d_step_.assign(n_, 0);
        std::vector<std::size_t> missing(ix_.rules().size(), 0);
        std::deque<LitId> queue;
        auto prove = [&](LitId l) {
            if (d_[l]) return;
            d_[l] = 1;
            d_step_[l] = ++clock_;
            queue.push_back(l);
        };
        for (LitId l = 0; l < n_; l += 2)
            if (ix_.is_fact(l)) prove(l);
        for (std::uint32_t r = 0; r < ix_.rules().size(); ++r) {
            const auto& ir = ix_.rules()[r];
            if (ir.strength != Strength::Strict) continue;
            missing[r] = ir.positive.size();
            if (missing[r] == 0) prove(ir.head);
        }
        while (!queue.empty()) {
            LitId l = queue.front();
            queue.pop_front();
            for (auto r : ix_.occurs_in(l)) {
                const auto& ir = ix_.rules()[r];
                if (ir.strength != Strength::Strict) continue;
                // A literal may occur more than once in a body.
                auto k = static_cast<std::size_t>(std::count(ir.positive.begin(), ir.positive.end(), l));
                missing[r] -= k;
                if (missing[r] == 0 && k > 0) prove(ir.head);
            }
        }
    }

    bool app(const IndexedRule& r) const {
        for (auto b : r.positive)
            if (p_[b] != kPlus) return false;
        for (auto b : r.naf)
            if (p_[b] != kMinus) return false;
        return true;
    }
    bool disc(const IndexedRule& r) const {
        for (auto b : r.positive)
            if (p_[b] == kMinus) return true;
        for (auto b : r.naf)
            if (p_[b] == kPlus) return true;
        return false;
    }
    bool app_u(const IndexedRule& r) const {
        for (auto b : r.positive)
            if (p_[b] != kPlus) return false;
        for (auto b : r.naf)
            if (p_[b] != kMinus && !u_[b]) return false;
        return true;
    }
    bool disc_u(const IndexedRule& r) const {
        for (auto b : r.positive)
            if (p_[b] == kMinus || u_[b]) return true;
        for (auto b : r.naf)
            if (p_[b] == kPlus) return true;
        return false;
    }

    bool can_prove(LitId q) const {
        if (d_[q]) return true;
        if (d_[complement(q)]) return false;
        bool supported = false;
        for (auto r : ix_.rules_for(q)) {
            const auto& ir = ix_.rules()[r];
            if (ir.strength != Strength::Defeater && app(ir)) {
                supported = true;
                break;
            }
        }
        if (!supported) return false;
        for (auto s : ix_.rules_for(complement(q))) {
            if (disc(ix_.rules()[s])) continue;
            bool beaten = false;
            for (auto t : ix_.rules_for(q)) {
                if (ix_.overrides(t, s) && app(ix_.rules()[t])) {
                    beaten = true;
                    break;
                }
            }
            if (!beaten) return false;
        }
        return true;
    }

    bool can_refute(LitId q) const {
        if (d_[q]) return false;
        if (d_[complement(q)]) return true;
        bool all_discarded = true;
        for (auto r : ix_.rules_for(q)) {
            const auto& ir = ix_.rules()[r];
            if (ir.strength != Strength::Defeater && !disc(ir)) {
                all_discarded = false;
                break;
            }
        }
        if (all_discarded) return true;
        for (auto s : ix_.rules_for(complement(q))) {
            if (!app(ix_.rules()[s])) continue;
            bool unbeaten = true;
            for (auto t : ix_.rules_for(q)) {
                if (ix_.overrides(t, s) && !disc(ix_.rules()[t])) {
                    unbeaten = false;
                    break;
                }
            }
            if (unbeaten) return true;
        }
        return false;
    }

    bool blocked(LitId q) const {
        if (d_[q]) return false;
        if (d_[complement(q)]) return true;
        bool all_discarded = true;
        for (auto r : ix_.rules_for(q)) {
            const auto& ir = ix_.rules()[r];
            if (ir.strength != Strength::Defeater && !disc_u(ir)) {
                all_discarded = false;
                break;
            }
        }
        if (all_discarded) return true;
        for (auto s : ix_.rules_for(complement(q))) {
            if (!app_u(ix_.rules()[s])) continue;
            bool unbeaten = true;
            for (auto t : ix_.rules_for(q)) {
                if (ix_.overrides(t, s) && !disc_u(ix_.rules()[t])) {
                    unbeaten = false;
                    break;
                }
            }
            if (unbeaten) return true;
        }
        return false;
    }

    // Pushes every literal of the current stratum whose status may depend on l.
    template <class Push>
    void dependents(LitId l, Push&& push) const {
        for (auto r : ix_.occurs_in(l)) {
            LitId h = ix_.rules()[r].head;
            push(h);
            push(complement(h));
        }
    }

    void constructive(const std::vector<LitId>& lits, const std::vector<char>& here) {
        std::deque<LitId> queue(lits.begin(), lits.end());
        std::vector<char> queued(n_, 0);
        for (auto l : lits) queued[l] = 1;
        auto push = [&](LitId l) {
            if (here[l] && !queued[l] && p_[l] == kOpen) {
                queued[l] = 1;
                queue.push_back(l);
            }
        };
        while (!queue.empty()) {
            LitId q = queue.front();
            queue.pop_front();
            queued[q] = 0;
            if (p_[q] != kOpen) continue;
            if (can_prove(q)) {
                p_[q] = kPlus;
                p_step_[q] = ++clock_;
            } else if (can_refute(q)) {
                p_[q] = kMinus;
            } else {
                continue;
            }
            dependents(q, push);
        }
    }

    // Greatest set of open literals that stay blocked when assumed refuted.
    std::vector<LitId> unfounded(const std::vector<LitId>& lits, const std::vector<char>& here) {
        std::vector<LitId> open;
        for (auto l : lits)
            if (p_[l] == kOpen) {
                open.push_back(l);
                u_[l] = 1;
            }
        std::deque<LitId> queue(open.begin(), open.end());
        std::vector<char> queued(n_, 0);
        for (auto l : open) queued[l] = 1;
        while (!queue.empty()) {
            LitId q = queue.front();
            queue.pop_front();
            queued[q] = 0;
            if (!u_[q] || blocked(q)) continue;
            u_[q] = 0;
            dependents(q, [&](LitId l) {
                if (here[l] && u_[l] && !queued[l]) {
                    queued[l] = 1;
                    queue.push_back(l);
                }
            });
        }
        std::vector<LitId> out;
        for (auto l : open)
            if (u_[l]) {
                out.push_back(l);
                u_[l] = 0;
            }
        return out;
    }

    void compute_partial() {
        p_.assign(n_, kOpen);
        p_step_.assign(n_, 0);
        u_.assign(n_, 0);
        for (LitId l = 0; l < n_; ++l)
            if (d_[l]) {
                p_[l] = kPlus;
                p_step_[l] = d_step_[l];
            }

        auto strata = stratify(ix_.program().schemas());
        std::map<int, std::vector<LitId>> by_stratum;
        for (LitId l = 0; l < n_; ++l) {
            auto it = strata.find(ix_.predicate_of(l));
            by_stratum[it == strata.end() ? 0 : it->second].push_back(l);
        }
        std::vector<char> here(n_, 0);
        for (const auto& [stratum, lits] : by_stratum) {
            for (auto l : lits) here[l] = 1;
            for (;;) {
                constructive(lits, here);
                auto u = unfounded(lits, here);
                if (u.empty()) break;
                for (auto l : u) p_[l] = kMinus;
            }
            for (auto l : lits) here[l] = 0;
        }
        for (LitId l = 0; l < n_; ++l)
            if (p_[l] == kOpen) p_[l] = kMinus;
    }

    const GroundIndex& ix_;
    std::size_t n_;
    std::size_t clock_ = 0;
    std::vector<char> d_;
    std::vector<std::size_t> d_step_;
    std::vector<char> p_;
    std::vector<std::size_t> p_step_;
    std::vector<char> u_;
};

} // namespace

ConclusionSet infer(const GroundProgram& gp) {
    auto ix = std::make_shared<const GroundIndex>(gp);
    Solver solver(*ix);
    solver.run();
    ConclusionSet cs;
    cs.tags_.resize(ix->literal_count());
    for (LitId l = 0; l < ix->literal_count(); ++l) {
        cs.tags_[l].insert(solver.delta(l) ? ProofTag::PlusDelta : ProofTag::MinusDelta);
        cs.tags_[l].insert(solver.partial(l) == kPlus ? ProofTag::PlusPartial : ProofTag::MinusPartial);
    }
    for (LitId l = 0; l < ix->literal_count(); l += 2)
        if (solver.delta(l) && solver.delta(complement(l))) cs.inconsistencies_.push_back(ix->literal(l).atom);
    std::sort(cs.inconsistencies_.begin(), cs.inconsistencies_.end());
    cs.delta_step_ = solver.take_delta_steps();
    cs.partial_step_ = solver.take_partial_steps();

    for (const auto& a : gp.facts()) cs.arities_[a.predicate].insert(a.args.size());
    for (const auto& r : gp.schemas()) {
        cs.arities_[r.head.atom.predicate].insert(r.head.atom.args.size());
        for (const auto& b : r.body) cs.arities_[b.literal.atom.predicate].insert(b.literal.atom.args.size());
    }
    cs.universe_.insert(gp.universe().begin(), gp.universe().end());
    cs.index_ = std::move(ix);
    return cs;
}

TagSet query(const ConclusionSet& cs, const Literal& lit) {
    if (cs.index_)
        if (auto l = cs.index_->find(lit)) return cs.tags_[*l];
    if (!cs.in_vocabulary(lit))
        throw Error(ErrorKind::UnknownLiteral, "unknown literal: " + format_literal(lit), format_literal(lit));
    return {ProofTag::MinusDelta, ProofTag::MinusPartial};
}

namespace {

// Read access to a conclusion set by literal id.
struct Tags {
    const GroundIndex& ix;
    const std::vector<TagSet>& tags;
    const std::vector<std::size_t>& delta_step;
    const std::vector<std::size_t>& partial_step;

    bool has(LitId l, ProofTag t) const { return tags[l].contains(t); }
    bool has(const Literal& lit, ProofTag t) const {
        if (auto l = ix.find(lit)) return has(*l, t);
        return t == ProofTag::MinusDelta || t == ProofTag::MinusPartial;
    }
    std::size_t step(LitId l, ProofTag t) const { return (t == ProofTag::PlusDelta ? delta_step : partial_step)[l]; }
};

class Explainer {
public:
    explicit Explainer(const Tags& tags) : ix_(tags.ix), cs_(tags) {}

    ProofTree delta(LitId q) const {
        const Literal lit = ix_.literal(q);
        ProofTree node{lit, ProofTag::PlusDelta, {}, {}, {}, {}};
        if (ix_.is_fact(q)) {
            node.rule = "fact";
            return node;
        }
        auto bound = cs_.step(q, ProofTag::PlusDelta);
        for (auto r : ix_.rules_for(q)) {
            const auto& ir = ix_.rules()[r];
            if (ir.strength != Strength::Strict) continue;
            bool ok = true;
            for (auto b : ir.positive) {
                auto s = cs_.step(b, ProofTag::PlusDelta);
                if (s == 0 || s >= bound) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            node.rule = ix_.program().rule_id(ir.instance);
            for (auto b : ir.positive) node.children.push_back(delta(b));
            return node;
        }
        throw Error(ErrorKind::NotProvable, "no strict derivation for " + format_literal(lit), format_literal(lit));
    }

    ProofTree partial(LitId q) const {
        const Literal lit = ix_.literal(q);
        if (cs_.has(q, ProofTag::PlusDelta)) {
            ProofTree node = delta(q);
            node.tag = ProofTag::PlusPartial;
            return node;
        }
        ProofTree node{lit, ProofTag::PlusPartial, {}, {}, {}, {}};
        auto bound = cs_.step(q, ProofTag::PlusPartial);
        for (auto r : ix_.rules_for(q)) {
            const auto& ir = ix_.rules()[r];
            if (ir.strength == Strength::Defeater || !applicable(ir)) continue;
            bool earlier = true;
            for (auto b : ir.positive)
                if (cs_.step(b, ProofTag::PlusPartial) >= bound) {
                    earlier = false;
                    break;
                }
            if (!earlier) continue;
            node.rule = ix_.program().rule_id(ir.instance);
            for (auto b : ir.positive) node.children.push_back(partial(b));
            for (auto b : ir.naf) node.children.push_back({ix_.literal(b), ProofTag::MinusPartial, "naf", {}, {}, {}});
            break;
        }
        if (node.rule.empty())
            throw Error(ErrorKind::NotProvable, "no defeasible derivation for " + format_literal(lit),
                        format_literal(lit));
        for (auto s : ix_.rules_for(complement(q))) {
            const auto& is = ix_.rules()[s];
            auto sid = ix_.program().rule_id(is.instance);
            if (auto failed = discarding(is)) {
                node.discarded_attackers.emplace_back(sid, format_literal(*failed));
                continue;
            }
            for (auto t : ix_.rules_for(q)) {
                if (ix_.overrides(t, s) && applicable(ix_.rules()[t])) {
                    node.defeated_attackers.emplace_back(sid, ix_.program().rule_id(ix_.rules()[t].instance));
                    break;
                }
            }
        }
        return node;
    }

private:
    bool applicable(const IndexedRule& r) const {
        for (auto b : r.positive)
            if (!cs_.has(b, ProofTag::PlusPartial)) return false;
        for (auto b : r.naf)
            if (!cs_.has(b, ProofTag::MinusPartial)) return false;
        return true;
    }
    std::optional<Literal> discarding(const IndexedRule& r) const {
        for (auto b : r.positive)
            if (cs_.has(b, ProofTag::MinusPartial)) return ix_.literal(b);
        for (auto b : r.naf)
            if (cs_.has(b, ProofTag::PlusPartial)) return ix_.literal(b);
        return std::nullopt;
    }

    const GroundIndex& ix_;
    const Tags& cs_;
};

} // namespace

namespace {

const GroundIndex& index_for(const GroundProgram& gp, const std::shared_ptr<const GroundIndex>& ix) {
    if (!ix || ix->program().size() != gp.size() || ix->program().universe() != gp.universe())
        throw Error(ErrorKind::Precondition, "conclusions were not inferred from this program");
    return *ix;
}

} // namespace

ProofTree explain(const GroundProgram& gp, const ConclusionSet& cs, const Literal& lit) {
    auto tags = query(cs, lit);
    if (!tags.contains(ProofTag::PlusPartial))
        throw Error(ErrorKind::NotProvable, "not provable: " + format_literal(lit), format_literal(lit));
    const auto& ix = index_for(gp, cs.index_);
    auto q = ix.find(lit);
    if (!q) throw Error(ErrorKind::UnknownLiteral, "unknown literal: " + format_literal(lit), format_literal(lit));
    Tags view{ix, cs.tags_, cs.delta_step_, cs.partial_step_};
    if (tags.contains(ProofTag::PlusDelta)) return Explainer(view).delta(*q);
    return Explainer(view).partial(*q);
}

namespace {

class Replayer {
public:
    explicit Replayer(const Tags& tags) : ix_(tags.ix), cs_(tags) {}

    bool check(const ProofTree& node, std::string& why) const {
        const auto text = format_literal(node.literal);
        auto fail = [&](const std::string& msg) {
            why = text + ": " + msg;
            return false;
        };
        if (!cs_.has(node.literal, node.tag)) return fail("tag " + std::string(to_string(node.tag)) + " not concluded");
        if (node.rule == "naf") {
            if (node.tag != ProofTag::MinusPartial || !node.children.empty()) return fail("malformed naf leaf");
            return true;
        }
        auto q = ix_.find(node.literal);
        if (!q) return fail("literal not in the ground program");
        if (node.rule == "fact") {
            if (!ix_.is_fact(*q)) return fail("not a fact");
            if (!node.children.empty()) return fail("fact with premises");
            return true;
        }
        const IndexedRule* rule = nullptr;
        for (auto r : ix_.rules_for(*q))
            if (ix_.program().rule_id(ix_.rules()[r].instance) == node.rule) {
                rule = &ix_.rules()[r];
            }
        if (!rule) return fail("no rule " + node.rule + " for this literal");

        bool delta_mode = node.tag == ProofTag::PlusDelta ||
                          (rule->strength == Strength::Strict && rule->naf.empty() &&
                           std::all_of(node.children.begin(), node.children.end(),
                                       [](const ProofTree& c) { return c.tag == ProofTag::PlusDelta; }));
        if (delta_mode) {
            if (rule->strength != Strength::Strict) return fail("definite step through a non-strict rule");
            if (node.children.size() != rule->positive.size()) return fail("premise count mismatch");
            for (std::size_t i = 0; i < rule->positive.size(); ++i) {
                const auto& c = node.children[i];
                if (c.literal != ix_.literal(rule->positive[i]) || c.tag != ProofTag::PlusDelta)
                    return fail("premise " + std::to_string(i) + " mismatch");
                if (!check(c, why)) return false;
            }
            return true;
        }

        if (rule->strength == Strength::Defeater) return fail("defeaters give no support");
        if (cs_.has(node.literal.complement(), ProofTag::PlusDelta)) return fail("complement is definite");
        if (node.children.size() != rule->positive.size() + rule->naf.size()) return fail("premise count mismatch");
        for (std::size_t i = 0; i < rule->positive.size(); ++i) {
            const auto& c = node.children[i];
            if (c.literal != ix_.literal(rule->positive[i]) || c.tag != ProofTag::PlusPartial)
                return fail("premise " + std::to_string(i) + " mismatch");
            if (!check(c, why)) return false;
        }
        for (std::size_t i = 0; i < rule->naf.size(); ++i) {
            const auto& c = node.children[rule->positive.size() + i];
            if (c.literal != ix_.literal(rule->naf[i]) || c.tag != ProofTag::MinusPartial || c.rule != "naf")
                return fail("naf premise " + std::to_string(i) + " mismatch");
            if (!check(c, why)) return false;
        }
        for (auto s : ix_.rules_for(complement(*q))) {
            const auto& is = ix_.rules()[s];
            auto sid = ix_.program().rule_id(is.instance);
            if (answered(*q, s, sid, node)) continue;
            return fail("attacker " + sid + " not answered");
        }
        return true;
    }

private:
    bool answered(LitId q, std::uint32_t s, const std::string& sid, const ProofTree& node) const {
        const auto& is = ix_.rules()[s];
        for (const auto& [attacker, lit_text] : node.discarded_attackers) {
            if (attacker != sid) continue;
            for (auto b : is.positive)
                if (format_literal(ix_.literal(b)) == lit_text &&
                    cs_.has(ix_.literal(b), ProofTag::MinusPartial))
                    return true;
            for (auto b : is.naf)
                if (format_literal(ix_.literal(b)) == lit_text && cs_.has(ix_.literal(b), ProofTag::PlusPartial))
                    return true;
        }
        for (const auto& [attacker, defender] : node.defeated_attackers) {
            if (attacker != sid) continue;
            for (auto t : ix_.rules_for(q)) {
                const auto& it = ix_.rules()[t];
                if (ix_.program().rule_id(it.instance) != defender || !ix_.overrides(t, s)) continue;
                bool app = true;
                for (auto b : it.positive) app = app && cs_.has(ix_.literal(b), ProofTag::PlusPartial);
                for (auto b : it.naf) app = app && cs_.has(ix_.literal(b), ProofTag::MinusPartial);
                if (app) return true;
            }
        }
        return false;
    }

    const GroundIndex& ix_;
    const Tags& cs_;
};

} // namespace

bool replay_proof(const GroundProgram& gp, const ConclusionSet& cs, const ProofTree& tree, std::string* why) {
    const auto& ix = index_for(gp, cs.index_);
    Tags view{ix, cs.tags_, cs.delta_step_, cs.partial_step_};
    std::string reason;
    bool ok = Replayer(view).check(tree, reason);
    if (!ok && why) *why = reason;
    return ok;
}

namespace {

std::vector<std::pair<std::string, TagSet>> sorted_entries(const ConclusionSet& cs) {
    std::vector<std::pair<std::string, TagSet>> out;
    out.reserve(cs.entries().size());
    for (const auto& [lit, tags] : cs.entries()) out.emplace_back(format_literal(lit), tags);
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
}

void proof_lines(const ProofTree& t, int depth, std::string& out) {
    std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
    out += pad + std::string(to_string(t.tag)) + " " + format_literal(t.literal);
    if (t.rule == "fact" || t.rule == "naf")
        out += " " + t.rule;
    else
        out += " via " + t.rule;
    out += "\n";
    for (const auto& c : t.children) proof_lines(c, depth + 1, out);
    for (const auto& [s, d] : t.defeated_attackers) out += pad + "  attacker " + s + " defeated by " + d + "\n";
    for (const auto& [s, l] : t.discarded_attackers) out += pad + "  attacker " + s + " discarded at " + l + "\n";
}

nlohmann::ordered_json proof_json(const ProofTree& t) {
    nlohmann::ordered_json j;
    j["literal"] = format_literal(t.literal);
    j["tag"] = std::string(to_string(t.tag));
    j["rule"] = t.rule;
    j["children"] = nlohmann::ordered_json::array();
    for (const auto& c : t.children) j["children"].push_back(proof_json(c));
    j["defeated"] = nlohmann::ordered_json::array();
    for (const auto& [s, d] : t.defeated_attackers) j["defeated"].push_back({s, d});
    j["discarded"] = nlohmann::ordered_json::array();
    for (const auto& [s, l] : t.discarded_attackers) j["discarded"].push_back({s, l});
    return j;
}

} // namespace

std::string export_conclusions(const ConclusionSet& cs) {
    std::string out;
    for (const auto& [text, tags] : sorted_entries(cs))
        for (auto t : tags.list()) out += std::string(to_string(t)) + " " + text + "\n";
    return out;
}

std::string export_conclusions_json(const ConclusionSet& cs) {
    nlohmann::ordered_json j;
    j["conclusions"] = nlohmann::ordered_json::array();
    for (const auto& [text, tags] : sorted_entries(cs)) {
        nlohmann::ordered_json e;
        e["literal"] = text;
        e["tags"] = nlohmann::ordered_json::array();
        for (auto t : tags.list()) e["tags"].push_back(std::string(to_string(t)));
        j["conclusions"].push_back(std::move(e));
    }
    j["inconsistencies"] = nlohmann::ordered_json::array();
    for (const auto& a : cs.inconsistencies()) j["inconsistencies"].push_back(format_atom(a));
    return j.dump(2) + "\n";
}

std::string export_proof(const ProofTree& tree) {
    std::string out;
    proof_lines(tree, 0, out);
    return out;
}

std::string export_proof_json(const ProofTree& tree) { return proof_json(tree).dump(2) + "\n"; }

} // namespace normforge
