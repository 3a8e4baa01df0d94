// Grounding and defeasible inference.
//
// Conclusions use four tags per ground literal q:
//   +D  q is a fact, or a strict rule for q has every body literal +D.
//   -D  q cannot be proved definitely.
//   +d  +D q; or ~q is not +D, some strict/defeasible rule for q is
//       applicable, and every applicable rule for ~q is beaten by an
//       applicable rule for q that overrides it (team defeat).
//   -d  q cannot be proved defeasibly.
// A rule is applicable when its positive body literals are +d and its naf
// targets are -d. Defeaters attack and defend but never support.
//
// Negative tags are constructive; literals caught in positive loops are
// refuted through unfounded sets, and anything still open at the fixpoint is
// closed to the negative tags, so every literal of the vocabulary is tagged.
#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "normforge/fact_model.hpp"
#include "normforge/norm_ir.hpp"

namespace normforge {

// Variable-free instantiation of a core program. Instances are stored as
// (schema, binding) pairs; ground rules are materialized on demand.
class GroundProgram {
public:
    GroundProgram() = default;

    std::size_t size() const noexcept { return instances_.size(); }

    const std::vector<Rule>& schemas() const noexcept { return schemas_; }
    const std::vector<std::string>& universe() const noexcept { return universe_; }
    const std::vector<OverridePair>& overrides() const noexcept { return overrides_; }
    const FactBase& facts() const noexcept { return facts_; }

    std::size_t schema_of(std::size_t i) const { return instances_[i].schema; }
    // Constants bound to the schema's variables, in Rule::variables() order.
    std::vector<std::string> binding(std::size_t i) const;
    // Same binding as indices into universe().
    std::span<const std::uint32_t> binding_ids(std::size_t i) const;

    // "r1" for closed rules, "r1[X=a,Y=b]" otherwise (variables sorted).
    std::string rule_id(std::size_t i) const;
    Rule rule(std::size_t i) const;

    // t overrides s when their schemas do.
    bool overrides(std::size_t t, std::size_t s) const;

private:
    friend GroundProgram ground(const CoreProgram& cp, const FactBase& fb);

    struct Instance {
        std::uint32_t schema;
        std::uint32_t offset;
    };

    std::vector<Rule> schemas_;
    std::vector<std::vector<std::string>> schema_vars_;
    std::vector<std::string> universe_;
    std::vector<Instance> instances_;
    std::vector<std::uint32_t> bindings_;
    std::vector<OverridePair> overrides_;
    std::set<std::pair<std::size_t, std::size_t>> schema_overrides_;
    FactBase facts_;
};

// Herbrand grounding over constants(fb) ∪ constants(cp): every schematic rule
// is instantiated for every substitution of its variables.
GroundProgram ground(const CoreProgram& cp, const FactBase& fb);

enum class ProofTag : unsigned char { PlusDelta, MinusDelta, PlusPartial, MinusPartial };

std::string_view to_string(ProofTag tag) noexcept;  // "+D" "-D" "+d" "-d"

class TagSet {
public:
    TagSet() = default;
    TagSet(std::initializer_list<ProofTag> tags) {
        for (auto t : tags) insert(t);
    }

    void insert(ProofTag t) { bits_ |= bit(t); }
    bool contains(ProofTag t) const { return (bits_ & bit(t)) != 0; }
    bool empty() const { return bits_ == 0; }
    std::vector<ProofTag> list() const;

    friend bool operator==(const TagSet&, const TagSet&) = default;

private:
    static unsigned bit(ProofTag t) { return 1u << static_cast<unsigned>(t); }
    unsigned bits_ = 0;
};

std::string format_tags(const TagSet& tags);  // "{-D, +d}"

struct ProofTree {
    Literal literal;
    ProofTag tag = ProofTag::PlusPartial;
    std::string rule;  // ground rule id, "fact", or "naf" for a naf leaf
    std::vector<ProofTree> children;
    std::vector<std::pair<std::string, std::string>> defeated_attackers;   // (attacker, defeater)
    std::vector<std::pair<std::string, std::string>> discarded_attackers;  // (attacker, failed body literal)

    friend bool operator==(const ProofTree&, const ProofTree&) = default;
};

namespace detail {
class GroundIndex;
}

class ConclusionSet {
public:
    ConclusionSet();

    // Tags of every literal (both polarities) of every atom in the ground
    // program and its facts. Built on first use.
    const std::map<Literal, TagSet>& entries() const;

    // Atoms q with both +D q and +D ~q.
    const std::vector<Atom>& inconsistencies() const noexcept { return inconsistencies_; }

    // Derivation step at which a positive tag was first established.
    std::optional<std::size_t> step(const Literal& lit, ProofTag tag) const;

    // Whether `lit` belongs to the grounding vocabulary: known predicate with
    // that arity, every constant in the universe.
    bool in_vocabulary(const Literal& lit) const;

    friend bool operator==(const ConclusionSet& a, const ConclusionSet& b) {
        return a.entries() == b.entries() && a.inconsistencies_ == b.inconsistencies_;
    }

private:
    friend ConclusionSet infer(const GroundProgram& gp);
    friend TagSet query(const ConclusionSet& cs, const Literal& lit);
    friend ProofTree explain(const GroundProgram& gp, const ConclusionSet& cs, const Literal& lit);
    friend bool replay_proof(const GroundProgram& gp, const ConclusionSet& cs, const ProofTree& tree,
                             std::string* why);

    struct Cache;

    std::shared_ptr<const detail::GroundIndex> index_;
    std::vector<TagSet> tags_;  // by literal id
    std::vector<std::size_t> delta_step_;
    std::vector<std::size_t> partial_step_;
    std::vector<Atom> inconsistencies_;
    std::map<std::string, std::set<std::size_t>> arities_;
    std::set<std::string> universe_;
    std::shared_ptr<Cache> cache_;
};

// Throws Error{Stratification} when naf is not stratified.
ConclusionSet infer(const GroundProgram& gp);

// Throws Error{UnknownLiteral} outside the vocabulary.
TagSet query(const ConclusionSet& cs, const Literal& lit);

// Root carries lit's strongest tag (+D over +d). Throws Error{NotProvable}
// unless lit is +D or +d, Error{UnknownLiteral} outside the vocabulary.
ProofTree explain(const GroundProgram& gp, const ConclusionSet& cs, const Literal& lit);

// Re-checks every node's inference condition against cs. On failure returns
// false and, if given, fills `why`.
bool replay_proof(const GroundProgram& gp, const ConclusionSet& cs, const ProofTree& tree,
                  std::string* why = nullptr);

// "<tag> <literal>" lines, sorted by literal text, tags in +D -D +d -d order.
std::string export_conclusions(const ConclusionSet& cs);
std::string export_conclusions_json(const ConclusionSet& cs);

// Indented text, two spaces per depth level.
std::string export_proof(const ProofTree& tree);
std::string export_proof_json(const ProofTree& tree);

} // namespace normforge
