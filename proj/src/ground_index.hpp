// Integer-interned copy of a GroundProgram shared by inference, explanation
// and proof replay. Literal ids are 2 * atom + negated.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "normforge/engine.hpp"

namespace normforge::detail {

using LitId = std::uint32_t;

inline LitId complement(LitId l) { return l ^ 1u; }
inline std::uint32_t atom_of(LitId l) { return l >> 1; }

struct IndexedRule {
    LitId head;
    Strength strength;
    std::span<const LitId> positive;
    std::span<const LitId> naf;
    std::uint32_t instance;  // index into the GroundProgram
};

class GroundIndex {
public:
    explicit GroundIndex(GroundProgram gp);

    GroundIndex(const GroundIndex&) = delete;
    GroundIndex& operator=(const GroundIndex&) = delete;

    const GroundProgram& program() const { return gp_; }
    std::size_t atom_count() const { return atom_keys_.size(); }
    std::size_t literal_count() const { return 2 * atom_keys_.size(); }

    const std::vector<IndexedRule>& rules() const { return rules_; }
    std::span<const std::uint32_t> rules_for(LitId l) const {
        return {rules_for_.data() + rules_for_start_[l], rules_for_start_[l + 1] - rules_for_start_[l]};
    }
    // Rules whose body mentions l, each listed once.
    std::span<const std::uint32_t> occurs_in(LitId l) const {
        return {occurs_in_.data() + occurs_in_start_[l], occurs_in_start_[l + 1] - occurs_in_start_[l]};
    }
    bool is_fact(LitId l) const { return (l & 1u) == 0 && facts_[atom_of(l)] != 0; }
    const std::string& predicate_of(LitId l) const;

    // t overrides s (rule indices into rules()).
    bool overrides(std::uint32_t t, std::uint32_t s) const {
        return gp_.overrides(rules_[t].instance, rules_[s].instance);
    }

    std::optional<LitId> find(const Literal& lit) const;
    Literal literal(LitId l) const;

private:
    // Keys are [predicate, constants...] packed into bytes.
    void append(std::string& key, std::uint32_t v) const;
    std::uint32_t read(const std::string& key, std::size_t pos) const;
    LitId intern(const std::string& key, bool negated);

    GroundProgram gp_;
    unsigned width_ = 2;
    std::vector<std::string> predicates_;
    std::unordered_map<std::string, std::uint32_t> predicate_ids_;
    std::unordered_map<std::string, std::uint32_t> constant_ids_;
    std::unordered_map<std::string, std::uint32_t> atom_ids_;
    std::vector<const std::string*> atom_keys_;
    std::vector<LitId> bodies_;
    std::vector<IndexedRule> rules_;
    std::vector<std::uint32_t> rules_for_start_, rules_for_;
    std::vector<std::uint32_t> occurs_in_start_, occurs_in_;
    std::vector<char> facts_;
};

} // namespace normforge::detail
