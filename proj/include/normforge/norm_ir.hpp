// LRML-S: a small LegalRuleML-style XML dialect for norms, its validation, and
// its translation into an executable core program.
//
//   <lrmls jurisdiction="US">
//     <norm id="n1" source="35 USC §112" from="1953-01-01" [to="..."]>
//       <rule id="r1" strength="strict|defeasible|defeater">
//         <head> literal </head>
//         <body> literal* </body>            (optional)
//       </rule>
//     </norm>
//     <override sup="r2" inf="r1"/>
//   </lrmls>
//
//   literal := <atom pred="p"> (<var>X</var> | <const>a</const>)* </atom>
//            | <neg> atom </neg>
//            | <naf> (atom | <neg>) </naf>       (body only)
#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "normforge/date.hpp"
#include "normforge/logic.hpp"

namespace normforge {

struct Norm {
    std::string id;
    Rule rule;
    std::string source;
    std::string jurisdiction;
    Date valid_from;
    std::optional<Date> valid_to;  // exclusive

    // valid_from <= d < valid_to
    bool in_force(const Date& d) const;

    friend bool operator==(const Norm&, const Norm&) = default;
};

using OverridePair = std::pair<std::string, std::string>;  // (superior, inferior)

struct Rulebase {
    std::string jurisdiction;
    std::vector<Norm> norms;
    std::vector<OverridePair> overrides;

    const Norm* find_norm(std::string_view norm_id) const;
    const Norm* find_rule(std::string_view rule_id) const;

    friend bool operator==(const Rulebase&, const Rulebase&) = default;
};

struct CoreProgram {
    std::vector<Rule> rules;
    std::vector<OverridePair> overrides;
    std::map<std::string, std::string> trace;  // rule id -> norm id

    friend bool operator==(const CoreProgram&, const CoreProgram&) = default;
};

struct RuleViolation {
    std::string subject;
    std::string message;
    friend bool operator==(const RuleViolation&, const RuleViolation&) = default;
};

// Throws Error with kind Syntax (XML well-formedness, with line:column),
// Schema, DuplicateId, UnsafeRule, DanglingOverride or InvalidDate.
Rulebase parse_lrmls(std::string_view input);
std::string serialize_lrmls(const Rulebase& rb);

// Single <rule> element, used by the lifecycle log.
Rule parse_rule_xml(std::string_view input);
std::string serialize_rule_xml(const Rule& rule);

// Structural invariants parse_lrmls enforces (unique ids, safety, override
// endpoints, validity intervals). Throws on the first violation.
void check_rulebase_invariants(const Rulebase& rb);

// Arity conflicts, override cycles among rules with complementary heads and
// norms with an empty source citation.
std::vector<RuleViolation> validate_rulebase(const Rulebase& rb);

// The norms in force at `as_of`, overrides restricted to surviving rules.
Rulebase restrict_in_force(const Rulebase& rb, const Date& as_of);

CoreProgram translate_to_core(const Rulebase& rb, const Date& as_of);

std::string serialize_core(const CoreProgram& cp);
CoreProgram parse_core(std::string_view input);

// Total and injective trace, each traced norm exists in `rb`, carries a
// non-empty provision and a rule equal to the core rule.
bool trace_is_isomorphic(const CoreProgram& cp, const Rulebase& rb);

using StratumMap = std::map<std::string, int>;  // predicate -> stratum

// Minimal strata: positive dependencies <=, naf dependencies <. Throws
// Error{Stratification} whose token lists one naf cycle, comma separated.
StratumMap stratify(std::span<const Rule> rules);
StratumMap stratify(const CoreProgram& cp);

} // namespace normforge
