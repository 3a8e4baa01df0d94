// Rule language shared by the fact model, the norm IR and the engine.
//
// Terms are variables or constants; a leading uppercase letter marks a
// variable. Literals carry strong negation, body literals additionally carry
// negation-as-failure. Text syntax (used by exports, --goal and logs):
//
//     pred(c1,c2)      positive literal
//     ~pred(c1)        strongly negated literal
//     pred             zero-arity literal
//
// Constants that are not plain lowercase identifiers are double-quoted.
#pragma once

#include <compare>
#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace normforge {

struct Term {
    enum class Kind : unsigned char { Variable, Constant };

    Kind kind = Kind::Constant;
    std::string name;

    static Term var(std::string n) { return {Kind::Variable, std::move(n)}; }
    static Term constant(std::string n) { return {Kind::Constant, std::move(n)}; }

    bool is_variable() const noexcept { return kind == Kind::Variable; }

    friend bool operator==(const Term&, const Term&) = default;
    friend auto operator<=>(const Term&, const Term&) = default;
};

// True when `name` is spelled like a variable (leading uppercase ASCII letter).
bool looks_like_variable(std::string_view name) noexcept;

// Identifier token: non-empty, no whitespace.
bool is_identifier_token(std::string_view name) noexcept;

struct Atom {
    std::string predicate;
    std::vector<Term> args;

    std::size_t arity() const noexcept { return args.size(); }
    bool is_ground() const noexcept;

    friend bool operator==(const Atom&, const Atom&) = default;
    friend auto operator<=>(const Atom&, const Atom&) = default;
};

struct Literal {
    Atom atom;
    bool negated = false;

    Literal complement() const { return {atom, !negated}; }

    friend bool operator==(const Literal&, const Literal&) = default;
    friend auto operator<=>(const Literal&, const Literal&) = default;
};

struct BodyLiteral {
    Literal literal;
    bool naf = false;

    friend bool operator==(const BodyLiteral&, const BodyLiteral&) = default;
    friend auto operator<=>(const BodyLiteral&, const BodyLiteral&) = default;
};

enum class Strength : unsigned char { Strict, Defeasible, Defeater };

std::string_view to_string(Strength s) noexcept;
// Throws Error{Schema} for anything other than strict|defeasible|defeater.
Strength parse_strength(std::string_view text);

struct Rule {
    std::string id;
    Strength strength = Strength::Defeasible;
    Literal head;
    std::vector<BodyLiteral> body;

    // Variables in first-occurrence order (head, then body).
    std::vector<std::string> variables() const;
    // Sorted, de-duplicated constants appearing anywhere in the rule.
    std::set<std::string> constants() const;

    friend bool operator==(const Rule&, const Rule&) = default;
};

// Returns the name of a variable violating rule safety, or empty when safe.
// Safe: every variable of the head and of each naf literal occurs in some
// positive (non-naf) body literal.
std::string unsafe_variable(const Rule& rule);

std::string format_term(const Term& t);
std::string format_atom(const Atom& a);
std::string format_literal(const Literal& l);
std::string format_body_literal(const BodyLiteral& b);
std::string format_rule(const Rule& r);

// Parses the text syntax above. Identifiers starting uppercase become
// variables. Throws Error{Syntax}.
Literal parse_literal(std::string_view text);

} // namespace normforge
