#include "normforge/logic.hpp"

#include <algorithm>
#include <cctype>

#include "normforge/error.hpp"

namespace normforge {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

bool is_bare_char(char c) {
    return !is_space(c) && c != '(' && c != ')' && c != ',' && c != '"' && c != '~';
}

bool needs_quotes(std::string_view name) {
    if (name.empty() || looks_like_variable(name)) return true;
    return !std::all_of(name.begin(), name.end(), is_bare_char);
}

} // namespace

bool looks_like_variable(std::string_view name) noexcept {
    return !name.empty() && name.front() >= 'A' && name.front() <= 'Z';
}

bool is_identifier_token(std::string_view name) noexcept {
    return !name.empty() && std::none_of(name.begin(), name.end(), is_space);
}

bool Atom::is_ground() const noexcept {
    return std::none_of(args.begin(), args.end(), [](const Term& t) { return t.is_variable(); });
}

std::string_view to_string(Strength s) noexcept {
    switch (s) {
    case Strength::Strict: return "strict";
    case Strength::Defeasible: return "defeasible";
    case Strength::Defeater: return "defeater";
    }
    return "defeasible";
}

Strength parse_strength(std::string_view text) {
    if (text == "strict") return Strength::Strict;
    if (text == "defeasible") return Strength::Defeasible;
    if (text == "defeater") return Strength::Defeater;
    throw Error(ErrorKind::Schema, "unknown rule strength '" + std::string(text) + "'",
                std::string(text));
}

std::vector<std::string> Rule::variables() const {
    std::vector<std::string> vars;
    auto visit = [&](const Atom& a) {
        for (const auto& t : a.args)
            if (t.is_variable() && std::find(vars.begin(), vars.end(), t.name) == vars.end())
                vars.push_back(t.name);
    };
    visit(head.atom);
    for (const auto& b : body) visit(b.literal.atom);
    return vars;
}

std::set<std::string> Rule::constants() const {
    std::set<std::string> out;
    auto visit = [&](const Atom& a) {
        for (const auto& t : a.args)
            if (!t.is_variable()) out.insert(t.name);
    };
    visit(head.atom);
    for (const auto& b : body) visit(b.literal.atom);
    return out;
}

std::string unsafe_variable(const Rule& rule) {
    std::set<std::string> bound;
    for (const auto& b : rule.body)
        if (!b.naf)
            for (const auto& t : b.literal.atom.args)
                if (t.is_variable()) bound.insert(t.name);
    auto first_free = [&](const Atom& a) -> std::string {
        for (const auto& t : a.args)
            if (t.is_variable() && !bound.count(t.name)) return t.name;
        return {};
    };
    if (auto v = first_free(rule.head.atom); !v.empty()) return v;
    for (const auto& b : rule.body)
        if (b.naf)
            if (auto v = first_free(b.literal.atom); !v.empty()) return v;
    return {};
}

std::string format_term(const Term& t) {
    if (t.is_variable() || !needs_quotes(t.name)) return t.name;
    std::string out = "\"";
    for (char c : t.name) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    out += '"';
    return out;
}

std::string format_atom(const Atom& a) {
    std::string out = a.predicate;
    if (a.args.empty()) return out;
    out += '(';
    for (std::size_t i = 0; i < a.args.size(); ++i) {
        if (i) out += ',';
        out += format_term(a.args[i]);
    }
    out += ')';
    return out;
}

std::string format_literal(const Literal& l) {
    return (l.negated ? "~" : "") + format_atom(l.atom);
}

std::string format_body_literal(const BodyLiteral& b) {
    return (b.naf ? "naf " : "") + format_literal(b.literal);
}

std::string format_rule(const Rule& r) {
    std::string out = r.id + " [" + std::string(to_string(r.strength)) + "] " +
                      format_literal(r.head);
    if (!r.body.empty()) {
        out += " <= ";
        for (std::size_t i = 0; i < r.body.size(); ++i) {
            if (i) out += ", ";
            out += format_body_literal(r.body[i]);
        }
    }
    return out;
}

namespace {

class LiteralReader {
public:
    explicit LiteralReader(std::string_view text) : text_(text) {}

    Literal read() {
        skip_ws();
        Literal lit;
        if (peek() == '~') {
            lit.negated = true;
            ++pos_;
            skip_ws();
        }
        lit.atom.predicate = bare();
        if (lit.atom.predicate.empty()) fail("expected predicate name");
        skip_ws();
        if (peek() == '(') {
            ++pos_;
            for (;;) {
                skip_ws();
                lit.atom.args.push_back(term());
                skip_ws();
                if (peek() == ',') {
                    ++pos_;
                    continue;
                }
                if (peek() == ')') {
                    ++pos_;
                    break;
                }
                fail("expected ',' or ')'");
            }
        }
        skip_ws();
        if (pos_ != text_.size()) fail("trailing characters");
        return lit;
    }

private:
    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
    void skip_ws() {
        while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
    }
    [[noreturn]] void fail(const std::string& what) const {
        throw Error(ErrorKind::Syntax,
                    "literal '" + std::string(text_) + "': " + what + " at column " +
                        std::to_string(pos_ + 1),
                    std::string(text_));
    }
    std::string bare() {
        std::size_t start = pos_;
        while (pos_ < text_.size() && is_bare_char(text_[pos_])) ++pos_;
        return std::string(text_.substr(start, pos_ - start));
    }
    Term term() {
        if (peek() == '"') {
            ++pos_;
            std::string value;
            for (;;) {
                if (pos_ >= text_.size()) fail("unterminated string");
                char c = text_[pos_++];
                if (c == '"') break;
                if (c == '\\') {
                    if (pos_ >= text_.size()) fail("unterminated escape");
                    c = text_[pos_++];
                }
                value += c;
            }
            return Term::constant(std::move(value));
        }
        std::string name = bare();
        if (name.empty()) fail("expected term");
        return looks_like_variable(name) ? Term::var(std::move(name))
                                         : Term::constant(std::move(name));
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

} // namespace

Literal parse_literal(std::string_view text) { return LiteralReader(text).read(); }

} // namespace normforge
