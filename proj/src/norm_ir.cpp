#include "normforge/norm_ir.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <functional>
#include <set>

#include "normforge/error.hpp"
#include "xml_dom.hpp"

namespace normforge {

bool Norm::in_force(const Date& d) const {
    return valid_from <= d && (!valid_to || d < *valid_to);
}

const Norm* Rulebase::find_norm(std::string_view norm_id) const {
    for (const auto& n : norms)
        if (n.id == norm_id) return &n;
    return nullptr;
}

const Norm* Rulebase::find_rule(std::string_view rule_id) const {
    for (const auto& n : norms)
        if (n.rule.id == rule_id) return &n;
    return nullptr;
}

namespace {

using xml::Node;

// --- structural checks shared by both dialects -----------------------------

std::string trimmed(std::string_view s) {
    auto is_ws = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
    while (!s.empty() && is_ws(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_ws(s.back())) s.remove_suffix(1);
    return std::string(s);
}

[[noreturn]] void schema_error(const std::string& message, const std::string& token) {
    throw Error(ErrorKind::Schema, message, token);
}

void allow_attributes(const Node& n, std::initializer_list<std::string_view> allowed) {
    for (const auto& [k, _] : n.attributes)
        if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
            schema_error("unknown attribute '" + k + "' on " + n.where(), k);
}

std::string required(const Node& n, std::string_view key) {
    const auto* v = n.attribute(key);
    if (!v) schema_error("missing attribute '" + std::string(key) + "' on " + n.where(), std::string(key));
    return *v;
}

std::string required_id(const Node& n, std::string_view key) {
    auto v = required(n, key);
    if (!is_identifier_token(v))
        schema_error("attribute '" + std::string(key) + "' on " + n.where() +
                         " must be an identifier",
                     v);
    return v;
}

void no_text(const Node& n) {
    auto t = trimmed(n.text);
    if (!t.empty()) schema_error("unexpected text '" + t + "' in " + n.where(), t);
}

void no_children(const Node& n) {
    if (!n.children.empty())
        schema_error("unknown element <" + n.children.front().name + "> in " + n.where(),
                     n.children.front().name);
}

[[noreturn]] void unknown_element(const Node& child, const Node& parent) {
    schema_error("unknown element <" + child.name + "> in " + parent.where(), child.name);
}

// --- LRML-S ----------------------------------------------------------------

Atom read_atom(const Node& n) {
    allow_attributes(n, {"pred"});
    no_text(n);
    Atom a;
    a.predicate = required_id(n, "pred");
    for (const auto& c : n.children) {
        allow_attributes(c, {});
        no_children(c);
        auto value = trimmed(c.text);
        if (!is_identifier_token(value))
            schema_error("empty or malformed term in " + c.where(), c.name);
        if (c.name == "var") {
            if (!looks_like_variable(value))
                schema_error("variable '" + value + "' must start with an uppercase letter", value);
            a.args.push_back(Term::var(value));
        } else if (c.name == "const") {
            if (looks_like_variable(value))
                schema_error("constant '" + value + "' must not start with an uppercase letter",
                             value);
            a.args.push_back(Term::constant(value));
        } else {
            unknown_element(c, n);
        }
    }
    return a;
}

const Node& only_child(const Node& n) {
    no_text(n);
    if (n.children.size() != 1)
        schema_error(n.where() + " must contain exactly one element", n.name);
    return n.children.front();
}

Literal read_literal(const Node& n) {
    if (n.name == "atom") return {read_atom(n), false};
    if (n.name == "neg") {
        allow_attributes(n, {});
        const auto& inner = only_child(n);
        if (inner.name != "atom") unknown_element(inner, n);
        return {read_atom(inner), true};
    }
    schema_error("unknown literal element <" + n.name + "> at " + std::to_string(n.line) + ":" +
                     std::to_string(n.column),
                 n.name);
}

BodyLiteral read_body_literal(const Node& n) {
    if (n.name == "naf") {
        allow_attributes(n, {});
        const auto& inner = only_child(n);
        return {read_literal(inner), true};
    }
    return {read_literal(n), false};
}

Rule read_rule(const Node& n) {
    if (n.name != "rule") schema_error("expected <rule>, found " + n.where(), n.name);
    allow_attributes(n, {"id", "strength"});
    no_text(n);
    Rule r;
    r.id = required_id(n, "id");
    r.strength = parse_strength(required(n, "strength"));
    bool have_head = false, have_body = false;
    for (const auto& c : n.children) {
        if (c.name == "head") {
            if (have_head || have_body) schema_error("misplaced <head> in rule " + r.id, r.id);
            allow_attributes(c, {});
            r.head = read_literal(only_child(c));
            have_head = true;
        } else if (c.name == "body") {
            if (!have_head || have_body) schema_error("misplaced <body> in rule " + r.id, r.id);
            allow_attributes(c, {});
            no_text(c);
            for (const auto& lit : c.children) r.body.push_back(read_body_literal(lit));
            have_body = true;
        } else {
            unknown_element(c, n);
        }
    }
    if (!have_head) schema_error("rule " + r.id + " has no <head>", r.id);
    return r;
}

Norm read_norm(const Node& n, const std::string& jurisdiction) {
    allow_attributes(n, {"id", "source", "from", "to"});
    Norm norm;
    norm.id = required_id(n, "id");
    norm.source = required(n, "source");
    norm.jurisdiction = jurisdiction;
    norm.valid_from = Date::parse(required(n, "from"));
    if (const auto* to = n.attribute("to")) norm.valid_to = Date::parse(*to);
    norm.rule = read_rule(only_child(n));
    return norm;
}

void write_atom(xml::Writer& w, const Atom& a) {
    w.open("atom", {{"pred", a.predicate}});
    for (const auto& t : a.args) w.leaf(t.is_variable() ? "var" : "const", t.name);
    w.close("atom");
}

void write_literal(xml::Writer& w, const Literal& l) {
    if (l.negated) w.open("neg");
    write_atom(w, l.atom);
    if (l.negated) w.close("neg");
}

void write_rule(xml::Writer& w, const Rule& r) {
    w.open("rule", {{"id", r.id}, {"strength", std::string(to_string(r.strength))}});
    w.begin_inline();
    w.open("head");
    write_literal(w, r.head);
    w.close("head");
    w.end_inline();
    if (!r.body.empty()) {
        w.begin_inline();
        w.open("body");
        for (const auto& b : r.body) {
            if (b.naf) w.open("naf");
            write_literal(w, b.literal);
            if (b.naf) w.close("naf");
        }
        w.close("body");
        w.end_inline();
    }
    w.close("rule");
}

void check_rule(const Rule& r) {
    if (r.head.atom.predicate.empty()) schema_error("rule " + r.id + " has no head", r.id);
    if (r.strength == Strength::Strict)
        for (const auto& b : r.body)
            if (b.naf)
                schema_error("strict rule " + r.id + " uses negation-as-failure", r.id);
    if (auto v = unsafe_variable(r); !v.empty())
        throw Error(ErrorKind::UnsafeRule,
                    "unsafe rule " + r.id + ": variable " + v +
                        " does not occur in a positive body literal",
                    v);
}

void check_overrides(const std::vector<OverridePair>& overrides,
                     const std::set<std::string>& rule_ids) {
    for (const auto& [sup, inf] : overrides) {
        if (!rule_ids.count(sup))
            throw Error(ErrorKind::DanglingOverride, "override names unknown rule '" + sup + "'", sup);
        if (!rule_ids.count(inf))
            throw Error(ErrorKind::DanglingOverride, "override names unknown rule '" + inf + "'", inf);
        if (sup == inf) schema_error("rule " + sup + " overrides itself", sup);
    }
}

// --- strongly connected components -----------------------------------------

// Tarjan; components come out dependencies-first.
std::vector<std::vector<std::string>> components(
    const std::vector<std::string>& nodes,
    const std::map<std::string, std::vector<std::string>>& succ) {
    std::map<std::string, int> index, low;
    std::set<std::string> on_stack;
    std::vector<std::string> stack;
    std::vector<std::vector<std::string>> out;
    int counter = 0;
    std::function<void(const std::string&)> visit = [&](const std::string& v) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack.insert(v);
        if (auto it = succ.find(v); it != succ.end()) {
            for (const auto& w : it->second) {
                if (!index.count(w)) {
                    visit(w);
                    low[v] = std::min(low[v], low[w]);
                } else if (on_stack.count(w)) {
                    low[v] = std::min(low[v], index[w]);
                }
            }
        }
        if (low[v] == index[v]) {
            std::vector<std::string> comp;
            std::string w;
            do {
                w = stack.back();
                stack.pop_back();
                on_stack.erase(w);
                comp.push_back(w);
            } while (w != v);
            out.push_back(std::move(comp));
        }
    };
    for (const auto& v : nodes)
        if (!index.count(v)) visit(v);
    return out;
}

} // namespace

void check_rulebase_invariants(const Rulebase& rb) {
    std::set<std::string> norm_ids, rule_ids;
    for (const auto& n : rb.norms) {
        if (!norm_ids.insert(n.id).second)
            throw Error(ErrorKind::DuplicateId, "duplicate norm id '" + n.id + "'", n.id);
        if (!rule_ids.insert(n.rule.id).second)
            throw Error(ErrorKind::DuplicateId, "duplicate rule id '" + n.rule.id + "'", n.rule.id);
        if (n.valid_to && !(n.valid_from < *n.valid_to))
            throw Error(ErrorKind::InvalidDate,
                        "norm " + n.id + ": validity interval is empty (" +
                            n.valid_from.to_string() + " >= " + n.valid_to->to_string() + ")",
                        n.id);
        check_rule(n.rule);
    }
    check_overrides(rb.overrides, rule_ids);
}

Rulebase parse_lrmls(std::string_view input) {
    Node root = xml::parse(input);
    if (root.name != "lrmls") schema_error("unknown root element <" + root.name + ">", root.name);
    allow_attributes(root, {"jurisdiction"});
    no_text(root);
    Rulebase rb;
    rb.jurisdiction = required_id(root, "jurisdiction");
    for (const auto& c : root.children) {
        if (c.name == "norm") {
            rb.norms.push_back(read_norm(c, rb.jurisdiction));
        } else if (c.name == "override") {
            allow_attributes(c, {"sup", "inf"});
            no_children(c);
            no_text(c);
            OverridePair p{required_id(c, "sup"), required_id(c, "inf")};
            if (std::find(rb.overrides.begin(), rb.overrides.end(), p) == rb.overrides.end())
                rb.overrides.push_back(std::move(p));
        } else {
            unknown_element(c, root);
        }
    }
    check_rulebase_invariants(rb);
    return rb;
}

std::string serialize_lrmls(const Rulebase& rb) {
    xml::Writer w(true);
    w.open("lrmls", {{"jurisdiction", rb.jurisdiction}});
    for (const auto& n : rb.norms) {
        std::vector<std::pair<std::string, std::string>> attrs{
            {"id", n.id}, {"source", n.source}, {"from", n.valid_from.to_string()}};
        if (n.valid_to) attrs.emplace_back("to", n.valid_to->to_string());
        w.open("norm", std::move(attrs));
        write_rule(w, n.rule);
        w.close("norm");
    }
    for (const auto& [sup, inf] : rb.overrides) w.empty("override", {{"sup", sup}, {"inf", inf}});
    w.close("lrmls");
    return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n" + w.str();
}

Rule parse_rule_xml(std::string_view input) {
    Rule r = read_rule(xml::parse(input));
    check_rule(r);
    return r;
}

std::string serialize_rule_xml(const Rule& rule) {
    xml::Writer w(false);
    write_rule(w, rule);
    return w.str();
}

std::vector<RuleViolation> validate_rulebase(const Rulebase& rb) {
    std::vector<RuleViolation> out;

    std::map<std::string, std::set<std::size_t>> arities;
    for (const auto& n : rb.norms) {
        arities[n.rule.head.atom.predicate].insert(n.rule.head.atom.arity());
        for (const auto& b : n.rule.body) arities[b.literal.atom.predicate].insert(b.literal.atom.arity());
    }
    for (const auto& [pred, set] : arities) {
        if (set.size() < 2) continue;
        std::string msg = "arity conflict";
        bool first = true;
        for (auto a : set) {
            msg += (first ? " " : " vs ") + std::to_string(a);
            first = false;
        }
        out.push_back({pred, msg});
    }

    // Override cycles restricted to pairs of rules with complementary heads.
    std::map<std::string, const Rule*> rules;
    for (const auto& n : rb.norms) rules[n.rule.id] = &n.rule;
    std::map<std::string, std::vector<std::string>> succ;
    std::vector<std::string> nodes;
    for (const auto& [sup, inf] : rb.overrides) {
        auto a = rules.find(sup), b = rules.find(inf);
        if (a == rules.end() || b == rules.end()) continue;
        const auto& ha = a->second->head;
        const auto& hb = b->second->head;
        if (ha.atom.predicate != hb.atom.predicate || ha.atom.arity() != hb.atom.arity() ||
            ha.negated == hb.negated)
            continue;
        succ[sup].push_back(inf);
        nodes.push_back(sup);
        nodes.push_back(inf);
    }
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    std::vector<std::string> cycles;
    for (auto& comp : components(nodes, succ)) {
        if (comp.size() < 2) continue;
        std::sort(comp.begin(), comp.end());
        std::string subject;
        for (const auto& id : comp) subject += (subject.empty() ? "" : ",") + id;
        cycles.push_back(subject);
    }
    std::sort(cycles.begin(), cycles.end());
    for (auto& c : cycles) out.push_back({c, "override cycle"});

    for (const auto& n : rb.norms)
        if (trimmed(n.source).empty()) out.push_back({n.id, "empty source citation"});
    return out;
}

Rulebase restrict_in_force(const Rulebase& rb, const Date& as_of) {
    Rulebase out;
    out.jurisdiction = rb.jurisdiction;
    std::set<std::string> kept;
    for (const auto& n : rb.norms) {
        if (!n.in_force(as_of)) continue;
        kept.insert(n.rule.id);
        out.norms.push_back(n);
    }
    for (const auto& p : rb.overrides)
        if (kept.count(p.first) && kept.count(p.second)) out.overrides.push_back(p);
    return out;
}

CoreProgram translate_to_core(const Rulebase& rb, const Date& as_of) {
    CoreProgram cp;
    Rulebase live = restrict_in_force(rb, as_of);
    for (const auto& n : live.norms) {
        cp.rules.push_back(n.rule);
        cp.trace.emplace(n.rule.id, n.id);
    }
    cp.overrides = std::move(live.overrides);
    return cp;
}

// --- core dialect (RuleML flavoured) ---------------------------------------

namespace {

void write_core_atom(xml::Writer& w, const Atom& a) {
    w.open("Atom");
    w.leaf("Rel", a.predicate);
    for (const auto& t : a.args) w.leaf(t.is_variable() ? "Var" : "Ind", t.name);
    w.close("Atom");
}

void write_core_literal(xml::Writer& w, const Literal& l) {
    if (l.negated) w.open("Neg");
    write_core_atom(w, l.atom);
    if (l.negated) w.close("Neg");
}

Atom read_core_atom(const Node& n) {
    if (n.name != "Atom") unknown_element(n, n);
    allow_attributes(n, {});
    no_text(n);
    if (n.children.empty() || n.children.front().name != "Rel")
        schema_error(n.where() + " must start with <Rel>", n.name);
    Atom a;
    for (std::size_t i = 0; i < n.children.size(); ++i) {
        const auto& c = n.children[i];
        allow_attributes(c, {});
        no_children(c);
        auto value = trimmed(c.text);
        if (i == 0) {
            a.predicate = value;
        } else if (c.name == "Var") {
            a.args.push_back(Term::var(value));
        } else if (c.name == "Ind") {
            a.args.push_back(Term::constant(value));
        } else {
            unknown_element(c, n);
        }
    }
    return a;
}

Literal read_core_literal(const Node& n) {
    if (n.name == "Neg") {
        allow_attributes(n, {});
        return {read_core_atom(only_child(n)), true};
    }
    return {read_core_atom(n), false};
}

} // namespace

std::string serialize_core(const CoreProgram& cp) {
    xml::Writer w(true);
    w.open("RuleML");
    if (cp.rules.empty()) {
        w.empty("Assert");
    } else {
        w.open("Assert");
        for (const auto& r : cp.rules) {
            std::vector<std::pair<std::string, std::string>> attrs{
                {"key", r.id}, {"strength", std::string(to_string(r.strength))}};
            if (auto it = cp.trace.find(r.id); it != cp.trace.end())
                attrs.emplace_back("norm", it->second);
            w.open("Implies", std::move(attrs));
            if (!r.body.empty()) {
                w.begin_inline();
                w.open("if");
                w.open("And");
                for (const auto& b : r.body) {
                    if (b.naf) w.open("Naf");
                    write_core_literal(w, b.literal);
                    if (b.naf) w.close("Naf");
                }
                w.close("And");
                w.close("if");
                w.end_inline();
            }
            w.begin_inline();
            w.open("then");
            write_core_literal(w, r.head);
            w.close("then");
            w.end_inline();
            w.close("Implies");
        }
        w.close("Assert");
    }
    for (const auto& [sup, inf] : cp.overrides) w.empty("Override", {{"sup", sup}, {"inf", inf}});
    w.close("RuleML");
    return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n" + w.str();
}

CoreProgram parse_core(std::string_view input) {
    Node root = xml::parse(input);
    if (root.name != "RuleML") schema_error("unknown root element <" + root.name + ">", root.name);
    allow_attributes(root, {});
    no_text(root);
    CoreProgram cp;
    for (const auto& c : root.children) {
        if (c.name == "Assert") {
            allow_attributes(c, {});
            no_text(c);
            for (const auto& imp : c.children) {
                if (imp.name != "Implies") unknown_element(imp, c);
                allow_attributes(imp, {"key", "strength", "norm"});
                no_text(imp);
                Rule r;
                r.id = required_id(imp, "key");
                r.strength = parse_strength(required(imp, "strength"));
                bool have_head = false;
                for (const auto& part : imp.children) {
                    allow_attributes(part, {});
                    if (part.name == "if") {
                        const auto& conj = only_child(part);
                        if (conj.name != "And") unknown_element(conj, part);
                        no_text(conj);
                        for (const auto& lit : conj.children) {
                            if (lit.name == "Naf") {
                                allow_attributes(lit, {});
                                r.body.push_back({read_core_literal(only_child(lit)), true});
                            } else {
                                r.body.push_back({read_core_literal(lit), false});
                            }
                        }
                    } else if (part.name == "then") {
                        r.head = read_core_literal(only_child(part));
                        have_head = true;
                    } else {
                        unknown_element(part, imp);
                    }
                }
                if (!have_head) schema_error("rule " + r.id + " has no <then>", r.id);
                if (const auto* norm = imp.attribute("norm")) cp.trace.emplace(r.id, *norm);
                cp.rules.push_back(std::move(r));
            }
        } else if (c.name == "Override") {
            allow_attributes(c, {"sup", "inf"});
            no_children(c);
            cp.overrides.emplace_back(required_id(c, "sup"), required_id(c, "inf"));
        } else {
            unknown_element(c, root);
        }
    }
    return cp;
}

bool trace_is_isomorphic(const CoreProgram& cp, const Rulebase& rb) {
    if (cp.trace.size() != cp.rules.size()) return false;
    std::set<std::string> norms_seen;
    for (const auto& r : cp.rules) {
        auto it = cp.trace.find(r.id);
        if (it == cp.trace.end()) return false;
        if (!norms_seen.insert(it->second).second) return false;
        const Norm* n = rb.find_norm(it->second);
        if (!n || n->rule != r || trimmed(n->source).empty()) return false;
    }
    return true;
}

StratumMap stratify(std::span<const Rule> rules) {
    struct Edge {
        std::string to;
        bool naf;
    };
    std::map<std::string, std::vector<Edge>> edges;
    std::vector<std::string> preds;
    auto note = [&](const std::string& p) {
        if (edges.emplace(p, std::vector<Edge>{}).second) preds.push_back(p);
    };
    for (const auto& r : rules) {
        note(r.head.atom.predicate);
        for (const auto& b : r.body) {
            note(b.literal.atom.predicate);
            edges[r.head.atom.predicate].push_back({b.literal.atom.predicate, b.naf});
        }
    }

    std::map<std::string, std::vector<std::string>> succ;
    for (const auto& [p, es] : edges)
        for (const auto& e : es) succ[p].push_back(e.to);
    auto comps = components(preds, succ);

    std::map<std::string, std::size_t> comp_of;
    for (std::size_t i = 0; i < comps.size(); ++i)
        for (const auto& p : comps[i]) comp_of[p] = i;

    // A naf edge inside a component closes a naf cycle.
    for (const auto& p : preds) {
        for (const auto& e : edges[p]) {
            if (!e.naf || comp_of[p] != comp_of[e.to]) continue;
            // Shortest path e.to ~> p inside the component.
            std::map<std::string, std::string> parent;
            std::deque<std::string> queue{e.to};
            parent[e.to] = e.to;
            while (!queue.empty() && !parent.count(p)) {
                auto x = queue.front();
                queue.pop_front();
                for (const auto& f : edges[x]) {
                    if (comp_of[f.to] != comp_of[p] || parent.count(f.to)) continue;
                    parent[f.to] = x;
                    queue.push_back(f.to);
                }
            }
            std::vector<std::string> path;
            if (e.to != p)
                for (std::string x = parent[p]; x != e.to; x = parent[x]) path.push_back(x);
            std::string cycle = p;
            if (e.to != p) {
                cycle += "," + e.to;
                for (auto it = path.rbegin(); it != path.rend(); ++it) cycle += "," + *it;
            }
            throw Error(ErrorKind::Stratification, "negation-as-failure cycle: " + cycle, cycle);
        }
    }

    std::vector<int> comp_stratum(comps.size(), 0);
    for (std::size_t i = 0; i < comps.size(); ++i) {
        int s = 0;
        for (const auto& p : comps[i])
            for (const auto& e : edges[p]) {
                auto j = comp_of[e.to];
                if (j == i) continue;
                s = std::max(s, comp_stratum[j] + (e.naf ? 1 : 0));
            }
        comp_stratum[i] = s;
    }
    StratumMap out;
    for (const auto& p : preds) out[p] = comp_stratum[comp_of[p]];
    return out;
}

StratumMap stratify(const CoreProgram& cp) { return stratify(std::span<const Rule>(cp.rules)); }

} // namespace normforge
