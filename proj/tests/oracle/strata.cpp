#include "strata.hpp"

#include <set>

namespace oracle {

using normforge::BodyLiteral;
using normforge::Literal;
using normforge::Rule;
using normforge::Strength;

std::vector<std::vector<Rule>> all_programs(const std::vector<std::string>& predicates, int rules) {
    std::vector<Rule> shapes;
    std::size_t n = predicates.size();
    std::size_t bodies = 1;
    for (std::size_t i = 0; i < n; ++i) bodies *= 3;
    for (const auto& head : predicates) {
        for (std::size_t code = 0; code < bodies; ++code) {
            Rule r;
            r.head = Literal{{head, {}}, false};
            std::size_t c = code;
            for (const auto& p : predicates) {
                auto mode = c % 3;
                c /= 3;
                if (mode == 1) r.body.push_back(BodyLiteral{Literal{{p, {}}, false}, false});
                if (mode == 2) r.body.push_back(BodyLiteral{Literal{{p, {}}, false}, true});
            }
            shapes.push_back(std::move(r));
        }
    }
    std::vector<std::vector<Rule>> out{{}};
    for (int k = 0; k < rules; ++k) {
        std::vector<std::vector<Rule>> next;
        for (const auto& prefix : out)
            for (auto r : shapes) {
                auto program = prefix;
                r.id = "r" + std::to_string(k + 1);
                program.push_back(std::move(r));
                next.push_back(std::move(program));
            }
        out = std::move(next);
    }
    return out;
}

namespace {

std::vector<std::string> predicates_of(const std::vector<Rule>& rules) {
    std::set<std::string> s;
    for (const auto& r : rules) {
        s.insert(r.head.atom.predicate);
        for (const auto& b : r.body) s.insert(b.literal.atom.predicate);
    }
    return {s.begin(), s.end()};
}

}  // namespace

bool has_naf_cycle(const std::vector<Rule>& rules) {
    auto preds = predicates_of(rules);
    std::map<std::string, std::size_t> id;
    for (std::size_t i = 0; i < preds.size(); ++i) id[preds[i]] = i;
    std::size_t n = preds.size();
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (const auto& r : rules)
        for (const auto& b : r.body) reach[id[r.head.atom.predicate]][id[b.literal.atom.predicate]] = true;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (reach[i][k] && reach[k][j]) reach[i][j] = true;
    for (const auto& r : rules)
        for (const auto& b : r.body) {
            if (!b.naf) continue;
            auto h = id[r.head.atom.predicate], t = id[b.literal.atom.predicate];
            if (h == t || reach[t][h]) return true;
        }
    return false;
}

std::optional<std::map<std::string, int>> least_strata(const std::vector<Rule>& rules) {
    auto preds = predicates_of(rules);
    int n = static_cast<int>(preds.size());
    std::vector<std::map<std::string, int>> valid;
    std::vector<int> s(preds.size(), 0);
    for (;;) {
        std::map<std::string, int> m;
        for (std::size_t i = 0; i < preds.size(); ++i) m[preds[i]] = s[i];
        bool ok = true;
        for (const auto& r : rules)
            for (const auto& b : r.body) {
                int h = m[r.head.atom.predicate], t = m[b.literal.atom.predicate];
                if (b.naf ? !(t < h) : !(t <= h)) ok = false;
            }
        if (ok) valid.push_back(std::move(m));
        std::size_t i = 0;
        while (i < s.size() && ++s[i] == n) s[i++] = 0;
        if (i == s.size()) break;
    }
    for (const auto& cand : valid) {
        bool least = true;
        for (const auto& other : valid)
            for (const auto& [p, v] : cand)
                if (other.at(p) < v) least = false;
        if (least) return cand;
    }
    return std::nullopt;
}

}  // namespace oracle
