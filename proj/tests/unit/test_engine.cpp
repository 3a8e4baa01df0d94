#include <algorithm>
#include <random>
#include <thread>

#include "doctest.h"
#include "json.hpp"
#include "oracle.hpp"
#include "random_programs.hpp"
#include "test_support.hpp"

using namespace normforge;
using testing::caught;

namespace {

constexpr auto S = Strength::Strict;
constexpr auto D = Strength::Defeasible;
constexpr auto F = Strength::Defeater;

// Body entries starting with "naf " are negation-as-failure.
Rule rule(std::string id, Strength s, const char* head, std::vector<std::string> body = {}) {
    Rule r{std::move(id), s, parse_literal(head), {}};
    for (const auto& b : body) {
        bool naf = b.rfind("naf ", 0) == 0;
        r.body.push_back({parse_literal(naf ? b.substr(4) : b), naf});
    }
    return r;
}

FactBase facts(std::vector<const char*> atoms) {
    FactBase fb;
    for (auto a : atoms) fb.insert(parse_literal(a).atom);
    return fb;
}

TagSet tags_of(const ConclusionSet& cs, const char* lit) { return query(cs, parse_literal(lit)); }

const TagSet kNone{ProofTag::MinusDelta, ProofTag::MinusPartial};
const TagSet kDefeasible{ProofTag::MinusDelta, ProofTag::PlusPartial};
const TagSet kDefinite{ProofTag::PlusDelta, ProofTag::PlusPartial};

struct Tweety {
    CoreProgram cp{{rule("r1", D, "flies(t)", {"bird(t)"}), rule("r2", D, "~flies(t)", {"penguin(t)"})},
                   {{"r2", "r1"}},
                   {}};
    FactBase fb = facts({"bird(t)", "penguin(t)"});
    GroundProgram gp = ground(cp, fb);
    ConclusionSet cs = infer(gp);
};

// Checks the engine against the oracle and returns the engine's result.
ConclusionSet checked(const CoreProgram& cp, const FactBase& fb) {
    auto cs = infer(ground(cp, fb));
    CHECK(oracle::from_engine(cs) == oracle::conclusions(cp, fb));
    return cs;
}

} // namespace

TEST_CASE("grounding instantiates over the Herbrand universe") {
    CoreProgram cp{{rule("r1", D, "p(X)", {"q(X)"})}, {}, {}};
    auto one = ground(cp, facts({"q(a)"}));
    CHECK(one.size() == 1);
    CHECK(one.universe() == std::vector<std::string>{"a"});
    CHECK(one.rule_id(0) == "r1[X=a]");
    CHECK(format_rule(one.rule(0)) == "r1[X=a] [defeasible] p(a) <= q(a)");

    auto two = ground(cp, facts({"q(a)", "s(b)"}));
    CHECK(two.size() == 2);

    CoreProgram closed{{rule("r1", D, "p(a)", {"q(a)"})}, {}, {}};
    CHECK(ground(closed, facts({"q(a)", "s(b)", "s(c)"})).size() == 1);
    CHECK(ground(closed, {}).rule_id(0) == "r1");

    CHECK(ground(cp, {}).size() == 0);
}

TEST_CASE("ground rule ids list variables sorted") {
    CoreProgram cp{{rule("r1", D, "p(Y,X)", {"q(Y,X)"})}, {}, {}};
    auto gp = ground(cp, facts({"q(b,a)"}));
    REQUIRE(gp.size() == 4);
    std::set<std::string> ids;
    for (std::size_t i = 0; i < gp.size(); ++i) ids.insert(gp.rule_id(i));
    CHECK(ids == std::set<std::string>{"r1[X=a,Y=a]", "r1[X=a,Y=b]", "r1[X=b,Y=a]", "r1[X=b,Y=b]"});
    CHECK(gp.binding(0).size() == 2);
}

TEST_CASE("ground overrides follow the schemas") {
    CoreProgram cp{{rule("r1", D, "p(X)", {"q(X)"}), rule("r2", D, "~p(X)", {"q(X)"})}, {{"r2", "r1"}}, {}};
    auto gp = ground(cp, facts({"q(a)", "q(b)"}));
    REQUIRE(gp.size() == 4);
    for (std::size_t t = 0; t < gp.size(); ++t)
        for (std::size_t s = 0; s < gp.size(); ++s)
            CHECK(gp.overrides(t, s) == (gp.schema_of(t) == 1 && gp.schema_of(s) == 0));
}

TEST_CASE("nothing derivable") {
    auto cs = checked({{rule("r1", D, "p(a)", {"s(a)"})}, {}, {}}, {});
    CHECK(tags_of(cs, "p(a)") == kNone);
    CHECK(tags_of(cs, "~p(a)") == kNone);
    CHECK(tags_of(cs, "s(a)") == kNone);
}

TEST_CASE("Tweety") {
    Tweety t;
    CHECK(tags_of(t.cs, "~flies(t)") == kDefeasible);
    CHECK(tags_of(t.cs, "flies(t)") == kNone);
    CHECK(tags_of(t.cs, "bird(t)") == kDefinite);
    CHECK(tags_of(t.cs, "penguin(t)") == kDefinite);
    CHECK(t.cs.inconsistencies().empty());
    CHECK(oracle::from_engine(t.cs) == oracle::conclusions(t.cp, t.fb));
    CHECK(t.cs.step(parse_literal("bird(t)"), ProofTag::PlusDelta).has_value());
    CHECK_FALSE(t.cs.step(parse_literal("flies(t)"), ProofTag::PlusPartial).has_value());
    CHECK(*t.cs.step(parse_literal("~flies(t)"), ProofTag::PlusPartial) >
          *t.cs.step(parse_literal("penguin(t)"), ProofTag::PlusPartial));
}

TEST_CASE("Tweety without the override is ambiguous") {
    Tweety t;
    t.cp.overrides.clear();
    auto cs = checked(t.cp, t.fb);
    CHECK(tags_of(cs, "flies(t)") == kNone);
    CHECK(tags_of(cs, "~flies(t)") == kNone);
}

TEST_CASE("naf over an underivable literal") {
    CoreProgram cp{{rule("r1", D, "novel(c1)", {"naf anticipated(c1)"}), rule("r2", D, "anticipated(c1)", {"prior(c1)"})}, {}, {}};
    auto cs = checked(cp, facts({"prior_doc(d1)"}));
    CHECK(tags_of(cs, "anticipated(c1)") == kNone);
    CHECK(tags_of(cs, "novel(c1)") == kDefeasible);

    auto blocked = checked(cp, facts({"prior_doc(d1)", "prior(c1)"}));
    CHECK(tags_of(blocked, "anticipated(c1)") == kDefeasible);
    CHECK(tags_of(blocked, "novel(c1)") == kNone);
}

TEST_CASE("team defeat") {
    CoreProgram cp{{rule("r1", D, "p", {"a"}), rule("r2", D, "p", {"b"}), rule("s1", D, "~p", {"c"}),
                    rule("s2", D, "~p", {"d"})},
                   {{"r1", "s1"}, {"r2", "s2"}},
                   {}};
    auto fb = facts({"a", "b", "c", "d"});
    CHECK(tags_of(checked(cp, fb), "p") == kDefeasible);

    cp.overrides.pop_back();
    auto cs = checked(cp, fb);
    CHECK(tags_of(cs, "p") == kNone);
    CHECK(tags_of(cs, "~p") == kNone);
}

TEST_CASE("defeaters attack but never support") {
    CoreProgram cp{{rule("r1", D, "p", {"a"}), rule("d1", F, "~p", {"a"})}, {}, {}};
    auto fb = facts({"a"});
    auto cs = checked(cp, fb);
    CHECK(tags_of(cs, "p") == kNone);
    CHECK(tags_of(cs, "~p") == kNone);

    cp.overrides = {{"r1", "d1"}};
    CHECK(tags_of(checked(cp, fb), "p") == kDefeasible);

    CoreProgram lone{{rule("d1", F, "p", {"a"})}, {}, {}};
    CHECK(tags_of(checked(lone, fb), "p") == kNone);
}

TEST_CASE("a defeater can defend against an attacker") {
    CoreProgram cp{{rule("r1", D, "p", {"a"}), rule("s1", D, "~p", {"a"}), rule("t1", F, "p", {"a"})},
                   {{"t1", "s1"}},
                   {}};
    auto cs = checked(cp, facts({"a"}));
    CHECK(tags_of(cs, "p") == kDefeasible);
    CHECK(tags_of(cs, "~p") == kNone);
}

TEST_CASE("discarded attackers do not block") {
    CoreProgram cp{{rule("r1", D, "p", {"a"}), rule("s1", D, "~p", {"b"})}, {}, {}};
    CHECK(tags_of(checked(cp, facts({"a"})), "p") == kDefeasible);
}

TEST_CASE("definite conclusions override defeasible ones") {
    CoreProgram cp{{rule("r1", D, "p", {"a"}), rule("s1", S, "~p", {"a"})}, {{"r1", "s1"}}, {}};
    auto cs = checked(cp, facts({"a"}));
    CHECK(tags_of(cs, "~p") == kDefinite);
    CHECK(tags_of(cs, "p") == kNone);
}

TEST_CASE("strict chains") {
    CoreProgram cp{{rule("r1", S, "q(X)", {"p(X)"}), rule("r2", S, "s(X)", {"q(X)"})}, {}, {}};
    auto cs = checked(cp, facts({"p(a)"}));
    CHECK(tags_of(cs, "s(a)") == kDefinite);
    CHECK(*cs.step(parse_literal("s(a)"), ProofTag::PlusDelta) > *cs.step(parse_literal("q(a)"), ProofTag::PlusDelta));
}

TEST_CASE("repeated body literals count once") {
    CoreProgram cp{{rule("r1", S, "~q", {"p", "q", "p"}), rule("r2", D, "s", {"t", "t"}),
                    rule("r3", D, "~s", {"t", "naf u", "naf u"})},
                   {},
                   {}};
    auto cs = checked(cp, facts({"p", "q", "t"}));
    CHECK(tags_of(cs, "~q") == kDefinite);
    CHECK(cs.inconsistencies().size() == 1);
    CHECK(tags_of(cs, "s") == kNone);
}

TEST_CASE("positive loops are refuted") {
    CoreProgram cp{{rule("r1", D, "p", {"q"}), rule("r2", D, "q", {"p"}), rule("r3", D, "s", {"naf p"})}, {}, {}};
    auto cs = checked(cp, facts({"a"}));
    CHECK(tags_of(cs, "p") == kNone);
    CHECK(tags_of(cs, "q") == kNone);
    CHECK(tags_of(cs, "s") == kDefeasible);
}

TEST_CASE("strict conflicts are reported, not resolved") {
    CoreProgram cp{{rule("r1", S, "p(a)", {"x(a)"}), rule("r2", S, "~p(a)", {"x(a)"})}, {}, {}};
    auto cs = checked(cp, facts({"x(a)"}));
    CHECK(tags_of(cs, "p(a)") == kDefinite);
    CHECK(tags_of(cs, "~p(a)") == kDefinite);
    REQUIRE(cs.inconsistencies().size() == 1);
    CHECK(format_atom(cs.inconsistencies()[0]) == "p(a)");
}

TEST_CASE("infer rejects unstratified naf and strict naf") {
    CoreProgram odd{{rule("r1", D, "p", {"naf q"}), rule("r2", D, "q", {"naf p"})}, {}, {}};
    auto e = caught([&] { infer(ground(odd, {})); });
    REQUIRE(e);
    CHECK(e->kind == ErrorKind::Stratification);

    CoreProgram strict{{rule("r1", S, "p", {"naf q"})}, {}, {}};
    e = caught([&] { infer(ground(strict, {})); });
    REQUIRE(e);
    CHECK(e->kind == ErrorKind::Schema);
}

TEST_CASE("query outside the vocabulary") {
    Tweety t;
    for (const char* lit : {"flies(u)", "swims(t)", "flies(t,t)", "flies(X)"}) {
        CAPTURE(lit);
        auto e = caught([&] { query(t.cs, parse_literal(lit)); });
        REQUIRE(e);
        CHECK(e->kind == ErrorKind::UnknownLiteral);
        CHECK_FALSE(t.cs.in_vocabulary(parse_literal(lit)));
    }
}

TEST_CASE("literals in the vocabulary but absent from the grounding") {
    CoreProgram cp{{rule("r1", D, "p(X)", {"q(X)"})}, {}, {}};
    auto cs = infer(ground(cp, facts({"q(a)", "s(b)"})));
    CHECK(tags_of(cs, "~q(b)") == kNone);
    CHECK(cs.in_vocabulary(parse_literal("s(a)")));
    CHECK(tags_of(cs, "s(a)") == kNone);
}

TEST_CASE("explain Tweety") {
    Tweety t;
    auto tree = explain(t.gp, t.cs, parse_literal("~flies(t)"));
    CHECK(format_literal(tree.literal) == "~flies(t)");
    CHECK(tree.tag == ProofTag::PlusPartial);
    CHECK(tree.rule == "r2");
    REQUIRE(tree.children.size() == 1);
    CHECK(format_literal(tree.children[0].literal) == "penguin(t)");
    CHECK(tree.children[0].tag == ProofTag::PlusPartial);
    CHECK(tree.children[0].rule == "fact");
    CHECK(tree.defeated_attackers == std::vector<std::pair<std::string, std::string>>{{"r1", "r2"}});
    CHECK(tree.discarded_attackers.empty());
    CHECK(replay_proof(t.gp, t.cs, tree));

    CHECK(export_proof(tree) == "+d ~flies(t) via r2\n"
                                "  +d penguin(t) fact\n"
                                "  attacker r1 defeated by r2\n");
    auto j = nlohmann::json::parse(export_proof_json(tree));
    CHECK(j["literal"] == "~flies(t)");
    CHECK(j["defeated"][0][0] == "r1");
    CHECK(j["children"][0]["rule"] == "fact");

    auto fact = explain(t.gp, t.cs, parse_literal("bird(t)"));
    CHECK(fact.tag == ProofTag::PlusDelta);
    CHECK(fact.rule == "fact");
    CHECK(fact.children.empty());

    auto e = caught([&] { explain(t.gp, t.cs, parse_literal("flies(t)")); });
    REQUIRE(e);
    CHECK(e->kind == ErrorKind::NotProvable);
    e = caught([&] { explain(t.gp, t.cs, parse_literal("flies(u)")); });
    REQUIRE(e);
    CHECK(e->kind == ErrorKind::UnknownLiteral);
}

TEST_CASE("explain lists discarded attackers and naf leaves") {
    CoreProgram cp{{rule("r1", D, "p", {"a", "naf b"}), rule("s1", D, "~p", {"c"}), rule("rb", D, "b", {"c"})}, {}, {}};
    auto fb = facts({"a"});
    auto gp = ground(cp, fb);
    auto cs = infer(gp);
    auto tree = explain(gp, cs, parse_literal("p"));
    REQUIRE(tree.children.size() == 2);
    CHECK(tree.children[1].rule == "naf");
    CHECK(tree.children[1].tag == ProofTag::MinusPartial);
    CHECK(tree.discarded_attackers == std::vector<std::pair<std::string, std::string>>{{"s1", "c"}});
    CHECK(export_proof(tree) == "+d p via r1\n"
                                "  +d a fact\n"
                                "  -d b naf\n"
                                "  attacker s1 discarded at c\n");
    CHECK(replay_proof(gp, cs, tree));
}

TEST_CASE("explain a strict derivation") {
    CoreProgram cp{{rule("r1", S, "q(X)", {"p(X)"})}, {}, {}};
    auto fb = facts({"p(a)"});
    auto gp = ground(cp, fb);
    auto cs = infer(gp);
    auto tree = explain(gp, cs, parse_literal("q(a)"));
    CHECK(tree.tag == ProofTag::PlusDelta);
    CHECK(tree.rule == "r1[X=a]");
    REQUIRE(tree.children.size() == 1);
    CHECK(tree.children[0].tag == ProofTag::PlusDelta);
    CHECK(replay_proof(gp, cs, tree));
}

TEST_CASE("replay rejects tampered proofs") {
    Tweety t;
    auto tree = explain(t.gp, t.cs, parse_literal("~flies(t)"));
    std::string why;

    auto no_defence = tree;
    no_defence.defeated_attackers.clear();
    CHECK_FALSE(replay_proof(t.gp, t.cs, no_defence, &why));
    CHECK(why == "~flies(t): attacker r1 not answered");

    auto wrong_rule = tree;
    wrong_rule.rule = "r1";
    CHECK_FALSE(replay_proof(t.gp, t.cs, wrong_rule, &why));

    auto wrong_tag = tree;
    wrong_tag.tag = ProofTag::PlusDelta;
    CHECK_FALSE(replay_proof(t.gp, t.cs, wrong_tag, &why));

    auto bad_leaf = tree;
    bad_leaf.children[0].literal = parse_literal("bird(t)");
    CHECK_FALSE(replay_proof(t.gp, t.cs, bad_leaf, &why));

    auto false_root = tree;
    false_root.literal = parse_literal("flies(t)");
    CHECK_FALSE(replay_proof(t.gp, t.cs, false_root, &why));

    Tweety other;
    other.fb = facts({"bird(t)", "penguin(t)", "extra(z)"});
    other.gp = ground(other.cp, other.fb);
    auto e = caught([&] { replay_proof(other.gp, t.cs, tree); });
    REQUIRE(e);
    CHECK(e->kind == ErrorKind::Precondition);
}

TEST_CASE("conclusion exports") {
    Tweety t;
    CHECK(export_conclusions(t.cs) == "+D bird(t)\n"
                                      "+d bird(t)\n"
                                      "-D flies(t)\n"
                                      "-d flies(t)\n"
                                      "+D penguin(t)\n"
                                      "+d penguin(t)\n"
                                      "-D ~bird(t)\n"
                                      "-d ~bird(t)\n"
                                      "-D ~flies(t)\n"
                                      "+d ~flies(t)\n"
                                      "-D ~penguin(t)\n"
                                      "-d ~penguin(t)\n");
    auto j = nlohmann::json::parse(export_conclusions_json(t.cs));
    REQUIRE(j["conclusions"].size() == 6);
    CHECK(j["conclusions"][4]["literal"] == "~flies(t)");
    CHECK(j["conclusions"][4]["tags"] == nlohmann::json::array({"-D", "+d"}));
    CHECK(j["inconsistencies"].empty());
    CHECK(format_tags(kDefeasible) == "{-D, +d}");
}

TEST_CASE("random schematic programs agree with the oracle") {
    std::mt19937 rng(7);
    oracle::RandomLimits lim;
    lim.variables = true;
    lim.constants = 3;
    for (int i = 0; i < 300; ++i) {
        auto rp = oracle::random_program(rng, lim);
        auto cs = infer(ground(rp.program, rp.facts));
        auto expected = oracle::conclusions(rp.program, rp.facts);
        auto got = oracle::from_engine(cs);
        if (got != expected) {
            for (const auto& r : rp.program.rules) MESSAGE(format_rule(r));
            for (const auto& o : rp.program.overrides) MESSAGE(std::string(o.first + " > " + o.second));
            for (const auto& f : rp.facts) MESSAGE(std::string("fact " + format_atom(f)));
        }
        REQUIRE(got == expected);
    }
}

TEST_CASE("coherence, consistency and proof soundness on random programs") {
    std::mt19937 rng(19);
    oracle::RandomLimits lim;
    lim.variables = true;
    lim.constants = 3;
    int explained = 0;
    for (int i = 0; i < 150; ++i) {
        auto rp = oracle::random_program(rng, lim);
        auto gp = ground(rp.program, rp.facts);
        auto cs = infer(gp);
        std::set<Atom> inconsistent(cs.inconsistencies().begin(), cs.inconsistencies().end());
        for (const auto& [lit, tags] : cs.entries()) {
            CHECK(tags.contains(ProofTag::PlusDelta) != tags.contains(ProofTag::MinusDelta));
            CHECK(tags.contains(ProofTag::PlusPartial) != tags.contains(ProofTag::MinusPartial));
            if (tags.contains(ProofTag::PlusDelta)) CHECK(tags.contains(ProofTag::PlusPartial));
            CHECK(cs.entries().count(lit.complement()));
            if (tags.contains(ProofTag::PlusPartial) && query(cs, lit.complement()).contains(ProofTag::PlusPartial)) {
                CHECK(tags.contains(ProofTag::PlusDelta));
                CHECK(inconsistent.count(lit.atom));
            }
            if (!tags.contains(ProofTag::PlusPartial)) continue;
            auto tree = explain(gp, cs, lit);
            std::string why;
            INFO(format_literal(lit));
            CHECK_MESSAGE(replay_proof(gp, cs, tree, &why), why);
            CHECK(tree.tag == (tags.contains(ProofTag::PlusDelta) ? ProofTag::PlusDelta : ProofTag::PlusPartial));
            ++explained;
        }
    }
    CHECK(explained > 500);
}

TEST_CASE("inference ignores rule order") {
    std::mt19937 rng(23);
    oracle::RandomLimits lim;
    lim.variables = true;
    lim.constants = 3;
    for (int i = 0; i < 60; ++i) {
        auto rp = oracle::random_program(rng, lim);
        auto reference = infer(ground(rp.program, rp.facts));
        auto shuffled = rp.program;
        std::shuffle(shuffled.rules.begin(), shuffled.rules.end(), rng);
        std::reverse(shuffled.overrides.begin(), shuffled.overrides.end());
        CHECK(infer(ground(shuffled, rp.facts)) == reference);
        CHECK(export_conclusions(infer(ground(shuffled, rp.facts))) == export_conclusions(reference));
    }
}

TEST_CASE("concurrent queries and explanations") {
    Tweety t;
    auto expected = export_proof(explain(t.gp, t.cs, parse_literal("~flies(t)")));
    std::vector<std::string> proofs(4);
    std::vector<std::size_t> sizes(4);
    std::vector<std::thread> threads;
    for (int i = 0; i < 4; ++i)
        threads.emplace_back([&, i] {
            sizes[i] = t.cs.entries().size();
            proofs[i] = export_proof(explain(t.gp, t.cs, parse_literal("~flies(t)")));
        });
    for (auto& th : threads) th.join();
    for (int i = 0; i < 4; ++i) {
        CHECK(proofs[i] == expected);
        CHECK(sizes[i] == 6);
    }
}

TEST_CASE("oracle pruning keeps every surviving verdict") {
    std::mt19937 rng(29);
    oracle::RandomLimits lim;
    lim.variables = true;
    lim.constants = 3;
    for (int i = 0; i < 100; ++i) {
        auto rp = oracle::random_program(rng, lim);
        auto full = oracle::ground(rp.program, rp.facts);
        auto all = oracle::solve(full);
        auto pruned = oracle::solve(oracle::prune(full));
        for (const auto& [lit, tags] : pruned) CHECK(all.at(lit) == tags);
    }
}
