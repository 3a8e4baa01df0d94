#include "doctest.h"

#include <atomic>
#include <random>
#include <thread>

#include "normforge/error.hpp"
#include "normforge/lifecycle.hpp"
#include "test_support.hpp"

using namespace normforge;
using testing::caught;

namespace {

Rule simple_rule(const std::string& id, const std::string& head, const std::string& body) {
    return Rule{id, Strength::Defeasible, parse_literal(head), {{parse_literal(body), false}}};
}

Norm norm(const std::string& id, const std::string& rule_id, const char* from, const char* to = nullptr,
          const std::string& head = "flies(X)", const std::string& body = "bird(X)") {
    Norm n;
    n.id = id;
    n.rule = simple_rule(rule_id, head, body);
    n.source = "35 USC §112";
    n.jurisdiction = "US";
    n.valid_from = Date::parse(from);
    if (to) n.valid_to = Date::parse(to);
    return n;
}

ChangeOp add(Norm n, std::string citation = "Pub. L. 1") { return {AddNorm{std::move(n)}, std::move(citation)}; }
ChangeOp repeal(std::string id, const char* end, std::string citation = "Pub. L. 2") {
    return {RepealNorm{std::move(id), Date::parse(end)}, std::move(citation)};
}
ChangeOp amend(std::string id, Norm replacement, std::string citation = "Pub. L. 3") {
    return {AmendNorm{std::move(id), std::move(replacement)}, std::move(citation)};
}
ChangeOp override_op(std::string sup, std::string inf, std::string citation = "In re X") {
    return {AddOverride{{std::move(sup), std::move(inf)}}, std::move(citation)};
}

std::vector<std::string> norm_ids(const Rulebase& rb) {
    std::vector<std::string> out;
    for (const auto& n : rb.norms) out.push_back(n.id);
    return out;
}

} // namespace

TEST_CASE("changeset serialization round trips") {
    Norm replacement = norm("n1b", "r1b", "2012-01-01");
    replacement.source.clear();
    ChangeSet cs{add(norm("n1", "r1", "2000-01-01", "2020-01-01")), repeal("n1", "2015-01-01"),
                 amend("n1", replacement), override_op("r2", "r1")};
    auto text = serialize_changeset(cs);
    CHECK(parse_changeset(text) == cs);
    CHECK(serialize_changeset(parse_changeset(text)) == text);
    CHECK(text.rfind("{\n  \"ops\": [\n    {\n      \"op\": \"add_norm\",", 0) == 0);
    CHECK(kind_of(cs[0]) == ChangeKind::Add);
    CHECK(kind_of(cs[3]) == ChangeKind::AddOverride);
    CHECK(to_string(ChangeKind::AddOverride) == "add_override");
}

TEST_CASE("changeset parse errors") {
    auto e = caught([] { parse_changeset("{\"ops\": [], \"extra\": 1}"); });
    REQUIRE(e);
    CHECK(e->kind == ErrorKind::Schema);
    CHECK(e->token == "extra");

    e = caught([] { parse_changeset(R"({"ops":[{"op":"repeal_norm","citation":"","norm_id":"n","end":"2000-01-01"}]})"); });
    REQUIRE(e);
    CHECK(e->kind == ErrorKind::Schema);
    CHECK(e->token == "citation");

    e = caught([] { parse_changeset(R"({"ops":[{"op":"delete","citation":"c"}]})"); });
    REQUIRE(e);
    CHECK(e->token == "delete");

    e = caught([] { parse_changeset(R"({"ops":[{"op":"repeal_norm","citation":"c","norm_id":"n","end":"2000-02-30"}]})"); });
    REQUIRE(e);
    CHECK(e->kind == ErrorKind::InvalidDate);

    e = caught([] { parse_changeset("{\"ops\": ["); });
    REQUIRE(e);
    CHECK(e->kind == ErrorKind::Syntax);

    e = caught([] { parse_changeset(R"({"ops":[{"op":"add_override","citation":"c","sup":"a"}]})"); });
    REQUIRE(e);
    CHECK(e->token == "inf");
}

TEST_CASE("apply_changeset semantics") {
    Rulebase rb = apply_changeset({}, {add(norm("n1", "r1", "2000-01-01"))});
    CHECK(rb.jurisdiction == "US");
    REQUIRE(rb.norms.size() == 1);

    SUBCASE("repeal closes the interval and keeps the norm") {
        auto out = apply_changeset(rb, {repeal("n1", "2010-01-01")});
        REQUIRE(out.norms.size() == 1);
        CHECK(out.norms[0].valid_to == Date::parse("2010-01-01"));
        CHECK(out.norms[0].in_force(Date::parse("2009-12-31")));
        CHECK_FALSE(out.norms[0].in_force(Date::parse("2010-01-01")));
        auto again = apply_changeset(out, {repeal("n1", "2005-01-01")});
        CHECK(again.norms[0].valid_to == Date::parse("2005-01-01"));
        CHECK(caught([&] { apply_changeset(out, {repeal("n1", "2011-01-01")}); })->kind == ErrorKind::Precondition);
        CHECK(caught([&] { apply_changeset(rb, {repeal("n1", "2000-01-01")}); })->kind == ErrorKind::Precondition);
        auto e = caught([&] { apply_changeset(rb, {repeal("n9", "2010-01-01")}); });
        CHECK(e->kind == ErrorKind::UnknownTarget);
        CHECK(e->token == "n9");
    }

    SUBCASE("amend closes the target and inherits its provision") {
        Norm repl = norm("n1b", "r1b", "2012-01-01", nullptr, "flies(X)", "pilot(X)");
        repl.source.clear();
        repl.jurisdiction.clear();
        auto out = apply_changeset(rb, {amend("n1", repl)});
        CHECK(norm_ids(out) == std::vector<std::string>{"n1", "n1b"});
        CHECK(out.norms[0].valid_to == Date::parse("2012-01-01"));
        CHECK(out.norms[1].source == "35 USC §112");
        CHECK(out.norms[1].jurisdiction == "US");
        CHECK(out.norms[1].valid_from == Date::parse("2012-01-01"));

        CHECK(caught([&] { apply_changeset(rb, {amend("n9", repl)}); })->kind == ErrorKind::UnknownTarget);
        Norm other = repl;
        other.source = "35 USC §101";
        CHECK(caught([&] { apply_changeset(rb, {amend("n1", other)}); })->kind == ErrorKind::Precondition);
        Norm same_rule = repl;
        same_rule.rule.id = "r1";
        CHECK(caught([&] { apply_changeset(rb, {amend("n1", same_rule)}); })->kind == ErrorKind::Precondition);
        Norm early = repl;
        early.valid_from = Date::parse("2000-01-01");
        CHECK(caught([&] { apply_changeset(rb, {amend("n1", early)}); })->kind == ErrorKind::Precondition);
        auto ended = apply_changeset(rb, {repeal("n1", "2005-01-01")});
        CHECK(caught([&] { apply_changeset(ended, {amend("n1", repl)}); })->kind == ErrorKind::Precondition);
    }

    SUBCASE("overrides are deduplicated") {
        auto out = apply_changeset(rb, {override_op("r2", "r1"), override_op("r2", "r1"), override_op("r1", "r2")});
        CHECK(out.overrides == std::vector<OverridePair>{{"r2", "r1"}, {"r1", "r2"}});
    }

    SUBCASE("ops apply in order") {
        CHECK(caught([&] { apply_changeset(rb, {repeal("n2", "2010-01-01"), add(norm("n2", "r2", "2000-01-01"))}); })
                  ->kind == ErrorKind::UnknownTarget);
        auto out = apply_changeset(rb, {add(norm("n2", "r2", "2000-01-01")), repeal("n2", "2010-01-01")});
        CHECK(out.norms[1].valid_to == Date::parse("2010-01-01"));
    }
}

TEST_CASE("commits create consecutive versions") {
    VersionedStore store;
    CHECK(store.head_version() == 0);
    CHECK(store.commit({add(norm("n1", "r1", "2000-01-01"))}, "2024-01-01T00:00:00Z") == 1);
    CHECK(store.commit({repeal("n1", "2010-01-01")}) == 2);
    auto revs = store.revisions();
    REQUIRE(revs.size() == 2);
    CHECK(revs[0].timestamp == "2024-01-01T00:00:00Z");
    CHECK(revs[1].timestamp.size() == 20);
    CHECK(revs[1].timestamp.back() == 'Z');
    CHECK(store.head().norms[0].valid_to == Date::parse("2010-01-01"));
}

TEST_CASE("failed commits leave the store untouched") {
    auto dir = testing::scratch_dir("atomic");
    auto log = dir / "store.jsonl";
    VersionedStore store(log);
    store.commit({add(norm("n1", "r1", "2000-01-01"))}, "t1");
    const auto head = store.head();
    const auto bytes = testing::read_file(log);

    auto expect_unchanged = [&](ErrorKind kind, const ChangeSet& cs) {
        auto e = caught([&] { store.commit(cs); });
        REQUIRE(e);
        CHECK(e->kind == kind);
        CHECK(store.head_version() == 1);
        CHECK(store.head() == head);
        CHECK(testing::read_file(log) == bytes);
    };

    expect_unchanged(ErrorKind::UnknownTarget, {add(norm("n2", "r2", "2000-01-01")), repeal("n9", "2010-01-01")});
    expect_unchanged(ErrorKind::Precondition, {});
    expect_unchanged(ErrorKind::Precondition, {add(norm("n2", "r2", "2000-01-01"), "")});
    expect_unchanged(ErrorKind::DuplicateId, {add(norm("n1", "r5", "2000-01-01"))});
    expect_unchanged(ErrorKind::DuplicateId, {add(norm("n5", "r1", "2000-01-01"))});
    expect_unchanged(ErrorKind::DanglingOverride, {override_op("r1", "r9")});

    Norm foreign = norm("n2", "r2", "2000-01-01");
    foreign.jurisdiction = "EP";
    expect_unchanged(ErrorKind::PostValidation, {add(foreign)});

    Norm arity = norm("n2", "r2", "2000-01-01", nullptr, "flies(X,X)", "bird(X)");
    expect_unchanged(ErrorKind::PostValidation, {add(arity)});

    int calls = 0;
    store.set_commit_hook([&](const Rulebase& next) {
        ++calls;
        CHECK(next.norms.size() == 2);
        throw std::runtime_error("injected");
    });
    auto e = caught([&] { store.commit({add(norm("n2", "r2", "2000-01-01"))}); });
    REQUIRE(e);
    CHECK(e->kind == ErrorKind::PostValidation);
    CHECK(e->message == "commit check failed: injected");
    CHECK(calls == 1);
    CHECK(store.head() == head);
    CHECK(testing::read_file(log) == bytes);

    store.set_commit_hook([](const Rulebase&) { throw Error(ErrorKind::Validation, "hook says no"); });
    CHECK(caught([&] { store.commit({add(norm("n2", "r2", "2000-01-01"))}); })->kind == ErrorKind::Validation);

    store.set_commit_hook({});
    CHECK(store.commit({add(norm("n2", "r2", "2000-01-01"))}) == 2);
}

TEST_CASE("the log replays on reopen") {
    auto dir = testing::scratch_dir("replay");
    auto log = dir / "nested" / "store.jsonl";
    {
        VersionedStore store(log);
        store.commit({add(norm("n1", "r1", "2000-01-01"))}, "t1");
        store.commit({amend("n1", norm("n1b", "r1b", "2012-01-01")), override_op("r1b", "r1")}, "t2");
    }
    auto lines = testing::read_file(log);
    CHECK(std::count(lines.begin(), lines.end(), '\n') == 2);
    CHECK(lines.rfind("{\"version\":1,\"timestamp\":\"t1\",\"ops\":[", 0) == 0);

    VersionedStore reopened(log);
    CHECK_FALSE(reopened.read_only());
    CHECK(reopened.open_warning().empty());
    CHECK(reopened.head_version() == 2);
    CHECK(norm_ids(reopened.head()) == std::vector<std::string>{"n1", "n1b"});
    CHECK(reopened.revisions()[1].timestamp == "t2");
    CHECK(reopened.commit({repeal("n1b", "2020-01-01")}, "t3") == 3);
}

TEST_CASE("a corrupt log line opens the store read-only") {
    auto dir = testing::scratch_dir("corrupt");
    auto log = dir / "store.jsonl";
    {
        VersionedStore store(log);
        store.commit({add(norm("n1", "r1", "2000-01-01"))}, "t1");
        store.commit({add(norm("n2", "r2", "2000-01-01"))}, "t2");
    }
    auto text = testing::read_file(log);
    auto second = text.find('\n') + 1;

    SUBCASE("truncated json") {
        testing::write_file(log, text.substr(0, text.size() - 5) + "\n");
    }
    SUBCASE("version gap") {
        auto bad = text;
        bad.replace(second, 12, "{\"version\":7");
        testing::write_file(log, bad);
    }
    SUBCASE("replay failure") {
        auto bad = text;
        auto pos = bad.find("\"n2\"");
        bad.replace(pos, 4, "\"n1\"");
        testing::write_file(log, bad);
    }

    VersionedStore store(log);
    CHECK(store.read_only());
    CHECK(store.head_version() == 1);
    CHECK(store.open_warning().find("store.jsonl:2: corrupt log entry") != std::string::npos);
    CHECK(store.open_warning().find("read-only at version 1") != std::string::npos);
    auto e = caught([&] { store.commit({repeal("n1", "2010-01-01")}); });
    REQUIRE(e);
    CHECK(e->kind == ErrorKind::ReadOnly);
    CHECK(store.as_of(Date::parse("2005-01-01")).norms.size() == 1);
}

TEST_CASE("blank log lines are ignored") {
    auto dir = testing::scratch_dir("blank");
    auto log = dir / "store.jsonl";
    { VersionedStore(log).commit({add(norm("n1", "r1", "2000-01-01"))}, "t1"); }
    testing::write_file(log, "\n" + testing::read_file(log) + "  \n");
    VersionedStore store(log);
    CHECK_FALSE(store.read_only());
    CHECK(store.head_version() == 1);
}

TEST_CASE("diff and materialize") {
    VersionedStore store;
    ChangeSet c1{add(norm("n1", "r1", "2000-01-01"))};
    ChangeSet c2{add(norm("n2", "r2", "2000-01-01", nullptr, "~flies(X)", "penguin(X)")), override_op("r2", "r1")};
    ChangeSet c3{repeal("n1", "2010-01-01")};
    store.commit(c1);
    store.commit(c2);
    store.commit(c3);

    CHECK(store.diff(2, 2).empty());
    CHECK(store.diff(0, 1) == c1);
    CHECK(store.diff(1, 3).size() == 3);
    CHECK(apply_changeset({}, store.diff(0, 3)) == store.head());
    CHECK(apply_changeset(store.materialize(1), store.diff(1, 3)) == store.head());
    CHECK(store.materialize(0) == Rulebase{});
    CHECK(store.materialize(3) == store.head());
    CHECK(norm_ids(store.materialize(1)) == std::vector<std::string>{"n1"});

    auto e = caught([&] { store.diff(2, 1); });
    CHECK(e->kind == ErrorKind::Precondition);
    e = caught([&] { store.diff(0, 4); });
    CHECK(e->kind == ErrorKind::UnknownVersion);
    CHECK(e->token == "4");
    CHECK(caught([&] { store.materialize(4); })->kind == ErrorKind::UnknownVersion);
}

TEST_CASE("as_of keeps historical norms") {
    VersionedStore store;
    store.commit({add(norm("n1", "r1", "2000-01-01")),
                  add(norm("n2", "r2", "2000-01-01", nullptr, "~flies(X)", "penguin(X)")), override_op("r2", "r1")});
    store.commit({amend("n1", norm("n1b", "r1b", "2012-01-01", nullptr, "flies(X)", "pilot(X)"))});
    store.commit({repeal("n2", "2011-01-01")});

    CHECK(store.as_of(Date::parse("1999-12-31")).norms.empty());
    auto early = store.as_of(Date::parse("2005-06-01"));
    CHECK(norm_ids(early) == std::vector<std::string>{"n1", "n2"});
    CHECK(early.overrides == std::vector<OverridePair>{{"r2", "r1"}});
    auto mid = store.as_of(Date::parse("2011-06-01"));
    CHECK(norm_ids(mid) == std::vector<std::string>{"n1"});
    CHECK(mid.overrides.empty());
    CHECK(norm_ids(store.as_of(Date::parse("2012-01-01"))) == std::vector<std::string>{"n1b"});
}

TEST_CASE("as_of agrees with core translation on random stores") {
    std::mt19937 rng(11);
    auto day = [&](int lo, int hi) {
        std::uniform_int_distribution<int> d(lo, hi);
        return Date(std::chrono::year_month_day(std::chrono::sys_days(std::chrono::days(d(rng)))));
    };
    auto serial = [](const Date& d) {
        return static_cast<int>(std::chrono::sys_days(d.ymd()).time_since_epoch().count());
    };
    for (int round = 0; round < 40; ++round) {
        VersionedStore store;
        int next = 0;
        std::vector<std::string> live;
        for (int c = 0; c < 6; ++c) {
            ChangeSet cs;
            Rulebase head = store.head();
            auto choice = rng() % 3;
            if (choice == 0 || live.empty()) {
                auto id = std::to_string(next++);
                auto from = day(10000, 15000);
                Norm n = norm("n" + id, "r" + id, "2000-01-01", nullptr, "p" + std::to_string(rng() % 3) + "(X)",
                              "q(X)");
                n.valid_from = from;
                cs.push_back(add(n));
                live.push_back(n.id);
            } else {
                const Norm* target = head.find_norm(live[rng() % live.size()]);
                int lo = serial(target->valid_from) + 1;
                int hi = target->valid_to ? serial(*target->valid_to) : 16000;
                if (lo > hi) continue;
                if (choice == 1) {
                    cs.push_back({RepealNorm{target->id, day(lo, hi)}, "c"});
                } else {
                    auto id = std::to_string(next++);
                    Norm repl = norm("n" + id, "r" + id, "2000-01-01");
                    repl.valid_from = day(lo, hi);
                    cs.push_back(amend(target->id, repl));
                    live.push_back(repl.id);
                }
            }
            store.commit(cs);
        }
        for (int q = 0; q < 5; ++q) {
            auto d = day(9990, 16010);
            auto head = store.head();
            std::vector<std::string> expected;
            for (const auto& n : head.norms)
                if (!(d < n.valid_from) && (!n.valid_to || d < *n.valid_to)) expected.push_back(n.rule.id);
            std::vector<std::string> selected;
            for (const auto& r : translate_to_core(head, d).rules) selected.push_back(r.id);
            std::vector<std::string> from_store;
            for (const auto& n : store.as_of(d).norms) from_store.push_back(n.rule.id);
            std::sort(expected.begin(), expected.end());
            std::sort(selected.begin(), selected.end());
            std::sort(from_store.begin(), from_store.end());
            CHECK(from_store == expected);
            CHECK(selected == expected);
        }
    }
}

TEST_CASE("trace follows amendments") {
    VersionedStore store;
    store.commit({add(norm("n1", "r1", "2000-01-01"), "Patent Act 1952")});
    store.commit({amend("n1", norm("n1b", "r1b", "2012-09-16"), "AIA §4")});
    store.commit({repeal("n1b", "2020-01-01", "Pub. L. 9")});

    auto t1 = store.trace("n1");
    CHECK(t1.provision == "35 USC §112");
    REQUIRE(t1.events.size() == 2);
    CHECK(t1.events[0] == ProvenanceEvent{1, ChangeKind::Add, "Patent Act 1952"});
    CHECK(t1.events[1] == ProvenanceEvent{2, ChangeKind::Amend, "AIA §4"});
    CHECK(t1.successor == "n1b");
    CHECK_FALSE(t1.predecessor);
    CHECK(format_provenance(t1) ==
          "norm n1 (35 USC §112)\n  v1 add: Patent Act 1952\n  v2 amend: AIA §4\n  amended by n1b\n");

    auto t2 = store.trace("n1b");
    CHECK(t2.predecessor == "n1");
    CHECK(format_provenance(t2) == "norm n1b (35 USC §112)\n  amends n1\n  v2 amend: AIA §4\n  v3 repeal: Pub. L. 9\n");

    auto e = caught([&] { store.trace("n7"); });
    REQUIRE(e);
    CHECK(e->kind == ErrorKind::UnknownNorm);
    CHECK(e->token == "n7");
}

TEST_CASE("readers see whole versions during commits") {
    VersionedStore store;
    store.commit({add(norm("n0", "r0", "2000-01-01"))});
    std::atomic<bool> done{false};
    std::atomic<int> bad{0};
    std::thread reader([&] {
        while (!done) {
            auto head = store.head();
            auto v = store.materialize(store.head_version());
            // each commit adds two norms, so every consistent snapshot is odd
            if (head.norms.size() % 2 != 1 || v.norms.size() % 2 != 1) ++bad;
        }
    });
    for (int i = 1; i <= 40; ++i) {
        auto a = std::to_string(2 * i), b = std::to_string(2 * i + 1);
        store.commit({add(norm("n" + a, "r" + a, "2000-01-01")), add(norm("n" + b, "r" + b, "2000-01-01"))});
    }
    done = true;
    reader.join();
    CHECK(bad == 0);
    CHECK(store.head_version() == 41);
}

TEST_CASE("timestamps are UTC seconds") {
    auto ts = utc_timestamp_now();
    REQUIRE(ts.size() == 20);
    CHECK(ts[10] == 'T');
    CHECK(ts[19] == 'Z');
    CHECK_NOTHROW(Date::parse(ts.substr(0, 10)));
}
