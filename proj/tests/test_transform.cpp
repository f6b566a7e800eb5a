#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "chorsec/transform.hpp"
#include "common.hpp"

using namespace chorsec;

namespace {

StmtP chor(const std::string& text, const HostEnv& env) { return parse_stmts(text, env, Tier::Choreography); }

std::string print(const StmtP& s, const HostEnv& env) { return pretty_print(s, env); }

}  // namespace

TEST_CASE("source extraction") {
    HostEnv env = fixtures::hosts();
    StmtP c = fixtures::program("millionaires.chor", env).body;
    StmtP src = fixtures::program("millionaires.src", env).body;
    CHECK(alpha_equal(source_of(c), src));
    CHECK(source_of(skip())->kind == StmtKind::Skip);
    StmtP sel = chor("select mpc.true -> alice; let x@alice = 1;", env);
    CHECK(stmt_equal(source_of(sel), source_of(sel->next)));
    CHECK(tier_violations(source_of(c), Tier::Source, env).empty());
}

TEST_CASE("validate") {
    HostEnv env = fixtures::hosts();
    StmtP c = fixtures::program("millionaires.chor", env).body;
    StmtP src = fixtures::program("millionaires.src", env).body;
    CHECK(validate_synthesis(src, c, env, Attack()).ok());

    // Bob's input before alice's: same program otherwise, extraction differs.
    std::string swapped = fixtures::read("millionaires.chor");
    auto a = swapped.find("let a@alice = input@alice;\nmove alice.a -> mpc.a';\n");
    std::string alice_part = swapped.substr(a, 51);
    swapped.erase(a, 51);
    swapped.insert(swapped.find("let ea@mpc"), alice_part);
    StmtP c2 = parse_program(swapped, env).body;
    SynthesisReport r = validate_synthesis(src, c2, env, Attack());
    CHECK_FALSE(r.ok());
    CHECK_FALSE(r.extraction);
    CHECK(r.typed);
    CHECK(r.synchronized);

    CHECK(validate_synthesis(skip(), skip(), env, Attack()).ok());
    SynthesisReport ns = validate_synthesis(src, fixtures::program("millionaires_nosync.chor", env).body, env, Attack());
    CHECK(ns.extraction);
    CHECK_FALSE(ns.synchronized);
}

TEST_CASE("corruption: worked example with alice malicious") {
    HostEnv env = fixtures::hosts("hosts_abc.txt");
    StmtP c = fixtures::program("corruption.chor", env).body;
    StmtP expected = fixtures::program("corruption_expected.chor", env).body;
    Attack alice(env.atoms().mask_of({"A"}), env.atoms().mask_of({"A"}));
    StmtP got = corrupt_stmt(c, env, alice);
    CHECK_MESSAGE(alpha_equal(got, expected), print(got, env));
    CHECK(stmt_size(c) == 5);
    CHECK(stmt_size(got) == 4);
    CHECK(stmt_equal(corrupt_stmt(c, env, Attack()), c));
}

TEST_CASE("corruption: millionaires with bob malicious") {
    HostEnv env = fixtures::hosts();
    StmtP c = fixtures::program("millionaires.chor", env).body;
    StmtP got = corrupt_stmt(c, env, fixtures::attack("attack_bob.txt", env));
    std::string text = print(got, env);
    CHECK(text.find("@bob") == std::string::npos);
    CHECK(text.find("let b'@mpc = recv bob;") != std::string::npos);
    CHECK(text.find("send x -> bob") != std::string::npos);
    CHECK(text.find("send unit -> bob") != std::string::npos);
    CHECK(text.find("let ea@mpc") != std::string::npos);
}

TEST_CASE("corrupting programs drops malicious processes") {
    HostEnv env = fixtures::hosts();
    StmtP c = fixtures::program("millionaires.chor", env).body;
    Attack alice = fixtures::attack("attack_alice.txt", env);
    DistributedProgram d = corrupt_config(partition(c, env), env, alice);
    CHECK(d.size() == 2);
    CHECK(d.count(*env.find("bob")) == 1);
    CHECK(d.count(*env.find("mpc")) == 1);
    CHECK(corrupt_config(partition(c, env), env, Attack()).size() == 3);
}

TEST_CASE("projection reproduces the distributed millionaires programs") {
    HostEnv env = fixtures::hosts();
    StmtP c = fixtures::program("millionaires.chor", env).body;
    DistributedProgram d = partition(c, env);
    REQUIRE(d.size() == 3);
    for (const char* h : {"alice", "bob", "mpc"}) {
        Program p = fixtures::program(std::string("millionaires_") + h + ".dist", env);
        CHECK(p.host == *env.find(h));
        const HostProgram& got = d.at(*env.find(h));
        CHECK_MESSAGE(alpha_equal(got.stmt, p.body), print(got.stmt, env));
        CHECK(got.buffer.empty());
        CHECK(tier_violations(got.stmt, Tier::Distributed, env, p.host).empty());
    }
}

TEST_CASE("projecting a conditional onto the informed host gives a case") {
    HostEnv env = fixtures::hosts();
    Ep bob = *env.find("bob"), alice = *env.find("alice");
    StmtP s = chor(
        "if alice.true { select alice.true -> bob; let y@bob = 1; } else { select alice.false -> bob; let z@bob = 2; }",
        env);
    StmtP p = project(s, bob);
    REQUIRE(p->kind == StmtKind::Case);
    CHECK(p->h1 == alice);
    CHECK(p->h2 == bob);
    REQUIRE(p->cases.size() == 2);
    CHECK(p->cases[0].first == Value::boolean(false));
    CHECK(alpha_equal(p->cases[0].second, project(s->else_branch->next, bob)));
    CHECK(alpha_equal(p->cases[1].second, project(s->then_branch->next, bob)));
    CHECK(project(skip(), bob)->kind == StmtKind::Skip);
    CHECK(project(s, alice)->kind == StmtKind::If);

    StmtP blind = chor("if alice.true { let y@bob = 1; } else { let y@bob = 2; }", env);
    CHECK_THROWS_AS(project(blind, bob), MergeFailure);
}

TEST_CASE("corrupt and partition commute on millionaires") {
    HostEnv env = fixtures::hosts();
    StmtP c = fixtures::program("millionaires.chor", env).body;
    for (const auto& a : all_valid_attacks(2)) {
        DistributedProgram x = corrupt_config(partition(c, env), env, a);
        std::vector<Ep> good;
        for (Ep h = 0; h < env.host_count(); ++h)
            if (!env.malicious(h, a)) good.push_back(h);
        DistributedProgram y = partition(corrupt_stmt(c, env, a), good);
        REQUIRE(x.size() == y.size());
        for (const auto& [h, p] : x) {
            CHECK(alpha_equal(p.stmt, y.at(h).stmt));
            CHECK(p.buffer == y.at(h).buffer);
        }
    }
}

TEST_CASE("merge on generated case trees") {
    HostEnv env = fixtures::hosts();
    Ep alice = *env.find("alice"), bob = *env.find("bob");
    std::mt19937 rng(21);
    auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
    // Case trees at bob over selections from alice; leaves are fixed lets so
    // that congruent parts coincide.
    std::function<StmtP(int)> tree = [&](int depth) -> StmtP {
        if (depth == 0 || pick(3) == 0) return pick(2) ? skip() : mk_let(intern_var("leaf"), bob, Expr::atomic(Atom::of(Value::integer(1))), skip());
        std::vector<std::pair<Value, StmtP>> cases;
        for (int v = 0; v < 3; ++v)
            if (pick(2)) cases.emplace_back(Value::integer(v), tree(depth - 1));
        if (cases.empty()) cases.emplace_back(Value::integer(pick(3)), tree(depth - 1));
        return mk_case(alice, bob, std::move(cases));
    };
    int defined = 0;
    for (int i = 0; i < 600; ++i) {
        StmtP a = tree(3), b = tree(3), c = tree(3);
        CHECK(stmt_equal(merge(a, a), a));
        StmtP ab, ba;
        bool ok_ab = true, ok_ba = true;
        try { ab = merge(a, b); } catch (const MergeFailure&) { ok_ab = false; }
        try { ba = merge(b, a); } catch (const MergeFailure&) { ok_ba = false; }
        REQUIRE(ok_ab == ok_ba);
        if (!ok_ab) continue;
        ++defined;
        CHECK(stmt_equal(ab, ba));
        StmtP l, r;
        bool ok_l = true, ok_r = true;
        try { l = merge(ab, c); } catch (const MergeFailure&) { ok_l = false; }
        try { r = merge(a, merge(b, c)); } catch (const MergeFailure&) { ok_r = false; }
        CHECK(ok_l == ok_r);
        if (ok_l && ok_r) CHECK(stmt_equal(l, r));
    }
    CHECK(defined > 50);
}
