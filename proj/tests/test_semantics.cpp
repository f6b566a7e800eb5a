#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "chorsec/semantics.hpp"
#include "chorsec/transform.hpp"
#include "common.hpp"

using namespace chorsec;

namespace {

const std::vector<Value> kDomain = {Value::integer(0), Value::integer(1), Value::integer(2)};

Semantics sem_of(Mode m, const HostEnv& env, Attack a = {}) {
    Semantics s;
    s.mode = m;
    s.env = &env;
    s.attack = a;
    return s;
}

InputSource from_domain() {
    return [](const Channel&) { return kDomain; };
}

StmtP chor(const std::string& text, const HostEnv& env) { return parse_stmts(text, env, Tier::Choreography); }

ProcessState process_of(const DistributedProgram& d, Ep h) {
    ProcessState p;
    p.hosts = {h};
    p.stmt = d.at(h).stmt;
    return p;
}

}  // namespace

TEST_CASE("ideal honest input reads every domain value from the environment") {
    HostEnv env = fixtures::hosts();
    Ep alice = *env.find("alice");
    auto steps = enabled_expr_steps(sem_of(Mode::IdealSequential, env), alice, Expr::input(alice), {}, from_domain());
    REQUIRE(steps.size() == kDomain.size());
    for (size_t i = 0; i < steps.size(); ++i) {
        CHECK(steps[i].action == Action{Dir::In, {kEnvironment, alice, kDomain[i]}});
        CHECK(steps[i].result == kDomain[i]);
    }
}

TEST_CASE("malicious input and output step internally with unit") {
    HostEnv env = fixtures::hosts();
    Ep alice = *env.find("alice");
    Attack a = fixtures::attack("attack_alice.txt", env);
    for (Mode m : {Mode::IdealSequential, Mode::RealSequential}) {
        auto out = enabled_expr_steps(sem_of(m, env, a), alice, Expr::output(Atom::of(Value::integer(1)), alice), {},
                                      from_domain());
        REQUIRE(out.size() == 1);
        CHECK(out[0].action.is_internal());
        CHECK(out[0].result == Value::unit());
        auto in = enabled_expr_steps(sem_of(m, env, a), alice, Expr::input(alice), {}, from_domain());
        REQUIRE(in.size() == 1);
        CHECK(in[0].action.is_internal());
        CHECK(in[0].result == Value::unit());
    }
}

TEST_CASE("downgrades: visible in the ideal world, internal in the real one") {
    HostEnv env = fixtures::hosts();
    AtomTable& at = env.atoms();
    Ep mpc = *env.find("mpc");
    Attack a = fixtures::attack("attack_alice.txt", env);
    Expr decl = Expr::declassify(Atom::of(Value::boolean(true)), parse_label("<A & B, A & B>", at),
                                 parse_label("<A | B, A & B>", at));
    auto ideal = enabled_expr_steps(sem_of(Mode::IdealSequential, env, a), mpc, decl, {}, from_domain());
    REQUIRE(ideal.size() == 1);
    CHECK(ideal[0].action == Action{Dir::Out, {mpc, kAdversary, Value::boolean(true)}});
    CHECK(ideal[0].result == Value::boolean(true));
    auto real = enabled_expr_steps(sem_of(Mode::RealSequential, env, a), mpc, decl, {}, from_domain());
    REQUIRE(real.size() == 1);
    CHECK(real[0].action.is_internal());
    CHECK(real[0].result == Value::boolean(true));
    // No attacker: nothing to observe.
    auto none = enabled_expr_steps(sem_of(Mode::IdealSequential, env), mpc, decl, {}, from_domain());
    REQUIRE(none.size() == 1);
    CHECK(none[0].action.is_internal());

    Expr end = Expr::endorse(Atom::of(Value::integer(1)), parse_label("<A, A>", at), parse_label("<A, A & B>", at));
    auto e = enabled_expr_steps(sem_of(Mode::IdealSequential, env, a), mpc, end, {}, from_domain());
    REQUIRE(e.size() == kDomain.size());
    for (size_t i = 0; i < e.size(); ++i) {
        CHECK(e[i].action == Action{Dir::In, {kAdversary, mpc, kDomain[i]}});
        CHECK(e[i].result == kDomain[i]);
    }
}

TEST_CASE("concurrent delay and the synchronous restriction") {
    HostEnv env = fixtures::hosts();
    Ep alice = *env.find("alice"), bob = *env.find("bob");
    StmtP s = chor("let x@alice = input@alice; move bob.unit -> alice.y;", env);

    auto seq = enabled_stmt_steps(sem_of(Mode::RealSequential, env), s, {}, kDomain);
    CHECK(seq.size() == kDomain.size());
    for (const auto& st : seq) CHECK(st.action.actor() == alice);

    auto conc = enabled_stmt_steps(sem_of(Mode::RealConcurrent, env), s, {}, kDomain);
    CHECK(conc.size() == kDomain.size() + 1);
    bool bob_first = false;
    for (const auto& st : conc)
        if (st.action == Action{Dir::Out, {bob, alice, Value::unit()}}) bob_first = true;
    CHECK(bob_first);

    Semantics sync = sem_of(Mode::RealConcurrent, env);
    sync.synchronous_delay = true;
    CHECK(enabled_stmt_steps(sync, s, {}, kDomain).size() == kDomain.size());

    // Unrelated hosts still move ahead under the synchronous rule.
    StmtP far = chor("let x@alice = input@alice; move bob.unit -> mpc.y;", env);
    CHECK(enabled_stmt_steps(sync, far, {}, kDomain).size() == kDomain.size() + 1);
}

TEST_CASE("asynchronous move sends then receives") {
    HostEnv env = fixtures::hosts();
    Ep alice = *env.find("alice"), bob = *env.find("bob");
    StmtP s = chor("move alice.3 -> bob.y;", env);
    Semantics sem = sem_of(Mode::Async, env);
    auto first = enabled_stmt_steps(sem, s, {}, kDomain);
    REQUIRE(first.size() == 1);
    CHECK(first[0].action == Action{Dir::Out, {alice, bob, Value::integer(3)}});
    CHECK(first[0].binds.empty());
    REQUIRE(first[0].next->kind == StmtKind::MovePending);
    auto second = enabled_stmt_steps(sem, first[0].next, {}, kDomain);
    REQUIRE(second.size() == 1);
    CHECK(second[0].action == Action::internal(bob));
    REQUIRE(second[0].binds.size() == 1);
    CHECK(second[0].binds[0].second == Value::integer(3));
    CHECK(second[0].next->kind == StmtKind::Skip);

    auto sync = enabled_stmt_steps(sem_of(Mode::RealSequential, env), s, {}, kDomain);
    REQUIRE(sync.size() == 1);
    CHECK(sync[0].next->kind == StmtKind::Skip);
    auto ideal = enabled_stmt_steps(sem_of(Mode::IdealSequential, env), s, {}, kDomain);
    REQUIRE(ideal.size() == 1);
    CHECK(ideal[0].action.is_internal());
}

TEST_CASE("processes buffer relevant messages in FIFO order and discard the rest") {
    HostEnv env = fixtures::hosts();
    Ep alice = *env.find("alice"), bob = *env.find("bob"), mpc = *env.find("mpc");
    DistributedProgram d = partition(fixtures::program("millionaires.chor", env).body, env);
    ProcessState pa = process_of(d, alice), pb = process_of(d, bob);

    Message x{mpc, alice, Value::boolean(true)};
    ProcessState qa = step_process_input(pa, x);
    ProcessState qb = step_process_input(pb, x);
    CHECK(qa.buffer.size() == 1);
    CHECK(qb.buffer.empty());
    // Own outputs are not echoed back.
    CHECK(step_process_input(pa, Message{alice, mpc, Value::integer(1)}).buffer.empty());

    ProcessState r = pa;
    for (int v = 0; v < 3; ++v) r = step_process_input(r, Message{mpc, alice, Value::integer(v)});
    r = step_process_input(r, Message{bob, alice, Value::unit()});
    CHECK(r.buffer.queue({mpc, alice}) == kDomain);
    CHECK(r.buffer.count({bob, alice}) == 1);
    CHECK(r.buffer.pop({mpc, alice})->value == Value::integer(0));
    CHECK(r.buffer.front({mpc, alice})->value == Value::integer(1));
}

TEST_CASE("a waiting receive consumes its buffered message") {
    HostEnv env = fixtures::hosts();
    Ep alice = *env.find("alice"), mpc = *env.find("mpc");
    Semantics sem = sem_of(Mode::RealSequential, env);
    ProcessState p;
    p.hosts = {alice};
    p.stmt = parse_stmts("let y@alice = recv mpc;", env, Tier::Distributed);
    CHECK(enabled_process_outputs(sem, p).empty());
    auto pot = potential_steps(sem, p);
    REQUIRE(pot.size() == 1);
    CHECK_FALSE(pot[0].ready);
    p = step_process_input(p, Message{mpc, alice, Value::integer(2)});
    auto steps = enabled_process_outputs(sem, p);
    REQUIRE(steps.size() == 1);
    CHECK(steps[0].action == Action::internal(alice));
    CHECK(steps[0].stmt_action == Action{Dir::In, {mpc, alice, Value::integer(2)}});
    CHECK(steps[0].next.buffer.empty());
    CHECK(steps[0].next.store.entries().size() == 1);
    CHECK(steps[0].next.stmt->kind == StmtKind::Skip);
    CHECK_THROWS_AS(step_process(sem, p, Action::internal(mpc)), NotEnabled);
}

TEST_CASE("distributed millionaires run to completion with one output per channel") {
    HostEnv env = fixtures::hosts();
    DistributedProgram d = partition(fixtures::program("millionaires.chor", env).body, env);
    Configuration c{sem_of(Mode::RealConcurrent, env), {}};
    for (const auto& [h, p] : d) c.procs.push_back(process_of(d, h));
    Ep alice = *env.find("alice"), bob = *env.find("bob");
    deliver(c, Message{kEnvironment, alice, Value::integer(1)});
    deliver(c, Message{kEnvironment, bob, Value::integer(2)});
    std::vector<Action> env_out;
    for (int guard = 0; guard < 100 && !c.quiescent_statements(); ++guard) {
        auto steps = enabled_config_steps(c);
        REQUIRE_FALSE(steps.empty());
        std::set<Channel> seen;
        for (const auto& st : steps)
            if (!st.action.is_internal()) CHECK(seen.insert(st.action.msg.channel()).second);
        if (steps[0].action.msg.to == kEnvironment) env_out.push_back(steps[0].action);
        c = step_config(c, steps[0].action);
    }
    CHECK(c.quiescent_statements());
    REQUIRE(env_out.size() == 2);
    for (const auto& a : env_out) CHECK(a.msg.value == Value::boolean(true));
}

TEST_CASE("materialize substitutes stored values") {
    HostEnv env = fixtures::hosts();
    StmtP s = chor("let x@alice = input@alice; let y@alice = x + 1;", env);
    Store st;
    st.set(s->var, Value::integer(4));
    StmtP m = materialize(s->next, st);
    CHECK(free_vars(m).empty());
    CHECK(alpha_equal(m, chor("let y@alice = 4 + 1;", env)));
}
