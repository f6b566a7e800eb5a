#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "chorsec/adversary.hpp"
#include "chorsec/simulators.hpp"
#include "common.hpp"

using namespace chorsec;

namespace {

std::string code(const Adversary& a) {
    std::string s;
    a.encode(s);
    return s;
}

}  // namespace

TEST_CASE("visibility follows the attack") {
    HostEnv env = fixtures::hosts();
    Ep alice = *env.find("alice"), bob = *env.find("bob"), mpc = *env.find("mpc");
    Attack none, a = fixtures::attack("attack_alice.txt", env);
    CHECK_FALSE(visible({alice, mpc}, env, none));
    CHECK(visible({alice, mpc}, env, a));
    CHECK(visible({mpc, alice}, env, a));
    CHECK_FALSE(visible({bob, mpc}, env, a));
    CHECK_FALSE(visible({kEnvironment, bob}, env, a));
    CHECK(visible({mpc, kAdversary}, env, none));

    Observation hidden = observe_action({Dir::Out, {bob, mpc, Value::integer(2)}}, env, a);
    CHECK(hidden.delivered);
    CHECK_FALSE(hidden.value);
    Observation seen = observe_action({Dir::Out, {mpc, alice, Value::boolean(true)}}, env, a);
    CHECK(seen.value == Value::boolean(true));

    CHECK(may_emit({kAdversary, bob, Value::unit()}, env, none));
    CHECK(may_emit({alice, mpc, Value::integer(1)}, env, a));
    CHECK_FALSE(may_emit({bob, mpc, Value::integer(1)}, env, a));
    CHECK_FALSE(may_emit({alice, alice, Value::integer(1)}, env, a));
}

TEST_CASE("schedulable channels") {
    HostEnv env = fixtures::hosts();
    auto plain = schedulable_channels(env, false);
    // env->h for each host; each actor: self, peers, env, adv.
    CHECK(plain.size() == 3 + 3 * (1 + 2 + 2));
    CHECK(schedulable_channels(env, true).size() == 3 + 4 * (1 + 3 + 2));
}

TEST_CASE("the dummy cycles and stops after a round of stalls") {
    std::vector<Channel> chs = {{0, 1}, {1, 0}, {0, 0}};
    DummyAdversary d(chs);
    for (int round = 0; round < 2; ++round)
        for (const auto& c : chs) {
            CHECK(d.decide() == Decision::accept(c));
            d.observe(Observation{c, round == 0, std::nullopt});
        }
    CHECK(d.decide() == Decision::stop());
    CHECK(DummyAdversary({}).decide() == Decision::stop());
}

TEST_CASE("prefix adversary overrides planned turns only") {
    std::vector<Channel> chs = {{0, 1}, {1, 0}};
    Message inj{kAdversary, 1, Value::integer(7)};
    PrefixAdversary p({std::nullopt, Decision::emit(inj), Decision::accept({1, 0})}, chs);
    CHECK(code(p) == code(*p.clone()));

    CHECK(p.decide() == Decision::accept({0, 1}));
    p.observe(Observation::stalled({0, 1}));
    CHECK(p.last_observation() == Observation::stalled({0, 1}));
    CHECK(p.dummy_choice() == Decision::accept({1, 0}));
    CHECK(p.decide() == Decision::emit(inj));
    CHECK_FALSE(p.last_observation());
    // Planned accept: the dummy pointer does not move.
    CHECK(p.decide() == Decision::accept({1, 0}));
    p.observe(Observation{{1, 0}, true, Value::unit()});
    CHECK(p.dummy_choice() == Decision::accept({1, 0}));
    p.push(Decision::stop());
    CHECK(p.decide() == Decision::stop());
    CHECK(p.decide() == Decision::accept({1, 0}));
}

TEST_CASE("equal encodings mean equal futures") {
    std::vector<Channel> chs = {{0, 1}, {1, 0}, {0, 2}};
    std::mt19937 rng(5);
    auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
    for (int i = 0; i < 500; ++i) {
        Plan plan;
        for (int k = 0, n = pick(4); k < n; ++k)
            plan.push_back(pick(2) ? std::optional<Decision>() : Decision::accept(chs[pick(3)]));
        PrefixAdversary a(plan, chs);
        AdversaryP b = a.clone();
        REQUIRE(code(a) == code(*b));
        for (int t = 0; t < 8; ++t) {
            Decision da = a.decide(), db = b->decide();
            REQUIRE(da == db);
            Observation o{da.ch, pick(2) == 0, std::nullopt};
            a.observe(o);
            b->observe(o);
            REQUIRE(code(a) == code(*b));
        }
    }
}

TEST_CASE("gate passes a bounded number of decisions") {
    GatedAdversary g(std::make_unique<DummyAdversary>(std::vector<Channel>{{0, 1}}));
    CHECK(g.decide() == Decision::yield());
    g.allow(2);
    CHECK(g.decide() == Decision::accept({0, 1}));
    CHECK(g.decide() == Decision::accept({0, 1}));
    CHECK(g.decide() == Decision::yield());
    CHECK(find_layer<DummyAdversary>(&g) != nullptr);
    CHECK(find_layer<PrefixAdversary>(&g) == nullptr);
}

TEST_CASE("scripts parse and run") {
    HostEnv env = fixtures::hosts();
    Ep alice = *env.find("alice"), mpc = *env.find("mpc");
    auto turns = parse_script(
        "# comment\n"
        "accept alice->mpc\n"
        "when mpc->alice = true: emit alice->bob 3\n"
        "when mpc->alice = false: stop\n"
        "dummy\n",
        env);
    REQUIRE(turns.size() == 4);
    CHECK(turns[0].decision == Decision::accept({alice, mpc}));
    CHECK(turns[1].guard_channel == Channel{mpc, alice});
    CHECK(turns[3].dummy);
    CHECK(validate_script(turns, env, fixtures::attack("attack_alice.txt", env)).empty());

    ScriptAdversary s(turns, {{mpc, alice}});
    CHECK(s.decide() == Decision::accept({alice, mpc}));
    s.observe(Observation{{mpc, alice}, true, Value::boolean(true)});
    CHECK(s.decide().kind == Decision::Kind::Emit);
    // The false guard is skipped; the dummy takes over.
    CHECK(s.decide() == Decision::accept({mpc, alice}));

    CHECK_THROWS_AS(parse_script("accept alice-mpc\n", env), ScriptError);
    CHECK_THROWS_AS(parse_script("accept alice->eve\n", env), ScriptError);
    CHECK_THROWS_AS(parse_script("emit alice->bob banana\n", env), ScriptError);
    CHECK_THROWS_AS(parse_script("jump\n", env), ScriptError);
    CHECK_THROWS_AS(parse_script("stop now\n", env), ScriptError);
}

TEST_CASE("invalid scripts are reported") {
    HostEnv env = fixtures::hosts();
    Attack a = fixtures::attack("attack_alice.txt", env);
    auto guard = parse_script("when bob->mpc = 1: stop\n", env);
    CHECK(validate_script(guard, env, a).size() == 1);
    auto emit = parse_script("emit bob->mpc 1\n", env);
    CHECK(validate_script(emit, env, a).size() == 1);
    CHECK(validate_script(emit, env, fixtures::attack("attack_semihonest.txt", env)).size() == 1);
    CHECK(validate_script(parse_script("dummy\n", env), env, Attack()).empty());
}

TEST_CASE("the projection simulator relays its adversary") {
    std::vector<Channel> chs = {{0, 1}, {1, 0}, {1, 2}};
    std::mt19937 rng(9);
    auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
    for (int i = 0; i < 500; ++i) {
        Plan plan;
        for (int k = 0, n = pick(5); k < n; ++k)
            plan.push_back(pick(2) ? std::optional<Decision>() : Decision::emit({kAdversary, pick(3), Value::integer(k)}));
        PrefixAdversary direct(plan, chs);
        AdversaryP sim = sim_projection(std::make_unique<PrefixAdversary>(plan, chs));
        for (int t = 0; t < 10; ++t) {
            Decision a = direct.decide(), b = sim->decide();
            REQUIRE(a == b);
            if (a.kind == Decision::Kind::Stop) break;
            Observation o{a.ch, pick(2) == 0, std::nullopt};
            direct.observe(o);
            sim->observe(o);
        }
        CHECK(sim->fault().empty());
    }
}
