#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "chorsec/explore.hpp"
#include "chorsec/pipeline.hpp"
#include "chorsec/simulators.hpp"
#include "common.hpp"
#include "gen.hpp"

using namespace chorsec;

namespace {

const std::vector<Value> kSmall = {Value::integer(0), Value::integer(1)};

struct Check {
    Verdict fast, slow;
};

Check both(const Pipeline& p, const std::string& stage, int depth, const std::vector<Value>& domain) {
    SimStage st = sim_stage(stage);
    ExploreOptions opt;
    opt.depth = depth;
    opt.domain = domain;
    auto feeds = env_assignments(pipeline_input_sites(p), domain);
    Configuration src = p.config(st.source), tgt = p.config(st.target);
    SimBuilder sim = simulator_for(p, st);
    return {check_simulation(src, tgt, sim, *p.env, p.attack, feeds, opt),
            check_simulation_reference(src, tgt, sim, *p.env, p.attack, feeds, opt)};
}

// Replays a counterexample from scratch; true if it still fails.
bool replays(const Pipeline& p, const std::string& stage, const Counterexample& c) {
    SimStage st = sim_stage(stage);
    Configuration src = p.config(st.source), tgt = p.config(st.target);
    PrefixAdversary adv(c.plan, schedulable_channels(*p.env, false));
    Lockstep l = make_lockstep(src, tgt, c.feed, adv, simulator_for(p, st), *p.env, p.attack);
    return !l.finish(default_max_turns(tgt, *p.env));
}

}  // namespace

TEST_CASE("memoized and reference exploration agree on millionaires") {
    HostEnv env = fixtures::hosts();
    StmtP c = fixtures::program("millionaires.chor", env).body;
    for (const char* file : {"attack_none.txt", "attack_alice.txt", "attack_bob.txt", "attack_semihonest.txt"}) {
        Pipeline p{&env, fixtures::attack(file, env), c};
        for (const char* stage : {"hosts", "seq", "ideal", "proj", "all"}) {
            Check r = both(p, stage, 1, kSmall);
            CAPTURE(file);
            CAPTURE(stage);
            CHECK(r.fast.pass);
            CHECK(r.slow.pass);
        }
    }
}

TEST_CASE("both explorers find the missing synchronization") {
    HostEnv env = fixtures::hosts();
    Pipeline p{&env, Attack(), fixtures::program("millionaires_nosync.chor", env).body};
    Check r = both(p, "seq", 2, kSmall);
    CHECK_FALSE(r.fast.pass);
    CHECK_FALSE(r.slow.pass);
    REQUIRE(r.fast.counterexample);
    REQUIRE(r.slow.counterexample);
    CHECK(replays(p, "seq", *r.fast.counterexample));
    CHECK(replays(p, "seq", *r.slow.counterexample));
    std::string text = to_string(*r.fast.counterexample, env);
    CHECK(text.find("adversary: dummy, turn ") != std::string::npos);
    CHECK(r.fast.counterexample->reason.find("alice->env") != std::string::npos);

    // Stages that do not reorder still simulate.
    for (const char* stage : {"hosts", "ideal", "proj"}) CHECK(both(p, stage, 2, kSmall).fast.pass);
}

TEST_CASE("explorers agree on generated programs") {
    std::mt19937 rng(11);
    int compared = 0;
    for (int i = 0; i < 60 && compared < 30; ++i) {
        int hosts = 2 + static_cast<int>(rng() % 2);
        HostEnv env = gen::host_env(hosts);
        auto attacks = all_valid_attacks(env.atoms().size());
        Attack a = attacks[rng() % attacks.size()];
        gen::Generator g(env, static_cast<std::uint32_t>(rng()), {hosts, 6, true, true, true});
        StmtP s = g.checked(a, 50);
        if (!s) continue;
        Pipeline p{&env, a, s};
        try {
            p.config(Stage::Distributed);
        } catch (const TransformError&) {
            continue;
        }
        Check r = both(p, "all", 1, kSmall);
        CHECK(r.fast.pass == r.slow.pass);
        if (r.fast.counterexample) CHECK(replays(p, "all", *r.fast.counterexample));
        ++compared;
    }
    CHECK(compared >= 20);
}

TEST_CASE("schedule traces: memoized and reference agree") {
    HostEnv env = fixtures::hosts();
    Pipeline p{&env, Attack(), fixtures::program("millionaires.chor", env).body};
    Configuration dist = p.config(Stage::Distributed);
    auto feeds = env_assignments(pipeline_input_sites(p), kSmall);
    auto fast = schedule_traces(dist, feeds, env, Attack());
    REQUIRE(fast.size() == feeds.size());
    for (size_t i = 0; i < feeds.size(); ++i) {
        CHECK(fast[i] == schedule_traces_reference(dist, feeds[i], env, Attack()));
        CHECK(fast[i] == schedule_traces(dist, feeds[i], env, Attack()));
        CHECK(fast[i].size() >= 1);
    }

    std::mt19937 rng(12);
    int compared = 0;
    for (int i = 0; i < 200 && compared < 60; ++i) {
        HostEnv genv = gen::host_env(3);
        gen::Generator g(genv, static_cast<std::uint32_t>(rng()), {3, 8, true, false, true});
        StmtP s = g.checked();
        if (!s) continue;
        Pipeline gp{&genv, Attack(), s};
        Configuration c = gp.config(Stage::Distributed);
        for (const auto& f : env_assignments(pipeline_input_sites(gp), kSmall))
            CHECK(schedule_traces(c, f, genv, Attack()) == schedule_traces_reference(c, f, genv, Attack()));
        ++compared;
    }
    CHECK(compared == 60);
}

TEST_CASE("the ideal-execution simulator on the corruption example") {
    HostEnv env = fixtures::hosts("hosts_abc.txt");
    Attack alice(env.atoms().mask_of({"A"}), env.atoms().mask_of({"A"}));
    Pipeline p{&env, alice, fixtures::program("corruption.chor", env).body};
    for (const char* stage : {"hosts", "seq", "ideal", "proj", "all"}) {
        CAPTURE(stage);
        CHECK(both(p, stage, 2, kSmall).fast.pass);
    }
}

TEST_CASE("a wrong simulator is caught") {
    HostEnv env = fixtures::hosts();
    Pipeline p{&env, fixtures::attack("attack_alice.txt", env), fixtures::program("millionaires.chor", env).body};
    SimStage st = sim_stage("ideal");
    auto feeds = env_assignments(pipeline_input_sites(p), kSmall);
    ExploreOptions opt;
    opt.depth = 2;
    opt.domain = kSmall;
    // Relaying the adversary unchanged ignores the ideal world's downgrade channels.
    Verdict v = check_simulation(p.config(st.source), p.config(st.target), [](AdversaryP a) { return sim_projection(std::move(a)); },
                                 env, p.attack, feeds, opt);
    CHECK_FALSE(v.pass);
    REQUIRE(v.counterexample);
    CHECK_FALSE(v.counterexample->reason.empty());
}

TEST_CASE("a fixed adversary family") {
    HostEnv env = fixtures::hosts();
    Pipeline p{&env, Attack(), fixtures::program("millionaires.chor", env).body};
    SimStage st = sim_stage("all");
    Configuration tgt = p.config(st.target);
    DummyAdversary dummy(schedulable_channels(env, false));
    PrefixAdversary stopper({Decision::stop()}, schedulable_channels(env, false));
    auto feeds = env_assignments(pipeline_input_sites(p), kSmall);
    Verdict v = check_simulation(p.config(st.source), tgt, {&dummy, &stopper}, simulator_for(p, st), env, p.attack,
                                 feeds, default_max_turns(tgt, env));
    CHECK(v.pass);
    CHECK(v.runs == 2 * feeds.size());
}
