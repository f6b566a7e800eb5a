// Serial reference explorers vs the memoized parallel ones on the millionaires pipeline.

#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>

#include "chorsec/explore.hpp"
#include "chorsec/pipeline.hpp"

using namespace chorsec;

namespace {

std::string read(const std::string& name) {
    std::ifstream in(std::string(CHORSEC_PROGRAMS) + "/" + name);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Fixture {
    HostEnv env = parse_host_file(read("hosts.txt"));
    StmtP chor = parse_program(read("millionaires.chor"), env).body;
    std::vector<Value> domain = {Value::integer(0), Value::integer(1), Value::integer(2)};
};

const Fixture& fixture() {
    static Fixture f;
    return f;
}

template <bool Reference>
void simulation(benchmark::State& state) {
    const Fixture& f = fixture();
    Pipeline p{&f.env, Attack(), f.chor};
    SimStage st = sim_stage("all");
    ExploreOptions opt;
    opt.depth = static_cast<int>(state.range(0));
    opt.domain = f.domain;
    auto feeds = env_assignments(pipeline_input_sites(p), f.domain);
    Configuration src = p.config(st.source), tgt = p.config(st.target);
    SimBuilder sim = simulator_for(p, st);
    for (auto _ : state) {
        Verdict v = Reference ? check_simulation_reference(src, tgt, sim, f.env, p.attack, feeds, opt)
                              : check_simulation(src, tgt, sim, f.env, p.attack, feeds, opt);
        if (!v.pass) state.SkipWithError("simulation failed");
        state.counters["runs"] = static_cast<double>(v.runs);
    }
}

template <bool Reference>
void schedules(benchmark::State& state) {
    const Fixture& f = fixture();
    Pipeline p{&f.env, Attack(), f.chor};
    Configuration dist = p.config(Stage::Distributed);
    auto feeds = env_assignments(pipeline_input_sites(p), f.domain);
    for (auto _ : state) {
        size_t traces = 0;
        if (Reference) {
            for (const auto& feed : feeds) traces += schedule_traces_reference(dist, feed, f.env, Attack()).size();
        } else {
            for (const auto& ts : schedule_traces(dist, feeds, f.env, Attack())) traces += ts.size();
        }
        benchmark::DoNotOptimize(traces);
    }
}

}  // namespace

BENCHMARK(simulation<true>)->Name("check_simulation_reference")->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);
BENCHMARK(simulation<false>)->Name("check_simulation")->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(schedules<true>)->Name("schedule_traces_reference")->Unit(benchmark::kMillisecond);
BENCHMARK(schedules<false>)->Name("schedule_traces")->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
