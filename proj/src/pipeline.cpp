#include "chorsec/pipeline.hpp"

#include <algorithm>
#include <stdexcept>

#include "chorsec/simulators.hpp"

namespace chorsec {

const char* to_string(Stage s) {
    switch (s) {
        case Stage::Source: return "source";
        case Stage::Choreography: return "choreography";
        case Stage::Corrupted: return "corrupted";
        case Stage::CorruptedConcurrent: return "corrupted-concurrent";
        case Stage::CorruptedReal: return "corrupted-real";
        case Stage::CorruptedAsync: return "corrupted-async";
        case Stage::Distributed: return "distributed";
    }
    return "?";
}

namespace {

Configuration single(const Semantics& sem, std::vector<Ep> hosts, StmtP s) {
    std::sort(hosts.begin(), hosts.end());
    Configuration c;
    c.sem = sem;
    c.procs.push_back(ProcessState{std::move(hosts), {}, std::move(s), {}});
    return c;
}

}  // namespace

Configuration Pipeline::config(Stage s) const {
    Semantics sem;
    sem.env = env;
    sem.attack = attack;
    std::vector<Ep> all, good;
    for (Ep h = 0; h < env->host_count(); ++h) {
        all.push_back(h);
        if (!env->malicious(h, attack)) good.push_back(h);
    }
    switch (s) {
        case Stage::Source: {
            sem.mode = Mode::IdealSequential;
            auto hosts = all;
            hosts.push_back(kIdeal);
            return single(sem, hosts, source_of(choreography));
        }
        case Stage::Choreography:
            sem.mode = Mode::IdealSequential;
            return single(sem, all, choreography);
        default: break;
    }
    StmtP corrupted = corrupt_stmt(choreography, *env, attack);
    switch (s) {
        case Stage::Corrupted: sem.mode = Mode::IdealSequential; break;
        case Stage::CorruptedConcurrent: sem.mode = Mode::IdealConcurrent; break;
        case Stage::CorruptedReal: sem.mode = Mode::RealConcurrent; break;
        case Stage::CorruptedAsync: sem.mode = Mode::Async; break;
        case Stage::Distributed: {
            sem.mode = Mode::RealConcurrent;
            Configuration c;
            c.sem = sem;
            for (const auto& [h, prog] : corrupt_config(partition(choreography, *env), *env, attack))
                c.procs.push_back(ProcessState{{h}, prog.buffer, prog.stmt, {}});
            return c;
        }
        default: break;
    }
    return single(sem, good, corrupted);
}

std::vector<SimStage> sim_stages() {
    return {{"hosts", Stage::Source, Stage::Corrupted},
            {"seq", Stage::Corrupted, Stage::CorruptedConcurrent},
            {"ideal", Stage::CorruptedConcurrent, Stage::CorruptedAsync},
            {"proj", Stage::CorruptedAsync, Stage::Distributed}};
}

SimStage sim_stage(const std::string& name) {
    if (name == "all") return {"all", Stage::Source, Stage::Distributed};
    for (const auto& s : sim_stages())
        if (s.name == name) return s;
    throw std::invalid_argument("unknown stage '" + name + "' (expected all, hosts, seq, ideal or proj)");
}

SimBuilder simulator_for(const Pipeline& p, const SimStage& s) {
    // Each layer turns an adversary against stage k+1 into one against stage k.
    std::vector<SimBuilder> layers;  // outermost first
    const HostEnv& env = *p.env;
    Attack a = p.attack;
    auto from = static_cast<int>(s.source), to = static_cast<int>(s.target);
    if (from <= 0 && to >= 2) {
        Configuration ch = p.config(Stage::Choreography);
        layers.push_back([ch, &env, a](AdversaryP x) { return sim_host_selection(std::move(x), ch, env, a); });
        Configuration cor = p.config(Stage::Corrupted);
        layers.push_back(
            [cor, ch, &env, a](AdversaryP x) { return sim_corruption(std::move(x), cor, ch, env, a); });
    }
    if (from <= 2 && to >= 3) {
        Configuration seq = p.config(Stage::Corrupted), conc = p.config(Stage::CorruptedConcurrent);
        layers.push_back(
            [conc, seq, &env, a](AdversaryP x) { return sim_sequentialization(std::move(x), conc, seq, env, a); });
    }
    if (from <= 3 && to >= 5) {
        Configuration view = p.config(Stage::CorruptedAsync);
        layers.push_back([view, &env, a](AdversaryP x) { return sim_ideal_execution(std::move(x), view, env, a); });
    }
    if (from <= 5 && to >= 6) layers.push_back([](AdversaryP x) { return sim_projection(std::move(x)); });
    return [layers](AdversaryP x) {
        for (auto it = layers.rbegin(); it != layers.rend(); ++it) x = (*it)(std::move(x));
        return x;
    };
}

std::vector<int> pipeline_input_sites(const Pipeline& p) { return input_sites_per_host(p.choreography, p.env->host_count()); }

}  // namespace chorsec
