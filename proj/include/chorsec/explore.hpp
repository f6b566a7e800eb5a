#pragma once

#include <optional>
#include <string>
#include <vector>

#include "chorsec/harness.hpp"

namespace chorsec {

struct ExploreOptions {
    int depth = 6;                              // turns on which the adversary overrides the dummy
    std::vector<Value> domain = default_domain();  // env inputs and injected values
    int max_turns = 0;                          // 0: derived from the program size
    bool share_states = true;                   // reuse results for repeated joint states
};

struct Counterexample {
    EnvFeed feed;
    Plan plan;  // nullopt: the dummy's turn
    std::string reason;
    Trace target_env, source_env;
};

struct Verdict {
    bool pass = true;
    std::optional<Counterexample> counterexample;
    size_t runs = 0;    // adversary × env-input pairs decided
    size_t states = 0;  // distinct joint states explored
};

std::string to_string(const Counterexample& c, const HostEnv& env);

// Decisions of the adversary family at a target state: every channel with an
// enabled step, and injections a host is waiting to consume. A member of the
// family is the dummy scheduler with at most `depth` turns replaced by these.
std::vector<Decision> adversary_options(const World& target, const HostEnv& env, const Attack& attack,
                                        const std::vector<Value>& domain);

int default_max_turns(const Configuration& c, const HostEnv& env);

// Serial reference: enumerates each adversary of the family and runs it from scratch.
Verdict check_simulation_reference(const Configuration& source, const Configuration& target,
                                   const SimBuilder& simulator, const HostEnv& env, const Attack& attack,
                                   const std::vector<EnvFeed>& feeds, const ExploreOptions& opt);

// Shares adversary prefixes and repeated states; env inputs run in parallel.
Verdict check_simulation(const Configuration& source, const Configuration& target, const SimBuilder& simulator,
                         const HostEnv& env, const Attack& attack, const std::vector<EnvFeed>& feeds,
                         const ExploreOptions& opt);

// A fixed list of adversaries instead of the enumerated family.
Verdict check_simulation(const Configuration& source, const Configuration& target,
                         const std::vector<const Adversary*>& family, const SimBuilder& simulator,
                         const HostEnv& env, const Attack& attack, const std::vector<EnvFeed>& feeds, int max_turns);

// Env traces of every interleaving of enabled steps and env deliveries.
TraceSet schedule_traces_reference(const Configuration& c, const EnvFeed& feed, const HostEnv& env,
                                   const Attack& attack);
TraceSet schedule_traces(const Configuration& c, const EnvFeed& feed, const HostEnv& env, const Attack& attack);
// One trace set per feed; feeds are processed in parallel.
std::vector<TraceSet> schedule_traces(const Configuration& c, const std::vector<EnvFeed>& feeds,
                                      const HostEnv& env, const Attack& attack);

}  // namespace chorsec
