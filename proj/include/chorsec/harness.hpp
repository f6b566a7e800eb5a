#pragma once

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "chorsec/adversary.hpp"
#include "chorsec/semantics.hpp"

namespace chorsec {

using Trace = std::vector<Action>;

// Values the environment hands each host, consumed in order.
struct EnvFeed {
    std::vector<std::vector<Value>> inputs;  // indexed by host
    std::vector<size_t> next;

    EnvFeed() = default;
    explicit EnvFeed(std::vector<std::vector<Value>> per_host);
    bool pending(Ep h) const;
    Value take(Ep h);
    bool exhausted() const;
    void encode(std::string& out) const;
};

// Most Input sites at `h` along any path.
int input_sites(const StmtP& s, Ep h);
std::vector<int> input_sites_per_host(const StmtP& s, int host_count);
// Every assignment of domain values to the given input sites.
std::vector<EnvFeed> env_assignments(const std::vector<int>& sites, const std::vector<Value>& domain);
std::string to_string(const EnvFeed& f, const HostEnv& env);

Trace env_restrict(const Trace& t);
bool touches_env(const Action& a);
std::string to_string(const Trace& t, const HostEnv& env);

struct DepthExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A configuration under attack together with its environment.
class World {
public:
    World() = default;
    World(Configuration cfg, EnvFeed feed, const HostEnv* env, Attack attack);

    // Executes one decision; returns the observation for accepts.
    std::optional<Observation> apply(const Decision& d);
    bool quiescent() const;

    const Configuration& config() const { return cfg_; }
    const EnvFeed& feed() const { return feed_; }
    const Trace& env_trace() const { return env_trace_; }
    const Trace& trace() const { return trace_; }
    const std::vector<std::string>& violations() const { return violations_; }
    void keep_full_trace(bool on) { keep_trace_ = on; }
    void encode(std::string& out) const;

private:
    void record(const Action& a);

    Configuration cfg_;
    EnvFeed feed_;
    const HostEnv* env_ = nullptr;
    Attack attack_;
    Trace trace_, env_trace_;
    std::vector<std::string> violations_;
    bool keep_trace_ = true;
};

struct RunResult {
    Trace trace;
    Trace env_trace;
    bool stopped = false;  // the adversary said stop within the turn limit
    bool quiescent = false;
    int turns = 0;
    std::vector<std::string> violations;
};

RunResult run(World w, Adversary& adv, int max_turns);

using TraceSet = std::set<Trace>;

// Env traces over every env input assignment, the adversary fixed.
TraceSet trace_set(const Configuration& c, const Adversary& adv, const HostEnv& env, const Attack& attack,
                   const std::vector<Value>& domain, int depth);

// A target run and the simulated source run, advanced one adversary turn at a time.
struct Lockstep {
    World target;
    AdversaryP adversary;  // attacks the target
    World source;
    AdversaryP simulator;  // attacks the source; wraps a copy of the adversary behind a gate
    bool target_done = false;
    bool source_done = false;
    int turns = 0;
    std::string failure;

    Lockstep() = default;
    Lockstep(const Lockstep& o);
    Lockstep& operator=(const Lockstep& o);
    Lockstep(Lockstep&&) = default;
    Lockstep& operator=(Lockstep&&) = default;

    bool done() const { return target_done && source_done; }
    // One adversary turn on each side, then compares env traces.
    bool step(int max_source_steps = 10000);
    // Feeds `d` to both copies of a prefix adversary and takes the turn.
    bool step_with(const Decision& d);
    // Runs to the end; false on the first divergence.
    bool finish(int max_turns);
    void encode(std::string& out) const;
};

using SimBuilder = std::function<AdversaryP(AdversaryP)>;

Lockstep make_lockstep(const Configuration& source, const Configuration& target, const EnvFeed& feed,
                       const Adversary& adversary, const SimBuilder& simulator, const HostEnv& env,
                       const Attack& attack);

std::string describe_divergence(const Lockstep& l, const HostEnv& env);

}  // namespace chorsec
