#include "chorsec/harness.hpp"

#include <algorithm>

namespace chorsec {

EnvFeed::EnvFeed(std::vector<std::vector<Value>> per_host)
    : inputs(std::move(per_host)), next(inputs.size(), 0) {}

bool EnvFeed::pending(Ep h) const {
    return h >= 0 && static_cast<size_t>(h) < inputs.size() && next[h] < inputs[h].size();
}

Value EnvFeed::take(Ep h) { return inputs[h][next[h]++]; }

bool EnvFeed::exhausted() const {
    for (size_t h = 0; h < inputs.size(); ++h)
        if (next[h] < inputs[h].size()) return false;
    return true;
}

void EnvFeed::encode(std::string& out) const {
    out += 'F';
    for (size_t h = 0; h < inputs.size(); ++h) {
        for (size_t k = next[h]; k < inputs[h].size(); ++k) encode_value(out, inputs[h][k]);
        out += ';';
    }
}

int input_sites(const StmtP& s, Ep h) {
    switch (s->kind) {
        case StmtKind::Skip: return 0;
        case StmtKind::If: return std::max(input_sites(s->then_branch, h), input_sites(s->else_branch, h));
        case StmtKind::Case: {
            int best = 0;
            for (const auto& [v, b] : s->cases) best = std::max(best, input_sites(b, h));
            return best;
        }
        case StmtKind::Let: {
            int here = s->expr.kind == ExprKind::Input && s->h1 == h ? 1 : 0;
            return here + input_sites(s->next, h);
        }
        default: return input_sites(s->next, h);
    }
}

std::vector<int> input_sites_per_host(const StmtP& s, int host_count) {
    std::vector<int> out;
    for (Ep h = 0; h < host_count; ++h) out.push_back(input_sites(s, h));
    return out;
}

std::vector<EnvFeed> env_assignments(const std::vector<int>& sites, const std::vector<Value>& domain) {
    int total = 0;
    for (int k : sites) total += k;
    std::vector<EnvFeed> out;
    std::vector<size_t> digits(static_cast<size_t>(total), 0);
    for (;;) {
        std::vector<std::vector<Value>> per_host(sites.size());
        size_t d = 0;
        for (size_t h = 0; h < sites.size(); ++h)
            for (int k = 0; k < sites[h]; ++k) per_host[h].push_back(domain[digits[d++]]);
        out.emplace_back(std::move(per_host));
        size_t i = 0;
        while (i < digits.size() && ++digits[i] == domain.size()) digits[i++] = 0;
        if (i == digits.size()) break;
    }
    return out;
}

std::string to_string(const EnvFeed& f, const HostEnv& env) {
    std::string out;
    for (size_t h = 0; h < f.inputs.size(); ++h) {
        if (f.inputs[h].empty()) continue;
        if (!out.empty()) out += ", ";
        out += env.name(static_cast<Ep>(h)) + "=[";
        for (size_t k = 0; k < f.inputs[h].size(); ++k) out += (k ? " " : "") + to_string(f.inputs[h][k]);
        out += "]";
    }
    return out;
}

bool touches_env(const Action& a) { return a.msg.from == kEnvironment || a.msg.to == kEnvironment; }

Trace env_restrict(const Trace& t) {
    Trace out;
    for (const auto& a : t)
        if (touches_env(a)) out.push_back(a);
    return out;
}

std::string to_string(const Trace& t, const HostEnv& env) {
    std::string out = "[";
    for (size_t i = 0; i < t.size(); ++i) out += (i ? ", " : "") + to_string(t[i], env);
    return out + "]";
}

// ---------------------------------------------------------------- worlds

World::World(Configuration cfg, EnvFeed feed, const HostEnv* env, Attack attack)
    : cfg_(std::move(cfg)), feed_(std::move(feed)), env_(env), attack_(attack) {}

void World::record(const Action& a) {
    if (keep_trace_) trace_.push_back(a);
    if (touches_env(a)) env_trace_.push_back(a);
}

std::optional<Observation> World::apply(const Decision& d) {
    switch (d.kind) {
        case Decision::Kind::Emit: {
            if (!may_emit(d.msg, *env_, attack_)) {
                violations_.push_back("forbidden emission " + to_string(d, *env_));
                return std::nullopt;
            }
            deliver(cfg_, d.msg);
            record({d.msg.to == kEnvironment ? Dir::Out : Dir::In, d.msg});
            return std::nullopt;
        }
        case Decision::Kind::Accept: {
            const Channel& ch = d.ch;
            if (ch.first == kEnvironment) {
                if (!feed_.pending(ch.second)) return Observation::stalled(ch);
                Message m{kEnvironment, ch.second, feed_.take(ch.second)};
                deliver(cfg_, m);
                Action a{Dir::In, m};
                record(a);
                return observe_action(a, *env_, attack_);
            }
            auto st = output_on(cfg_, ch);
            if (!st) return Observation::stalled(ch);
            Action a = st->second.action;
            apply_output(cfg_, st->first, st->second);
            record(a);
            return observe_action(a, *env_, attack_);
        }
        default: return std::nullopt;
    }
}

bool World::quiescent() const { return feed_.exhausted() && enabled_config_steps(cfg_).empty(); }

void World::encode(std::string& out) const {
    encode_config(out, cfg_);
    feed_.encode(out);
}

RunResult run(World w, Adversary& adv, int max_turns) {
    RunResult r;
    for (; r.turns < max_turns; ++r.turns) {
        Decision d = adv.decide();
        if (d.kind == Decision::Kind::Stop || d.kind == Decision::Kind::Yield) {
            r.stopped = true;
            break;
        }
        if (auto o = w.apply(d)) adv.observe(*o);
    }
    r.trace = w.trace();
    r.env_trace = w.env_trace();
    r.quiescent = w.quiescent();
    r.violations = w.violations();
    return r;
}

TraceSet trace_set(const Configuration& c, const Adversary& adv, const HostEnv& env, const Attack& attack,
                   const std::vector<Value>& domain, int depth) {
    std::vector<int> sites(static_cast<size_t>(env.host_count()), 0);
    for (const auto& p : c.procs)
        for (Ep h = 0; h < env.host_count(); ++h) sites[h] = std::max(sites[h], input_sites(p.stmt, h));
    TraceSet out;
    for (const auto& feed : env_assignments(sites, domain)) {
        auto a = adv.clone();
        RunResult r = run(World(c, feed, &env, attack), *a, depth);
        if (!r.stopped) throw DepthExceeded("adversary still active after " + std::to_string(depth) + " turns");
        out.insert(r.env_trace);
    }
    return out;
}

// ---------------------------------------------------------------- lockstep

Lockstep::Lockstep(const Lockstep& o)
    : target(o.target),
      adversary(o.adversary->clone()),
      source(o.source),
      simulator(o.simulator->clone()),
      target_done(o.target_done),
      source_done(o.source_done),
      turns(o.turns),
      failure(o.failure) {}

Lockstep& Lockstep::operator=(const Lockstep& o) {
    if (this != &o) *this = Lockstep(o);
    return *this;
}

bool Lockstep::step(int max_source_steps) {
    if (!target_done) {
        Decision d = adversary->decide();
        if (d.kind == Decision::Kind::Stop || d.kind == Decision::Kind::Yield)
            target_done = true;
        else if (auto o = target.apply(d))
            adversary->observe(*o);
    }
    if (!source_done) {
        find_layer<GatedAdversary>(simulator.get())->allow(1);
        for (int n = 0;; ++n) {
            if (n > max_source_steps) {
                failure = "simulator keeps running without consulting the adversary";
                return false;
            }
            Decision d = simulator->decide();
            if (d.kind == Decision::Kind::Yield) break;
            if (d.kind == Decision::Kind::Stop) {
                source_done = true;
                break;
            }
            if (auto o = source.apply(d)) simulator->observe(*o);
        }
    }
    ++turns;
    if (std::string f = simulator->fault(); !f.empty()) {
        failure = "simulator fault: " + f;
        return false;
    }
    if (!source.violations().empty()) {
        failure = "simulator broke the adversary interface: " + source.violations().front();
        return false;
    }
    if (const auto* real = find_layer<PrefixAdversary>(adversary.get())) {
        const auto* copy = find_layer<PrefixAdversary>(simulator.get());
        if (copy && real->last_observation() != copy->last_observation()) {
            failure = "adversary views diverge";
            return false;
        }
    }
    if (target.env_trace() != source.env_trace()) {
        failure = "environment traces diverge";
        return false;
    }
    return true;
}

bool Lockstep::step_with(const Decision& d) {
    find_layer<PrefixAdversary>(adversary.get())->push(d);
    find_layer<PrefixAdversary>(simulator.get())->push(d);
    return step();
}

bool Lockstep::finish(int max_turns) {
    while (!done()) {
        if (turns >= max_turns) {
            failure = "depth exceeded: no quiescence after " + std::to_string(max_turns) + " turns";
            return false;
        }
        if (!step()) return false;
    }
    return true;
}

void Lockstep::encode(std::string& out) const {
    target.encode(out);
    adversary->encode(out);
    out += target_done ? 'T' : 't';
    source.encode(out);
    simulator->encode(out);
    out += source_done ? 'S' : 's';
}

Lockstep make_lockstep(const Configuration& source, const Configuration& target, const EnvFeed& feed,
                       const Adversary& adversary, const SimBuilder& simulator, const HostEnv& env,
                       const Attack& attack) {
    Lockstep l;
    l.target = World(target, feed, &env, attack);
    l.source = World(source, feed, &env, attack);
    l.adversary = adversary.clone();
    l.simulator = simulator(std::make_unique<GatedAdversary>(adversary.clone()));
    return l;
}

std::string describe_divergence(const Lockstep& l, const HostEnv& env) {
    return l.failure + "\n  target env trace: " + to_string(l.target.env_trace(), env) +
           "\n  source env trace: " + to_string(l.source.env_trace(), env);
}

}  // namespace chorsec
