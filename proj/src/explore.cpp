#include "chorsec/explore.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

namespace chorsec {

std::string to_string(const Counterexample& c, const HostEnv& env) {
    std::string out = "env inputs: " + to_string(c.feed, env) + "\nadversary: dummy";
    for (size_t i = 0; i < c.plan.size(); ++i)
        if (c.plan[i]) out += ", turn " + std::to_string(i + 1) + ": " + to_string(*c.plan[i], env);
    out += "\n" + c.reason + "\n  target env trace: " + to_string(c.target_env, env) +
           "\n  source env trace: " + to_string(c.source_env, env);
    return out;
}

std::vector<Decision> adversary_options(const World& target, const HostEnv& env, const Attack& attack,
                                        const std::vector<Value>& domain) {
    std::vector<Decision> out;
    std::vector<Channel> chans;
    for (Ep h = 0; h < env.host_count(); ++h)
        if (target.feed().pending(h)) chans.emplace_back(kEnvironment, h);
    for (const auto& st : enabled_config_steps(target.config())) chans.push_back(st.action.msg.channel());
    std::sort(chans.begin(), chans.end());
    chans.erase(std::unique(chans.begin(), chans.end()), chans.end());
    for (const auto& c : chans) out.push_back(Decision::accept(c));
    // Injections, offered when a host waits on a malicious peer.
    std::vector<Channel> waits;
    for (const auto& p : target.config().procs)
        for (const auto& pot : potential_steps(target.config().sem, p)) {
            const Message& m = pot.stmt_action.msg;
            if (pot.stmt_action.dir == Dir::In && !pot.ready && m.from >= 0 && env.malicious(m.from, attack))
                waits.push_back(m.channel());
        }
    std::sort(waits.begin(), waits.end());
    waits.erase(std::unique(waits.begin(), waits.end()), waits.end());
    for (const auto& c : waits)
        for (const auto& v : domain) out.push_back(Decision::emit({c.first, c.second, v}));
    return out;
}

int default_max_turns(const Configuration& c, const HostEnv& env) {
    int size = 0;
    for (const auto& p : c.procs) size += stmt_size(p.stmt) + static_cast<int>(p.buffer.size());
    int channels = static_cast<int>(schedulable_channels(env, true).size());
    return (4 * size + 16) * (channels + 1);
}

namespace {

std::vector<Channel> dummy_channels(const HostEnv& env, const Configuration& target) {
    bool ideal = false;
    for (const auto& p : target.procs) ideal = ideal || p.owns(kIdeal);
    return schedulable_channels(env, ideal);
}

Counterexample make_counterexample(const Lockstep& l, const EnvFeed& feed, Plan plan) {
    Counterexample c;
    c.feed = feed;
    while (!plan.empty() && !plan.back()) plan.pop_back();
    c.plan = std::move(plan);
    c.reason = l.failure;
    c.target_env = l.target.env_trace();
    c.source_env = l.source.env_trace();
    return c;
}

// Overrides replace turns on which the dummy would deliver or stop; a stalled
// turn changes nothing but the dummy's position.
bool override_point(const Decision& dummy, const std::vector<Decision>& opts) {
    return dummy.kind == Decision::Kind::Stop || std::find(opts.begin(), opts.end(), dummy) != opts.end();
}

struct Key {
    std::uint64_t a, b;
    friend bool operator==(const Key&, const Key&) = default;
};

struct KeyHash {
    size_t operator()(const Key& k) const { return static_cast<size_t>(k.a ^ (k.b * 0x9e3779b97f4a7c15ULL)); }
};

Key key_of(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return {std::hash<std::string_view>{}(s), h};
}

class Explorer {
public:
    Explorer(const HostEnv& env, const Attack& attack, const ExploreOptions& opt, int max_turns, EnvFeed feed)
        : env_(env), attack_(attack), opt_(opt), max_turns_(max_turns), feed_(std::move(feed)) {}

    bool dfs(const Lockstep& l, int budget) {
        std::string enc;
        if (opt_.share_states) {
            l.encode(enc);
            encode_int(enc, budget);
            if (seen_.count(key_of(enc))) return true;
        }
        ++states_;
        if (l.done()) {
            ++runs_;
        } else if (l.turns >= max_turns_) {
            Lockstep c = l;
            ++runs_;
            c.finish(max_turns_);
            cex_ = make_counterexample(c, feed_, path_);
            return false;
        } else {
            if (!l.target_done && budget > 0) {
                Decision dummy = find_layer<PrefixAdversary>(l.adversary.get())->dummy_choice();
                auto opts = adversary_options(l.target, env_, attack_, opt_.domain);
                if (override_point(dummy, opts))
                    for (const auto& d : opts) {
                        if (d == dummy) continue;
                        if (!branch(l, d, budget - 1)) return false;
                    }
            }
            if (!branch(l, std::nullopt, budget)) return false;
        }
        if (opt_.share_states) seen_.insert(key_of(enc));
        return true;
    }

    size_t runs_ = 0, states_ = 0;
    std::optional<Counterexample> cex_;

private:
    bool branch(const Lockstep& l, const std::optional<Decision>& d, int budget) {
        Lockstep c = l;
        path_.push_back(d);
        if (!(d ? c.step_with(*d) : c.step())) {
            ++runs_;
            cex_ = make_counterexample(c, feed_, path_);
            return false;
        }
        if (!dfs(c, budget)) return false;
        path_.pop_back();
        return true;
    }

    const HostEnv& env_;
    Attack attack_;
    const ExploreOptions& opt_;
    int max_turns_;
    EnvFeed feed_;
    Plan path_;
    std::unordered_set<Key, KeyHash> seen_;
};

Verdict merge_verdicts(std::vector<Verdict>& parts) {
    Verdict v;
    for (auto& p : parts) {
        v.runs += p.runs;
        v.states += p.states;
        if (!p.pass && v.pass) {
            v.pass = false;
            v.counterexample = std::move(p.counterexample);
        }
    }
    return v;
}

}  // namespace

Verdict check_simulation_reference(const Configuration& source, const Configuration& target,
                                   const SimBuilder& simulator, const HostEnv& env, const Attack& attack,
                                   const std::vector<EnvFeed>& feeds, const ExploreOptions& opt) {
    int max_turns = opt.max_turns > 0 ? opt.max_turns : default_max_turns(target, env);
    auto channels = dummy_channels(env, target);
    Verdict v;
    for (const auto& feed : feeds) {
        // Plans are enumerated against the target alone, then replayed with the simulator.
        std::vector<Plan> family;
        Plan cur;
        std::function<void(const World&, const PrefixAdversary&, int, int)> enumerate =
            [&](const World& w, const PrefixAdversary& a, int budget, int turn) {
                Decision dummy = a.dummy_choice();
                auto opts = budget > 0 && turn < max_turns ? adversary_options(w, env, attack, opt.domain)
                                                           : std::vector<Decision>{};
                if (override_point(dummy, opts))
                    for (const auto& d : opts) {
                        if (d == dummy) continue;
                        World nw = w;
                        nw.keep_full_trace(false);
                        PrefixAdversary na = a;
                        na.push(d);
                        na.decide();
                        if (auto o = nw.apply(d)) na.observe(*o);
                        cur.push_back(d);
                        enumerate(nw, na, budget - 1, turn + 1);
                        cur.pop_back();
                    }
                if (dummy.kind == Decision::Kind::Stop || turn >= max_turns) {
                    family.push_back(cur);
                    return;
                }
                World nw = w;
                nw.keep_full_trace(false);
                PrefixAdversary na = a;
                na.decide();
                if (auto o = nw.apply(dummy)) na.observe(*o);
                cur.push_back(std::nullopt);
                enumerate(nw, na, budget, turn + 1);
                cur.pop_back();
            };
        enumerate(World(target, feed, &env, attack), PrefixAdversary({}, channels), opt.depth, 0);
        for (const auto& plan : family) {
            PrefixAdversary adv(plan, channels);
            Lockstep l = make_lockstep(source, target, feed, adv, simulator, env, attack);
            ++v.runs;
            if (!l.finish(max_turns)) {
                v.pass = false;
                v.counterexample = make_counterexample(l, feed, plan);
                return v;
            }
        }
    }
    return v;
}

Verdict check_simulation(const Configuration& source, const Configuration& target, const SimBuilder& simulator,
                         const HostEnv& env, const Attack& attack, const std::vector<EnvFeed>& feeds,
                         const ExploreOptions& opt) {
    int max_turns = opt.max_turns > 0 ? opt.max_turns : default_max_turns(target, env);
    auto channels = dummy_channels(env, target);
    std::vector<Verdict> parts(feeds.size());
    const long n = static_cast<long>(feeds.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (long i = 0; i < n; ++i) {
        const EnvFeed& feed = feeds[static_cast<size_t>(i)];
        PrefixAdversary adv({}, channels);
        Lockstep root = make_lockstep(source, target, feed, adv, simulator, env, attack);
        root.target.keep_full_trace(false);
        root.source.keep_full_trace(false);
        Explorer ex(env, attack, opt, max_turns, feed);
        Verdict& v = parts[static_cast<size_t>(i)];
        v.pass = ex.dfs(root, opt.depth);
        v.runs = ex.runs_;
        v.states = ex.states_;
        v.counterexample = ex.cex_;
    }
    return merge_verdicts(parts);
}

Verdict check_simulation(const Configuration& source, const Configuration& target,
                         const std::vector<const Adversary*>& family, const SimBuilder& simulator,
                         const HostEnv& env, const Attack& attack, const std::vector<EnvFeed>& feeds,
                         int max_turns) {
    if (max_turns <= 0) max_turns = default_max_turns(target, env);
    Verdict v;
    for (const Adversary* a : family)
        for (const auto& feed : feeds) {
            Lockstep l = make_lockstep(source, target, feed, *a, simulator, env, attack);
            ++v.runs;
            if (!l.finish(max_turns)) {
                v.pass = false;
                v.counterexample = make_counterexample(l, feed, {});
                return v;
            }
        }
    return v;
}

// ---------------------------------------------------------------- schedules

namespace {

struct SchedState {
    Configuration cfg;
    EnvFeed feed;
};

template <class F>
void for_each_successor(const SchedState& s, F&& f) {
    for (Ep h = 0; h < static_cast<Ep>(s.feed.inputs.size()); ++h) {
        if (!s.feed.pending(h)) continue;
        SchedState n = s;
        Message m{kEnvironment, h, n.feed.take(h)};
        deliver(n.cfg, m);
        f(Action{Dir::In, m}, n);
    }
    for (size_t i = 0; i < s.cfg.procs.size(); ++i)
        for (const auto& st : enabled_process_outputs(s.cfg.sem, s.cfg.procs[i])) {
            SchedState n = s;
            apply_output(n.cfg, i, st);
            f(st.action, n);
        }
}

void all_runs(const SchedState& s, Trace& prefix, TraceSet& out) {
    bool any = false;
    for_each_successor(s, [&](const Action& a, const SchedState& n) {
        any = true;
        bool env = touches_env(a);
        if (env) prefix.push_back(a);
        all_runs(n, prefix, out);
        if (env) prefix.pop_back();
    });
    if (!any) out.insert(prefix);
}

class ScheduleMemo {
public:
    const TraceSet& suffixes(const SchedState& s) {
        std::string enc;
        encode_config(enc, s.cfg);
        s.feed.encode(enc);
        Key k = key_of(enc);
        if (auto it = memo_.find(k); it != memo_.end()) return it->second;
        TraceSet out;
        bool any = false;
        for_each_successor(s, [&](const Action& a, const SchedState& n) {
            any = true;
            for (const auto& t : suffixes(n)) {
                if (!touches_env(a)) {
                    out.insert(t);
                    continue;
                }
                Trace full{a};
                full.insert(full.end(), t.begin(), t.end());
                out.insert(std::move(full));
            }
        });
        if (!any) out.insert(Trace{});
        return memo_.emplace(k, std::move(out)).first->second;
    }

private:
    std::unordered_map<Key, TraceSet, KeyHash> memo_;
};

}  // namespace

TraceSet schedule_traces_reference(const Configuration& c, const EnvFeed& feed, const HostEnv&, const Attack&) {
    TraceSet out;
    Trace prefix;
    all_runs({c, feed}, prefix, out);
    return out;
}

TraceSet schedule_traces(const Configuration& c, const EnvFeed& feed, const HostEnv&, const Attack&) {
    ScheduleMemo memo;
    return memo.suffixes({c, feed});
}

std::vector<TraceSet> schedule_traces(const Configuration& c, const std::vector<EnvFeed>& feeds, const HostEnv& env,
                                      const Attack& attack) {
    std::vector<TraceSet> out(feeds.size());
    const long n = static_cast<long>(feeds.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (long i = 0; i < n; ++i) out[static_cast<size_t>(i)] = schedule_traces(c, feeds[static_cast<size_t>(i)], env, attack);
    return out;
}

}  // namespace chorsec
