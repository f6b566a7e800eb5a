// chorc: command-line front end for checking, transforming and running programs.
#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "chorsec/adversary.hpp"
#include "chorsec/explore.hpp"
#include "chorsec/harness.hpp"
#include "chorsec/pipeline.hpp"
#include "chorsec/syncheck.hpp"
#include "chorsec/transform.hpp"
#include "chorsec/typecheck.hpp"

using namespace chorsec;
using json = nlohmann::json;

namespace {

std::string compact_attack(const Attack& a, const AtomTable& atoms) {
    std::string s = attack_to_string(a, atoms), out;
    for (char ch : s) {
        if (ch != '\n') out += ch;
        else if (!out.empty() && out.back() != ';') out += "; ";
    }
    while (!out.empty() && (out.back() == ' ' || out.back() == ';')) out.pop_back();
    return out;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Common {
    std::string hosts_file;
    std::string attack_file;
    bool json_out = false;

    HostEnv env;
    Attack attack;

    void load() {
        env = parse_host_file(slurp(hosts_file));
        if (!attack_file.empty()) attack = parse_attack_file(slurp(attack_file), env.atoms());
    }
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--hosts", c.hosts_file, "host label file")->required();
    cmd->add_option("--attack", c.attack_file, "attack file (default: nothing public or untrusted)");
    cmd->add_flag("--json", c.json_out, "machine-readable report");
}

int emit(const Common& c, const json& report, const std::string& text, bool ok) {
    if (c.json_out)
        std::cout << report.dump(2) << "\n";
    else
        std::cout << text;
    return ok ? 0 : 1;
}

json diagnostics_json(const std::vector<Diagnostic>& ds) {
    json out = json::array();
    for (const auto& d : ds)
        out.push_back({{"rule", d.rule}, {"premise", d.premise}, {"line", d.pos.line}, {"column", d.pos.col},
                       {"message", d.message}});
    return out;
}

std::string diagnostics_text(const std::vector<Diagnostic>& ds) {
    std::string out;
    for (const auto& d : ds)
        out += "error: " + d.rule + " (" + d.premise + ") at " + to_string(d.pos) + ": " + d.message + "\n";
    return out;
}

SyncInit parse_init(const std::string& s) {
    if (s == "top") return SyncInit::Top;
    if (s == "reset") return SyncInit::Reset;
    throw std::runtime_error("--sync-init must be top or reset");
}

Mode parse_mode(const std::string& s) {
    for (Mode m : {Mode::IdealSequential, Mode::IdealConcurrent, Mode::RealSequential, Mode::RealConcurrent,
                   Mode::Async, Mode::SimulatorView})
        if (s == to_string(m)) return m;
    throw std::runtime_error("unknown mode '" + s + "'");
}

// "alice=5,bob=7" or "alice=1 2" per host.
EnvFeed parse_inputs(const std::vector<std::string>& specs, const HostEnv& env) {
    std::vector<std::vector<Value>> per(static_cast<size_t>(env.host_count()));
    for (const auto& spec : specs) {
        std::stringstream ss(spec);
        std::string item;
        while (std::getline(ss, item, ',')) {
            auto eq = item.find('=');
            if (eq == std::string::npos) throw std::runtime_error("bad input '" + item + "', expected host=value");
            auto h = env.find(item.substr(0, eq));
            if (!h) throw std::runtime_error("unknown host in '" + item + "'");
            auto v = parse_value(item.substr(eq + 1));
            if (!v) throw std::runtime_error("bad value in '" + item + "'");
            per[static_cast<size_t>(*h)].push_back(*v);
        }
    }
    return EnvFeed(per);
}

std::vector<Value> parse_domain(const std::string& s) {
    if (s.empty()) return default_domain();
    std::vector<Value> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto v = parse_value(item);
        if (!v) throw std::runtime_error("bad domain value '" + item + "'");
        out.push_back(*v);
    }
    return out;
}

json trace_json(const Trace& t, const HostEnv& env) {
    json out = json::array();
    for (const auto& a : t)
        out.push_back({{"dir", a.dir == Dir::In ? "in" : "out"}, {"from", env.name(a.msg.from)},
                       {"to", env.name(a.msg.to)}, {"value", to_string(a.msg.value)}});
    return out;
}

struct SimReport {
    json j;
    std::string text;
    bool ok = true;
};

SimReport run_simcheck(const Pipeline& p, const std::string& stage_name, const ExploreOptions& opt) {
    SimReport r;
    const HostEnv& env = *p.env;
    SimStage stage = sim_stage(stage_name);
    auto feeds = env_assignments(pipeline_input_sites(p), opt.domain);
    Verdict v = check_simulation(p.config(stage.source), p.config(stage.target), simulator_for(p, stage), env,
                                 p.attack, feeds, opt);
    r.ok = v.pass;
    std::string att = compact_attack(p.attack, env.atoms());
    r.j = {{"stage", stage.name}, {"attack", att}, {"pass", v.pass}, {"runs", v.runs}, {"states", v.states}};
    r.text = std::string(v.pass ? "PASS" : "FAIL") + " simcheck stage=" + stage.name + " attack={" + att +
             "} runs=" + std::to_string(v.runs) + " states=" + std::to_string(v.states) + "\n";
    if (v.counterexample) {
        r.text += to_string(*v.counterexample, env) + "\n";
        json ds = json::array();
        const Plan& plan = v.counterexample->plan;
        for (size_t i = 0; i < plan.size(); ++i)
            if (plan[i]) ds.push_back({{"turn", i + 1}, {"decision", to_string(*plan[i], env)}});
        r.j["counterexample"] = {{"inputs", to_string(v.counterexample->feed, env)},
                                 {"overrides", ds},
                                 {"reason", v.counterexample->reason},
                                 {"target", trace_json(v.counterexample->target_env, env)},
                                 {"source", trace_json(v.counterexample->source_env, env)}};
    }
    return r;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"chorc: secure choreography checker"};
    app.require_subcommand(1);
    Common c;
    std::string file, file2, sync_init = "top", out_dir, mode, adv_file, stage = "all", domain;
    std::vector<std::string> inputs;
    int depth = 6;
    bool skip_sync = false;

    auto* tc = app.add_subcommand("typecheck", "check a program against the label rules");
    tc->add_option("file", file)->required();
    add_common(tc, c);

    auto* sc = app.add_subcommand("synccheck", "check that outputs are synchronized");
    sc->add_option("file", file)->required();
    sc->add_option("--sync-init", sync_init, "initial synchronization context: top or reset");
    add_common(sc, c);

    auto* va = app.add_subcommand("validate", "check that a choreography correctly realizes a source program");
    va->add_option("source", file)->required();
    va->add_option("choreography", file2)->required();
    va->add_option("--sync-init", sync_init, "initial synchronization context: top or reset");
    add_common(va, c);

    auto* co = app.add_subcommand("corrupt", "erase the code of malicious hosts");
    co->add_option("file", file)->required();
    add_common(co, c);

    auto* pr = app.add_subcommand("project", "project a choreography onto each host");
    pr->add_option("file", file)->required();
    pr->add_option("-o,--out", out_dir, "write one <host>.dist file per host into this directory");
    add_common(pr, c);

    auto* ru = app.add_subcommand("run", "run a program once and print its trace");
    ru->add_option("file", file)->required();
    ru->add_option("--mode", mode, "ideal-seq, ideal-conc, real-seq, real-conc, async");
    ru->add_option("--adv", adv_file, "adversary script (default: dummy)");
    ru->add_option("--inputs", inputs, "env inputs, e.g. alice=5,bob=7");
    add_common(ru, c);

    auto* si = app.add_subcommand("simcheck", "check the simulation between pipeline stages");
    si->add_option("file", file)->required();
    si->add_option("--stage", stage, "all, hosts, seq, ideal or proj");
    si->add_option("--depth", depth, "turns on which the adversary may override the dummy scheduler");
    si->add_option("--domain", domain, "comma-separated value domain");
    si->add_flag("--skip-checks", skip_sync, "run even if typecheck or synccheck fail");
    add_common(si, c);

    auto* rh = app.add_subcommand("rhpcheck", "simulation check under every valid attack");
    rh->add_option("file", file)->required();
    rh->add_option("--depth", depth, "turns on which the adversary may override the dummy scheduler");
    rh->add_option("--domain", domain, "comma-separated value domain");
    add_common(rh, c);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        c.load();
        if (*tc) {
            Program p = parse_program(slurp(file), c.env);
            TypeOptions opt;
            opt.source_tier = p.tier == Tier::Source;
            if (!c.attack_file.empty()) opt.attack = c.attack;
            TypeResult r = typecheck(p, c.env, opt);
            json j = {{"ok", r.ok()}, {"diagnostics", diagnostics_json(r.diagnostics)}};
            return emit(c, j, r.ok() ? "ok: well typed\n" : diagnostics_text(r.diagnostics), r.ok());
        }
        if (*sc) {
            Program p = parse_program(slurp(file), c.env);
            SyncResult r = check_sync(p.body, c.env, c.attack, parse_init(sync_init));
            json j = {{"ok", r.ok}, {"message", r.message}};
            if (!r.ok) {
                j["host"] = c.env.name(r.host);
                j["witness"] = c.env.name(r.witness);
                j["line"] = r.pos.line;
            }
            return emit(c, j, r.ok ? "ok: synchronized\n" : "error: " + r.message + "\n", r.ok);
        }
        if (*va) {
            Program src = parse_program(slurp(file), c.env);
            Program chor = parse_program(slurp(file2), c.env);
            SynthesisReport r = validate_synthesis(src.body, chor.body, c.env, c.attack, parse_init(sync_init));
            json j = {{"ok", r.ok()},
                      {"extraction", r.extraction},
                      {"typed", r.typed},
                      {"synchronized", r.synchronized},
                      {"messages", r.messages}};
            std::string text;
            for (const auto& m : r.messages) text += "error: " + m + "\n";
            if (r.ok()) text = "ok: extraction, typing and synchronization hold\n";
            return emit(c, j, text, r.ok());
        }
        if (*co) {
            Program p = parse_program(slurp(file), c.env);
            Program out{Tier::Choreography, kNoEndpoint, corrupt_stmt(p.body, c.env, c.attack)};
            std::string text = pretty_print(out, c.env);
            return emit(c, {{"program", text}}, text, true);
        }
        if (*pr) {
            Program p = parse_program(slurp(file), c.env);
            json j = json::object();
            std::string text;
            for (const auto& [h, hp] : partition(p.body, c.env)) {
                std::string body = pretty_print(Program{Tier::Distributed, h, hp.stmt}, c.env);
                j[c.env.name(h)] = body;
                if (!out_dir.empty()) {
                    std::filesystem::create_directories(out_dir);
                    std::ofstream(std::filesystem::path(out_dir) / (c.env.name(h) + ".dist")) << body;
                } else {
                    text += body + "\n";
                }
            }
            if (!out_dir.empty()) text = "wrote " + std::to_string(c.env.host_count()) + " programs to " + out_dir + "\n";
            return emit(c, j, text, true);
        }
        if (*ru) {
            Program p = parse_program(slurp(file), c.env);
            Pipeline pl{&c.env, c.attack, nullptr};
            Configuration cfg;
            bool ideal_host = false;
            if (p.tier == Tier::Distributed) {
                throw std::runtime_error("run a distributed program through its choreography");
            } else if (p.tier == Tier::Source) {
                pl.choreography = p.body;
                Semantics sem{Mode::IdealSequential, &c.env, c.attack, false};
                std::vector<Ep> hosts{kIdeal};
                for (Ep h = 0; h < c.env.host_count(); ++h) hosts.push_back(h);
                std::sort(hosts.begin(), hosts.end());
                cfg.sem = sem;
                cfg.procs.push_back({hosts, {}, p.body, {}});
                ideal_host = true;
            } else {
                pl.choreography = p.body;
                cfg = mode == "distributed" ? pl.config(Stage::Distributed) : pl.config(Stage::Corrupted);
                if (!mode.empty() && mode != "distributed") cfg.sem.mode = parse_mode(mode);
            }
            if (p.tier == Tier::Source && !mode.empty()) cfg.sem.mode = parse_mode(mode);
            AdversaryP adv;
            auto chans = schedulable_channels(c.env, ideal_host);
            if (adv_file.empty()) {
                adv = std::make_unique<DummyAdversary>(chans);
            } else {
                auto turns = parse_script(slurp(adv_file), c.env);
                for (const auto& problem : validate_script(turns, c.env, c.attack))
                    throw std::runtime_error("adversary script: " + problem);
                adv = std::make_unique<ScriptAdversary>(turns, chans);
            }
            World w(cfg, parse_inputs(inputs, c.env), &c.env, c.attack);
            RunResult r = run(w, *adv, default_max_turns(cfg, c.env));
            json j = {{"trace", trace_json(r.trace, c.env)},
                      {"env_trace", trace_json(r.env_trace, c.env)},
                      {"quiescent", r.quiescent}};
            std::string text;
            for (const auto& a : r.trace) text += to_string(a, c.env) + "\n";
            text += "env trace: " + to_string(r.env_trace, c.env) + "\n";
            if (!r.quiescent) text += "note: the run stopped before quiescence\n";
            return emit(c, j, text, true);
        }
        if (*si || *rh) {
            Program p = parse_program(slurp(file), c.env);
            ExploreOptions opt;
            opt.depth = depth;
            opt.domain = parse_domain(domain);
            std::vector<Attack> attacks;
            if (*rh) {
                attacks = all_valid_attacks(c.env.atoms().size());
            } else {
                attacks = {c.attack};
            }
            json reports = json::array();
            std::string text;
            bool ok = true;
            for (const auto& a : attacks) {
                if (*si && !skip_sync) {
                    TypeOptions topt;
                    topt.attack = a;
                    auto typed = check_stmt({}, p.body, c.env, topt);
                    auto synced = check_sync(p.body, c.env, a);
                    if (!typed.ok() || !synced.ok) {
                        std::string why = !typed.ok() ? diagnostics_text(typed.diagnostics) : synced.message + "\n";
                        throw std::runtime_error("refusing to simulate an unchecked program (use --skip-checks):\n" + why);
                    }
                }
                Pipeline pl{&c.env, a, p.body};
                std::vector<std::string> stages;
                if (*rh) stages = {"all"};
                else stages = {stage};
                for (const auto& st : stages) {
                    try {
                        SimReport r = run_simcheck(pl, st, opt);
                        ok = ok && r.ok;
                        reports.push_back(r.j);
                        text += r.text;
                    } catch (const MaliciousIf& e) {
                        // No valid protocol exists for this attack; typing rules it out.
                        reports.push_back({{"stage", st}, {"attack", compact_attack(a, c.env.atoms())},
                                           {"skipped", e.what()}});
                        text += "SKIP attack={" + compact_attack(a, c.env.atoms()) + "}: " + e.what() + "\n";
                    }
                }
            }
            return emit(c, {{"pass", ok}, {"reports", reports}}, text, ok);
        }
    } catch (const std::exception& e) {
        if (c.json_out)
            std::cout << json{{"error", e.what()}}.dump(2) << "\n";
        else
            std::cerr << "chorc: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
