// Acceptance suite: one PASS/FAIL line per criterion, details indented below.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <memory>
#include <regex>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "chorsec/explore.hpp"
#include "chorsec/pipeline.hpp"
#include "chorsec/typecheck.hpp"
#include "common.hpp"

using namespace chorsec;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void expect(bool ok, const std::string& what) {
        detail << "    " << (ok ? "ok   " : "FAIL ") << what << "\n";
        pass = pass && ok;
    }
};

int failures = 0;

std::string one_line(std::string s) {
    while (!s.empty() && s.back() == '\n') s.pop_back();
    for (size_t i; (i = s.find('\n')) != std::string::npos;) s.replace(i, 1, "; ");
    return s;
}

void criterion(int n, const std::string& title, const std::function<void(Outcome&)>& body) {
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    try {
        body(o);
    } catch (const std::exception& e) {
        o.expect(false, std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << n << ": " << title << " (" << std::fixed
              << std::setprecision(1) << secs << "s)\n"
              << o.detail.str() << std::flush;
    if (!o.pass) ++failures;
}

std::vector<Value> acceptance_domain() {
    return {Value::unit(), Value::boolean(true), Value::boolean(false),
            Value::integer(0), Value::integer(1), Value::integer(2)};
}

Verdict simcheck(const Pipeline& p, const std::string& stage, int depth, const std::vector<Value>& domain) {
    SimStage st = sim_stage(stage);
    ExploreOptions opt;
    opt.depth = depth;
    opt.domain = domain;
    auto feeds = env_assignments(pipeline_input_sites(p), domain);
    return check_simulation(p.config(st.source), p.config(st.target), simulator_for(p, st), *p.env, p.attack, feeds,
                            opt);
}

// Runs a doctest binary restricted to the named test cases; every pattern must select a passing case.
bool run_suite(const std::string& binary, const std::string& cases) {
    std::string cmd = std::string(CHORSEC_TEST_BIN_DIR) + "/" + binary + " --test-case='" + cases + "' 2>&1";
    std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmd.c_str(), "r"), pclose);
    if (!pipe) return false;
    std::string out;
    char buf[4096];
    while (size_t n = fread(buf, 1, sizeof buf, pipe.get())) out.append(buf, n);
    int rc = pclose(pipe.release());
    size_t expected = static_cast<size_t>(std::count(cases.begin(), cases.end(), ',')) + 1;
    std::smatch m;
    static const std::regex summary(R"(test cases:\s*(\d+)\s*\|\s*(\d+) passed)");
    return rc == 0 && std::regex_search(out, m, summary) && std::stoul(m[1]) == expected &&
           std::stoul(m[2]) == expected;
}

}  // namespace

int main() {
    criterion(1, "golden pipeline reproduces the distributed millionaires programs", [](Outcome& o) {
        HostEnv env = fixtures::hosts();
        Program src = fixtures::program("millionaires.src", env);
        Program chor = fixtures::program("millionaires.chor", env);
        o.expect(typecheck(src, env).ok(), "source typechecks");
        o.expect(typecheck(chor, env).ok(), "choreography typechecks");
        o.expect(validate_synthesis(src.body, chor.body, env, Attack()).ok(), "choreography is a valid synthesis");
        DistributedProgram d = partition(chor.body, env);
        o.expect(d.size() == 3, "three processes");
        for (const char* h : {"alice", "bob", "mpc"}) {
            Program expected = fixtures::program(std::string("millionaires_") + h + ".dist", env);
            auto it = d.find(*env.find(h));
            o.expect(it != d.end() && alpha_equal(it->second.stmt, expected.body), std::string("process ") + h);
        }
    });

    criterion(2, "every schedule of the projected program gives the source env traces", [](Outcome& o) {
        HostEnv env = fixtures::hosts();
        Pipeline p{&env, Attack(), fixtures::program("millionaires.chor", env).body};
        std::vector<Value> domain = {Value::integer(0), Value::integer(1), Value::integer(2)};
        auto feeds = env_assignments(pipeline_input_sites(p), domain);
        o.expect(feeds.size() == 9, "nine input pairs");
        auto dist = schedule_traces(p.config(Stage::Distributed), feeds, env, Attack());
        auto src = schedule_traces(p.config(Stage::Source), feeds, env, Attack());
        for (size_t i = 0; i < feeds.size(); ++i) {
            bool outputs_ok = true;
            long long a = feeds[i].inputs[0][0].i, b = feeds[i].inputs[1][0].i;
            for (const auto& t : dist[i]) {
                int outs = 0;
                for (const auto& act : t)
                    if (act.dir == Dir::Out) {
                        ++outs;
                        outputs_ok = outputs_ok && act.msg.value == Value::boolean(a < b);
                    }
                outputs_ok = outputs_ok && outs == 2;
            }
            o.expect(dist[i] == src[i] && outputs_ok && !dist[i].empty(),
                     "inputs " + to_string(feeds[i], env) + ": " + std::to_string(dist[i].size()) + " env traces");
        }
    });

    criterion(3, "simulation under every valid attack at depth 6", [](Outcome& o) {
        HostEnv env = fixtures::hosts();
        StmtP c = fixtures::program("millionaires.chor", env).body;
        std::vector<std::string> stages = {"all"};
        for (const auto& s : sim_stages()) stages.push_back(s.name);
        for (const auto& a : all_valid_attacks(env.atoms().size())) {
            Pipeline p{&env, a, c};
            for (const auto& st : stages) {
                Verdict v = simcheck(p, st, 6, acceptance_domain());
                std::string what = "stage " + st + " attack {" + one_line(attack_to_string(a, env.atoms())) + "} runs=" +
                                   std::to_string(v.runs) + " states=" + std::to_string(v.states);
                if (v.counterexample) what += "\n" + to_string(*v.counterexample, env);
                o.expect(v.pass, what);
            }
        }
    });

    criterion(4, "mutations are rejected", [](Outcome& o) {
        HostEnv env = fixtures::hosts();
        StmtP nosync = fixtures::program("millionaires_nosync.chor", env).body;
        SyncResult sr = check_sync(nosync, env, Attack());
        o.expect(!sr.ok, "nosync: synccheck fails (" + sr.message + ")");
        Pipeline p{&env, Attack(), nosync};
        Verdict v = simcheck(p, "all", 6, acceptance_domain());
        bool reorder = v.counterexample && v.counterexample->reason.find("before") != std::string::npos;
        o.expect(!v.pass && reorder, "nosync: simulation counterexample" +
                                         (v.counterexample ? "\n" + to_string(*v.counterexample, env) : std::string()));

        std::string hosts = fixtures::read("hosts.txt");
        hosts.replace(hosts.find("host mpc = <A & B, A & B>"), 25, "host mpc = <A, A>");
        HostEnv weak = parse_host_file(hosts);
        TypeResult r = typecheck(parse_program(fixtures::read("millionaires.chor"), weak), weak);
        bool authority = false;
        for (const auto& d : r.diagnostics) authority = authority || (d.rule == "Lbl-Let" && d.premise == "authority");
        o.expect(!r.ok() && authority, "mpc=<A, A>: typecheck fails at Lbl-Let authority");
    });

    criterion(5, "property suites", [](Outcome& o) {
        struct Suite {
            const char* label;
            const char* binary;
            const char* cases;
        };
        const Suite suites[] = {
            {"lattice laws and filter closure", "test_labels",
             "principal lattice matches*,labels: flows_to*,valid attacks: public*"},
            {"input totality and determinism", "test_properties", "input totality,internal and per-channel*"},
            {"diamond", "test_properties", "diamond*"},
            {"type and sync preservation", "test_properties", "typing and synchronization are preserved*"},
            {"robust typing and sync", "test_properties", "robust typing*"},
            {"robust declassification and transparent endorsement", "test_properties", "robust declassification*"},
            {"projection bisimulation with case refinement", "test_properties", "projection is a bisimulation*"},
            {"corrupt and partition commute", "test_properties", "corruption commutes*"},
        };
        for (const auto& s : suites) o.expect(run_suite(s.binary, s.cases), s.label);
    });

    criterion(6, "corruption example with alice malicious", [](Outcome& o) {
        HostEnv env = fixtures::hosts("hosts_abc.txt");
        Attack alice(env.atoms().mask_of({"A"}), env.atoms().mask_of({"A"}));
        StmtP got = corrupt_stmt(fixtures::program("corruption.chor", env).body, env, alice);
        StmtP expected = fixtures::program("corruption_expected.chor", env).body;
        o.expect(alpha_equal(got, expected), "matches the expected corrupted choreography");
    });

    return failures == 0 ? 0 : 1;
}
