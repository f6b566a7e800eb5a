#pragma once
// Random choreographies for property tests.

#include <random>
#include <string>
#include <vector>

#include "chorsec/lang.hpp"
#include "chorsec/syncheck.hpp"
#include "chorsec/transform.hpp"
#include "chorsec/typecheck.hpp"

namespace gen {

using namespace chorsec;

inline HostEnv host_env(int hosts) {
    static const char* lines[] = {"host alice = <A, A>\n", "host bob = <B, B>\n", "host mpc = <A & B, A & B>\n",
                                  "host chuck = <C, C>\n"};
    std::string text;
    for (int i = 0; i < hosts; ++i) text += lines[i];
    return parse_host_file(text);
}

struct Options {
    int hosts = 3;
    int max_stmts = 12;
    bool ifs = true;
    bool downgrades = true;
    bool outputs = true;
};

class Generator {
public:
    Generator(const HostEnv& env, std::uint32_t seed, Options opt = {}) : env_(env), rng_(seed), opt_(opt) {}

    // A choreography with at most opt.max_stmts statements; not necessarily well-typed.
    StmtP any() {
        budget_ = 1 + pick(opt_.max_stmts);
        return block({}, 0);
    }

    // Retries until the program typechecks, is synchronized under `attack`
    // and projects; returns nullptr if no such program turns up.
    StmtP checked(const Attack& attack = {}, int tries = 200) {
        for (int i = 0; i < tries; ++i) {
            StmtP s = any();
            if (stmt_size(s) > opt_.max_stmts) continue;
            if (!check_stmt({}, s, env_).ok()) continue;
            if (!check_sync(s, env_, attack).ok) continue;
            try {
                partition(s, env_);
            } catch (const TransformError&) {
                continue;
            }
            return s;
        }
        return nullptr;
    }

    int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }
    std::mt19937& rng() { return rng_; }

private:
    struct Known {
        Var x;
        Ep h;
        Label l;
    };

    Var name(const char* base) { return fresh_var(base + std::to_string(++names_)); }

    Ep host() { return static_cast<Ep>(pick(env_.host_count())); }

    Value literal() {
        switch (pick(3)) {
            case 0: return Value::unit();
            case 1: return Value::boolean(pick(2) == 0);
            default: return Value::integer(pick(3));
        }
    }

    std::vector<const Known*> at(const std::vector<Known>& ctx, Ep h) {
        std::vector<const Known*> out;
        for (const auto& k : ctx)
            if (k.h == h) out.push_back(&k);
        return out;
    }

    Atom atom_at(const std::vector<Known>& ctx, Ep h) {
        auto vs = at(ctx, h);
        if (vs.empty() || pick(4) == 0) return Atom::of(literal());
        return Atom::of(vs[pick(static_cast<int>(vs.size()))]->x);
    }

    Label label_of(const std::vector<Known>& ctx, const Atom& a) {
        if (!a.is_var()) return least_restrictive();
        for (const auto& k : ctx)
            if (k.x == a.var) return k.l;
        return least_restrictive();
    }

    Label stored(Ep h, const Label& lower) { return label_join(lower, integ_projection(env_.label(h))); }

    Principal some_principal() {
        switch (pick(4)) {
            case 0: return Principal::bot();
            case 1: return env_.label(host()).conf;
            case 2: return env_.label(host()).conf | env_.label(host()).conf;
            default: return env_.label(host()).conf & env_.label(host()).conf;
        }
    }

    StmtP block(std::vector<Known> ctx, int nest) {
        if (budget_ <= 0) return skip();
        --budget_;
        int kind = pick(opt_.ifs && nest < 2 && budget_ >= 2 ? 9 : 8);
        Ep h = host();
        auto let = [&](Expr e, const Label& l) {
            Var x = name("x");
            ctx.push_back({x, h, stored(h, l)});
            StmtP next = block(ctx, nest);
            return mk_let(x, h, std::move(e), next);
        };
        switch (kind) {
            case 0:
            case 1: return let(Expr::input(h), env_.label(h));
            case 2: {
                static const Op ops[] = {Op::Add, Op::Sub, Op::Lt, Op::Eq, Op::And, Op::Or, Op::Not};
                Op op = ops[pick(7)];
                std::vector<Atom> args;
                Label l = least_restrictive();
                for (int i = 0; i < op_arity(op); ++i) {
                    args.push_back(atom_at(ctx, h));
                    l = label_join(l, label_of(ctx, args.back()));
                }
                return let(Expr::operation(op, std::move(args)), l);
            }
            case 3:
            case 4: {
                Ep h2 = host();
                if (h2 == h) h2 = static_cast<Ep>((h + 1) % env_.host_count());
                Atom a = atom_at(ctx, h);
                Var x = name("m");
                ctx.push_back({x, h2, stored(h2, label_of(ctx, a))});
                StmtP next = block(ctx, nest);
                return mk_move(h, a, h2, x, next);
            }
            case 5: {
                if (!opt_.outputs) return block(ctx, nest);
                Atom a = atom_at(ctx, h);
                Var x = fresh_var("_");
                StmtP next = block(ctx, nest);
                return mk_let(x, h, Expr::output(a, h), next);
            }
            case 6:
            case 7: {
                if (!opt_.downgrades) return block(ctx, nest);
                Atom a = atom_at(ctx, h);
                Label from = label_of(ctx, a);
                if (kind == 6) {
                    Label to{some_principal() | from.conf, from.integ};
                    return let(Expr::declassify(a, from, to), to);
                }
                Label to{from.conf, some_principal() & from.integ};
                if (pick(2)) to.integ = from.integ & env_.label(h).integ;
                return let(Expr::endorse(a, from, to), to);
            }
            default: {
                // Literal guard; every other host in the branches learns the choice.
                int keep = budget_;
                budget_ = keep / 2;
                StmtP t = block(ctx, nest + 1);
                budget_ = keep - keep / 2;
                StmtP e = block(ctx, nest + 1);
                budget_ = 0;
                std::set<Ep> told = hosts_mentioned(t), te = hosts_mentioned(e);
                told.insert(te.begin(), te.end());
                told.erase(h);
                for (Ep o : told) {
                    t = mk_select(h, Value::boolean(true), o, t);
                    e = mk_select(h, Value::boolean(false), o, e);
                }
                return mk_if(Atom::of(Value::boolean(pick(2) == 0)), h, t, e);
            }
        }
    }

    const HostEnv& env_;
    std::mt19937 rng_;
    Options opt_;
    int budget_ = 0;
    int names_ = 0;
};

}  // namespace gen
