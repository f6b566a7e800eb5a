#include "chorsec/transform.hpp"

#include <map>

namespace chorsec {

StmtP source_of(const StmtP& s) {
    switch (s->kind) {
        case StmtKind::Skip: return s;
        case StmtKind::Let: {
            Ep h = s->expr.is_io() ? s->h1 : kIdeal;
            return mk_let(s->var, h, s->expr, source_of(s->next), s->pos);
        }
        case StmtKind::Move: return source_of(substitute(s->next, s->var, s->atom));
        case StmtKind::Select: return source_of(s->next);
        case StmtKind::If:
            return mk_if(s->atom, kIdeal, source_of(s->then_branch), source_of(s->else_branch), s->pos);
        default: throw TransformError("source extraction applies to choreographies only");
    }
}

SynthesisReport validate_synthesis(const StmtP& source, const StmtP& choreography, const HostEnv& env,
                                   const Attack& attack, SyncInit init) {
    SynthesisReport r;
    r.extraction = alpha_equal(source_of(choreography), source);
    if (!r.extraction) r.messages.push_back("extraction: the choreography does not realize the source program");
    TypeOptions opt;
    opt.attack = attack;
    auto typed = check_stmt({}, choreography, env, opt);
    r.typed = typed.ok();
    r.diagnostics = typed.diagnostics;
    for (const auto& d : typed.diagnostics)
        r.messages.push_back("typecheck: " + d.rule + " (" + d.premise + ") at " + to_string(d.pos) + ": " + d.message);
    r.sync = check_sync(choreography, env, attack, init);
    r.synchronized = r.sync.ok;
    if (!r.synchronized) r.messages.push_back("synccheck: " + r.sync.message);
    return r;
}

StmtP corrupt_stmt(const StmtP& s, const HostEnv& env, const Attack& attack) {
    auto good = [&](Ep h) { return !env.malicious(h, attack); };
    switch (s->kind) {
        case StmtKind::Skip: return s;
        case StmtKind::Let:
            if (good(s->h1)) return with_next(*s, corrupt_stmt(s->next, env, attack));
            return corrupt_stmt(s->next, env, attack);
        case StmtKind::Move: {
            StmtP rest = corrupt_stmt(s->next, env, attack);
            bool g1 = good(s->h1), g2 = good(s->h2);
            if (g1 && g2) return with_next(*s, rest);
            if (g1) return mk_let(fresh_var("_"), s->h1, Expr::send(s->atom, s->h2), rest, s->pos);
            if (g2) return mk_let(s->var, s->h2, Expr::receive(s->h1), rest, s->pos);
            return rest;
        }
        case StmtKind::Select: {
            StmtP rest = corrupt_stmt(s->next, env, attack);
            bool g1 = good(s->h1), g2 = good(s->h2);
            if (g1 && g2) return with_next(*s, rest);
            if (g1) return mk_let(fresh_var("_"), s->h1, Expr::send(Atom::of(s->val), s->h2), rest, s->pos);
            return rest;
        }
        case StmtKind::If: {
            if (!good(s->h1))
                throw MaliciousIf("conditional at " + to_string(s->pos) + " sits on malicious host " + env.name(s->h1));
            return mk_if(s->atom, s->h1, corrupt_stmt(s->then_branch, env, attack),
                         corrupt_stmt(s->else_branch, env, attack), s->pos);
        }
        default: throw TransformError("corruption applies to choreographies only");
    }
}

DistributedProgram corrupt_config(const DistributedProgram& d, const HostEnv& env, const Attack& attack) {
    DistributedProgram out;
    for (const auto& [h, p] : d)
        if (!env.malicious(h, attack)) out.emplace(h, p);
    return out;
}

namespace {

bool congruent_expr(const Expr& a, const Expr& b) { return a == b; }

}  // namespace

StmtP merge(const StmtP& s1, const StmtP& s2) {
    if (s1.get() == s2.get() || stmt_equal(s1, s2)) return s1;
    if (s1->kind != s2->kind) throw MergeFailure("cannot merge statements of different shapes");
    switch (s1->kind) {
        case StmtKind::Case: {
            if (s1->h1 != s2->h1 || s1->h2 != s2->h2) throw MergeFailure("cannot merge case on different channels");
            // Disjoint labels are united; a shared label merges its branches.
            std::map<Value, StmtP> cases(s1->cases.begin(), s1->cases.end());
            for (const auto& [v, b] : s2->cases) {
                auto it = cases.find(v);
                if (it == cases.end())
                    cases.emplace(v, b);
                else
                    it->second = merge(it->second, b);
            }
            return mk_case(s1->h1, s1->h2, {cases.begin(), cases.end()}, s1->pos);
        }
        case StmtKind::Let: {
            if (s1->h1 != s2->h1 || !congruent_expr(s1->expr, s2->expr))
                throw MergeFailure("cannot merge different let statements");
            StmtP rest2 = s1->var == s2->var ? s2->next : substitute(s2->next, s2->var, Atom::of(s1->var));
            return with_next(*s1, merge(s1->next, rest2));
        }
        case StmtKind::Move: {
            if (s1->h1 != s2->h1 || s1->h2 != s2->h2 || !(s1->atom == s2->atom))
                throw MergeFailure("cannot merge different moves");
            StmtP rest2 = s1->var == s2->var ? s2->next : substitute(s2->next, s2->var, Atom::of(s1->var));
            return with_next(*s1, merge(s1->next, rest2));
        }
        case StmtKind::Select:
            if (s1->h1 != s2->h1 || s1->h2 != s2->h2 || s1->val != s2->val)
                throw MergeFailure("cannot merge different selections");
            return with_next(*s1, merge(s1->next, s2->next));
        case StmtKind::If:
            if (s1->h1 != s2->h1 || !(s1->atom == s2->atom)) throw MergeFailure("cannot merge different conditionals");
            return mk_if(s1->atom, s1->h1, merge(s1->then_branch, s2->then_branch),
                         merge(s1->else_branch, s2->else_branch), s1->pos);
        case StmtKind::Skip: return s1;
        default: throw MergeFailure("cannot merge run-time statements");
    }
}

StmtP project(const StmtP& s, Ep h, Buffer* inflight) {
    switch (s->kind) {
        case StmtKind::Skip: return s;
        case StmtKind::Let:
            if (s->h1 == h) return with_next(*s, project(s->next, h, inflight));
            return project(s->next, h, inflight);
        case StmtKind::Move:
            if (s->h1 == h) return mk_let(fresh_var("_"), h, Expr::send(s->atom, s->h2), project(s->next, h, inflight), s->pos);
            if (s->h2 == h) return mk_let(s->var, h, Expr::receive(s->h1), project(s->next, h, inflight), s->pos);
            return project(s->next, h, inflight);
        case StmtKind::Select:
            if (s->h1 == h)
                return mk_let(fresh_var("_"), h, Expr::send(Atom::of(s->val), s->h2), project(s->next, h, inflight), s->pos);
            if (s->h2 == h) return mk_case(s->h1, s->h2, {{s->val, project(s->next, h, inflight)}}, s->pos);
            return project(s->next, h, inflight);
        case StmtKind::MovePending:
            if (s->h2 == h) {
                if (inflight) inflight->push({s->h1, s->h2, s->val});
                return mk_let(s->var, h, Expr::receive(s->h1), project(s->next, h, inflight), s->pos);
            }
            return project(s->next, h, inflight);
        case StmtKind::SelectPending:
            if (s->h2 == h) {
                if (inflight) inflight->push({s->h1, s->h2, s->val});
                return mk_case(s->h1, s->h2, {{s->val, project(s->next, h, inflight)}}, s->pos);
            }
            return project(s->next, h, inflight);
        case StmtKind::If: {
            // Both branches of a conditional delayed in lockstep carry the same in-flight messages.
            Buffer b1, b2;
            StmtP p1 = project(s->then_branch, h, &b1);
            StmtP p2 = project(s->else_branch, h, &b2);
            if (!(b1 == b2)) throw MergeFailure("branches disagree on in-flight messages");
            if (inflight)
                for (const auto& m : b1.items()) inflight->push(m);
            if (s->h1 == h) return mk_if(s->atom, h, p1, p2, s->pos);
            return merge(p1, p2);
        }
        case StmtKind::Case: throw TransformError("projection applies to choreographies only");
    }
    return s;
}

StmtP project(const StmtP& s, Ep h) { return project(s, h, nullptr); }

DistributedProgram partition(const StmtP& s, const std::vector<Ep>& hosts, const Buffer& buffer) {
    DistributedProgram out;
    for (Ep h : hosts) {
        Buffer b = buffer.restricted_to(h);
        StmtP p = project(s, h, &b);
        out.emplace(h, HostProgram{p, b});
    }
    return out;
}

DistributedProgram partition(const StmtP& s, const HostEnv& env, const Buffer& buffer) {
    std::vector<Ep> hosts;
    for (Ep h = 0; h < env.host_count(); ++h) hosts.push_back(h);
    return partition(s, hosts, buffer);
}

}  // namespace chorsec
