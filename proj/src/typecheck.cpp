#include "chorsec/typecheck.hpp"

namespace chorsec {

namespace {

std::string lbl(const Label& l, const HostEnv& env) { return to_string(l, env.atoms()); }

struct Checker {
    const HostEnv& env;
    const TypeOptions& opt;
    std::vector<Diagnostic>* diags;
    Pos pos;

    bool report(const char* rule, const char* premise, const std::string& msg) {
        if (diags) diags->push_back({rule, premise, pos, msg});
        return false;
    }

    bool atomic(const TypeContext& ctx, Ep h, const Atom& a, const Label& l, const char* rule) {
        if (!a.is_var()) return true;
        auto it = ctx.find(a.var);
        if (it == ctx.end()) return report(rule, "bound", "unbound variable '" + var_name(a.var) + "'");
        if (!opt.source_tier && it->second.host != h)
            return report(rule, "host",
                          "variable '" + var_name(a.var) + "' lives on " + env.name(it->second.host) + ", used on " +
                              env.name(h));
        if (!flows_to(it->second.label, l))
            return report(rule, "flow",
                          "'" + var_name(a.var) + "' has label " + lbl(it->second.label, env) + " which does not flow to " +
                              lbl(l, env));
        return true;
    }

    bool expr(const TypeContext& ctx, Ep h, const Expr& e, const Label& l) {
        bool ok = true;
        switch (e.kind) {
            case ExprKind::Atomic: return atomic(ctx, h, e.args[0], l, "Lbl-Variable");
            case ExprKind::Operator:
                for (const auto& a : e.args) ok = atomic(ctx, h, a, l, "Lbl-Operator") && ok;
                return ok;
            case ExprKind::Declassify:
            case ExprKind::Endorse: {
                bool decl = e.kind == ExprKind::Declassify;
                const char* rule = decl ? "Lbl-Declassify" : "Lbl-Endorse";
                ok = atomic(ctx, h, e.args[0], e.from, rule);
                if (decl && e.from.integ != e.to.integ)
                    ok = report(rule, "same-integrity", "declassify must not change integrity");
                if (!decl && e.from.conf != e.to.conf)
                    ok = report(rule, "same-confidentiality", "endorse must not change confidentiality");
                if (!uncompromised(e.from))
                    ok = report(rule, "uncompromised", "from-label " + lbl(e.from, env) + " is compromised");
                if (!uncompromised(e.to))
                    ok = report(rule, "uncompromised", "to-label " + lbl(e.to, env) + " is compromised");
                if (!flows_to(e.to, l))
                    ok = report(rule, "flow", "to-label " + lbl(e.to, env) + " does not flow to " + lbl(l, env));
                return ok;
            }
            case ExprKind::Input:
                if (!flows_to(env.label(e.host), l))
                    return report("Lbl-Input", "flow", "input label does not flow to " + lbl(l, env));
                return true;
            case ExprKind::Output: return atomic(ctx, h, e.args[0], env.label(e.host), "Lbl-Output");
            case ExprKind::Receive:
                if (!flows_to(integ_projection(env.label(e.host)), l))
                    return report("Lbl-Receive", "flow", "received data does not flow to " + lbl(l, env));
                return true;
            case ExprKind::Send:
                return atomic(ctx, h, e.args[0], conf_projection(env.label(e.host)), "Lbl-Send");
        }
        return false;
    }
};

Label atom_lower(const TypeContext& ctx, const Atom& a) {
    if (!a.is_var()) return least_restrictive();
    auto it = ctx.find(a.var);
    return it == ctx.end() ? least_restrictive() : it->second.label;
}

}  // namespace

bool check_atomic(const TypeContext& ctx, Ep h, const Atom& a, const Label& l, bool match_host) {
    if (!a.is_var()) return true;
    auto it = ctx.find(a.var);
    if (it == ctx.end()) return false;
    if (match_host && it->second.host != h) return false;
    return flows_to(it->second.label, l);
}

bool check_expr(const TypeContext& ctx, Ep h, const Expr& e, const Label& l, const HostEnv& env,
                std::vector<Diagnostic>* diags, bool match_host) {
    TypeOptions opt;
    opt.source_tier = !match_host;
    Checker c{env, opt, diags, {}};
    return c.expr(ctx, h, e, l);
}

Label principal_label(const TypeContext& ctx, Ep, const Expr& e, const HostEnv& env) {
    switch (e.kind) {
        case ExprKind::Atomic: return atom_lower(ctx, e.args[0]);
        case ExprKind::Operator: {
            Label l = least_restrictive();
            for (const auto& a : e.args) l = label_join(l, atom_lower(ctx, a));
            return l;
        }
        case ExprKind::Declassify:
        case ExprKind::Endorse: return e.to;
        case ExprKind::Input: return env.label(e.host);
        case ExprKind::Receive: return integ_projection(env.label(e.host));
        case ExprKind::Output:
        case ExprKind::Send: return least_restrictive();
    }
    return least_restrictive();
}

namespace {

struct StmtChecker {
    const HostEnv& env;
    const TypeOptions& opt;
    TypeResult& out;

    // Picks the stored label for a binder at `h` with forced lower bound `lower`.
    Label stored_label(Var x, Ep h, const Label& lower) {
        Label l = label_join(lower, integ_projection(env.label(h)));
        auto ann = opt.annotations.find(var_name(x));
        if (ann != opt.annotations.end() && flows_to(lower, ann->second)) l = ann->second;
        return l;
    }

    void run(TypeContext ctx, const StmtP& s) {
        Checker c{env, opt, &out.diagnostics, s->pos};
        switch (s->kind) {
            case StmtKind::Skip:
            case StmtKind::Case: return;
            case StmtKind::Let: {
                const Expr& e = s->expr;
                if (e.is_io() && e.host != s->h1)
                    c.report("Lbl-Let", "io-host", "input/output must run on the host it names");
                if ((e.kind == ExprKind::Receive || e.kind == ExprKind::Send) && opt.attack &&
                    !env.malicious(e.host, *opt.attack))
                    c.report("Lbl-Let", "malicious-peer",
                             "recv/send may only name a malicious peer (" + env.name(e.host) + " is not)");
                Label lower = principal_label(ctx, s->h1, e, env);
                Label l = stored_label(s->var, s->h1, lower);
                c.expr(ctx, s->h1, e, l);
                if (!label_acts_for(env.label(s->h1), l))
                    c.report("Lbl-Let", "authority",
                             env.name(s->h1) + " cannot store '" + var_name(s->var) + "' at label " + lbl(l, env));
                ctx[s->var] = {s->h1, l};
                out.context[s->var] = {s->h1, l};
                return run(std::move(ctx), s->next);
            }
            case StmtKind::Move:
            case StmtKind::MovePending: {
                // A moved literal is only as trusted as its sender.
                Label lower = label_join(s->kind == StmtKind::Move ? atom_lower(ctx, s->atom) : least_restrictive(),
                                         integ_projection(env.label(s->h1)));
                Label l = stored_label(s->var, s->h2, lower);
                if (s->kind == StmtKind::Move) c.atomic(ctx, s->h1, s->atom, l, "Lbl-Communicate");
                if (!label_acts_for(env.label(s->h2), l))
                    c.report("Lbl-Communicate", "authority",
                             env.name(s->h2) + " cannot store '" + var_name(s->var) + "' at label " + lbl(l, env));
                ctx[s->var] = {s->h2, l};
                out.context[s->var] = {s->h2, l};
                return run(std::move(ctx), s->next);
            }
            case StmtKind::Select:
            case StmtKind::SelectPending:
                if (!flows_to(integ_projection(env.label(s->h1)), integ_projection(env.label(s->h2))))
                    c.report("Lbl-Select", "integrity",
                             env.name(s->h1) + " has less integrity than " + env.name(s->h2));
                return run(std::move(ctx), s->next);
            case StmtKind::If:
                c.atomic(ctx, s->h1, s->atom, least_restrictive(), "Lbl-If");
                run(ctx, s->then_branch);
                run(std::move(ctx), s->else_branch);
                return;
        }
    }
};

}  // namespace

TypeResult check_stmt(const TypeContext& ctx, const StmtP& s, const HostEnv& env, const TypeOptions& opt) {
    TypeResult out;
    StmtChecker{env, opt, out}.run(ctx, s);
    return out;
}

TypeResult typecheck(const Program& p, const HostEnv& env, const TypeOptions& opt) {
    TypeOptions o = opt;
    if (p.tier == Tier::Source) o.source_tier = true;
    return check_stmt({}, p.body, env, o);
}

}  // namespace chorsec
