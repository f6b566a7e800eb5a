#include "chorsec/equivalence.hpp"

namespace chorsec {

namespace {

struct AntiUnifier {
    std::vector<std::pair<Var, Ep>> holes;

    Atom atom(const Atom& a, const Atom& b, Ep h) {
        if (a == b && (a.is_var() || a.val == b.val)) return a;
        if (a.is_var() || b.is_var()) throw ShapeMismatch("a variable is matched against a different atom");
        Var z = fresh_var("_low");
        holes.emplace_back(z, h);
        return Atom::of(z);
    }

    Expr expr(const Expr& a, const Expr& b, Ep h) {
        if (a.kind != b.kind || a.op != b.op || a.host != b.host || a.args.size() != b.args.size() ||
            !(a.from == b.from) || !(a.to == b.to))
            throw ShapeMismatch("expressions differ in shape");
        Expr e = a;
        for (size_t i = 0; i < a.args.size(); ++i) e.args[i] = atom(a.args[i], b.args[i], h);
        return e;
    }

    StmtP stmt(const StmtP& a, const StmtP& b) {
        if (a->kind != b->kind || a->h1 != b->h1 || a->h2 != b->h2)
            throw ShapeMismatch("statements differ in shape");
        switch (a->kind) {
            case StmtKind::Skip: return a;
            case StmtKind::Let: {
                if (var_name(a->var) != var_name(b->var)) throw ShapeMismatch("binders differ");
                StmtP rest = stmt(a->next, substitute(b->next, b->var, Atom::of(a->var)));
                return mk_let(a->var, a->h1, expr(a->expr, b->expr, a->h1), rest, a->pos);
            }
            case StmtKind::Move: {
                if (var_name(a->var) != var_name(b->var)) throw ShapeMismatch("binders differ");
                Atom p = atom(a->atom, b->atom, a->h1);
                StmtP rest = stmt(a->next, substitute(b->next, b->var, Atom::of(a->var)));
                return mk_move(a->h1, p, a->h2, a->var, rest, a->pos);
            }
            case StmtKind::Select:
                if (a->val != b->val) throw ShapeMismatch("selections differ");
                return mk_select(a->h1, a->val, a->h2, stmt(a->next, b->next), a->pos);
            case StmtKind::If: {
                Atom g = atom(a->atom, b->atom, a->h1);
                return mk_if(g, a->h1, stmt(a->then_branch, b->then_branch), stmt(a->else_branch, b->else_branch),
                             a->pos);
            }
            case StmtKind::Case: {
                if (a->cases.size() != b->cases.size()) throw ShapeMismatch("case branches differ");
                std::vector<std::pair<Value, StmtP>> cases;
                for (size_t i = 0; i < a->cases.size(); ++i) {
                    if (a->cases[i].first != b->cases[i].first) throw ShapeMismatch("case labels differ");
                    cases.emplace_back(a->cases[i].first, stmt(a->cases[i].second, b->cases[i].second));
                }
                return mk_case(a->h1, a->h2, std::move(cases), a->pos);
            }
            default: throw ShapeMismatch("run-time statements are not compared");
        }
    }
};

}  // namespace

Generalization anti_unify(const StmtP& s1, const StmtP& s2) {
    AntiUnifier u;
    StmtP g = u.stmt(s1, s2);
    return {g, u.holes};
}

bool low_equivalent(const StmtP& s1, const StmtP& s2, LowMode mode, const HostEnv& env, const Attack& attack) {
    Generalization g = anti_unify(s1, s2);
    if (g.holes.empty()) return true;
    TypeContext ctx;
    for (const auto& [z, h] : g.holes) {
        // The strongest label the host can hold; it must lie outside the low part.
        Label l = env.label(h);
        bool low = mode == LowMode::Public ? attack.is_public(l) : attack.is_trusted(l);
        if (low) return false;
        ctx[z] = Binding{h, l};
    }
    return check_stmt(ctx, g.stmt, env).ok();
}

}  // namespace chorsec
