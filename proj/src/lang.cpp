#include "chorsec/lang.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <map>
#include <mutex>
#include <unordered_map>

namespace chorsec {

// ---------------------------------------------------------------- values

std::optional<Value> parse_value(const std::string& text) {
    if (text == "unit" || text == "()") return Value::unit();
    if (text == "true") return Value::boolean(true);
    if (text == "false") return Value::boolean(false);
    if (text.empty()) return std::nullopt;
    size_t i = text[0] == '-' ? 1 : 0;
    if (i == text.size()) return std::nullopt;
    for (size_t k = i; k < text.size(); ++k)
        if (text[k] < '0' || text[k] > '9') return std::nullopt;
    return Value::integer(std::stoll(text));
}

std::string to_string(const Value& v) {
    switch (v.kind) {
        case Value::Kind::Unit: return "unit";
        case Value::Kind::Bool: return v.i ? "true" : "false";
        case Value::Kind::Int: return std::to_string(v.i);
    }
    return "?";
}

std::vector<Value> default_domain() {
    return {Value::unit(), Value::boolean(true), Value::boolean(false),
            Value::integer(0), Value::integer(1), Value::integer(2)};
}

// ---------------------------------------------------------------- variables

namespace {

struct VarPool {
    std::mutex mu;
    std::deque<std::string> names;
    std::unordered_map<std::string, Var> ids;
};

VarPool& pool() {
    static VarPool p;
    return p;
}

}  // namespace

Var intern_var(const std::string& name) {
    auto& p = pool();
    std::lock_guard lock(p.mu);
    if (auto it = p.ids.find(name); it != p.ids.end()) return it->second;
    Var id = static_cast<Var>(p.names.size());
    p.names.push_back(name);
    p.ids.emplace(name, id);
    return id;
}

Var fresh_var(const std::string& base) {
    auto& p = pool();
    std::lock_guard lock(p.mu);
    Var id = static_cast<Var>(p.names.size());
    p.names.push_back(base);
    return id;
}

const std::string& var_name(Var v) {
    auto& p = pool();
    std::lock_guard lock(p.mu);
    return p.names.at(v);
}

bool operator==(const Atom& a, const Atom& b) {
    if (a.is_var() != b.is_var()) return false;
    if (a.is_var()) return a.var == b.var || var_name(a.var) == var_name(b.var);
    return a.val == b.val;
}

std::string to_string(const Atom& a) { return a.is_var() ? var_name(a.var) : to_string(a.val); }

// ---------------------------------------------------------------- operators

int op_arity(Op op) { return op == Op::Not ? 1 : 2; }

const char* op_symbol(Op op) {
    switch (op) {
        case Op::Add: return "+";
        case Op::Sub: return "-";
        case Op::Mul: return "*";
        case Op::Lt: return "<";
        case Op::Eq: return "==";
        case Op::And: return "&&";
        case Op::Or: return "||";
        case Op::Not: return "!";
    }
    return "?";
}

namespace {

std::int64_t as_int(const Value& v) { return v.kind == Value::Kind::Unit ? 0 : v.i; }
bool truthy(const Value& v) { return !v.is_false(); }

std::int64_t wrap(std::uint64_t x) { return static_cast<std::int64_t>(x); }

}  // namespace

Value eval_op(Op op, const std::vector<Value>& args) {
    auto u = [&](int k) { return static_cast<std::uint64_t>(as_int(args[k])); };
    switch (op) {
        case Op::Add: return Value::integer(wrap(u(0) + u(1)));
        case Op::Sub: return Value::integer(wrap(u(0) - u(1)));
        case Op::Mul: return Value::integer(wrap(u(0) * u(1)));
        case Op::Lt: return Value::boolean(as_int(args[0]) < as_int(args[1]));
        case Op::Eq: return Value::boolean(args[0] == args[1]);
        case Op::And: return Value::boolean(truthy(args[0]) && truthy(args[1]));
        case Op::Or: return Value::boolean(truthy(args[0]) || truthy(args[1]));
        case Op::Not: return Value::boolean(!truthy(args[0]));
    }
    return Value::unit();
}

// ---------------------------------------------------------------- expressions

Expr Expr::atomic(Atom a) {
    Expr e;
    e.kind = ExprKind::Atomic;
    e.args = {a};
    return e;
}

Expr Expr::operation(Op op, std::vector<Atom> args) {
    Expr e;
    e.kind = ExprKind::Operator;
    e.op = op;
    e.args = std::move(args);
    return e;
}

Expr Expr::declassify(Atom a, Label from, Label to) {
    Expr e;
    e.kind = ExprKind::Declassify;
    e.args = {a};
    e.from = std::move(from);
    e.to = std::move(to);
    return e;
}

Expr Expr::endorse(Atom a, Label from, Label to) {
    Expr e = declassify(a, std::move(from), std::move(to));
    e.kind = ExprKind::Endorse;
    return e;
}

Expr Expr::input(Ep h) {
    Expr e;
    e.kind = ExprKind::Input;
    e.host = h;
    return e;
}

Expr Expr::output(Atom a, Ep h) {
    Expr e;
    e.kind = ExprKind::Output;
    e.args = {a};
    e.host = h;
    return e;
}

Expr Expr::receive(Ep peer) {
    Expr e;
    e.kind = ExprKind::Receive;
    e.host = peer;
    return e;
}

Expr Expr::send(Atom a, Ep peer) {
    Expr e;
    e.kind = ExprKind::Send;
    e.args = {a};
    e.host = peer;
    return e;
}

bool operator==(const Expr& a, const Expr& b) {
    if (a.kind != b.kind || a.host != b.host || a.args.size() != b.args.size()) return false;
    if (a.kind == ExprKind::Operator && a.op != b.op) return false;
    if ((a.kind == ExprKind::Declassify || a.kind == ExprKind::Endorse) && (a.from != b.from || a.to != b.to))
        return false;
    for (size_t i = 0; i < a.args.size(); ++i)
        if (!(a.args[i] == b.args[i])) return false;
    return true;
}

std::string to_string(const Pos& p) { return std::to_string(p.line) + ":" + std::to_string(p.col); }

const char* to_string(Tier t) {
    switch (t) {
        case Tier::Source: return "source";
        case Tier::Choreography: return "choreography";
        case Tier::Distributed: return "distributed";
        case Tier::RunTime: return "run-time";
    }
    return "?";
}

// ---------------------------------------------------------------- statements

StmtP skip() {
    static const StmtP s = std::make_shared<const Stmt>();
    return s;
}

StmtP mk_let(Var x, Ep h, Expr e, StmtP next, Pos pos) {
    auto s = std::make_shared<Stmt>();
    s->kind = StmtKind::Let;
    s->var = x;
    s->h1 = h;
    s->expr = std::move(e);
    s->next = next ? std::move(next) : skip();
    s->pos = pos;
    return s;
}

StmtP mk_move(Ep h1, Atom a, Ep h2, Var x, StmtP next, Pos pos) {
    auto s = std::make_shared<Stmt>();
    s->kind = StmtKind::Move;
    s->h1 = h1;
    s->atom = a;
    s->h2 = h2;
    s->var = x;
    s->next = next ? std::move(next) : skip();
    s->pos = pos;
    return s;
}

StmtP mk_select(Ep h1, Value v, Ep h2, StmtP next, Pos pos) {
    auto s = std::make_shared<Stmt>();
    s->kind = StmtKind::Select;
    s->h1 = h1;
    s->val = v;
    s->h2 = h2;
    s->next = next ? std::move(next) : skip();
    s->pos = pos;
    return s;
}

StmtP mk_if(Atom guard, Ep h, StmtP then_branch, StmtP else_branch, Pos pos) {
    auto s = std::make_shared<Stmt>();
    s->kind = StmtKind::If;
    s->atom = guard;
    s->h1 = h;
    s->then_branch = then_branch ? std::move(then_branch) : skip();
    s->else_branch = else_branch ? std::move(else_branch) : skip();
    s->pos = pos;
    return s;
}

StmtP mk_case(Ep h1, Ep h2, std::vector<std::pair<Value, StmtP>> cases, Pos pos) {
    auto s = std::make_shared<Stmt>();
    s->kind = StmtKind::Case;
    s->h1 = h1;
    s->h2 = h2;
    std::sort(cases.begin(), cases.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    s->cases = std::move(cases);
    s->pos = pos;
    return s;
}

StmtP mk_move_pending(Ep h1, Value v, Ep h2, Var x, StmtP next) {
    auto s = std::make_shared<Stmt>();
    s->kind = StmtKind::MovePending;
    s->h1 = h1;
    s->val = v;
    s->h2 = h2;
    s->var = x;
    s->next = std::move(next);
    return s;
}

StmtP mk_select_pending(Ep h1, Value v, Ep h2, StmtP next) {
    auto s = std::make_shared<Stmt>();
    s->kind = StmtKind::SelectPending;
    s->h1 = h1;
    s->val = v;
    s->h2 = h2;
    s->next = std::move(next);
    return s;
}

StmtP with_next(const Stmt& s, StmtP next) {
    auto c = std::make_shared<Stmt>(s);
    c->next = std::move(next);
    return c;
}

bool stmt_equal(const StmtP& a, const StmtP& b) {
    if (a.get() == b.get()) return true;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case StmtKind::Skip: return true;
        case StmtKind::Let:
            return var_name(a->var) == var_name(b->var) && a->h1 == b->h1 && a->expr == b->expr &&
                   stmt_equal(a->next, b->next);
        case StmtKind::Move:
            return a->h1 == b->h1 && a->h2 == b->h2 && a->atom == b->atom &&
                   var_name(a->var) == var_name(b->var) && stmt_equal(a->next, b->next);
        case StmtKind::Select:
        case StmtKind::SelectPending:
            return a->h1 == b->h1 && a->h2 == b->h2 && a->val == b->val && stmt_equal(a->next, b->next);
        case StmtKind::MovePending:
            return a->h1 == b->h1 && a->h2 == b->h2 && a->val == b->val &&
                   var_name(a->var) == var_name(b->var) && stmt_equal(a->next, b->next);
        case StmtKind::If:
            return a->h1 == b->h1 && a->atom == b->atom && stmt_equal(a->then_branch, b->then_branch) &&
                   stmt_equal(a->else_branch, b->else_branch);
        case StmtKind::Case:
            if (a->h1 != b->h1 || a->h2 != b->h2 || a->cases.size() != b->cases.size()) return false;
            for (size_t i = 0; i < a->cases.size(); ++i)
                if (a->cases[i].first != b->cases[i].first || !stmt_equal(a->cases[i].second, b->cases[i].second))
                    return false;
            return true;
    }
    return false;
}

namespace {

// Bijection between bound variables of two statements.
struct Renaming {
    std::map<Var, Var> fwd, bwd;
    bool bind(Var a, Var b) {
        auto f = fwd.find(a);
        auto g = bwd.find(b);
        if (f != fwd.end() || g != bwd.end()) return f != fwd.end() && f->second == b && g != bwd.end() && g->second == a;
        fwd[a] = b;
        bwd[b] = a;
        return true;
    }
    bool atom_eq(const Atom& a, const Atom& b) const {
        if (a.is_var() != b.is_var()) return false;
        if (!a.is_var()) return a.val == b.val;
        auto f = fwd.find(a.var);
        auto g = bwd.find(b.var);
        if (f == fwd.end() && g == bwd.end()) return a.var == b.var;
        return f != fwd.end() && f->second == b.var;
    }
};

bool expr_alpha(const Expr& a, const Expr& b, const Renaming& r) {
    if (a.kind != b.kind || a.host != b.host || a.args.size() != b.args.size()) return false;
    if (a.kind == ExprKind::Operator && a.op != b.op) return false;
    if ((a.kind == ExprKind::Declassify || a.kind == ExprKind::Endorse) && (a.from != b.from || a.to != b.to))
        return false;
    for (size_t i = 0; i < a.args.size(); ++i)
        if (!r.atom_eq(a.args[i], b.args[i])) return false;
    return true;
}

bool alpha_rec(const StmtP& a, const StmtP& b, Renaming r) {
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case StmtKind::Skip: return true;
        case StmtKind::Let:
            if (a->h1 != b->h1 || !expr_alpha(a->expr, b->expr, r)) return false;
            if (!r.bind(a->var, b->var)) return false;
            return alpha_rec(a->next, b->next, std::move(r));
        case StmtKind::Move:
            if (a->h1 != b->h1 || a->h2 != b->h2 || !r.atom_eq(a->atom, b->atom)) return false;
            if (!r.bind(a->var, b->var)) return false;
            return alpha_rec(a->next, b->next, std::move(r));
        case StmtKind::MovePending:
            if (a->h1 != b->h1 || a->h2 != b->h2 || a->val != b->val) return false;
            if (!r.bind(a->var, b->var)) return false;
            return alpha_rec(a->next, b->next, std::move(r));
        case StmtKind::Select:
        case StmtKind::SelectPending:
            return a->h1 == b->h1 && a->h2 == b->h2 && a->val == b->val && alpha_rec(a->next, b->next, std::move(r));
        case StmtKind::If:
            return a->h1 == b->h1 && r.atom_eq(a->atom, b->atom) && alpha_rec(a->then_branch, b->then_branch, r) &&
                   alpha_rec(a->else_branch, b->else_branch, r);
        case StmtKind::Case:
            if (a->h1 != b->h1 || a->h2 != b->h2 || a->cases.size() != b->cases.size()) return false;
            for (size_t i = 0; i < a->cases.size(); ++i)
                if (a->cases[i].first != b->cases[i].first || !alpha_rec(a->cases[i].second, b->cases[i].second, r))
                    return false;
            return true;
    }
    return false;
}

}  // namespace

bool alpha_equal(const StmtP& a, const StmtP& b) { return alpha_rec(a, b, {}); }

// ---------------------------------------------------------------- traversal

namespace {

void free_rec(const StmtP& s, std::set<Var> bound, std::set<Var>& out) {
    auto use = [&](const Atom& a) {
        if (a.is_var() && !bound.count(a.var)) out.insert(a.var);
    };
    switch (s->kind) {
        case StmtKind::Skip: return;
        case StmtKind::Let:
            for (const auto& a : s->expr.args) use(a);
            bound.insert(s->var);
            free_rec(s->next, std::move(bound), out);
            return;
        case StmtKind::Move:
            use(s->atom);
            bound.insert(s->var);
            free_rec(s->next, std::move(bound), out);
            return;
        case StmtKind::MovePending:
            bound.insert(s->var);
            free_rec(s->next, std::move(bound), out);
            return;
        case StmtKind::Select:
        case StmtKind::SelectPending: free_rec(s->next, std::move(bound), out); return;
        case StmtKind::If:
            use(s->atom);
            free_rec(s->then_branch, bound, out);
            free_rec(s->else_branch, bound, out);
            return;
        case StmtKind::Case:
            for (const auto& [v, b] : s->cases) free_rec(b, bound, out);
            return;
    }
}

template <class F>
void for_each_node(const StmtP& s, F&& f) {
    f(*s);
    switch (s->kind) {
        case StmtKind::Skip: return;
        case StmtKind::If:
            for_each_node(s->then_branch, f);
            for_each_node(s->else_branch, f);
            return;
        case StmtKind::Case:
            for (const auto& c : s->cases) for_each_node(c.second, f);
            return;
        default: for_each_node(s->next, f); return;
    }
}

}  // namespace

std::set<Var> free_vars(const StmtP& s) {
    std::set<Var> out;
    free_rec(s, {}, out);
    return out;
}

std::set<Var> bound_vars(const StmtP& s) {
    std::set<Var> out;
    for_each_node(s, [&](const Stmt& n) {
        if (n.kind == StmtKind::Let || n.kind == StmtKind::Move || n.kind == StmtKind::MovePending) out.insert(n.var);
    });
    return out;
}

std::set<Ep> hosts_of_frame(const Stmt& frame) {
    switch (frame.kind) {
        case StmtKind::Let: return {frame.h1};
        case StmtKind::Move:
        case StmtKind::Select: return {frame.h1, frame.h2};
        case StmtKind::MovePending:
        case StmtKind::SelectPending: return {frame.h2};
        default: return {};
    }
}

std::set<Ep> hosts_mentioned(const StmtP& s) {
    std::set<Ep> out;
    for_each_node(s, [&](const Stmt& n) {
        if (n.kind == StmtKind::Skip) return;
        if (n.h1 != kNoEndpoint) out.insert(n.h1);
        if (n.h2 != kNoEndpoint) out.insert(n.h2);
        if (n.kind == StmtKind::Let && n.expr.host != kNoEndpoint) out.insert(n.expr.host);
    });
    return out;
}

int stmt_size(const StmtP& s) {
    int n = 0;
    for_each_node(s, [&](const Stmt& k) {
        if (k.kind != StmtKind::Skip) ++n;
    });
    return n;
}

Expr substitute(const Expr& e, Var x, const Atom& a) {
    Expr out = e;
    for (auto& arg : out.args)
        if (arg.is_var() && arg.var == x) arg = a;
    return out;
}

StmtP substitute(const StmtP& s, Var x, const Atom& a) {
    auto sub_atom = [&](const Atom& at) { return at.is_var() && at.var == x ? a : at; };
    switch (s->kind) {
        case StmtKind::Skip: return s;
        case StmtKind::Let: {
            auto c = std::make_shared<Stmt>(*s);
            c->expr = substitute(s->expr, x, a);
            c->next = s->var == x ? s->next : substitute(s->next, x, a);
            return c;
        }
        case StmtKind::Move: {
            auto c = std::make_shared<Stmt>(*s);
            c->atom = sub_atom(s->atom);
            c->next = s->var == x ? s->next : substitute(s->next, x, a);
            return c;
        }
        case StmtKind::MovePending: {
            if (s->var == x) return s;
            return with_next(*s, substitute(s->next, x, a));
        }
        case StmtKind::Select:
        case StmtKind::SelectPending: return with_next(*s, substitute(s->next, x, a));
        case StmtKind::If: {
            auto c = std::make_shared<Stmt>(*s);
            c->atom = sub_atom(s->atom);
            c->then_branch = substitute(s->then_branch, x, a);
            c->else_branch = substitute(s->else_branch, x, a);
            return c;
        }
        case StmtKind::Case: {
            auto c = std::make_shared<Stmt>(*s);
            for (auto& [v, b] : c->cases) b = substitute(b, x, a);
            return c;
        }
    }
    return s;
}

StmtP append(const StmtP& s, const StmtP& tail) {
    switch (s->kind) {
        case StmtKind::Skip: return tail;
        case StmtKind::If: {
            auto c = std::make_shared<Stmt>(*s);
            c->then_branch = append(s->then_branch, tail);
            c->else_branch = append(s->else_branch, tail);
            return c;
        }
        case StmtKind::Case: {
            auto c = std::make_shared<Stmt>(*s);
            for (auto& [v, b] : c->cases) b = append(b, tail);
            return c;
        }
        default: return with_next(*s, append(s->next, tail));
    }
}

namespace {

struct Renamer {
    std::set<std::string> used;

    Var binder(Var x) {
        const std::string& name = var_name(x);
        if (name == "_") return x;
        if (used.insert(name).second) return x;
        std::string candidate = name;
        do candidate += "'";
        while (used.count(candidate));
        used.insert(candidate);
        return intern_var(candidate);
    }

    StmtP run(const StmtP& s) {
        switch (s->kind) {
            case StmtKind::Skip: return s;
            case StmtKind::Let:
            case StmtKind::Move:
            case StmtKind::MovePending: {
                Var nx = binder(s->var);
                StmtP rest = nx == s->var ? s->next : substitute(s->next, s->var, Atom::of(nx));
                auto c = std::make_shared<Stmt>(*s);
                c->var = nx;
                c->next = run(rest);
                return c;
            }
            case StmtKind::Select:
            case StmtKind::SelectPending: return with_next(*s, run(s->next));
            case StmtKind::If: {
                auto c = std::make_shared<Stmt>(*s);
                c->then_branch = run(s->then_branch);
                c->else_branch = run(s->else_branch);
                return c;
            }
            case StmtKind::Case: {
                auto c = std::make_shared<Stmt>(*s);
                for (auto& [v, b] : c->cases) b = run(b);
                return c;
            }
        }
        return s;
    }
};

}  // namespace

StmtP alpha_rename(const StmtP& s) { return Renamer{}.run(s); }

// ---------------------------------------------------------------- tiers

Tier tier_of(const StmtP& s) {
    bool runtime = false, distributed = false, chor = false;
    for_each_node(s, [&](const Stmt& n) {
        switch (n.kind) {
            case StmtKind::MovePending:
            case StmtKind::SelectPending: runtime = true; break;
            case StmtKind::Case: distributed = true; break;
            case StmtKind::Move:
            case StmtKind::Select: chor = true; break;
            case StmtKind::Let:
                if (n.expr.kind == ExprKind::Receive || n.expr.kind == ExprKind::Send) chor = true;
                if (n.h1 != kIdeal && !n.expr.is_io()) chor = true;
                break;
            case StmtKind::If:
                if (n.h1 != kIdeal) chor = true;
                break;
            default: break;
        }
    });
    if (runtime) return Tier::RunTime;
    if (distributed) return Tier::Distributed;
    return chor ? Tier::Choreography : Tier::Source;
}

std::vector<std::string> tier_violations(const StmtP& s, Tier tier, const HostEnv& env, Ep host) {
    std::vector<std::string> out;
    auto bad = [&](const Stmt& n, const std::string& what) {
        out.push_back(std::string(what) + " not allowed in a " + to_string(tier) + " program (" + to_string(n.pos) + ")");
    };
    for_each_node(s, [&](const Stmt& n) {
        if (n.kind == StmtKind::Skip) return;
        if ((n.kind == StmtKind::MovePending || n.kind == StmtKind::SelectPending) && tier != Tier::RunTime)
            bad(n, "run-time pending form");
        switch (tier) {
            case Tier::Source:
                if (n.kind == StmtKind::Move) bad(n, "move");
                if (n.kind == StmtKind::Select) bad(n, "select");
                if (n.kind == StmtKind::Case) bad(n, "case");
                if (n.kind == StmtKind::If && n.h1 != kIdeal) bad(n, "if at a named host");
                if (n.kind == StmtKind::Let) {
                    if (n.expr.kind == ExprKind::Receive || n.expr.kind == ExprKind::Send) bad(n, "recv/send");
                    if (n.expr.is_io() && n.h1 != n.expr.host) bad(n, "input/output hosted elsewhere");
                    if (!n.expr.is_io() && n.h1 != kIdeal) bad(n, "non-IO let at a named host");
                }
                break;
            case Tier::Choreography:
            case Tier::RunTime:
                if (n.kind == StmtKind::Case) bad(n, "case");
                if (n.h1 == kIdeal || n.h2 == kIdeal) bad(n, "ideal host");
                break;
            case Tier::Distributed:
                if (n.kind == StmtKind::Move) bad(n, "move");
                if (n.kind == StmtKind::Select) bad(n, "select");
                if (n.h1 == kIdeal || n.h2 == kIdeal) bad(n, "ideal host");
                if (host != kNoEndpoint) {
                    Ep owner = n.kind == StmtKind::Case ? n.h2 : n.h1;
                    if (owner != host) bad(n, "statement for host " + env.name(owner));
                }
                break;
        }
    });
    return out;
}

// ---------------------------------------------------------------- lexer/parser

namespace {

enum class Tok { Ident, Int, Sym, End };

struct Token {
    Tok kind;
    std::string text;
    Pos pos;
};

std::vector<Token> lex(const std::string& src) {
    std::vector<Token> out;
    int line = 1, col = 1;
    size_t i = 0;
    auto adv = [&](size_t n) {
        for (size_t k = 0; k < n; ++k) {
            if (src[i] == '\n') { ++line; col = 1; } else ++col;
            ++i;
        }
    };
    static const char* syms[] = {"->", "=>", "==", "&&", "||", "@", "=", ";", ".", "{", "}", "(", ")",
                                 ",", "<", ">", "&", "|", "*", "+", "-", "!"};
    while (i < src.size()) {
        char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) { adv(1); continue; }
        if (c == '#' || (c == '/' && i + 1 < src.size() && src[i + 1] == '/')) {
            while (i < src.size() && src[i] != '\n') adv(1);
            continue;
        }
        Pos p{line, col};
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t b = i;
            while (i < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_' || src[i] == '\''))
                adv(1);
            out.push_back({Tok::Ident, src.substr(b, i - b), p});
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t b = i;
            while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) adv(1);
            out.push_back({Tok::Int, src.substr(b, i - b), p});
            continue;
        }
        bool matched = false;
        for (const char* s : syms) {
            size_t n = std::char_traits<char>::length(s);
            if (src.compare(i, n, s) == 0) {
                out.push_back({Tok::Sym, s, p});
                adv(n);
                matched = true;
                break;
            }
        }
        if (!matched) throw ParseError(std::string("unexpected character '") + c + "'", p);
    }
    out.push_back({Tok::End, "", {line, col}});
    return out;
}

struct Parser {
    std::vector<Token> toks;
    size_t k = 0;
    const HostEnv& env;
    AtomTable atoms;
    Tier tier = Tier::Choreography;

    Parser(std::vector<Token> t, const HostEnv& e) : toks(std::move(t)), env(e), atoms(e.atoms()) {}

    const Token& peek(size_t ahead = 0) const { return toks[std::min(k + ahead, toks.size() - 1)]; }
    bool at_sym(const char* s) const { return peek().kind == Tok::Sym && peek().text == s; }
    bool at_ident(const char* s) const { return peek().kind == Tok::Ident && peek().text == s; }
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg + (peek().kind == Tok::End ? " (end of input)" : " near '" + peek().text + "'"), peek().pos);
    }
    void expect(const char* s) {
        if (!at_sym(s)) fail(std::string("expected '") + s + "'");
        ++k;
    }
    void expect_kw(const char* s) {
        if (!at_ident(s)) fail(std::string("expected '") + s + "'");
        ++k;
    }
    std::string ident() {
        if (peek().kind != Tok::Ident) fail("expected identifier");
        return toks[k++].text;
    }

    Ep host() {
        if (at_sym("*")) { ++k; return kIdeal; }
        Pos p = peek().pos;
        std::string n = ident();
        auto h = env.find(n);
        if (!h) throw ParseError("unknown host '" + n + "'", p);
        return *h;
    }

    bool at_value() const {
        if (peek().kind == Tok::Int) return true;
        if (at_sym("-") && peek(1).kind == Tok::Int) return true;
        return at_ident("unit") || at_ident("true") || at_ident("false");
    }

    Value value() {
        if (at_ident("unit")) { ++k; return Value::unit(); }
        if (at_ident("true")) { ++k; return Value::boolean(true); }
        if (at_ident("false")) { ++k; return Value::boolean(false); }
        bool neg = false;
        if (at_sym("-")) { neg = true; ++k; }
        if (peek().kind != Tok::Int) fail("expected value");
        std::uint64_t mag = std::stoull(toks[k++].text);
        return Value::integer(neg ? static_cast<std::int64_t>(0 - mag) : static_cast<std::int64_t>(mag));
    }

    Atom aexp() {
        if (at_value()) return Atom::of(value());
        Pos p = peek().pos;
        std::string n = ident();
        if (n == "_") throw ParseError("'_' cannot be used as a value", p);
        return Atom::of(intern_var(n));
    }

    Var binder() {
        std::string n = ident();
        return n == "_" ? fresh_var("_") : intern_var(n);
    }

    // principal := conj ('|' conj)* ; conj := prim ('&' prim)*
    Principal principal() {
        Principal p = conj();
        while (at_sym("|")) { ++k; p = p | conj(); }
        return p;
    }
    Principal conj() {
        Principal p = prim();
        while (at_sym("&")) { ++k; p = p & prim(); }
        return p;
    }
    Principal prim() {
        if (at_sym("(")) {
            ++k;
            Principal p = principal();
            expect(")");
            return p;
        }
        Pos pos = peek().pos;
        std::string n = ident();
        if (n == "top") return Principal::top();
        if (n == "bot") return Principal::bot();
        auto i = atoms.find(n);
        if (!i) throw ParseError("unknown principal '" + n + "'", pos);
        return Principal::atom(*i);
    }
    Label label() {
        if (at_sym("<")) {
            ++k;
            Principal c = principal();
            expect(",");
            Principal i = principal();
            expect(">");
            return {c, i};
        }
        return uniform_label(principal());
    }

    Expr expr() {
        if (at_ident("declassify") || at_ident("endorse")) {
            bool decl = peek().text == "declassify";
            ++k;
            expect("(");
            Atom a = aexp();
            expect(",");
            Label from = label();
            expect(",");
            Label to = label();
            expect(")");
            return decl ? Expr::declassify(a, from, to) : Expr::endorse(a, from, to);
        }
        if (at_ident("input") && peek(1).kind == Tok::Sym && peek(1).text == "@") {
            ++k;
            expect("@");
            return Expr::input(host());
        }
        if (at_ident("output") && peek(1).kind == Tok::Sym && peek(1).text == "(") {
            ++k;
            expect("(");
            Atom a = aexp();
            expect(")");
            expect("@");
            return Expr::output(a, host());
        }
        if (at_ident("recv")) {
            ++k;
            return Expr::receive(host());
        }
        if (at_ident("send")) {
            ++k;
            Atom a = aexp();
            expect("->");
            return Expr::send(a, host());
        }
        if (at_sym("!")) {
            ++k;
            return Expr::operation(Op::Not, {aexp()});
        }
        if (peek().kind == Tok::Ident && peek(1).kind == Tok::Sym && peek(1).text == "(") {
            static const std::map<std::string, Op> named = {{"add", Op::Add}, {"sub", Op::Sub}, {"mul", Op::Mul},
                                                            {"lt", Op::Lt},   {"eq", Op::Eq},   {"and", Op::And},
                                                            {"or", Op::Or},   {"not", Op::Not}};
            Pos p = peek().pos;
            std::string n = ident();
            auto it = named.find(n);
            if (it == named.end()) throw ParseError("unknown operator '" + n + "'", p);
            expect("(");
            std::vector<Atom> args{aexp()};
            while (at_sym(",")) { ++k; args.push_back(aexp()); }
            expect(")");
            if (static_cast<int>(args.size()) != op_arity(it->second))
                throw ParseError("arity mismatch for operator '" + n + "'", p);
            return Expr::operation(it->second, std::move(args));
        }
        Atom a = aexp();
        static const std::map<std::string, Op> infix = {{"+", Op::Add}, {"-", Op::Sub}, {"*", Op::Mul},
                                                        {"<", Op::Lt},  {"==", Op::Eq}, {"&&", Op::And},
                                                        {"||", Op::Or}};
        if (peek().kind == Tok::Sym) {
            auto it = infix.find(peek().text);
            if (it != infix.end()) {
                ++k;
                return Expr::operation(it->second, {a, aexp()});
            }
        }
        return Expr::atomic(a);
    }

    // A block is a list of statements; If/Case absorb the rest of the block.
    StmtP block(bool braced) {
        std::vector<StmtP> items;  // each item has Skip as its continuation
        while (true) {
            if (braced && at_sym("}")) break;
            if (peek().kind == Tok::End) {
                if (braced) fail("expected '}'");
                break;
            }
            items.push_back(statement());
        }
        StmtP acc = skip();
        for (auto it = items.rbegin(); it != items.rend(); ++it) acc = append(*it, acc);
        return acc;
    }

    StmtP braced_block() {
        expect("{");
        StmtP s = block(true);
        expect("}");
        return s;
    }

    StmtP statement() {
        Pos p = peek().pos;
        if (at_ident("let")) {
            ++k;
            Var x = binder();
            expect("@");
            Ep h = host();
            expect("=");
            Expr e = expr();
            expect(";");
            return mk_let(x, h, std::move(e), skip(), p);
        }
        if (at_ident("move")) {
            ++k;
            Ep h1 = host();
            expect(".");
            Atom a = aexp();
            expect("->");
            Ep h2 = host();
            expect(".");
            Var x = binder();
            expect(";");
            return mk_move(h1, a, h2, x, skip(), p);
        }
        if (at_ident("select")) {
            ++k;
            Ep h1 = host();
            expect(".");
            Value v = value();
            expect("->");
            Ep h2 = host();
            expect(";");
            return mk_select(h1, v, h2, skip(), p);
        }
        if (at_ident("if")) {
            ++k;
            Ep h = host();
            expect(".");
            Atom g = aexp();
            StmtP t = braced_block();
            expect_kw("else");
            StmtP e = braced_block();
            return mk_if(g, h, t, e, p);
        }
        if (at_ident("case")) {
            ++k;
            Ep h1 = host();
            expect("->");
            Ep h2 = host();
            expect("{");
            std::vector<std::pair<Value, StmtP>> cases;
            do {
                Pos vp = peek().pos;
                Value v = value();
                for (const auto& c : cases)
                    if (c.first == v) throw ParseError("duplicate case value", vp);
                expect("=>");
                cases.emplace_back(v, braced_block());
            } while (!at_sym("}"));
            expect("}");
            return mk_case(h1, h2, std::move(cases), p);
        }
        if (at_ident("skip")) {
            ++k;
            expect(";");
            return skip();
        }
        fail("expected statement");
    }
};

StmtP finish(const StmtP& raw, Tier tier, const HostEnv& env, Ep host) {
    StmtP s = alpha_rename(raw);
    auto bad = tier_violations(s, tier, env, host);
    if (!bad.empty()) throw ParseError(bad.front(), {});
    auto fv = free_vars(s);
    if (!fv.empty()) throw ParseError("unbound variable '" + var_name(*fv.begin()) + "'", {});
    return s;
}

}  // namespace

Program parse_program(const std::string& text, const HostEnv& env) {
    Parser ps(lex(text), env);
    Program prog;
    bool saw_kind = false;
    while (ps.at_ident("kind") || ps.at_ident("host")) {
        if (ps.peek(1).kind != Tok::Sym || ps.peek(1).text != "=") break;
        bool is_kind = ps.at_ident("kind");
        ++ps.k;
        ps.expect("=");
        if (is_kind) {
            Pos p = ps.peek().pos;
            std::string t = ps.ident();
            if (t == "source") prog.tier = Tier::Source;
            else if (t == "choreography") prog.tier = Tier::Choreography;
            else if (t == "distributed") prog.tier = Tier::Distributed;
            else throw ParseError("unknown program kind '" + t + "'", p);
            saw_kind = true;
        } else {
            prog.host = ps.host();
        }
    }
    if (!saw_kind) throw ParseError("missing 'kind = source|choreography|distributed' header", ps.peek().pos);
    StmtP raw = ps.block(false);
    prog.body = finish(raw, prog.tier, env, prog.host);
    return prog;
}

StmtP parse_stmts(const std::string& text, const HostEnv& env, Tier tier) {
    Parser ps(lex(text), env);
    return finish(ps.block(false), tier, env, kNoEndpoint);
}

// ---------------------------------------------------------------- printer

std::string to_string(const Expr& e, const HostEnv& env) {
    const auto& atoms = env.atoms();
    switch (e.kind) {
        case ExprKind::Atomic: return to_string(e.args[0]);
        case ExprKind::Operator:
            if (e.op == Op::Not) return "!" + to_string(e.args[0]);
            return to_string(e.args[0]) + " " + op_symbol(e.op) + " " + to_string(e.args[1]);
        case ExprKind::Declassify:
        case ExprKind::Endorse:
            return std::string(e.kind == ExprKind::Declassify ? "declassify(" : "endorse(") + to_string(e.args[0]) +
                   ", " + to_string(e.from, atoms) + ", " + to_string(e.to, atoms) + ")";
        case ExprKind::Input: return "input@" + env.name(e.host);
        case ExprKind::Output: return "output(" + to_string(e.args[0]) + ")@" + env.name(e.host);
        case ExprKind::Receive: return "recv " + env.name(e.host);
        case ExprKind::Send: return "send " + to_string(e.args[0]) + " -> " + env.name(e.host);
    }
    return "?";
}

std::string pretty_print(const StmtP& s, const HostEnv& env, int indent) {
    std::string pad(indent, ' ');
    std::string out;
    const Stmt* n = s.get();
    while (true) {
        switch (n->kind) {
            case StmtKind::Skip: return out;
            case StmtKind::Let:
                out += pad + "let " + var_name(n->var) + "@" + env.name(n->h1) + " = " + to_string(n->expr, env) + ";\n";
                break;
            case StmtKind::Move:
                out += pad + "move " + env.name(n->h1) + "." + to_string(n->atom) + " -> " + env.name(n->h2) + "." +
                       var_name(n->var) + ";\n";
                break;
            case StmtKind::Select:
                out += pad + "select " + env.name(n->h1) + "." + to_string(n->val) + " -> " + env.name(n->h2) + ";\n";
                break;
            case StmtKind::MovePending:
                out += pad + "// pending " + env.name(n->h1) + "." + to_string(n->val) + " -> " + env.name(n->h2) +
                       "." + var_name(n->var) + "\n";
                break;
            case StmtKind::SelectPending:
                out += pad + "// pending select " + env.name(n->h1) + "." + to_string(n->val) + " -> " +
                       env.name(n->h2) + "\n";
                break;
            case StmtKind::If:
                out += pad + "if " + env.name(n->h1) + "." + to_string(n->atom) + " {\n" +
                       pretty_print(n->then_branch, env, indent + 2) + pad + "} else {\n" +
                       pretty_print(n->else_branch, env, indent + 2) + pad + "}\n";
                return out;
            case StmtKind::Case:
                out += pad + "case " + env.name(n->h1) + " -> " + env.name(n->h2) + " {\n";
                for (const auto& [v, b] : n->cases)
                    out += pad + "  " + to_string(v) + " => {\n" + pretty_print(b, env, indent + 4) + pad + "  }\n";
                out += pad + "}\n";
                return out;
        }
        n = n->next.get();
    }
}

std::string pretty_print(const Program& p, const HostEnv& env) {
    std::string out = std::string("kind = ") + to_string(p.tier) + "\n";
    if (p.host != kNoEndpoint) out += "host = " + env.name(p.host) + "\n";
    return out + pretty_print(p.body, env);
}

}  // namespace chorsec
