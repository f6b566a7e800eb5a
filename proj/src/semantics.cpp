#include "chorsec/semantics.hpp"

#include <algorithm>

namespace chorsec {

const char* to_string(Mode m) {
    switch (m) {
        case Mode::IdealSequential: return "ideal-seq";
        case Mode::IdealConcurrent: return "ideal-conc";
        case Mode::RealSequential: return "real-seq";
        case Mode::RealConcurrent: return "real-conc";
        case Mode::Async: return "async";
        case Mode::SimulatorView: return "sim-view";
    }
    return "?";
}

bool is_ideal(Mode m) { return m == Mode::IdealSequential || m == Mode::IdealConcurrent; }
bool is_async(Mode m) { return m == Mode::Async || m == Mode::SimulatorView; }
bool is_concurrent(Mode m) { return m != Mode::IdealSequential && m != Mode::RealSequential; }

std::string to_string(const Action& a, const HostEnv& env) {
    return std::string(a.dir == Dir::In ? "in " : "out ") + env.name(a.msg.from) + "->" + env.name(a.msg.to) + " " +
           to_string(a.msg.value);
}

std::optional<Value> Store::get(Var x) const {
    for (const auto& [k, v] : items_)
        if (k == x) return v;
    return std::nullopt;
}

void Store::set(Var x, Value v) {
    for (auto& [k, old] : items_)
        if (k == x) { old = v; return; }
    items_.emplace_back(x, v);
}

Value Store::value_of(const Atom& a) const {
    if (!a.is_var()) return a.val;
    auto v = get(a.var);
    return v ? *v : Value::unit();
}

StmtP materialize(const StmtP& s, const Store& store) {
    StmtP out = s;
    for (const auto& [x, v] : store.entries()) out = substitute(out, x, Atom::of(v));
    return out;
}

namespace {

bool malicious(const Semantics& sem, Ep h) { return sem.env && sem.env->malicious(h, sem.attack); }

bool effective_declassify(const Semantics& sem, const Expr& e) {
    return sem.attack.is_secret(e.from) && sem.attack.is_public(e.to);
}

bool effective_endorse(const Semantics& sem, const Expr& e) {
    return sem.attack.is_untrusted(e.from) && sem.attack.is_trusted(e.to);
}

void push_inputs(std::vector<ExprStep>& out, const InputSource& inputs, Ep from, Ep to) {
    for (const Value& v : inputs({from, to})) out.push_back({{Dir::In, {from, to, v}}, v});
}

}  // namespace

std::vector<ExprStep> enabled_expr_steps(const Semantics& sem, Ep h, const Expr& e, const Store& store,
                                         const InputSource& inputs) {
    std::vector<ExprStep> out;
    Mode m = sem.mode;
    bool ideal = is_ideal(m);
    auto val = [&](int k) { return store.value_of(e.args[static_cast<size_t>(k)]); };
    switch (e.kind) {
        case ExprKind::Atomic: out.push_back({Action::internal(h), val(0)}); break;
        case ExprKind::Operator: {
            std::vector<Value> args;
            for (const auto& a : e.args) args.push_back(store.value_of(a));
            out.push_back({Action::internal(h), eval_op(e.op, args)});
            break;
        }
        case ExprKind::Declassify:
            if (ideal && effective_declassify(sem, e))
                out.push_back({{Dir::Out, {h, kAdversary, val(0)}}, val(0)});
            else if (m == Mode::SimulatorView && effective_declassify(sem, e))
                push_inputs(out, inputs, kAdversary, h);
            else
                out.push_back({Action::internal(h), val(0)});
            break;
        case ExprKind::Endorse:
            if (ideal && effective_endorse(sem, e))
                push_inputs(out, inputs, kAdversary, h);
            else if (m == Mode::SimulatorView && effective_endorse(sem, e))
                out.push_back({{Dir::Out, {h, kAdversary, val(0)}}, val(0)});
            else
                out.push_back({Action::internal(h), val(0)});
            break;
        case ExprKind::Input:
            if (malicious(sem, h)) out.push_back({Action::internal(h), Value::unit()});
            else push_inputs(out, inputs, kEnvironment, h);
            break;
        case ExprKind::Output:
            if (malicious(sem, h)) out.push_back({Action::internal(h), Value::unit()});
            else out.push_back({{Dir::Out, {h, kEnvironment, val(0)}}, Value::unit()});
            break;
        case ExprKind::Receive:
            if (ideal) out.push_back({Action::internal(h), Value::unit()});
            else push_inputs(out, inputs, e.host, h);
            break;
        case ExprKind::Send:
            if (ideal) out.push_back({Action::internal(h), Value::unit()});
            else out.push_back({{Dir::Out, {h, e.host, val(0)}}, Value::unit()});
            break;
    }
    return out;
}

namespace {

struct Stepper {
    const Semantics& sem;
    const Store& store;
    const InputSource& inputs;

    bool blocked(const Action& a, const std::vector<Ep>& frame_hosts) const {
        if (sem.synchronous_delay) {
            for (Ep h : frame_hosts)
                if (h == a.msg.from || h == a.msg.to) return true;
            return false;
        }
        return std::find(frame_hosts.begin(), frame_hosts.end(), a.actor()) != frame_hosts.end();
    }

    // Steps of the head statement only.
    void head(const StmtP& s, std::vector<StmtStep>& out) const {
        bool real_like = !is_ideal(sem.mode);
        switch (s->kind) {
            case StmtKind::Skip: return;
            case StmtKind::Let:
                for (auto& st : enabled_expr_steps(sem, s->h1, s->expr, store, inputs))
                    out.push_back({st.action, s->next, {{s->var, st.result}}, s.get()});
                return;
            case StmtKind::Move: {
                Value v = store.value_of(s->atom);
                if (is_async(sem.mode))
                    out.push_back({{Dir::Out, {s->h1, s->h2, v}}, mk_move_pending(s->h1, v, s->h2, s->var, s->next), {}, s.get()});
                else if (real_like)
                    out.push_back({{Dir::Out, {s->h1, s->h2, v}}, s->next, {{s->var, v}}, s.get()});
                else
                    out.push_back({Action::internal(s->h1), s->next, {{s->var, v}}, s.get()});
                return;
            }
            case StmtKind::Select:
                if (is_async(sem.mode))
                    out.push_back({{Dir::Out, {s->h1, s->h2, s->val}}, mk_select_pending(s->h1, s->val, s->h2, s->next), {}, s.get()});
                else if (real_like)
                    out.push_back({{Dir::Out, {s->h1, s->h2, s->val}}, s->next, {}, s.get()});
                else
                    out.push_back({Action::internal(s->h1), s->next, {}, s.get()});
                return;
            case StmtKind::MovePending:
                out.push_back({Action::internal(s->h2), s->next, {{s->var, s->val}}, s.get()});
                return;
            case StmtKind::SelectPending: out.push_back({Action::internal(s->h2), s->next, {}, s.get()}); return;
            case StmtKind::If: {
                Value g = store.value_of(s->atom);
                out.push_back({Action::internal(s->h1), g.is_false() ? s->else_branch : s->then_branch, {}, s.get()});
                return;
            }
            case StmtKind::Case:
                for (const Value& v : inputs({s->h1, s->h2}))
                    for (const auto& [cv, branch] : s->cases)
                        if (cv == v) out.push_back({{Dir::In, {s->h1, s->h2, v}}, branch, {}, s.get()});
                return;
        }
    }

    void collect(const StmtP& s, std::vector<Ep>& frames, std::vector<StmtStep>& out) const {
        std::vector<StmtStep> here;
        head(s, here);
        for (auto& st : here)
            if (!blocked(st.action, frames)) out.push_back(std::move(st));
        if (!is_concurrent(sem.mode)) return;
        switch (s->kind) {
            case StmtKind::Let:
            case StmtKind::Move:
            case StmtKind::Select:
            case StmtKind::MovePending:
            case StmtKind::SelectPending: {
                size_t mark = frames.size();
                for (Ep h : hosts_of_frame(*s)) frames.push_back(h);
                std::vector<StmtStep> inner;
                collect(s->next, frames, inner);
                frames.resize(mark);
                for (auto& st : inner) out.push_back({st.action, with_next(*s, st.next), std::move(st.binds), st.node});
                return;
            }
            case StmtKind::If: {
                frames.push_back(s->h1);
                std::vector<StmtStep> t, e;
                collect(s->then_branch, frames, t);
                collect(s->else_branch, frames, e);
                frames.pop_back();
                for (auto& a : t)
                    for (auto& b : e)
                        if (a.action == b.action) {
                            Binds binds = a.binds;
                            binds.insert(binds.end(), b.binds.begin(), b.binds.end());
                            out.push_back({a.action, mk_if(s->atom, s->h1, a.next, b.next, s->pos), std::move(binds), a.node});
                        }
                return;
            }
            default: return;
        }
    }
};

}  // namespace

std::vector<StmtStep> enabled_stmt_steps(const Semantics& sem, const StmtP& s, const Store& store,
                                         const InputSource& inputs) {
    std::vector<StmtStep> out;
    std::vector<Ep> frames;
    Stepper{sem, store, inputs}.collect(s, frames, out);
    return out;
}

std::vector<StmtStep> enabled_stmt_steps(const Semantics& sem, const StmtP& s, const Store& store,
                                         const std::vector<Value>& domain) {
    InputSource src = [&](const Channel&) { return domain; };
    return enabled_stmt_steps(sem, s, store, src);
}

// ---------------------------------------------------------------- processes

bool ProcessState::owns(Ep h) const { return std::binary_search(hosts.begin(), hosts.end(), h); }

ProcessState step_process_input(const ProcessState& p, const Message& m) {
    if (p.owns(m.from) || !p.owns(m.to)) return p;
    ProcessState q = p;
    q.buffer.push(m);
    return q;
}

std::vector<ProcessStep> enabled_process_outputs(const Semantics& sem, const ProcessState& p) {
    std::vector<ProcessStep> out;
    InputSource src = [&](const Channel& ch) -> std::vector<Value> {
        if (const Message* m = p.buffer.front(ch)) return {m->value};
        return {};
    };
    for (auto& st : enabled_stmt_steps(sem, p.stmt, p.store, src)) {
        ProcessState q = p;
        q.stmt = st.next;
        for (const auto& [x, v] : st.binds) q.store.set(x, v);
        Action a = st.action;
        if (a.dir == Dir::In) {
            q.buffer.pop(a.msg.channel());
            a = Action::internal(a.msg.to);
        }
        out.push_back({a, std::move(q), st.action, st.node});
    }
    return out;
}

std::vector<Potential> potential_steps(const Semantics& sem, const ProcessState& p) {
    InputSource src = [&](const Channel& ch) -> std::vector<Value> {
        if (const Message* m = p.buffer.front(ch)) return {m->value};
        return {Value::unit()};
    };
    std::vector<Potential> out;
    for (auto& st : enabled_stmt_steps(sem, p.stmt, p.store, src)) {
        bool ready = st.action.dir == Dir::Out || p.buffer.front(st.action.msg.channel()) != nullptr;
        out.push_back({st.action, st.node, ready});
    }
    return out;
}

ProcessState step_process(const Semantics& sem, const ProcessState& p, const Action& a) {
    if (a.dir == Dir::In) return step_process_input(p, a.msg);
    for (auto& st : enabled_process_outputs(sem, p))
        if (st.action == a) return std::move(st.next);
    throw NotEnabled("process cannot perform " + (sem.env ? to_string(a, *sem.env) : std::string("action")));
}

bool Configuration::quiescent_statements() const {
    for (const auto& p : procs)
        if (p.stmt->kind != StmtKind::Skip) return false;
    return true;
}

std::vector<ConfigStep> enabled_config_steps(const Configuration& c) {
    std::vector<ConfigStep> out;
    for (size_t i = 0; i < c.procs.size(); ++i)
        for (auto& st : enabled_process_outputs(c.sem, c.procs[i])) out.push_back({st.action, i});
    return out;
}

void deliver(Configuration& c, const Message& m) {
    for (auto& p : c.procs)
        if (!p.owns(m.from) && p.owns(m.to)) p.buffer.push(m);
}

void apply_output(Configuration& c, size_t process, const ProcessStep& step) {
    c.procs[process] = step.next;
    if (step.action.is_internal()) return;
    for (size_t j = 0; j < c.procs.size(); ++j)
        if (j != process) c.procs[j] = step_process_input(c.procs[j], step.action.msg);
}

Configuration step_config(const Configuration& c, const Action& a) {
    Configuration out = c;
    if (a.dir == Dir::In) {
        deliver(out, a.msg);
        return out;
    }
    for (size_t i = 0; i < c.procs.size(); ++i)
        for (auto& st : enabled_process_outputs(c.sem, c.procs[i]))
            if (st.action == a) {
                apply_output(out, i, st);
                return out;
            }
    throw NotEnabled("configuration cannot perform the requested output");
}

std::optional<std::pair<size_t, ProcessStep>> output_on(const Configuration& c, const Channel& ch) {
    std::optional<std::pair<size_t, ProcessStep>> found;
    for (size_t i = 0; i < c.procs.size(); ++i) {
        const auto& p = c.procs[i];
        if (!p.owns(ch.first)) continue;
        for (auto& st : enabled_process_outputs(c.sem, p)) {
            if (st.action.msg.channel() != ch) continue;
            if (found) {
                if (found->second.action == st.action && found->first == i) continue;
                throw DeterminismViolation("two outputs enabled on one channel");
            }
            found.emplace(i, std::move(st));
        }
    }
    return found;
}

}  // namespace chorsec

namespace chorsec {

void encode_int(std::string& out, long long v) {
    out += std::to_string(v);
    out += ',';
}

void encode_value(std::string& out, const Value& v) {
    out += static_cast<char>('u' + static_cast<int>(v.kind));
    encode_int(out, v.i);
}

namespace {

void encode_principal(std::string& out, const Principal& p) {
    out += '[';
    for (AtomMask c : p.clauses()) encode_int(out, c);
    out += ']';
}

void encode_atom(std::string& out, const Atom& a) {
    if (a.is_var()) {
        out += 'v';
        encode_int(out, a.var);
    } else {
        encode_value(out, a.val);
    }
}

void encode_expr(std::string& out, const Expr& e) {
    out += static_cast<char>('a' + static_cast<int>(e.kind));
    encode_int(out, static_cast<int>(e.op));
    for (const auto& a : e.args) encode_atom(out, a);
    encode_int(out, e.host);
    if (e.kind == ExprKind::Declassify || e.kind == ExprKind::Endorse) {
        encode_principal(out, e.from.conf);
        encode_principal(out, e.from.integ);
        encode_principal(out, e.to.conf);
        encode_principal(out, e.to.integ);
    }
}

}  // namespace

void encode_stmt(std::string& out, const StmtP& s) {
    out += static_cast<char>('A' + static_cast<int>(s->kind));
    switch (s->kind) {
        case StmtKind::Skip: return;
        case StmtKind::Let:
            encode_int(out, s->var);
            encode_int(out, s->h1);
            encode_expr(out, s->expr);
            break;
        case StmtKind::Move:
            encode_int(out, s->var);
            encode_int(out, s->h1);
            encode_int(out, s->h2);
            encode_atom(out, s->atom);
            break;
        case StmtKind::Select:
        case StmtKind::SelectPending:
        case StmtKind::MovePending:
            encode_int(out, s->var);
            encode_int(out, s->h1);
            encode_int(out, s->h2);
            encode_value(out, s->val);
            break;
        case StmtKind::If:
            encode_int(out, s->h1);
            encode_atom(out, s->atom);
            encode_stmt(out, s->then_branch);
            encode_stmt(out, s->else_branch);
            return;
        case StmtKind::Case:
            encode_int(out, s->h1);
            encode_int(out, s->h2);
            for (const auto& [v, b] : s->cases) {
                encode_value(out, v);
                encode_stmt(out, b);
            }
            out += ';';
            return;
    }
    encode_stmt(out, s->next);
}

void encode_process(std::string& out, const ProcessState& p) {
    out += '{';
    for (Ep h : p.hosts) encode_int(out, h);
    encode_stmt(out, p.stmt);
    auto entries = p.store.entries();
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [x, v] : entries) {
        encode_int(out, x);
        encode_value(out, v);
    }
    out += '|';
    auto items = p.buffer.items();
    std::stable_sort(items.begin(), items.end(),
                     [](const Message& a, const Message& b) { return a.channel() < b.channel(); });
    for (const auto& m : items) {
        encode_int(out, m.from);
        encode_int(out, m.to);
        encode_value(out, m.value);
    }
    out += '}';
}

void encode_config(std::string& out, const Configuration& c) {
    for (const auto& p : c.procs) encode_process(out, p);
}

}  // namespace chorsec
