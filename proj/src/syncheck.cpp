#include "chorsec/syncheck.hpp"

#include <stdexcept>

namespace chorsec {

SyncContext::SyncContext(int hosts, const Principal& init) : n_(hosts), m_(static_cast<size_t>(hosts * hosts), init) {}

SyncContext SyncContext::top(const HostEnv& env) { return SyncContext(env.host_count(), Principal::top()); }

SyncContext SyncContext::reset_all(const HostEnv& env) {
    SyncContext s = top(env);
    for (Ep h = 0; h < env.host_count(); ++h) s = h_reset(s, h, env);
    return s;
}

const Principal& SyncContext::at(Ep from, Ep to) const {
    if (from < 0 || to < 0 || from >= n_ || to >= n_) throw std::out_of_range("sync context: unknown host");
    return m_[static_cast<size_t>(from * n_ + to)];
}

void SyncContext::set(Ep from, Ep to, Principal p) {
    if (from < 0 || to < 0 || from >= n_ || to >= n_) throw std::out_of_range("sync context: unknown host");
    m_[static_cast<size_t>(from * n_ + to)] = std::move(p);
}

SyncContext h_sync(const SyncContext& s, Ep h1, Ep h2, const HostEnv& env) {
    SyncContext out = s;
    const Principal& i2 = env.label(h2).integ;
    for (Ep h = 0; h < s.size(); ++h) out.set(h, h2, s.at(h, h2) & (s.at(h, h1) | i2));
    return out;
}

SyncContext h_reset(const SyncContext& s, Ep h, const HostEnv& env) {
    SyncContext out = s;
    for (Ep k = 0; k < s.size(); ++k) out.set(h, k, Principal::bot());
    out.set(h, h, env.label(h).integ);
    return out;
}

bool h_is_synched(const SyncContext& s, Ep h, const HostEnv& env, Ep* witness) {
    for (Ep k = 0; k < s.size(); ++k) {
        // sigma(k, h) as an integrity label must flow to label(k) | label(h).
        Label path{Principal::bot(), s.at(k, h)};
        if (!flows_to(path, label_or(env.label(k), env.label(h)))) {
            if (witness) *witness = k;
            return false;
        }
    }
    return true;
}

ExprClass classify_expr(const Expr& e, Ep h, const HostEnv& env, const Attack& a) {
    switch (e.kind) {
        case ExprKind::Input: return env.malicious(h, a) ? ExprClass::Internal : ExprClass::ExternalInput;
        case ExprKind::Output: return env.malicious(h, a) ? ExprClass::Internal : ExprClass::ExternalOutput;
        case ExprKind::Declassify:
            return a.is_secret(e.from) && a.is_public(e.to) ? ExprClass::ExternalOutput : ExprClass::Internal;
        case ExprKind::Endorse:
            return a.is_untrusted(e.from) && a.is_trusted(e.to) ? ExprClass::ExternalInput : ExprClass::Internal;
        default: return ExprClass::Internal;
    }
}

namespace {

SyncResult run(const SyncContext& sigma, const StmtP& s, const HostEnv& env, const Attack& a) {
    switch (s->kind) {
        case StmtKind::Skip:
        case StmtKind::Case: return {};
        case StmtKind::Let: {
            ExprClass c = classify_expr(s->expr, s->h1, env, a);
            if (c == ExprClass::Internal) return run(sigma, s->next, env, a);
            if (c == ExprClass::ExternalOutput) {
                Ep w = kNoEndpoint;
                if (!h_is_synched(sigma, s->h1, env, &w)) {
                    SyncResult r;
                    r.ok = false;
                    r.host = s->h1;
                    r.witness = w;
                    r.pos = s->pos;
                    r.message = "output on " + env.name(s->h1) + " at " + to_string(s->pos) +
                                " is not synchronized with " + env.name(w);
                    return r;
                }
            }
            return run(h_reset(sigma, s->h1, env), s->next, env, a);
        }
        case StmtKind::Move:
        case StmtKind::Select:
        case StmtKind::MovePending:
        case StmtKind::SelectPending: return run(h_sync(sigma, s->h1, s->h2, env), s->next, env, a);
        case StmtKind::If: {
            SyncResult r = run(sigma, s->then_branch, env, a);
            if (!r.ok) return r;
            return run(sigma, s->else_branch, env, a);
        }
    }
    return {};
}

}  // namespace

SyncResult check_sync(const SyncContext& init, const StmtP& s, const HostEnv& env, const Attack& a) {
    return run(init, s, env, a);
}

SyncResult check_sync(const StmtP& s, const HostEnv& env, const Attack& a, SyncInit init) {
    return run(init == SyncInit::Top ? SyncContext::top(env) : SyncContext::reset_all(env), s, env, a);
}

}  // namespace chorsec
