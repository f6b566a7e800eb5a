#pragma once

#include <optional>
#include <string>
#include <vector>

#include "chorsec/lang.hpp"

namespace chorsec {

// Integrity of the best communication-path bundle between every host pair.
class SyncContext {
public:
    SyncContext() = default;
    // All pairs start at `init`.
    SyncContext(int hosts, const Principal& init);
    static SyncContext top(const HostEnv& env);
    // Every host reset, the conservative starting point.
    static SyncContext reset_all(const HostEnv& env);

    int size() const { return n_; }
    const Principal& at(Ep from, Ep to) const;
    void set(Ep from, Ep to, Principal p);

    friend bool operator==(const SyncContext&, const SyncContext&) = default;

private:
    int n_ = 0;
    std::vector<Principal> m_;
};

SyncContext h_sync(const SyncContext& s, Ep h1, Ep h2, const HostEnv& env);
SyncContext h_reset(const SyncContext& s, Ep h, const HostEnv& env);
bool h_is_synched(const SyncContext& s, Ep h, const HostEnv& env, Ep* witness = nullptr);

enum class ExprClass { Internal, ExternalInput, ExternalOutput };
// Whether evaluating `e` at `h` performs an action visible outside the
// process under the attack (downgrades count only when they are effective).
ExprClass classify_expr(const Expr& e, Ep h, const HostEnv& env, const Attack& a);

struct SyncResult {
    bool ok = true;
    Ep host = kNoEndpoint;     // unsynchronized output host
    Ep witness = kNoEndpoint;  // host h' whose path to `host` is too weak
    Pos pos;
    std::string message;
};

enum class SyncInit { Top, Reset };

SyncResult check_sync(const SyncContext& init, const StmtP& s, const HostEnv& env, const Attack& a);
SyncResult check_sync(const StmtP& s, const HostEnv& env, const Attack& a, SyncInit init = SyncInit::Top);

}  // namespace chorsec
