#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chorsec/lang.hpp"

namespace chorsec {

struct Binding {
    Ep host;
    Label label;
};

using TypeContext = std::map<Var, Binding>;

struct Diagnostic {
    std::string rule;     // e.g. "Lbl-Let"
    std::string premise;  // e.g. "authority"
    Pos pos;
    std::string message;
};

struct TypeOptions {
    // Source programs live on one logical host: host matching is skipped.
    bool source_tier = false;
    // Only enforced when set: recv/send must name a malicious peer.
    std::optional<Attack> attack;
    // User-supplied stored labels for Let/Move binders, used when admissible.
    std::map<std::string, Label> annotations;
};

struct TypeResult {
    bool ok() const { return diagnostics.empty(); }
    std::vector<Diagnostic> diagnostics;
    TypeContext context;  // every binding, with its chosen label
};

// Atomic expressions: values check at any label, variables flow to `l` at host `h`.
bool check_atomic(const TypeContext& ctx, Ep h, const Atom& a, const Label& l, bool match_host = true);
// Checks `e` at host `h` against label `l`; failures are appended to `diags`.
bool check_expr(const TypeContext& ctx, Ep h, const Expr& e, const Label& l, const HostEnv& env,
                std::vector<Diagnostic>* diags = nullptr, bool match_host = true);
// Least label at which `e` checks (ignoring failures of other premises).
Label principal_label(const TypeContext& ctx, Ep h, const Expr& e, const HostEnv& env);

TypeResult check_stmt(const TypeContext& ctx, const StmtP& s, const HostEnv& env, const TypeOptions& opt = {});
TypeResult typecheck(const Program& p, const HostEnv& env, const TypeOptions& opt = {});

}  // namespace chorsec
