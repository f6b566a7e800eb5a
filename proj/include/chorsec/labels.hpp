#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace chorsec {

// Set of atomic principals, one bit per atom.
using AtomMask = std::uint32_t;
constexpr int kMaxAtoms = 16;

struct LabelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class AtomTable {
public:
    // Returns the index of `name`, registering it when new.
    int intern(const std::string& name);
    std::optional<int> find(const std::string& name) const;
    const std::string& name(int i) const { return names_.at(i); }
    int size() const { return static_cast<int>(names_.size()); }
    AtomMask mask_of(const std::vector<std::string>& names) const;

private:
    std::vector<std::string> names_;
};

// Monotone boolean formula kept as an irredundant DNF: a sorted antichain
// of clauses, each clause a conjunction of atoms.
// top (strongest) has no clauses; bot (weakest) is the single empty clause.
class Principal {
public:
    Principal() = default;  // top
    static Principal top() { return Principal(); }
    static Principal bot();
    static Principal atom(int index);
    static Principal from_clauses(std::vector<AtomMask> clauses);

    const std::vector<AtomMask>& clauses() const { return clauses_; }
    bool is_top() const { return clauses_.empty(); }
    bool is_bot() const { return clauses_.size() == 1 && clauses_[0] == 0; }

    // Truth value under the assignment that maps atoms in `truth` to true.
    bool eval(AtomMask truth) const;
    AtomMask atoms() const;

    friend bool operator==(const Principal&, const Principal&) = default;
    friend auto operator<=>(const Principal&, const Principal&) = default;

private:
    std::vector<AtomMask> clauses_;
};

Principal operator&(const Principal& p, const Principal& q);
Principal operator|(const Principal& p, const Principal& q);
bool acts_for(const Principal& p, const Principal& q);

struct Label {
    Principal conf;
    Principal integ;
    friend bool operator==(const Label&, const Label&) = default;
    friend auto operator<=>(const Label&, const Label&) = default;
};

Label uniform_label(const Principal& p);
Label least_restrictive();  // public trusted
Label most_restrictive();   // secret untrusted
Label conf_projection(const Label& l);
Label integ_projection(const Label& l);
bool flows_to(const Label& l1, const Label& l2);
Label label_join(const Label& l1, const Label& l2);
Label label_meet(const Label& l1, const Label& l2);
// Pointwise connectives, used for channel and path labels.
Label label_or(const Label& l1, const Label& l2);
Label label_and(const Label& l1, const Label& l2);
bool label_acts_for(const Label& l1, const Label& l2);
bool uncompromised(const Label& l);

class Attack {
public:
    Attack() = default;
    Attack(AtomMask public_atoms, AtomMask untrusted_atoms);
    AtomMask public_atoms() const { return public_; }
    AtomMask untrusted_atoms() const { return untrusted_; }

    bool is_public(const Principal& p) const { return p.eval(public_); }
    bool is_untrusted(const Principal& p) const { return p.eval(untrusted_); }
    bool is_public(const Label& l) const { return is_public(l.conf); }
    bool is_secret(const Label& l) const { return !is_public(l.conf); }
    bool is_untrusted(const Label& l) const { return is_untrusted(l.integ); }
    bool is_trusted(const Label& l) const { return !is_untrusted(l.integ); }

    friend bool operator==(const Attack&, const Attack&) = default;

private:
    AtomMask public_ = 0;
    AtomMask untrusted_ = 0;
};

// Every valid attack over the first `atom_count` atoms.
std::vector<Attack> all_valid_attacks(int atom_count);

enum class HostClass { Honest, SemiHonest, Malicious };
const char* to_string(HostClass c);

// Endpoints are small integers: hosts are indices >= 0.
using Ep = int;
constexpr Ep kIdeal = -1;
constexpr Ep kAdversary = -2;
constexpr Ep kEnvironment = -3;
constexpr Ep kNoEndpoint = -100;

class HostEnv {
public:
    HostEnv() = default;
    HostEnv(AtomTable atoms, std::vector<std::string> names, std::vector<Label> labels);

    const AtomTable& atoms() const { return atoms_; }
    AtomTable& atoms() { return atoms_; }
    int host_count() const { return static_cast<int>(names_.size()); }
    std::optional<Ep> find(const std::string& name) const;
    // Also accepts adv, env and * for the special endpoints.
    std::optional<Ep> find_endpoint(const std::string& name) const;
    Ep add_host(const std::string& name, const Label& label);
    void set_label(Ep h, const Label& label);

    // Label of any endpoint, including the adversary, environment and ideal host.
    Label label(Ep e) const;
    std::string name(Ep e) const;

    HostClass classify(Ep h, const Attack& a) const;
    bool malicious(Ep h, const Attack& a) const;
    bool honest(Ep h, const Attack& a) const;
    Label channel_label(Ep e1, Ep e2) const;

private:
    AtomTable atoms_;
    std::vector<std::string> names_;
    std::vector<Label> labels_;
};

// Textual forms.
Principal parse_principal(const std::string& text, AtomTable& atoms);
Label parse_label(const std::string& text, AtomTable& atoms);
std::string to_string(const Principal& p, const AtomTable& atoms);
std::string to_string(const Label& l, const AtomTable& atoms);

HostEnv parse_host_file(const std::string& text);
Attack parse_attack_file(const std::string& text, const AtomTable& atoms);
std::string attack_to_string(const Attack& a, const AtomTable& atoms);

}  // namespace chorsec
