#include "chorsec/labels.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace chorsec {

int AtomTable::intern(const std::string& name) {
    if (auto i = find(name)) return *i;
    if (size() >= kMaxAtoms) throw LabelError("too many atomic principals (max 16)");
    names_.push_back(name);
    return size() - 1;
}

std::optional<int> AtomTable::find(const std::string& name) const {
    for (int i = 0; i < size(); ++i)
        if (names_[i] == name) return i;
    return std::nullopt;
}

AtomMask AtomTable::mask_of(const std::vector<std::string>& names) const {
    AtomMask m = 0;
    for (const auto& n : names) {
        auto i = find(n);
        if (!i) throw LabelError("unknown atomic principal '" + n + "'");
        m |= AtomMask{1} << *i;
    }
    return m;
}

namespace {

// Drop clauses that contain another clause, then sort.
std::vector<AtomMask> minimize(std::vector<AtomMask> cs) {
    std::sort(cs.begin(), cs.end(), [](AtomMask a, AtomMask b) {
        int pa = __builtin_popcount(a), pb = __builtin_popcount(b);
        return pa != pb ? pa < pb : a < b;
    });
    cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
    std::vector<AtomMask> out;
    for (AtomMask c : cs) {
        bool absorbed = false;
        for (AtomMask k : out)
            if ((k & c) == k) { absorbed = true; break; }
        if (!absorbed) out.push_back(c);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

Principal Principal::bot() { return from_clauses({0}); }

Principal Principal::atom(int index) {
    if (index < 0 || index >= kMaxAtoms) throw LabelError("atom index out of range");
    return from_clauses({AtomMask{1} << index});
}

Principal Principal::from_clauses(std::vector<AtomMask> clauses) {
    Principal p;
    p.clauses_ = minimize(std::move(clauses));
    return p;
}

bool Principal::eval(AtomMask truth) const {
    for (AtomMask c : clauses_)
        if ((c & truth) == c) return true;
    return false;
}

AtomMask Principal::atoms() const {
    AtomMask m = 0;
    for (AtomMask c : clauses_) m |= c;
    return m;
}

Principal operator&(const Principal& p, const Principal& q) {
    std::vector<AtomMask> cs;
    cs.reserve(p.clauses().size() * q.clauses().size());
    for (AtomMask a : p.clauses())
        for (AtomMask b : q.clauses()) cs.push_back(a | b);
    return Principal::from_clauses(std::move(cs));
}

Principal operator|(const Principal& p, const Principal& q) {
    std::vector<AtomMask> cs = p.clauses();
    cs.insert(cs.end(), q.clauses().begin(), q.clauses().end());
    return Principal::from_clauses(std::move(cs));
}

bool acts_for(const Principal& p, const Principal& q) {
    for (AtomMask a : p.clauses()) {
        bool covered = false;
        for (AtomMask b : q.clauses())
            if ((b & a) == b) { covered = true; break; }
        if (!covered) return false;
    }
    return true;
}

Label uniform_label(const Principal& p) { return {p, p}; }
Label least_restrictive() { return {Principal::bot(), Principal::top()}; }
Label most_restrictive() { return {Principal::top(), Principal::bot()}; }
Label conf_projection(const Label& l) { return {l.conf, Principal::bot()}; }
Label integ_projection(const Label& l) { return {Principal::bot(), l.integ}; }

bool flows_to(const Label& l1, const Label& l2) {
    return acts_for(l2.conf, l1.conf) && acts_for(l1.integ, l2.integ);
}

Label label_join(const Label& l1, const Label& l2) {
    return {l1.conf & l2.conf, l1.integ | l2.integ};
}

Label label_meet(const Label& l1, const Label& l2) {
    return {l1.conf | l2.conf, l1.integ & l2.integ};
}

Label label_or(const Label& l1, const Label& l2) {
    return {l1.conf | l2.conf, l1.integ | l2.integ};
}

Label label_and(const Label& l1, const Label& l2) {
    return {l1.conf & l2.conf, l1.integ & l2.integ};
}

bool label_acts_for(const Label& l1, const Label& l2) {
    return acts_for(l1.conf, l2.conf) && acts_for(l1.integ, l2.integ);
}

bool uncompromised(const Label& l) { return acts_for(l.integ, l.conf); }

Attack::Attack(AtomMask public_atoms, AtomMask untrusted_atoms)
    : public_(public_atoms), untrusted_(untrusted_atoms) {
    if ((untrusted_ & ~public_) != 0)
        throw LabelError("invalid attack: untrusted atoms must also be public");
}

std::vector<Attack> all_valid_attacks(int atom_count) {
    std::vector<Attack> out;
    AtomMask limit = AtomMask{1} << atom_count;
    for (AtomMask p = 0; p < limit; ++p)
        for (AtomMask u = 0; u < limit; ++u)
            if ((u & ~p) == 0) out.emplace_back(p, u);
    return out;
}

const char* to_string(HostClass c) {
    switch (c) {
        case HostClass::Honest: return "honest";
        case HostClass::SemiHonest: return "semi-honest";
        case HostClass::Malicious: return "malicious";
    }
    return "?";
}

HostEnv::HostEnv(AtomTable atoms, std::vector<std::string> names, std::vector<Label> labels)
    : atoms_(std::move(atoms)), names_(std::move(names)), labels_(std::move(labels)) {
    if (names_.size() != labels_.size()) throw LabelError("host/label count mismatch");
    for (const auto& l : labels_)
        if (!uncompromised(l)) throw LabelError("host labels must be uncompromised");
}

std::optional<Ep> HostEnv::find(const std::string& name) const {
    for (int i = 0; i < host_count(); ++i)
        if (names_[i] == name) return i;
    return std::nullopt;
}

Ep HostEnv::add_host(const std::string& name, const Label& label) {
    if (find(name)) throw LabelError("duplicate host '" + name + "'");
    if (!uncompromised(label)) throw LabelError("label of host '" + name + "' is compromised");
    names_.push_back(name);
    labels_.push_back(label);
    return host_count() - 1;
}

void HostEnv::set_label(Ep h, const Label& label) {
    if (!uncompromised(label)) throw LabelError("label of host '" + names_.at(h) + "' is compromised");
    labels_.at(h) = label;
}

Label HostEnv::label(Ep e) const {
    switch (e) {
        case kAdversary: return least_restrictive();
        case kEnvironment:
        case kIdeal: return {Principal::top(), Principal::top()};
        default: return labels_.at(e);
    }
}

std::optional<Ep> HostEnv::find_endpoint(const std::string& name) const {
    if (name == "adv") return kAdversary;
    if (name == "env") return kEnvironment;
    if (name == "*") return kIdeal;
    return find(name);
}

std::string HostEnv::name(Ep e) const {
    switch (e) {
        case kAdversary: return "adv";
        case kEnvironment: return "env";
        case kIdeal: return "*";
        default: return names_.at(e);
    }
}

HostClass HostEnv::classify(Ep h, const Attack& a) const {
    Label l = label(h);
    if (a.is_secret(l)) return HostClass::Honest;
    return a.is_trusted(l) ? HostClass::SemiHonest : HostClass::Malicious;
}

bool HostEnv::malicious(Ep h, const Attack& a) const {
    if (h < 0) return false;
    return classify(h, a) == HostClass::Malicious;
}

bool HostEnv::honest(Ep h, const Attack& a) const {
    return classify(h, a) == HostClass::Honest;
}

Label HostEnv::channel_label(Ep e1, Ep e2) const { return label_or(label(e1), label(e2)); }

// ---------------------------------------------------------------- text

namespace {

struct Lexer {
    const std::string& s;
    size_t i = 0;
    void ws() {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    }
    bool eat(char c) {
        ws();
        if (i < s.size() && s[i] == c) { ++i; return true; }
        return false;
    }
    std::string ident() {
        ws();
        size_t b = i;
        while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
        return s.substr(b, i - b);
    }
    [[noreturn]] void fail(const std::string& what) {
        throw LabelError("principal syntax: " + what + " at offset " + std::to_string(i) + " in '" + s + "'");
    }
};

Principal parse_or(Lexer& lx, AtomTable& atoms);

Principal parse_primary(Lexer& lx, AtomTable& atoms) {
    if (lx.eat('(')) {
        Principal p = parse_or(lx, atoms);
        if (!lx.eat(')')) lx.fail("expected ')'");
        return p;
    }
    std::string id = lx.ident();
    if (id.empty()) lx.fail("expected atom");
    if (id == "top") return Principal::top();
    if (id == "bot") return Principal::bot();
    return Principal::atom(atoms.intern(id));
}

Principal parse_and(Lexer& lx, AtomTable& atoms) {
    Principal p = parse_primary(lx, atoms);
    while (lx.eat('&')) p = p & parse_primary(lx, atoms);
    return p;
}

Principal parse_or(Lexer& lx, AtomTable& atoms) {
    Principal p = parse_and(lx, atoms);
    while (lx.eat('|')) p = p | parse_and(lx, atoms);
    return p;
}

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> parse_name_list(const std::string& text) {
    std::string t = trim(text);
    if (t.size() < 2 || t.front() != '[' || t.back() != ']') throw LabelError("expected [..] list, got '" + t + "'");
    std::vector<std::string> out;
    std::stringstream ss(t.substr(1, t.size() - 2));
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

}  // namespace

Principal parse_principal(const std::string& text, AtomTable& atoms) {
    Lexer lx{text};
    Principal p = parse_or(lx, atoms);
    lx.ws();
    if (lx.i != text.size()) lx.fail("trailing input");
    return p;
}

Label parse_label(const std::string& text, AtomTable& atoms) {
    std::string t = trim(text);
    if (!t.empty() && t.front() == '<') {
        if (t.back() != '>') throw LabelError("label syntax: missing '>' in '" + t + "'");
        std::string body = t.substr(1, t.size() - 2);
        int depth = 0;
        size_t comma = std::string::npos;
        for (size_t i = 0; i < body.size(); ++i) {
            if (body[i] == '(') ++depth;
            if (body[i] == ')') --depth;
            if (body[i] == ',' && depth == 0) { comma = i; break; }
        }
        if (comma == std::string::npos) throw LabelError("label syntax: expected ',' in '" + t + "'");
        return {parse_principal(body.substr(0, comma), atoms), parse_principal(body.substr(comma + 1), atoms)};
    }
    return uniform_label(parse_principal(t, atoms));
}

std::string to_string(const Principal& p, const AtomTable& atoms) {
    if (p.is_top()) return "top";
    if (p.is_bot()) return "bot";
    std::string out;
    bool multi = p.clauses().size() > 1;
    for (size_t k = 0; k < p.clauses().size(); ++k) {
        if (k) out += " | ";
        AtomMask c = p.clauses()[k];
        bool conj = __builtin_popcount(c) > 1;
        if (conj && multi) out += "(";
        bool first = true;
        for (int i = 0; i < kMaxAtoms; ++i) {
            if (!(c & (AtomMask{1} << i))) continue;
            if (!first) out += " & ";
            first = false;
            out += i < atoms.size() ? atoms.name(i) : "#" + std::to_string(i);
        }
        if (conj && multi) out += ")";
    }
    return out;
}

std::string to_string(const Label& l, const AtomTable& atoms) {
    return "<" + to_string(l.conf, atoms) + ", " + to_string(l.integ, atoms) + ">";
}

HostEnv parse_host_file(const std::string& text) {
    HostEnv env;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto where = " (host file line " + std::to_string(lineno) + ")";
        if (line.rfind("host", 0) != 0) throw LabelError("expected 'host NAME = LABEL'" + where);
        auto eq = line.find('=');
        if (eq == std::string::npos) throw LabelError("expected '='" + where);
        std::string name = trim(line.substr(4, eq - 4));
        if (name.empty()) throw LabelError("missing host name" + where);
        try {
            Label l = parse_label(line.substr(eq + 1), env.atoms());
            env.add_host(name, l);
        } catch (const LabelError& e) {
            throw LabelError(e.what() + where);
        }
    }
    return env;
}

Attack parse_attack_file(const std::string& text, const AtomTable& atoms) {
    std::vector<std::string> pub, untrusted;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw LabelError("attack file: expected 'key = [..]'");
        std::string key = trim(line.substr(0, eq));
        auto names = parse_name_list(line.substr(eq + 1));
        if (key == "public") pub = names;
        else if (key == "untrusted") untrusted = names;
        else throw LabelError("attack file: unknown key '" + key + "'");
    }
    return Attack(atoms.mask_of(pub), atoms.mask_of(untrusted));
}

std::string attack_to_string(const Attack& a, const AtomTable& atoms) {
    auto list = [&](AtomMask m) {
        std::string s = "[";
        bool first = true;
        for (int i = 0; i < atoms.size(); ++i) {
            if (!(m & (AtomMask{1} << i))) continue;
            if (!first) s += ", ";
            first = false;
            s += atoms.name(i);
        }
        return s + "]";
    };
    return "public = " + list(a.public_atoms()) + "\nuntrusted = " + list(a.untrusted_atoms()) + "\n";
}

}  // namespace chorsec
