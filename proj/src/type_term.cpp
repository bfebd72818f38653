#include "tclp/type_term.hpp"

#include <deque>
#include <mutex>
#include <unordered_map>

namespace tclp {

namespace {

struct SymbolPool {
    std::mutex mutex;
    std::deque<std::string> names{""};
    std::unordered_map<std::string_view, std::uint32_t> index{{names.front(), 0}};
};

SymbolPool& pool() {
    static SymbolPool p;
    return p;
}

}  // namespace

Symbol Symbol::intern(std::string_view name) {
    auto& p = pool();
    std::lock_guard lock(p.mutex);
    if (auto it = p.index.find(name); it != p.index.end()) return Symbol(it->second);
    p.names.emplace_back(name);
    auto id = static_cast<std::uint32_t>(p.names.size() - 1);
    p.index.emplace(p.names.back(), id);
    return Symbol(id);
}

std::string_view Symbol::str() const {
    auto& p = pool();
    std::lock_guard lock(p.mutex);
    return p.names[id_];
}

Symbol top_symbol() {
    static const Symbol s = Symbol::intern("top");
    return s;
}

Symbol bottom_symbol() {
    static const Symbol s = Symbol::intern("bottom");
    return s;
}

TypeTerm TypeTerm::param(ParamId id) {
    TypeTerm t;
    t.is_param_ = true;
    t.param_ = id;
    return t;
}

TypeTerm TypeTerm::ctor(Symbol name, std::vector<TypeTerm> args) {
    TypeTerm t;
    t.is_param_ = false;
    t.name_ = name;
    t.args_ = std::move(args);
    return t;
}

TypeTerm TypeTerm::ctor(std::string_view name, std::vector<TypeTerm> args) {
    return ctor(Symbol::intern(name), std::move(args));
}

std::strong_ordering operator<=>(const TypeTerm& a, const TypeTerm& b) {
    if (a.is_param_ != b.is_param_) return a.is_param_ ? std::strong_ordering::less : std::strong_ordering::greater;
    if (a.is_param_) return a.param_ <=> b.param_;
    if (auto c = a.name_ <=> b.name_; c != 0) return c;
    if (auto c = a.args_.size() <=> b.args_.size(); c != 0) return c;
    for (std::size_t i = 0; i < a.args_.size(); ++i)
        if (auto c = a.args_[i] <=> b.args_[i]; c != 0) return c;
    return std::strong_ordering::equal;
}

std::size_t type_size(const TypeTerm& t) {
    std::size_t n = 1;
    for (const auto& a : t.args()) n += type_size(a);
    return n;
}

void collect_vars(const TypeTerm& t, std::set<ParamId>& out) {
    if (t.is_param()) {
        out.insert(t.param_id());
        return;
    }
    for (const auto& a : t.args()) collect_vars(a, out);
}

std::set<ParamId> vars_of(const TypeTerm& t) {
    std::set<ParamId> out;
    collect_vars(t, out);
    return out;
}

bool occurs(ParamId a, const TypeTerm& t) {
    if (t.is_param()) return t.param_id() == a;
    for (const auto& arg : t.args())
        if (occurs(a, arg)) return true;
    return false;
}

bool is_ground(const TypeTerm& t) {
    if (t.is_param()) return false;
    for (const auto& a : t.args())
        if (!is_ground(a)) return false;
    return true;
}

TypeTerm apply_subst(const TypeTerm& t, const TypeSubstitution& theta) {
    if (theta.empty()) return t;
    if (t.is_param()) {
        auto it = theta.find(t.param_id());
        return it == theta.end() ? t : it->second;
    }
    std::vector<TypeTerm> args;
    args.reserve(t.arity());
    for (const auto& a : t.args()) args.push_back(apply_subst(a, theta));
    return TypeTerm::ctor(t.name(), std::move(args));
}

TypeTerm replace_param(const TypeTerm& t, ParamId a, const TypeTerm& by) {
    if (t.is_param()) return t.param_id() == a ? by : t;
    std::vector<TypeTerm> args;
    args.reserve(t.arity());
    for (const auto& arg : t.args()) args.push_back(replace_param(arg, a, by));
    return TypeTerm::ctor(t.name(), std::move(args));
}

TypeSubstitution compose(const TypeSubstitution& first, const TypeSubstitution& second) {
    TypeSubstitution out;
    for (const auto& [p, t] : first) out[p] = apply_subst(t, second);
    for (const auto& [p, t] : second)
        if (!out.count(p)) out[p] = t;
    for (auto it = out.begin(); it != out.end();) {
        if (it->second.is_param() && it->second.param_id() == it->first)
            it = out.erase(it);
        else
            ++it;
    }
    return out;
}

bool is_idempotent(const TypeSubstitution& theta) {
    for (const auto& [p, t] : theta)
        for (auto v : vars_of(t))
            if (theta.count(v)) return false;
    return true;
}

std::string ParamNamer::name(ParamId p) {
    if (auto it = names_.find(p); it != names_.end()) return it->second;
    std::size_t n = used_++;
    std::string s(1, static_cast<char>('A' + n % 26));
    if (n >= 26) s += std::to_string(n / 26);
    names_.emplace(p, s);
    return s;
}

void ParamNamer::preset(ParamId p, std::string name) { names_[p] = std::move(name); }

std::string to_string(const TypeTerm& t, ParamNamer& namer) {
    if (t.is_param()) return namer.name(t.param_id());
    std::string s(t.name().str());
    if (t.arity() == 0) return s;
    s += '(';
    for (std::size_t i = 0; i < t.arity(); ++i) {
        if (i) s += ", ";
        s += to_string(t.args()[i], namer);
    }
    s += ')';
    return s;
}

std::string to_string(const TypeTerm& t) {
    ParamNamer namer;
    return to_string(t, namer);
}

}  // namespace tclp
