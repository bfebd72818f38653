#include "tclp/constructor_table.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

namespace tclp {

void HierarchyDecls::append(const HierarchyDecls& other) {
    constructors.insert(constructors.end(), other.constructors.begin(), other.constructors.end());
    edges.insert(edges.end(), other.edges.begin(), other.edges.end());
}

std::string_view to_string(TableErrorKind kind) {
    switch (kind) {
        case TableErrorKind::ReservedName: return "ReservedName";
        case TableErrorKind::DuplicateConstructor: return "DuplicateConstructor";
        case TableErrorKind::UnknownConstructor: return "UnknownConstructor";
        case TableErrorKind::MalformedEdge: return "MalformedEdge";
        case TableErrorKind::ArityIncrease: return "ArityIncrease";
        case TableErrorKind::NonInjectiveIota: return "NonInjectiveIota";
        case TableErrorKind::IotaIncoherent: return "IotaIncoherent";
        case TableErrorKind::CyclicOrder: return "CyclicOrder";
        case TableErrorKind::NoComponentMaximum: return "NoComponentMaximum";
        case TableErrorKind::NotALattice: return "NotALattice";
    }
    return "?";
}

namespace {

const IotaMap kEmptyIota;

std::string line_prefix(int line) {
    return line > 0 ? "line " + std::to_string(line) + ": " : std::string();
}

std::string sym(Symbol s) { return std::string(s.str()); }

}  // namespace

int ConstructorTable::local(Symbol k) const {
    return k.id() < local_of_.size() ? local_of_[k.id()] : -1;
}

bool ConstructorTable::contains(Symbol k) const {
    return local(k) >= 0 || k == top_symbol() || k == bottom_symbol();
}

std::size_t ConstructorTable::arity(Symbol k) const {
    int i = local(k);
    return i >= 0 ? arities_[i] : 0;
}

ConstructorTable ConstructorTable::validate(const HierarchyDecls& decls, LatticeMode mode) {
    ConstructorTable t;
    t.decls_ = decls;
    t.mode_ = mode;

    for (const auto& c : decls.constructors) {
        Symbol s = Symbol::intern(c.name);
        if (s == top_symbol() || s == bottom_symbol())
            throw TableError(TableErrorKind::ReservedName,
                             line_prefix(c.line) + "constructor name '" + c.name + "' is reserved");
        if (t.local(s) >= 0)
            throw TableError(TableErrorKind::DuplicateConstructor,
                             line_prefix(c.line) + "constructor '" + c.name + "' declared twice");
        if (t.local_of_.size() <= s.id()) t.local_of_.resize(s.id() + 1, -1);
        t.local_of_[s.id()] = static_cast<int>(t.symbols_.size());
        t.symbols_.push_back(s);
        t.arities_.push_back(c.arity);
    }
    const std::size_t n = t.symbols_.size();

    // Covering edges with their index maps.
    struct Edge {
        int to;
        IotaMap iota;
    };
    std::vector<std::vector<Edge>> out(n);
    for (const auto& e : decls.edges) {
        auto where = line_prefix(e.line);
        for (const auto* side : {&e.lower, &e.upper}) {
            if (side->is_param())
                throw TableError(TableErrorKind::MalformedEdge, where + "subtype edge side must be a constructor");
            if (t.local(side->name()) < 0)
                throw TableError(TableErrorKind::UnknownConstructor,
                                 where + "unknown constructor '" + sym(side->name()) + "'");
            if (side->arity() != t.arity(side->name()))
                throw TableError(TableErrorKind::MalformedEdge,
                                 where + "'" + sym(side->name()) + "' used with wrong number of arguments");
            for (const auto& a : side->args())
                if (!a.is_param())
                    throw TableError(TableErrorKind::MalformedEdge, where + "subtype edges relate flat types only");
        }
        const auto lower_args = e.lower.args();
        const auto upper_args = e.upper.args();
        if (vars_of(e.lower).size() != lower_args.size())
            throw TableError(TableErrorKind::MalformedEdge, where + "lower side of an edge must be a flat type");
        if (upper_args.size() > lower_args.size())
            throw TableError(TableErrorKind::ArityIncrease,
                             where + sym(e.lower.name()) + "/" + std::to_string(lower_args.size()) + " < " +
                                 sym(e.upper.name()) + "/" + std::to_string(upper_args.size()) +
                                 " increases arity");
        IotaMap iota;
        std::set<std::uint32_t> used;
        for (const auto& ua : upper_args) {
            auto it = std::find(lower_args.begin(), lower_args.end(), ua);
            if (it == lower_args.end())
                throw TableError(TableErrorKind::MalformedEdge,
                                 where + "parameter of the upper type does not occur in the lower type");
            auto pos = static_cast<std::uint32_t>(it - lower_args.begin());
            if (!used.insert(pos).second)
                throw TableError(TableErrorKind::NonInjectiveIota,
                                 where + "index map of " + sym(e.lower.name()) + " < " + sym(e.upper.name()) +
                                     " is not injective");
            iota.push_back(pos);
        }
        int from = t.local(e.lower.name());
        int to = t.local(e.upper.name());
        if (from == to) {
            IotaMap id(upper_args.size());
            for (std::uint32_t i = 0; i < id.size(); ++i) id[i] = i;
            if (iota != id)
                throw TableError(TableErrorKind::IotaIncoherent,
                                 where + "reflexive edge on " + sym(e.lower.name()) + " permutes arguments");
            continue;
        }
        out[from].push_back({to, std::move(iota)});
    }

    // Reflexive-transitive closure with composed index maps.
    t.order_.assign(n * n, std::nullopt);
    for (std::size_t a = 0; a < n; ++a) {
        IotaMap id(t.arities_[a]);
        for (std::uint32_t i = 0; i < id.size(); ++i) id[i] = i;
        t.order_[a * n + a] = id;
        std::deque<int> queue{static_cast<int>(a)};
        while (!queue.empty()) {
            int b = queue.front();
            queue.pop_front();
            const IotaMap ab = *t.order_[a * n + b];
            for (const auto& e : out[b]) {
                IotaMap ac(e.iota.size());
                for (std::size_t j = 0; j < ac.size(); ++j) ac[j] = ab[e.iota[j]];
                if (static_cast<std::size_t>(e.to) == a)
                    throw TableError(TableErrorKind::CyclicOrder,
                                     "constructor order is cyclic through '" + sym(t.symbols_[a]) + "'");
                auto& slot = t.order_[a * n + e.to];
                if (slot) {
                    if (*slot != ac)
                        throw TableError(TableErrorKind::IotaIncoherent,
                                         "index maps from " + sym(t.symbols_[a]) + " to " +
                                             sym(t.symbols_[e.to]) + " disagree along two paths");
                    continue;
                }
                slot = std::move(ac);
                queue.push_back(e.to);
            }
        }
    }

    auto le = [&](std::size_t a, std::size_t b) { return t.order_[a * n + b].has_value(); };

    t.max_of_.assign(n, -1);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t m = 0; m < n && t.max_of_[a] < 0; ++m) {
            if (!le(a, m)) continue;
            bool all = true;
            for (std::size_t u = 0; u < n && all; ++u)
                if (le(a, u) && !le(u, m)) all = false;
            if (all) t.max_of_[a] = static_cast<int>(m);
        }
        if (t.max_of_[a] < 0)
            throw TableError(TableErrorKind::NoComponentMaximum,
                             "supertypes of '" + sym(t.symbols_[a]) + "' have no maximum");
    }

    if (mode == LatticeMode::Off) return t;

    auto fail_lattice = [&](const std::string& why) {
        if (mode == LatticeMode::Required) throw TableError(TableErrorKind::NotALattice, why);
        t.lattice_ = false;
        t.glb_.clear();
        t.lub_.clear();
    };

    t.glb_.assign(n * n, bottom_symbol());
    t.lub_.assign(n * n, top_symbol());
    t.lattice_ = true;
    for (std::size_t a = 0; a < n && t.lattice_; ++a) {
        for (std::size_t b = 0; b < n && t.lattice_; ++b) {
            int g = -1;
            bool any_lower = false;
            for (std::size_t c = 0; c < n; ++c) {
                if (!(le(c, a) && le(c, b))) continue;
                any_lower = true;
                bool greatest = true;
                for (std::size_t d = 0; d < n && greatest; ++d)
                    if (le(d, a) && le(d, b) && !le(d, c)) greatest = false;
                if (greatest) g = static_cast<int>(c);
            }
            if (any_lower && g < 0) {
                fail_lattice(sym(t.symbols_[a]) + " and " + sym(t.symbols_[b]) + " have no greatest lower bound");
                break;
            }
            if (g >= 0) {
                // Every argument of the meet must survive into one of the two sides.
                std::vector<bool> covered(t.arities_[g], false);
                for (auto p : *t.order_[g * n + a]) covered[p] = true;
                for (auto p : *t.order_[g * n + b]) covered[p] = true;
                if (std::find(covered.begin(), covered.end(), false) != covered.end()) {
                    fail_lattice("greatest lower bound " + sym(t.symbols_[g]) + " of " + sym(t.symbols_[a]) +
                                 " and " + sym(t.symbols_[b]) + " introduces new parameters");
                    break;
                }
                t.glb_[a * n + b] = t.symbols_[g];
            }
            int l = -1;
            bool any_upper = false;
            for (std::size_t c = 0; c < n; ++c) {
                if (!(le(a, c) && le(b, c))) continue;
                any_upper = true;
                bool least = true;
                for (std::size_t d = 0; d < n && least; ++d)
                    if (le(a, d) && le(b, d) && !le(c, d)) least = false;
                if (least) l = static_cast<int>(c);
            }
            if (any_upper && l < 0) {
                fail_lattice(sym(t.symbols_[a]) + " and " + sym(t.symbols_[b]) + " have no least upper bound");
                break;
            }
            if (l >= 0) t.lub_[a * n + b] = t.symbols_[l];
        }
    }
    return t;
}

bool ConstructorTable::leq(Symbol a, Symbol b) const {
    if (a == bottom_symbol() || b == top_symbol()) return contains(a) && contains(b);
    if (a == top_symbol() || b == bottom_symbol()) return false;
    int i = local(a), j = local(b);
    if (i < 0 || j < 0) return false;
    return order_[i * symbols_.size() + j].has_value();
}

const IotaMap* ConstructorTable::iota(Symbol a, Symbol b) const {
    if (a == bottom_symbol() || b == top_symbol()) return &kEmptyIota;
    if (a == top_symbol() || b == bottom_symbol()) return nullptr;
    int i = local(a), j = local(b);
    if (i < 0 || j < 0) return nullptr;
    const auto& slot = order_[i * symbols_.size() + j];
    return slot ? &*slot : nullptr;
}

Symbol ConstructorTable::max_of(Symbol k) const {
    int i = local(k);
    return i >= 0 ? symbols_[max_of_[i]] : k;
}

Symbol ConstructorTable::glb(Symbol a, Symbol b) const {
    if (a == top_symbol()) return b;
    if (b == top_symbol()) return a;
    if (a == bottom_symbol() || b == bottom_symbol()) return bottom_symbol();
    int i = local(a), j = local(b);
    if (i < 0 || j < 0 || !lattice_) return bottom_symbol();
    return glb_[i * symbols_.size() + j];
}

Symbol ConstructorTable::lub(Symbol a, Symbol b) const {
    if (a == bottom_symbol()) return b;
    if (b == bottom_symbol()) return a;
    if (a == top_symbol() || b == top_symbol()) return top_symbol();
    int i = local(a), j = local(b);
    if (i < 0 || j < 0 || !lattice_) return top_symbol();
    return lub_[i * symbols_.size() + j];
}

std::optional<Symbol> ConstructorTable::unique_root() const {
    std::set<int> roots(max_of_.begin(), max_of_.end());
    if (roots.size() != 1) return std::nullopt;
    return symbols_[*roots.begin()];
}

std::vector<Symbol> ConstructorTable::constructors() const { return symbols_; }

ConstructorTable ConstructorTable::with_constants(std::span<const std::string> names) const {
    if (names.empty()) return *this;
    HierarchyDecls d = decls_;
    const Symbol term = Symbol::intern("term");
    const bool has_term = local(term) >= 0 && arity(term) == 0;
    for (const auto& name : names) {
        d.constructors.push_back({name, 0, 0});
        if (has_term) d.edges.push_back({TypeTerm::ctor(name), TypeTerm::ctor(term), 0});
    }
    return validate(d, mode_);
}

bool subtype_check(const TypeTerm& s, const TypeTerm& t, const ConstructorTable& table) {
    if (s.is_param()) return t.is_param() && s.param_id() == t.param_id();
    if (t.is_param()) return false;
    if (s.is_bottom() || t.is_top()) return true;
    const IotaMap* iota = table.iota(s.name(), t.name());
    if (!iota) return false;
    for (std::size_t j = 0; j < t.arity(); ++j)
        if (!subtype_check(s.args()[(*iota)[j]], t.args()[j], table)) return false;
    return true;
}

TypeTerm max_type(const TypeTerm& t, const ConstructorTable& table) {
    if (t.is_param() || t.is_top() || t.is_bottom()) return t;
    Symbol root = table.max_of(t.name());
    const IotaMap* iota = table.iota(t.name(), root);
    std::vector<TypeTerm> args;
    if (iota)
        for (auto pos : *iota) args.push_back(max_type(t.args()[pos], table));
    return TypeTerm::ctor(root, std::move(args));
}

bool well_formed(const TypeTerm& t, const ConstructorTable& table) {
    if (t.is_param()) return true;
    if (!table.contains(t.name())) return false;
    if (t.is_top() || t.is_bottom()) return t.arity() == 0;
    if (t.arity() != table.arity(t.name())) return false;
    for (const auto& a : t.args())
        if (!well_formed(a, table)) return false;
    return true;
}

TypeTerm type_glb(const TypeTerm& a, const TypeTerm& b, const ConstructorTable& table) {
    if (a == b) return a;
    if (a.is_top()) return b;
    if (b.is_top()) return a;
    if (a.is_param() || b.is_param() || a.is_bottom() || b.is_bottom()) return TypeTerm::bottom();
    Symbol g = table.glb(a.name(), b.name());
    if (g == bottom_symbol()) return TypeTerm::bottom();
    const IotaMap& ia = *table.iota(g, a.name());
    const IotaMap& ib = *table.iota(g, b.name());
    std::vector<TypeTerm> args;
    for (std::uint32_t k = 0; k < table.arity(g); ++k) {
        auto pa = std::find(ia.begin(), ia.end(), k);
        auto pb = std::find(ib.begin(), ib.end(), k);
        if (pa != ia.end() && pb != ib.end())
            args.push_back(type_glb(a.args()[pa - ia.begin()], b.args()[pb - ib.begin()], table));
        else if (pa != ia.end())
            args.push_back(a.args()[pa - ia.begin()]);
        else
            args.push_back(b.args()[pb - ib.begin()]);
    }
    return TypeTerm::ctor(g, std::move(args));
}

TypeTerm type_lub(const TypeTerm& a, const TypeTerm& b, const ConstructorTable& table) {
    if (a == b) return a;
    if (a.is_bottom()) return b;
    if (b.is_bottom()) return a;
    if (a.is_param() || b.is_param() || a.is_top() || b.is_top()) return TypeTerm::top();
    Symbol l = table.lub(a.name(), b.name());
    if (l == top_symbol()) return TypeTerm::top();
    const IotaMap& ia = *table.iota(a.name(), l);
    const IotaMap& ib = *table.iota(b.name(), l);
    std::vector<TypeTerm> args;
    for (std::size_t k = 0; k < table.arity(l); ++k)
        args.push_back(type_lub(a.args()[ia[k]], b.args()[ib[k]], table));
    return TypeTerm::ctor(l, std::move(args));
}

TypeTerm render_top(const TypeTerm& t, const ConstructorTable& table) {
    if (t.is_param()) return t;
    if (t.is_top()) {
        auto root = table.unique_root();
        if (root && table.arity(*root) == 0) return TypeTerm::ctor(*root);
        return t;
    }
    std::vector<TypeTerm> args;
    for (const auto& a : t.args()) args.push_back(render_top(a, table));
    return TypeTerm::ctor(t.name(), std::move(args));
}

}  // namespace tclp
