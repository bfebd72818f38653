#include <doctest.h>

#include <functional>
#include <random>

#include "support.hpp"
#include "tclp/parser.hpp"
#include "tclp/typechecker.hpp"

using namespace tclp;
using testing::P;
using testing::T;

namespace {

const ConstructorTable& reference() {
    static const ConstructorTable table = ConstructorTable::validate(reference_hierarchy());
    return table;
}

SignatureSet with(std::string_view decls) {
    SignatureSet sigs = builtin_signatures();
    sigs.override_with(parse_signatures(decls).signatures);
    return sigs;
}

CheckReport check(std::string_view decls, std::string_view program) {
    SignatureSet sigs = with(decls);
    Checker checker(reference(), sigs);
    return checker.check_program(parse_program(program, "t.pl"));
}

std::string first_error(const CheckReport& r) {
    for (const auto& e : r.entries)
        if (!e.diagnostics.empty()) {
            std::string text = format(e.diagnostics[0]);
            return text.substr(0, text.find('\n'));
        }
    return "";
}

std::vector<std::string> notes(const CheckReport& r) {
    for (const auto& e : r.entries)
        if (!e.diagnostics.empty()) return e.diagnostics[0].notes;
    return {};
}

std::size_t argument_positions(const Term& t) {
    std::size_t n = t.args.size();
    for (const auto& a : t.args) n += argument_positions(a);
    return n;
}

}  // namespace

TEST_CASE("inverted arguments give a variable conflict") {
    auto r = check(":- pred p(term, term, term).\n:- pred append(list(A), list(A), list(A)).",
                   "p(L1,L2,N) :- append(L1,L2,L3),length(N,L3).");
    REQUIRE(r.entries.size() == 1);
    CHECK_FALSE(r.ok());
    CHECK(first_error(r) == "t.pl:1:41: error: variable L3 is used with incompatible types list(A) and int");
    CHECK(notes(r) == std::vector<std::string>{"L3 has type list(A) in argument 3 of append/3",
                                               "L3 has type int in argument 2 of length/2"});
}

TEST_CASE("misused function and foreign predicate") {
    auto r = check(":- pred p(term, term).", "p(X,Y) :- Y is (3.5 // X).");
    CHECK(first_error(r) == "t.pl:1:17: error: argument 1 of ///2: float is not a subtype of int");

    auto f = check(":- foreign(p, p(+integer)).", ":- p(3.14).");
    REQUIRE(f.entries.size() == 1);
    CHECK(f.entries[0].kind == ClauseReport::Kind::Query);
    CHECK(first_error(f) == "t.pl:1:6: error: argument 1 of p/1: float is not a subtype of int");
}

TEST_CASE("definitions against the declared type") {
    CHECK(first_error(check(":- pred p(int).", "p([]).")) ==
          "t.pl:1:3: error: head argument 1 of p/1: list(A) is not a subtype of int");
    auto r = check(":- pred p(int).", "p(X) :- length(X,2).");
    CHECK(first_error(r) == "t.pl:1:16: error: variable X is used with incompatible types int and list(A)");
    CHECK(notes(r).at(0) == "X has type int in head argument 1 of p/1");
}

TEST_CASE("definitional genericity") {
    auto r = check(":- pred p(list(A)).", "p([1]).");
    CHECK(first_error(r) == "t.pl:1:4: error: head argument 1 of p/1: list(int) is not a subtype of list(A)");
    CHECK(notes(r).back() ==
          "parameters of the declared type of p/1 may only be renamed in a clause head, not instantiated");

    auto v = check(":- pred p(list(A)).", "p([X]) :- X < 1.");
    CHECK(first_error(v) == "t.pl:1:11: error: variable X is used with incompatible types A and float");
    CHECK(notes(v).size() == 3);

    // A renaming is fine, and so is a type below the root.
    CHECK(check(":- pred p(list(A)).", "p([]).\np([X|Xs]) :- p(Xs).").ok());
    CHECK(check(":- pred p(term).\n:- fun f(atom) : term.", "p([1]).\np(f(a)) :- true.").ok());
}

TEST_CASE("well-typed append with variable bounds") {
    auto r = check(":- pred append(list(A), list(A), list(A)).",
                   "append([],L,L).\nappend([H|T],L,[H|R]) :- append(T,L,R).\n:- append([1],[2.5],Z).");
    REQUIRE(r.entries.size() == 3);
    CHECK(r.ok());
    CHECK(r.errors() == 0);
    const auto& t = r.entries[1].typing;
    REQUIRE(t.size() == 4);
    CHECK(t[0].name == "H");
    CHECK(t[0].upper == "A");
    CHECK(t[1].upper == "list(A)");
    CHECK(t[1].lower == "list(bottom)");
    const auto& q = r.entries[2].typing;
    REQUIRE(q.size() == 1);
    CHECK(q[0].name == "Z");
    CHECK(q[0].lower == "list(bottom)");
    CHECK(q[0].upper == "list(term)");
}

TEST_CASE("undeclared symbols are reported, not thrown") {
    auto r = check("", "p(X) :- q(X).");
    CHECK(first_error(r).find("undeclared predicate") != std::string::npos);
    auto f = check(":- pred p(term).", "p(f(X)).");
    CHECK(first_error(f).find("undeclared function symbol f/1") != std::string::npos);
    CHECK(check(":- pred p(atom).", "p(abc).").ok());
}

TEST_CASE("generated inequalities mirror the rule premises") {
    SignatureSet sigs = with(":- pred p(list(A), int).");
    Checker checker(reference(), sigs);
    auto prog = parse_program("p([X|Xs], N) :- length(Xs, M), N is M + 1.");
    Generated g = checker.generate(prog.clauses[0], "t.pl");
    // One inequality per argument of every function and predicate occurrence.
    std::size_t args = argument_positions(prog.clauses[0].head);
    for (const auto& a : prog.clauses[0].body) args += argument_positions(a);
    CHECK(g.system.size() == args);
    CHECK(g.head == "p/2");
    CHECK(g.var_order == std::vector<std::string>{"X", "Xs", "N", "M"});
}

TEST_CASE("declared variable typings give left-linear acyclic systems") {
    SignatureSet sigs = with(":- pred p(list(A), int).\n:- pred append(list(A), list(A), list(A)).");
    const std::vector<std::string> vars{"X", "Y", "Z", "W"};
    const std::vector<TypeTerm> types{T("int"),          T("float"), T("term"),          T("atom"),
                                      T("list", {P(0)}), P(1),       T("list", {T("int")})};
    std::mt19937 rng(7);
    auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
    std::function<std::string(int)> term = [&](int depth) -> std::string {
        switch (depth > 2 ? pick(3) : pick(7)) {
            case 0: return vars[pick(vars.size())];
            case 1: return std::to_string(pick(9));
            case 2: return "[]";
            case 3: return "[" + term(depth + 1) + "|" + term(depth + 1) + "]";
            case 4: return "(" + term(depth + 1) + " + " + term(depth + 1) + ")";
            case 5: return "2.5";
            default: return "abc";
        }
    };
    std::function<std::string()> atom = [&]() -> std::string {
        switch (pick(5)) {
            case 0: return "append(" + term(0) + ", " + term(0) + ", " + term(0) + ")";
            case 1: return "length(" + term(0) + ", " + term(0) + ")";
            case 2: return term(0) + " = " + term(0);
            case 3: return term(0) + " is " + term(0);
            default: return "p(" + term(0) + ", " + term(0) + ")";
        }
    };
    SolveOptions lattice_only;
    lattice_only.prefer_lla = false;
    std::size_t lla = 0, sat = 0;
    const std::size_t max_decl = 3;
    std::size_t decl_size = 0;
    for (const auto* table : {&sigs.preds(), &sigs.funs()})
        for (const auto& [key, scheme] : *table) {
            std::size_t n = type_size(scheme.result);
            for (const auto& t : scheme.args) n += type_size(t);
            decl_size = std::max(decl_size, n);
        }
    for (int i = 0; i < 300; ++i) {
        std::string text = "p(" + term(0) + ", " + term(0) + ")";
        for (std::size_t k = 0, n = pick(4); k < n; ++k) text += (k ? ", " : " :- ") + atom();
        text += ".";
        auto prog = parse_program(text, "r.pl");
        const Clause& c = prog.clauses.at(0);
        VariableTyping u;
        std::size_t v = 0;
        for (const auto& x : clause_variables(c)) {
            u[x] = types[pick(types.size())];
            v = std::max(v, type_size(u[x]));
        }
        Checker checker(reference(), sigs);
        Generated g = checker.generate(c, "r.pl", &u);
        auto shape = classify(g.system);
        INFO(text);
        CHECK(shape.left_linear);
        CHECK(shape.acyclic);
        std::size_t symbols = 0;
        for (const auto& q : g.system.inequalities) symbols += type_size(q.lhs) + type_size(q.rhs);
        CHECK(symbols <= g.system.size() * (std::max(v, max_decl) + max_decl));

        Checker both(reference(), sigs, CheckOptions{lattice_only});
        auto a = checker.check_clause(c, "r.pl", &u);
        auto b = both.check_clause(c, "r.pl", &u);
        CHECK(a.ok == b.ok);
        CHECK(a.constraints <= a.nodes * decl_size);
        lla += a.solver == "lla";
        sat += a.ok;
    }
    CHECK(lla == 300);
    CHECK(sat > 0);
}
