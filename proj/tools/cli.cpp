#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <regex>
#include <sstream>

#include "tclp/inference.hpp"
#include "tclp/parser.hpp"
#include "tclp/resolution.hpp"

namespace tclp::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

struct Config {
    std::vector<std::string> inputs;
    std::vector<std::string> types;
    std::string hierarchy;
    std::string emit_types;
    std::string mode = "csld";
    bool lattice = false;
    bool machine = false;
    std::size_t max_steps = 200000;
    std::size_t depth = 5;
};

/// Thrown for unreadable files and bad declarations; exits with kUsage.
struct UsageError {
    std::string message;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError{path + ": cannot read file"};
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

json span_json(const Diagnostic& d) {
    return json{{"file", d.file}, {"line", d.span.line}, {"col", d.span.col}};
}

json diagnostic_json(const Diagnostic& d) {
    json j = span_json(d);
    j["kind"] = "diagnostic";
    j["severity"] = d.severity == Severity::Error ? "error" : d.severity == Severity::Warning ? "warning" : "note";
    j["message"] = d.message;
    j["notes"] = d.notes;
    return j;
}

/// Hierarchy, signatures and solver settings for one program file.
struct Environment {
    HierarchyDecls hierarchy;
    SignatureSet declared;  // from .typ files and the program's own directives
    std::optional<ConstructorTable> table;
    SolveOptions solve;
};

Environment environment(const Config& cfg, const std::string& program_path, const Program* program) {
    Environment env;
    if (cfg.hierarchy.empty())
        env.hierarchy = reference_hierarchy();
    else
        env.hierarchy = parse_signatures(read_file(cfg.hierarchy), cfg.hierarchy).hierarchy;
    std::vector<std::string> typ_files;
    if (!program_path.empty()) {
        fs::path sibling = fs::path(program_path).replace_extension(".typ");
        if (fs::exists(sibling)) typ_files.push_back(sibling.string());
    }
    typ_files.insert(typ_files.end(), cfg.types.begin(), cfg.types.end());
    for (const auto& f : typ_files) {
        TypeDeclarations d = parse_signatures(read_file(f), f);
        env.hierarchy.append(d.hierarchy);
        env.declared.override_with(d.signatures);
    }
    if (program) {
        TypeDeclarations own;
        load_declarations(program->declarations, program->file, own);
        env.hierarchy.append(own.hierarchy);
        env.declared.override_with(own.signatures);
    }
    env.table = ConstructorTable::validate(env.hierarchy, cfg.lattice ? LatticeMode::Required : LatticeMode::Auto);
    env.solve.max_steps = cfg.max_steps;
    env.solve.prefer_lla = !cfg.lattice;
    return env;
}

/// Prelude signatures, minus the predicates the program defines, plus the declarations.
SignatureSet base_signatures(const Environment& env, const Program& p) {
    SignatureSet sigs = shadow_defined(builtin_signatures(), p);
    sigs.override_with(env.declared);
    return sigs;
}

void report_diagnostic(const Diagnostic& d, const Config& cfg, std::ostream& out, std::ostream& err) {
    if (cfg.machine)
        out << diagnostic_json(d).dump() << "\n";
    else
        err << format(d) << "\n";
}

std::string type_list(const std::vector<TypeTerm>& ts, ParamNamer& namer) {
    std::string s;
    for (const auto& t : ts) s += (s.empty() ? "" : ", ") + display(t, namer);
    return s;
}

std::string pred_directive(const std::string& name, const Scheme& s) {
    ParamNamer namer;
    std::string head = to_source(Term::atom(name));
    if (!s.args.empty()) head += "(" + type_list(s.args, namer) + ")";
    return ":- pred " + head + ".";
}

/// The two conflicting types named by an error message.
std::optional<std::pair<std::string, std::string>> failing_pair(const std::string& message) {
    static const std::regex subtype(R"(^(?:.*: )?(.+) is not a subtype of (.+)$)");
    static const std::regex incompatible(R"(incompatible types (.+) and (.+)$)");
    std::smatch m;
    if (std::regex_search(message, m, subtype) || std::regex_search(message, m, incompatible))
        return std::pair{m[1].str(), m[2].str()};
    return std::nullopt;
}

int check_file(const Config& cfg, const std::string& path, std::ostream& out, std::ostream& err) {
    Program p = parse_program(read_file(path), path);
    Environment env = environment(cfg, path, &p);
    for (const auto& w : p.warnings) report_diagnostic(w, cfg, out, err);
    SignatureSet base = base_signatures(env, p);
    for (const auto& d : check_against(base, *env.table)) report_diagnostic(d, cfg, out, err);

    // Undeclared predicates get their heuristic type before checking.
    InferOptions io;
    io.solve = env.solve;
    InferenceReport inferred = infer_program(p, base, *env.table, io);
    std::size_t errors = 0;
    for (const auto& g : inferred.groups)
        for (const auto& d : g.diagnostics) {
            report_diagnostic(d, cfg, out, err);
            ++errors;
        }

    Checker checker(*env.table, inferred.signatures, CheckOptions{env.solve});
    std::size_t checked = 0;
    auto emit = [&](const ClauseReport& r) {
        ++checked;
        if (!r.ok) ++errors;
        if (cfg.machine) {
            json j{{"kind", r.kind == ClauseReport::Kind::Query ? "query" : "clause"},
                   {"file", path},
                   {"line", r.span.line},
                   {"text", r.text},
                   {"verdict", r.ok ? "ok" : "error"},
                   {"constraints", r.constraints},
                   {"solver", r.solver}};
            if (!r.diagnostics.empty())
                if (auto pair = failing_pair(r.diagnostics.front().message)) j["failing"] = {pair->first, pair->second};
            json ds = json::array();
            for (const auto& d : r.diagnostics) ds.push_back(diagnostic_json(d));
            j["diagnostics"] = ds;
            out << j.dump() << "\n";
        } else {
            for (const auto& d : r.diagnostics) err << format(d) << "\n";
        }
    };
    for (const auto& c : p.clauses) {
        // Clauses of a group whose inference failed were reported above.
        if (!inferred.signatures.pred(c.head.name, c.head.arity())) continue;
        emit(checker.check_clause(c, path));
    }
    for (const auto& q : p.queries) emit(checker.check_query(q, path));
    if (cfg.machine)
        out << json{{"kind", "summary"}, {"file", path}, {"checked", checked}, {"errors", errors}}.dump() << "\n";
    else
        out << path << ": " << checked << " checked, " << errors << (errors == 1 ? " error" : " errors") << "\n";
    return errors ? kTypeError : kOk;
}

int infer_file(const Config& cfg, const std::string& path, std::ostream& out, std::ostream& err,
               std::vector<std::string>& directives) {
    Program p = parse_program(read_file(path), path);
    Environment env = environment(cfg, path, &p);
    InferOptions io;
    io.solve = env.solve;
    InferenceReport r = infer_program(p, base_signatures(env, p), *env.table, io);
    for (const auto& g : r.groups) {
        for (const auto& d : g.diagnostics) report_diagnostic(d, cfg, out, err);
        for (const auto& t : g.types) {
            ParamNamer a, b;
            if (cfg.machine) {
                out << json{{"kind", "inferred"},
                            {"file", path},
                            {"predicate", t.key.first + "/" + std::to_string(t.key.second)},
                            {"minimum", format_type(t.min_type, a)},
                            {"heuristic", format_type(t.heuristic, b)},
                            {"notes", t.notes}}
                           .dump()
                    << "\n";
            } else {
                out << format_result(t);
            }
            directives.push_back(pred_directive(t.key.first, t.scheme()));
        }
    }
    return r.ok() ? kOk : kTypeError;
}

/// Parameters in order of first appearance, named by their source variable.
TypeTerm ineq_type(const Term& t, std::map<std::string, ParamId>& params, const std::string& file) {
    if (t.is_var()) {
        auto it = params.emplace(t.name, static_cast<ParamId>(params.size())).first;
        return TypeTerm::param(it->second);
    }
    if (t.is_number()) throw FrontendError(Diagnostic{Severity::Error, file, t.span, "numbers are not types", {}});
    std::vector<TypeTerm> args;
    for (const auto& a : t.args) args.push_back(ineq_type(a, params, file));
    return TypeTerm::ctor(t.name, std::move(args));
}

int solve_file(const Config& cfg, const std::string& path, std::ostream& out) {
    Program p = parse_program(read_file(path), path);
    Environment env = environment(cfg, {}, nullptr);
    std::map<std::string, ParamId> params;
    InequalitySystem sys;
    for (const auto& c : p.clauses) {
        if (c.head.name != "=<" || c.head.arity() != 2 || !c.body.empty())
            throw FrontendError(Diagnostic{Severity::Error, path, c.span, "expected an inequality `S =< T.`", {}});
        TypeTerm l = ineq_type(c.head.args[0], params, path);
        TypeTerm r = ineq_type(c.head.args[1], params, path);
        sys.add(std::move(l), std::move(r));
    }
    SolveOutcome o = solve_system(sys, *env.table, env.solve);
    std::vector<std::pair<std::string, std::string>> solution;
    if (o.satisfiable) {
        TypeSubstitution theta;
        if (o.lattice) {
            auto e = extract_solution(o.lattice->bounds, ExtractMode::Max, *env.table, true);
            theta = e.solution;
        } else {
            theta = o.lla->solution;
        }
        std::vector<std::pair<ParamId, std::string>> order;
        for (const auto& [name, id] : params) order.emplace_back(id, name);
        std::sort(order.begin(), order.end());
        ParamNamer namer;
        for (const auto& [id, name] : order) {
            auto it = theta.find(id);
            solution.emplace_back(name, it == theta.end() ? name : to_string(it->second, namer));
        }
    }
    const char* solver = o.solver == SolveOutcome::Solver::Lla       ? "lla"
                         : o.solver == SolveOutcome::Solver::Lattice ? "lattice"
                                                                     : "none";
    if (cfg.machine) {
        json j{{"kind", "solution"}, {"file", path}, {"satisfiable", o.satisfiable}, {"solver", solver}};
        json s = json::object();
        for (const auto& [name, t] : solution) s[name] = t;
        j["solution"] = s;
        if (!o.satisfiable) j["reason"] = o.reason;
        out << j.dump() << "\n";
    } else if (o.satisfiable) {
        if (solution.empty()) out << "true\n";
        for (const auto& [name, t] : solution) out << name << " = " << t << "\n";
    } else {
        out << "UNSAT" << (o.reason.empty() ? "" : ": " + o.reason) << "\n";
    }
    return o.satisfiable ? kOk : kTypeError;
}

int sr_file(const Config& cfg, const std::string& path, std::ostream& out) {
    Program p = parse_program(read_file(path), path);
    Environment env = environment(cfg, path, &p);
    SignatureSet sigs = base_signatures(env, p);
    SrOptions o;
    o.depth = cfg.depth;
    o.mode = cfg.mode == "tclp" ? ReductionMode::Tclp
             : cfg.mode == "substitution" ? ReductionMode::Substitution
                                          : ReductionMode::Csld;
    int status = kOk;
    for (std::size_t i = 0; i < p.queries.size(); ++i) {
        SrReport r = subject_reduction_check(p, p.queries[i], sigs, *env.table, o);
        if (!r.ok) status = kTypeError;
        std::string verdict = !r.reason.empty() ? "not well-typed"
                              : r.rejected      ? "rejected"
                              : r.ok            ? "ok"
                                                : "counterexample";
        if (cfg.machine) {
            out << json{{"kind", "sr"},
                        {"file", path},
                        {"query", i + 1},
                        {"line", p.queries[i].span.line},
                        {"verdict", verdict},
                        {"reason", r.reason},
                        {"states", r.states},
                        {"resolvents", r.resolvents},
                        {"failures", r.failures},
                        {"truncated", r.truncated},
                        {"trace", r.counterexample}}
                       .dump()
                << "\n";
            continue;
        }
        out << path << ":" << p.queries[i].span.line << ": query " << i + 1 << ": " << verdict;
        if (!r.reason.empty()) out << " (" << r.reason << ")";
        out << ", " << r.states << " states, " << r.resolvents << " resolvents, " << r.failures << " failures"
            << (r.truncated ? ", truncated" : "") << "\n";
        for (const auto& line : r.counterexample) out << "  " << line << "\n";
    }
    return status;
}

}  // namespace

namespace {

struct FileResult {
    int status = kOk;
    std::string out;
    std::string err;
    std::vector<std::string> directives;
};

FileResult process(const Config& cfg, const std::string& command, const std::string& path) {
    FileResult r;
    std::ostringstream out, err;
    try {
        if (command == "check")
            r.status = check_file(cfg, path, out, err);
        else if (command == "infer")
            r.status = infer_file(cfg, path, out, err, r.directives);
        else if (command == "solve")
            r.status = solve_file(cfg, path, out);
        else
            r.status = sr_file(cfg, path, out);
    } catch (const UsageError& e) {
        err << e.message << "\n";
        r.status = kUsage;
    } catch (const FrontendError& e) {
        report_diagnostic(e.diagnostic(), cfg, out, err);
        r.status = kUsage;
    } catch (const TableError& e) {
        err << path << ": error: " << e.what() << "\n";
        r.status = kUsage;
    }
    r.out = out.str();
    r.err = err.str();
    return r;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Config cfg;
    std::size_t jobs = 1;
    CLI::App app{"Type checker and type inference for constraint logic programs", "tclp"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--types", cfg.types, "Extra declaration file (repeatable)")
        ->allow_extra_args(false)
        ->check(CLI::ExistingFile);
    app.add_option("--hierarchy", cfg.hierarchy, "Type hierarchy file instead of the reference one")
        ->check(CLI::ExistingFile);
    app.add_flag("--lattice", cfg.lattice, "Require a lattice and use the lattice solver");
    app.add_flag("--machine", cfg.machine, "One JSON record per line on stdout");
    app.add_option("--max-steps", cfg.max_steps, "Solver step limit")->check(CLI::PositiveNumber);
    app.add_option("-j,--jobs", jobs, "Files processed concurrently")->check(CLI::PositiveNumber);

    struct Command {
        const char* name;
        const char* help;
    };
    const Command commands[] = {{"check", "Type-check programs, inferring undeclared predicates"},
                                {"infer", "Infer minimum and heuristic predicate types"},
                                {"solve", "Solve a file of subtype inequalities `S =< T.`"},
                                {"sr-test", "Run the subject-reduction harness on the queries of a program"}};
    for (const auto& c : commands) {
        CLI::App* sub = app.add_subcommand(c.name, c.help);
        sub->add_option("inputs", cfg.inputs, "Input files")->required()->check(CLI::ExistingFile);
        if (std::string(c.name) == "infer")
            sub->add_option("--emit-types", cfg.emit_types, "Write the inferred types as declarations");
        if (std::string(c.name) == "sr-test") {
            sub->add_option("--depth", cfg.depth, "Derivation depth")->check(CLI::NonNegativeNumber);
            sub->add_option("--mode", cfg.mode, "Reduction mode")
                ->check(CLI::IsMember({"csld", "substitution", "tclp"}));
        }
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }
    std::string command = app.get_subcommands().front()->get_name();

    std::vector<FileResult> results(cfg.inputs.size());
    for (std::size_t start = 0; start < cfg.inputs.size(); start += jobs) {
        std::size_t end = std::min(cfg.inputs.size(), start + jobs);
        std::vector<std::future<FileResult>> running;
        for (std::size_t i = start; i < end; ++i)
            running.push_back(std::async(std::launch::async, process, std::cref(cfg), command, cfg.inputs[i]));
        for (std::size_t i = start; i < end; ++i) results[i] = running[i - start].get();
    }

    int status = kOk;
    std::vector<std::string> directives;
    for (const auto& r : results) {
        out << r.out;
        err << r.err;
        status = std::max(status, r.status);
        directives.insert(directives.end(), r.directives.begin(), r.directives.end());
    }
    if (!cfg.emit_types.empty()) {
        std::ofstream f(cfg.emit_types);
        if (!f) {
            err << cfg.emit_types << ": cannot write file\n";
            return kUsage;
        }
        for (const auto& d : directives) f << d << "\n";
    }
    return status;
}

}  // namespace tclp::cli
