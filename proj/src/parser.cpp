#include "tclp/parser.hpp"

#include <cctype>
#include <map>
#include <optional>
#include <set>

namespace tclp {

namespace {

struct Token {
    enum Kind { Atom, QuotedAtom, Var, Int, Float, String, Punct, End, Eof };
    Kind kind = Eof;
    std::string text;
    SourceSpan span;
    bool layout_before = false;
};

std::string describe(const Token& t) {
    switch (t.kind) {
        case Token::Atom:
        case Token::QuotedAtom: return "atom '" + t.text + "'";
        case Token::Var: return "variable " + t.text;
        case Token::Int:
        case Token::Float: return "number " + t.text;
        case Token::String: return "string";
        case Token::Punct: return "'" + t.text + "'";
        case Token::End: return "end of clause";
        case Token::Eof: return "end of file";
    }
    return "token";
}

bool symbol_char(char c) { return std::string_view("+-*/\\^<>=~:.?@#&$").find(c) != std::string_view::npos; }
bool alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class Lexer {
public:
    Lexer(std::string_view text, const std::string& file) : src_(text), file_(file) {}

    Token next() {
        bool layout = skip_layout();
        Token t;
        t.layout_before = layout;
        t.span = {line_, col_};
        if (pos_ >= src_.size()) return t;
        char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c))) return number(t);
        if (c == '_' || std::isupper(static_cast<unsigned char>(c))) {
            t.kind = Token::Var;
            while (pos_ < src_.size() && alnum(src_[pos_])) t.text += advance();
            return t;
        }
        if (std::islower(static_cast<unsigned char>(c))) {
            t.kind = Token::Atom;
            while (pos_ < src_.size() && alnum(src_[pos_])) t.text += advance();
            return t;
        }
        if (c == '\'') {
            t.kind = Token::QuotedAtom;
            t.text = quoted('\'');
            return t;
        }
        if (c == '"') {
            t.kind = Token::String;
            t.text = quoted('"');
            return t;
        }
        if (std::string_view("()[]{},|").find(c) != std::string_view::npos) {
            t.kind = Token::Punct;
            t.text = advance();
            return t;
        }
        if (c == '!' || c == ';') {
            t.kind = Token::Atom;
            t.text = advance();
            return t;
        }
        if (symbol_char(c)) {
            if (c == '.' && end_follows(pos_ + 1)) {
                advance();
                t.kind = Token::End;
                return t;
            }
            t.kind = Token::Atom;
            while (pos_ < src_.size() && symbol_char(src_[pos_])) t.text += advance();
            return t;
        }
        fail(t.span, std::string("unexpected character '") + c + "'");
    }

    [[noreturn]] void fail(SourceSpan at, std::string msg) const {
        throw FrontendError(Diagnostic{Severity::Error, file_, at, "syntax error: " + msg, {}});
    }

private:
    char advance() {
        char c = src_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    bool end_follows(std::size_t at) const {
        return at >= src_.size() || std::isspace(static_cast<unsigned char>(src_[at])) || src_[at] == '%';
    }

    bool skip_layout() {
        bool any = false;
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
                any = true;
            } else if (c == '%') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
                any = true;
            } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '*') {
                SourceSpan start{line_, col_};
                advance();
                advance();
                while (pos_ + 1 < src_.size() && !(src_[pos_] == '*' && src_[pos_ + 1] == '/')) advance();
                if (pos_ + 1 >= src_.size()) fail(start, "unterminated block comment");
                advance();
                advance();
                any = true;
            } else {
                break;
            }
        }
        return any;
    }

    Token number(Token t) {
        t.kind = Token::Int;
        if (src_[pos_] == '0' && pos_ + 2 < src_.size() && src_[pos_ + 1] == '\'') {
            advance();
            advance();
            t.text = std::to_string(static_cast<unsigned char>(advance()));
            return t;
        }
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) t.text += advance();
        if (pos_ + 1 < src_.size() && src_[pos_] == '.' && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))) {
            t.kind = Token::Float;
            t.text += advance();
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) t.text += advance();
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t k = pos_ + 1;
            if (k < src_.size() && (src_[k] == '+' || src_[k] == '-')) ++k;
            if (k < src_.size() && std::isdigit(static_cast<unsigned char>(src_[k]))) {
                t.kind = Token::Float;
                while (pos_ < k) t.text += advance();
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) t.text += advance();
            }
        }
        return t;
    }

    std::string quoted(char q) {
        SourceSpan start{line_, col_};
        advance();
        std::string out;
        while (true) {
            if (pos_ >= src_.size()) fail(start, "unterminated quoted text");
            char c = advance();
            if (c == q) {
                if (pos_ < src_.size() && src_[pos_] == q) {
                    out += advance();
                    continue;
                }
                return out;
            }
            if (c == '\\' && pos_ < src_.size()) {
                char e = advance();
                switch (e) {
                    case 'n': out += '\n'; break;
                    case 't': out += '\t'; break;
                    case '\n': break;
                    default: out += e;
                }
                continue;
            }
            out += c;
        }
    }

    std::string_view src_;
    const std::string& file_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

enum class OpType { XFX, XFY, YFX, FY, FX };

struct OpDef {
    int prec;
    OpType type;
};

const std::map<std::string, OpDef>& infix_ops() {
    static const std::map<std::string, OpDef> ops = {
        {":-", {1200, OpType::XFX}}, {"-->", {1200, OpType::XFX}}, {";", {1100, OpType::XFY}},
        {"|", {1100, OpType::XFY}},  {"->", {1050, OpType::XFY}},  {"*->", {1050, OpType::XFY}},
        {",", {1000, OpType::XFY}},  {"=", {700, OpType::XFX}},    {"\\=", {700, OpType::XFX}},
        {"==", {700, OpType::XFX}},  {"\\==", {700, OpType::XFX}}, {"@<", {700, OpType::XFX}},
        {"@>", {700, OpType::XFX}},  {"@=<", {700, OpType::XFX}},  {"@>=", {700, OpType::XFX}},
        {"=..", {700, OpType::XFX}}, {"is", {700, OpType::XFX}},   {"=:=", {700, OpType::XFX}},
        {"=\\=", {700, OpType::XFX}}, {"<", {700, OpType::XFX}},   {">", {700, OpType::XFX}},
        {"=<", {700, OpType::XFX}},  {">=", {700, OpType::XFX}},   {"+", {500, OpType::YFX}},
        {"-", {500, OpType::YFX}},   {"/\\", {500, OpType::YFX}},  {"\\/", {500, OpType::YFX}},
        {"*", {400, OpType::YFX}},   {"/", {400, OpType::YFX}},    {"//", {400, OpType::YFX}},
        {"mod", {400, OpType::YFX}}, {"rem", {400, OpType::YFX}},  {"<<", {400, OpType::YFX}},
        {">>", {400, OpType::YFX}},  {"div", {400, OpType::YFX}},  {"**", {200, OpType::XFX}},
        {"^", {200, OpType::XFY}},   {":", {200, OpType::XFY}},
    };
    return ops;
}

const std::map<std::string, OpDef>& prefix_ops() {
    static const std::map<std::string, OpDef> ops = {
        {":-", {1200, OpType::FX}},      {"?-", {1200, OpType::FX}},   {"con", {1150, OpType::FX}},
        {"sub", {1150, OpType::FX}},     {"fun", {1150, OpType::FX}},  {"pred", {1150, OpType::FX}},
        {"mode", {1150, OpType::FX}},    {"dynamic", {1150, OpType::FX}},
        {"discontiguous", {1150, OpType::FX}}, {"multifile", {1150, OpType::FX}},
        {"\\+", {900, OpType::FY}},      {"-", {200, OpType::FY}},     {"+", {200, OpType::FY}},
        {"\\", {200, OpType::FY}},
    };
    return ops;
}

class Parser {
public:
    Parser(std::string_view text, const std::string& file) : lex_(text, file), file_(file) { shift(); }

    bool at_eof() const { return tok_.kind == Token::Eof; }

    Term clause_term() {
        Term t = parse(1200);
        if (tok_.kind != Token::End) expected("an operator or '.'");
        shift();
        return t;
    }

    Term whole_term() {
        Term t = parse(1200);
        if (tok_.kind == Token::End) shift();
        if (tok_.kind != Token::Eof) expected("end of input");
        return t;
    }

private:
    void shift() {
        tok_ = peeked_ ? *peeked_ : lex_.next();
        peeked_.reset();
    }

    const Token& peek() {
        if (!peeked_) peeked_ = lex_.next();
        return *peeked_;
    }

    [[noreturn]] void expected(const std::string& what) {
        lex_.fail(tok_.span, "expected " + what + ", found " + describe(tok_));
    }

    void expect_punct(const char* p) {
        if (tok_.kind != Token::Punct || tok_.text != p) expected(std::string("'") + p + "'");
        shift();
    }

    bool is_punct(const Token& t, const char* p) const { return t.kind == Token::Punct && t.text == p; }

    static bool starts_term(const Token& t) {
        switch (t.kind) {
            case Token::Atom:
            case Token::QuotedAtom:
            case Token::Var:
            case Token::Int:
            case Token::Float:
            case Token::String: return true;
            case Token::Punct: return t.text == "(" || t.text == "[" || t.text == "{";
            default: return false;
        }
    }

    std::optional<std::pair<std::string, OpDef>> infix_here() const {
        std::string name;
        if (tok_.kind == Token::Atom || tok_.kind == Token::QuotedAtom) name = tok_.text;
        else if (is_punct(tok_, ",")) name = ",";
        else if (is_punct(tok_, "|")) name = "|";
        else return std::nullopt;
        auto it = infix_ops().find(name);
        if (it == infix_ops().end()) return std::nullopt;
        return std::make_pair(name == "|" ? std::string(";") : name, it->second);
    }

    Term parse(int max_prec) {
        int left_prec = 0;
        Term left = primary(max_prec, left_prec);
        while (auto op = infix_here()) {
            auto [name, def] = *op;
            int la = def.type == OpType::YFX ? def.prec : def.prec - 1;
            int ra = def.type == OpType::XFY ? def.prec : def.prec - 1;
            if (def.prec > max_prec || left_prec > la) break;
            SourceSpan at = tok_.span;
            shift();
            Term right = parse(ra);
            left = Term::compound(name, {std::move(left), std::move(right)}, at);
            left.span = left.args[0].span;
            left_prec = def.prec;
        }
        return left;
    }

    std::vector<Term> arguments() {
        std::vector<Term> args;
        shift();  // '('
        args.push_back(parse(999));
        while (is_punct(tok_, ",")) {
            shift();
            args.push_back(parse(999));
        }
        expect_punct(")");
        return args;
    }

    Term list() {
        SourceSpan at = tok_.span;
        shift();  // '['
        if (is_punct(tok_, "]")) {
            shift();
            return Term::atom("nil", at);
        }
        std::vector<Term> items{parse(999)};
        while (is_punct(tok_, ",")) {
            shift();
            items.push_back(parse(999));
        }
        Term tail = Term::atom("nil", at);
        if (is_punct(tok_, "|")) {
            shift();
            tail = parse(999);
        }
        expect_punct("]");
        for (auto it = items.rbegin(); it != items.rend(); ++it) {
            SourceSpan s = it->span;
            tail = Term::compound("cons", {std::move(*it), std::move(tail)}, s);
        }
        return tail;
    }

    Term primary(int max_prec, int& prec) {
        prec = 0;
        Token t = tok_;
        switch (t.kind) {
            case Token::Int:
                shift();
                return Term::number(t.text, Term::Literal::Int, t.span);
            case Token::Float:
                shift();
                return Term::number(t.text, Term::Literal::Float, t.span);
            case Token::Var:
                shift();
                if (t.text == "_") return Term::var("_G" + std::to_string(++anon_), t.span);
                return Term::var(t.text, t.span);
            case Token::String: {
                shift();
                Term out = Term::atom("nil", t.span);
                for (auto it = t.text.rbegin(); it != t.text.rend(); ++it)
                    out = Term::compound(
                        "cons",
                        {Term::number(std::to_string(static_cast<unsigned char>(*it)), Term::Literal::Int, t.span),
                         std::move(out)},
                        t.span);
                return out;
            }
            case Token::Punct:
                if (t.text == "(") {
                    shift();
                    Term inner = parse(1200);
                    expect_punct(")");
                    return inner;
                }
                if (t.text == "[") return list();
                if (t.text == "{") {
                    shift();
                    if (is_punct(tok_, "}")) {
                        shift();
                        return Term::atom("{}", t.span);
                    }
                    Term inner = parse(1200);
                    expect_punct("}");
                    return Term::compound("{}", {std::move(inner)}, t.span);
                }
                expected("a term");
            case Token::Atom:
            case Token::QuotedAtom: return atom_or_operator(max_prec, prec);
            default: expected("a term");
        }
    }

    Term atom_or_operator(int max_prec, int& prec) {
        Token t = tok_;
        shift();
        if (is_punct(tok_, "(") && !tok_.layout_before) return Term::compound(t.text, arguments(), t.span);
        if (t.kind == Token::Atom && t.text == "-" && !tok_.layout_before &&
            (tok_.kind == Token::Int || tok_.kind == Token::Float)) {
            Token n = tok_;
            shift();
            auto lit = n.kind == Token::Int ? Term::Literal::Int : Term::Literal::Float;
            return Term::number("-" + n.text, lit, t.span);
        }
        if (t.kind == Token::Atom) {
            auto it = prefix_ops().find(t.text);
            if (it != prefix_ops().end() && it->second.prec <= max_prec && starts_term(tok_) && !operand_is_infix()) {
                const OpDef& def = it->second;
                int arg_max = def.type == OpType::FY ? def.prec : def.prec - 1;
                Term arg = parse(arg_max);
                prec = def.prec;
                return Term::compound(t.text, {std::move(arg)}, t.span);
            }
        }
        return Term::atom(t.text, t.span);
    }

    // `- = x`: the atom after a prefix operator is itself an infix operator.
    bool operand_is_infix() {
        if (tok_.kind != Token::Atom) return false;
        if (!infix_ops().count(tok_.text) || prefix_ops().count(tok_.text)) return false;
        const Token& after = peek();
        return !(is_punct(after, "(") && !after.layout_before);
    }

    Lexer lex_;
    const std::string& file_;
    Token tok_;
    std::optional<Token> peeked_;
    int anon_ = 0;
};

void dissolve(const Term& goal, std::vector<Term>& out, const std::string& file) {
    static const std::set<std::string> control = {",", ";", "->", "*->"};
    if (goal.is_var()) {
        out.push_back(Term::compound("call", {goal}, goal.span));
        return;
    }
    if (goal.is_number())
        throw FrontendError(Diagnostic{Severity::Error, file, goal.span, "a number cannot be a goal", {}});
    if (goal.arity() == 2 && control.count(goal.name)) {
        dissolve(goal.args[0], out, file);
        dissolve(goal.args[1], out, file);
        return;
    }
    if (goal.arity() == 1 && goal.name == "\\+") {
        dissolve(goal.args[0], out, file);
        return;
    }
    out.push_back(goal);
}

void check_head(const Term& head, const std::string& file) {
    if (head.is_var() || head.is_number())
        throw FrontendError(
            Diagnostic{Severity::Error, file, head.span, "clause head must be an atom or compound term", {}});
}

}  // namespace

std::vector<Term> read_terms(std::string_view text, const std::string& file) {
    Parser p(text, file);
    std::vector<Term> out;
    while (!p.at_eof()) out.push_back(p.clause_term());
    return out;
}

Term read_term(std::string_view text, const std::string& file) {
    Parser p(text, file);
    return p.whole_term();
}

Program parse_program(std::string_view text, const std::string& file) {
    static const std::set<std::string> declarations = {"con", "sub", "fun", "pred", "foreign"};
    static const std::set<std::string> skipped = {
        "mode",      "module",    "use_module", "ensure_loaded", "dynamic",        "discontiguous",
        "multifile", "public",    "meta_predicate", "set_prolog_flag", "initialization", "include",
    };
    Program prog;
    prog.file = file;
    for (auto& t : read_terms(text, file)) {
        if (!t.is_var() && t.name == ":-" && t.arity() == 1) {
            const Term& body = t.args[0];
            if (!body.is_var() && declarations.count(body.name)) {
                prog.declarations.push_back({body, t.span});
            } else if (!body.is_var() && body.name == "op") {
                throw FrontendError(Diagnostic{Severity::Error, file, t.span,
                                               "op/3 directives are not supported: the operator table is fixed", {}});
            } else if (!body.is_var() && skipped.count(body.name)) {
                prog.warnings.push_back(
                    Diagnostic{Severity::Warning, file, t.span, "directive " + body.name + " skipped", {}});
            } else {
                Query q;
                q.span = t.span;
                dissolve(body, q.goals, file);
                prog.queries.push_back(std::move(q));
            }
            continue;
        }
        if (!t.is_var() && t.name == "?-" && t.arity() == 1) {
            Query q;
            q.span = t.span;
            dissolve(t.args[0], q.goals, file);
            prog.queries.push_back(std::move(q));
            continue;
        }
        if (!t.is_var() && t.name == "-->" && t.arity() == 2)
            throw FrontendError(Diagnostic{Severity::Error, file, t.span, "grammar rules are not supported", {}});
        Clause c;
        c.span = t.span;
        if (!t.is_var() && t.name == ":-" && t.arity() == 2) {
            c.head = t.args[0];
            dissolve(t.args[1], c.body, file);
        } else {
            c.head = t;
        }
        check_head(c.head, file);
        prog.clauses.push_back(std::move(c));
    }
    return prog;
}

}  // namespace tclp
