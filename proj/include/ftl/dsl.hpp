#pragma once

// Expression language for scalar functions (g, psi, V, a, b) and fuzzy
// right-hand sides / switch maps. The grammar is documented in docs/grammar.md.
//
//   scalar  := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | primary
//   primary := NUMBER | VAR | FUNC '(' scalar (',' scalar)* ')' | '(' scalar ')'
//
//   fuzzy   := fatom ('fadd' fatom)*
//   fatom   := 'u' | 'u_k' | 'lam'
//            | 'tri' '(' scalar ',' scalar ',' scalar ')'
//            | 'trap' '(' scalar ',' scalar ',' scalar ',' scalar ')'
//            | 'crisp' '(' scalar ')'
//            | 'smul' '(' scalar ',' fuzzy ')'
//            | 'ghsub' '(' fuzzy ',' fuzzy ')'
//            | 'circminus' '(' fuzzy ')'
//            | '(' fuzzy ')'

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ftl/error.hpp"
#include "ftl/fuzzy.hpp"
#include "ftl/timescale.hpp"

namespace ftl::dsl {

struct SourceSpan {
    std::size_t line = 1;
    std::size_t column = 1;
    std::size_t offset = 0;
    std::size_t length = 0;
};

class ParseError : public ConfigError {
public:
    ParseError(const std::string& message, SourceSpan at, std::vector<std::string> expected)
        : ConfigError(format(message, at, expected)), at_(at), expected_(std::move(expected)) {}

    std::size_t line() const { return at_.line; }
    std::size_t column() const { return at_.column; }
    const std::vector<std::string>& expected() const { return expected_; }

private:
    static std::string format(const std::string& message, SourceSpan at,
                              const std::vector<std::string>& expected) {
        std::string s = "syntax error at line " + std::to_string(at.line) + ", column " +
                        std::to_string(at.column) + ": " + message;
        if (!expected.empty()) {
            s += "; expected one of:";
            for (const auto& e : expected) {
                s += " " + e;
            }
        }
        return s;
    }

    SourceSpan at_;
    std::vector<std::string> expected_;
};

class EvalError : public Error {
public:
    EvalError(const std::string& message, SourceSpan span)
        : Error("evaluation error at line " + std::to_string(span.line) + ", column " +
                std::to_string(span.column) + ": " + message),
          span_(span) {}

    const SourceSpan& span() const { return span_; }

private:
    SourceSpan span_;
};

/// gH-difference missing during fuzzy evaluation.
class GhNonExistence : public EvalError {
public:
    explicit GhNonExistence(SourceSpan span)
        : EvalError("gH-difference does not exist", span) {}
};

// ---------------------------------------------------------------------------
// Tokens

enum class Tok { number, ident, lparen, rparen, comma, plus, minus, star, slash, end };

struct Token {
    Tok kind = Tok::end;
    std::string text;
    double number = 0.0;
    SourceSpan span;
};

inline std::vector<Token> tokenize(std::string_view src) {
    std::vector<Token> out;
    std::size_t line = 1;
    std::size_t col = 1;
    std::size_t i = 0;
    auto span_at = [&](std::size_t start, std::size_t len, std::size_t c) {
        return SourceSpan{line, c, start, len};
    };
    while (i < src.size()) {
        const char ch = src[i];
        if (ch == '\n') {
            ++line;
            col = 1;
            ++i;
            continue;
        }
        if (ch == ' ' || ch == '\t' || ch == '\r') {
            ++i;
            ++col;
            continue;
        }
        const std::size_t start = i;
        const std::size_t start_col = col;
        if (std::isdigit(static_cast<unsigned char>(ch)) ||
            (ch == '.' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
            while (i < src.size() && (std::isdigit(static_cast<unsigned char>(src[i])) || src[i] == '.')) {
                ++i;
            }
            if (i < src.size() && (src[i] == 'e' || src[i] == 'E')) {
                std::size_t j = i + 1;
                if (j < src.size() && (src[j] == '+' || src[j] == '-')) {
                    ++j;
                }
                if (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) {
                    i = j;
                    while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) {
                        ++i;
                    }
                }
            }
            Token t{Tok::number, std::string(src.substr(start, i - start)), 0.0,
                    span_at(start, i - start, start_col)};
            const auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.number);
            if (res.ec != std::errc() || res.ptr != t.text.data() + t.text.size()) {
                throw ParseError("malformed number '" + t.text + "'", t.span, {});
            }
            col += i - start;
            out.push_back(std::move(t));
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
            while (i < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_')) {
                ++i;
            }
            out.push_back({Tok::ident, std::string(src.substr(start, i - start)), 0.0,
                           span_at(start, i - start, start_col)});
            col += i - start;
            continue;
        }
        Tok kind;
        switch (ch) {
            case '(': kind = Tok::lparen; break;
            case ')': kind = Tok::rparen; break;
            case ',': kind = Tok::comma; break;
            case '+': kind = Tok::plus; break;
            case '-': kind = Tok::minus; break;
            case '*': kind = Tok::star; break;
            case '/': kind = Tok::slash; break;
            default:
                throw ParseError(std::string("unexpected character '") + ch + "'",
                                 span_at(start, 1, start_col), {});
        }
        out.push_back({kind, std::string(1, ch), 0.0, span_at(start, 1, start_col)});
        ++i;
        ++col;
    }
    out.push_back({Tok::end, "", 0.0, SourceSpan{line, col, src.size(), 0}});
    return out;
}

// ---------------------------------------------------------------------------
// AST

struct ScalarNode;
using ScalarPtr = std::shared_ptr<const ScalarNode>;

struct ScalarNode {
    enum class Kind { number, variable, negate, binary, call };
    Kind kind = Kind::number;
    double value = 0.0;
    std::string name;  // variable or function
    char op = 0;       // binary operator
    std::vector<ScalarPtr> args;
    SourceSpan span;
};

struct FuzzyNode;
using FuzzyPtr = std::shared_ptr<const FuzzyNode>;

struct FuzzyNode {
    enum class Kind { variable, tri, trap, crisp, smul, ghsub, circminus, fadd };
    Kind kind = Kind::variable;
    std::string name;
    std::vector<ScalarPtr> scalars;
    std::vector<FuzzyPtr> operands;
    SourceSpan span;
};

/// Variables scalar expressions may refer to.
inline const std::set<std::string>& scalar_variables() {
    static const std::set<std::string> vars{"t", "r", "v", "w", "w_k", "d", "x", "k"};
    return vars;
}

/// Variables available to scalar parts of fuzzy expressions.
inline const std::set<std::string>& fuzzy_scalar_variables() {
    static const std::set<std::string> vars{"t", "d", "k"};
    return vars;
}

inline const std::set<std::string>& fuzzy_variables() {
    static const std::set<std::string> vars{"u", "u_k", "lam"};
    return vars;
}

namespace detail {

struct FunctionSig {
    const char* name;
    std::size_t arity;
};

inline constexpr FunctionSig kFunctions[] = {{"mu", 1},  {"sigma", 1}, {"eta", 1}, {"min", 2},
                                             {"max", 2}, {"abs", 1},   {"pow", 2}};

inline std::optional<std::size_t> function_arity(const std::string& name) {
    for (const auto& f : kFunctions) {
        if (name == f.name) {
            return f.arity;
        }
    }
    return std::nullopt;
}

inline const char* tok_name(Tok k) {
    switch (k) {
        case Tok::number: return "number";
        case Tok::ident: return "identifier";
        case Tok::lparen: return "'('";
        case Tok::rparen: return "')'";
        case Tok::comma: return "','";
        case Tok::plus: return "'+'";
        case Tok::minus: return "'-'";
        case Tok::star: return "'*'";
        case Tok::slash: return "'/'";
        case Tok::end: return "end of input";
    }
    return "?";
}

inline SourceSpan join(const SourceSpan& a, const SourceSpan& b) {
    SourceSpan s = a;
    s.length = (b.offset + b.length > a.offset) ? b.offset + b.length - a.offset : a.length;
    return s;
}

class Parser {
public:
    Parser(std::string_view src, std::set<std::string> scalar_vars,
           std::set<std::string> fuzzy_vars = fuzzy_variables())
        : toks_(tokenize(src)), scalar_vars_(std::move(scalar_vars)), fuzzy_vars_(std::move(fuzzy_vars)) {}

    ScalarPtr scalar_root() {
        auto e = scalar();
        expect_end();
        return e;
    }

    FuzzyPtr fuzzy_root() {
        auto e = fuzzy();
        expect_end();
        return e;
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    const Token& take() { return toks_[pos_++]; }

    [[noreturn]] void fail(const std::string& what, std::vector<std::string> expected) const {
        const Token& t = peek();
        const std::string found = t.kind == Tok::end ? "end of input" : "'" + t.text + "'";
        throw ParseError(what + " (found " + found + ")", t.span, std::move(expected));
    }

    const Token& expect(Tok k) {
        if (peek().kind != k) {
            fail("unexpected token", {tok_name(k)});
        }
        return take();
    }

    void expect_end() {
        if (peek().kind != Tok::end) {
            fail("trailing input", {"operator", "end of input"});
        }
    }

    ScalarPtr scalar() {
        auto lhs = term();
        while (peek().kind == Tok::plus || peek().kind == Tok::minus) {
            const char op = take().text[0];
            auto rhs = term();
            lhs = binary(op, lhs, rhs);
        }
        return lhs;
    }

    ScalarPtr term() {
        auto lhs = unary();
        while (peek().kind == Tok::star || peek().kind == Tok::slash) {
            const char op = take().text[0];
            auto rhs = unary();
            lhs = binary(op, lhs, rhs);
        }
        return lhs;
    }

    static ScalarPtr binary(char op, ScalarPtr lhs, ScalarPtr rhs) {
        auto n = std::make_shared<ScalarNode>();
        n->kind = ScalarNode::Kind::binary;
        n->op = op;
        n->span = join(lhs->span, rhs->span);
        n->args = {std::move(lhs), std::move(rhs)};
        return n;
    }

    ScalarPtr unary() {
        if (peek().kind == Tok::minus) {
            const SourceSpan at = take().span;
            auto operand = unary();
            auto n = std::make_shared<ScalarNode>();
            n->kind = ScalarNode::Kind::negate;
            n->span = join(at, operand->span);
            n->args = {std::move(operand)};
            return n;
        }
        return primary();
    }

    ScalarPtr primary() {
        const Token& t = peek();
        if (t.kind == Tok::number) {
            take();
            auto n = std::make_shared<ScalarNode>();
            n->kind = ScalarNode::Kind::number;
            n->value = t.number;
            n->span = t.span;
            return n;
        }
        if (t.kind == Tok::lparen) {
            take();
            auto e = scalar();
            expect(Tok::rparen);
            return e;
        }
        if (t.kind == Tok::ident) {
            if (auto arity = function_arity(t.text)) {
                const Token& name = take();
                expect(Tok::lparen);
                auto n = std::make_shared<ScalarNode>();
                n->kind = ScalarNode::Kind::call;
                n->name = name.text;
                n->args.push_back(scalar());
                while (peek().kind == Tok::comma) {
                    take();
                    n->args.push_back(scalar());
                }
                const Token& close = expect(Tok::rparen);
                n->span = join(name.span, close.span);
                if (n->args.size() != *arity) {
                    throw ParseError(name.text + " takes " + std::to_string(*arity) +
                                         " argument(s), got " + std::to_string(n->args.size()),
                                     name.span, {});
                }
                return n;
            }
            if (scalar_vars_.count(t.text)) {
                take();
                auto n = std::make_shared<ScalarNode>();
                n->kind = ScalarNode::Kind::variable;
                n->name = t.text;
                n->span = t.span;
                return n;
            }
            std::vector<std::string> expected(scalar_vars_.begin(), scalar_vars_.end());
            for (const auto& f : kFunctions) {
                expected.push_back(std::string(f.name) + "(...)");
            }
            fail("unknown identifier '" + t.text + "' in this expression", std::move(expected));
        }
        fail("expected a scalar operand", {"number", "variable", "function call", "'('", "'-'"});
    }

    FuzzyPtr fuzzy() {
        auto lhs = fatom();
        while (peek().kind == Tok::ident && peek().text == "fadd") {
            take();
            auto rhs = fatom();
            auto n = std::make_shared<FuzzyNode>();
            n->kind = FuzzyNode::Kind::fadd;
            n->span = join(lhs->span, rhs->span);
            n->operands = {std::move(lhs), std::move(rhs)};
            lhs = std::move(n);
        }
        return lhs;
    }

    std::vector<ScalarPtr> scalar_args(std::size_t n) {
        std::vector<ScalarPtr> out;
        for (std::size_t i = 0; i < n; ++i) {
            if (i) {
                expect(Tok::comma);
            }
            out.push_back(scalar());
        }
        return out;
    }

    FuzzyPtr fatom() {
        const Token& t = peek();
        if (t.kind == Tok::lparen) {
            take();
            auto e = fuzzy();
            expect(Tok::rparen);
            return e;
        }
        if (t.kind != Tok::ident) {
            fail("expected a fuzzy operand",
                 {"u", "u_k", "lam", "tri(...)", "trap(...)", "crisp(...)", "smul(...)",
                  "ghsub(...)", "circminus(...)", "'('"});
        }
        const Token& head = take();
        auto n = std::make_shared<FuzzyNode>();
        n->name = head.text;
        n->span = head.span;
        if (fuzzy_variables().count(head.text)) {
            if (!fuzzy_vars_.count(head.text)) {
                --pos_;
                fail("fuzzy variable '" + head.text + "' is not available in this expression",
                     std::vector<std::string>(fuzzy_vars_.begin(), fuzzy_vars_.end()));
            }
            n->kind = FuzzyNode::Kind::variable;
            return n;
        }
        using K = FuzzyNode::Kind;
        if (head.text == "tri" || head.text == "trap" || head.text == "crisp") {
            n->kind = head.text == "tri" ? K::tri : head.text == "trap" ? K::trap : K::crisp;
            expect(Tok::lparen);
            n->scalars = scalar_args(head.text == "tri" ? 3 : head.text == "trap" ? 4 : 1);
        } else if (head.text == "smul") {
            n->kind = K::smul;
            expect(Tok::lparen);
            n->scalars.push_back(scalar());
            expect(Tok::comma);
            n->operands.push_back(fuzzy());
        } else if (head.text == "ghsub") {
            n->kind = K::ghsub;
            expect(Tok::lparen);
            n->operands.push_back(fuzzy());
            expect(Tok::comma);
            n->operands.push_back(fuzzy());
        } else if (head.text == "circminus") {
            n->kind = K::circminus;
            expect(Tok::lparen);
            n->operands.push_back(fuzzy());
        } else {
            --pos_;
            fail("unknown fuzzy operand '" + head.text + "'",
                 {"u", "u_k", "lam", "tri", "trap", "crisp", "smul", "ghsub", "circminus"});
        }
        const Token& close = expect(Tok::rparen);
        n->span = join(head.span, close.span);
        return n;
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::set<std::string> scalar_vars_;
    std::set<std::string> fuzzy_vars_;
};

}  // namespace detail

class ScalarExpr {
public:
    ScalarExpr(ScalarPtr root, std::string source) : root_(std::move(root)), source_(std::move(source)) {}

    const ScalarNode& root() const { return *root_; }
    const ScalarPtr& root_ptr() const { return root_; }
    const std::string& source() const { return source_; }

    std::set<std::string> free_variables() const {
        std::set<std::string> out;
        collect(*root_, out);
        return out;
    }

private:
    static void collect(const ScalarNode& n, std::set<std::string>& out) {
        if (n.kind == ScalarNode::Kind::variable) {
            out.insert(n.name);
        }
        for (const auto& a : n.args) {
            collect(*a, out);
        }
    }

    ScalarPtr root_;
    std::string source_;
};

class FuzzyExpr {
public:
    FuzzyExpr(FuzzyPtr root, std::string source) : root_(std::move(root)), source_(std::move(source)) {}

    const FuzzyNode& root() const { return *root_; }
    const FuzzyPtr& root_ptr() const { return root_; }
    const std::string& source() const { return source_; }

private:
    FuzzyPtr root_;
    std::string source_;
};

/// Parses a scalar expression. `allowed` restricts the variables the slot may
/// use; by default every scalar variable is accepted.
inline ScalarExpr parse_scalar(std::string_view src,
                               const std::set<std::string>& allowed = scalar_variables()) {
    if (src.find_first_not_of(" \t\r\n") == std::string_view::npos) {
        throw ParseError("empty expression", {}, {"expression"});
    }
    detail::Parser p(src, allowed);
    return ScalarExpr(p.scalar_root(), std::string(src));
}

inline FuzzyExpr parse_fuzzy(std::string_view src,
                             const std::set<std::string>& scalar_allowed = fuzzy_scalar_variables(),
                             const std::set<std::string>& fuzzy_allowed = fuzzy_variables()) {
    if (src.find_first_not_of(" \t\r\n") == std::string_view::npos) {
        throw ParseError("empty expression", {}, {"expression"});
    }
    detail::Parser p(src, scalar_allowed, fuzzy_allowed);
    return FuzzyExpr(p.fuzzy_root(), std::string(src));
}

// ---------------------------------------------------------------------------
// Printing and structural equality

namespace detail {

inline std::string format_number(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

}  // namespace detail

inline std::string to_string(const ScalarNode& n) {
    using K = ScalarNode::Kind;
    switch (n.kind) {
        case K::number: return detail::format_number(n.value);
        case K::variable: return n.name;
        case K::negate: return "(-" + to_string(*n.args[0]) + ")";
        case K::binary:
            return "(" + to_string(*n.args[0]) + " " + n.op + " " + to_string(*n.args[1]) + ")";
        case K::call: {
            std::string s = n.name + "(";
            for (std::size_t i = 0; i < n.args.size(); ++i) {
                s += (i ? ", " : "") + to_string(*n.args[i]);
            }
            return s + ")";
        }
    }
    return {};
}

inline std::string to_string(const FuzzyNode& n) {
    using K = FuzzyNode::Kind;
    auto scalars = [&](std::size_t from) {
        std::string s;
        for (std::size_t i = from; i < n.scalars.size(); ++i) {
            s += (i > from ? ", " : "") + to_string(*n.scalars[i]);
        }
        return s;
    };
    switch (n.kind) {
        case K::variable: return n.name;
        case K::tri:
        case K::trap:
        case K::crisp: return n.name + "(" + scalars(0) + ")";
        case K::smul: return "smul(" + to_string(*n.scalars[0]) + ", " + to_string(*n.operands[0]) + ")";
        case K::ghsub:
            return "ghsub(" + to_string(*n.operands[0]) + ", " + to_string(*n.operands[1]) + ")";
        case K::circminus: return "circminus(" + to_string(*n.operands[0]) + ")";
        case K::fadd: return "(" + to_string(*n.operands[0]) + " fadd " + to_string(*n.operands[1]) + ")";
    }
    return {};
}

inline std::string to_string(const ScalarExpr& e) { return to_string(e.root()); }
inline std::string to_string(const FuzzyExpr& e) { return to_string(e.root()); }

inline bool same_tree(const ScalarNode& a, const ScalarNode& b) {
    if (a.kind != b.kind || a.name != b.name || a.op != b.op || a.args.size() != b.args.size()) {
        return false;
    }
    if (a.kind == ScalarNode::Kind::number && a.value != b.value) {
        return false;
    }
    for (std::size_t i = 0; i < a.args.size(); ++i) {
        if (!same_tree(*a.args[i], *b.args[i])) {
            return false;
        }
    }
    return true;
}

inline bool same_tree(const FuzzyNode& a, const FuzzyNode& b) {
    if (a.kind != b.kind || a.name != b.name || a.scalars.size() != b.scalars.size() ||
        a.operands.size() != b.operands.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.scalars.size(); ++i) {
        if (!same_tree(*a.scalars[i], *b.scalars[i])) {
            return false;
        }
    }
    for (std::size_t i = 0; i < a.operands.size(); ++i) {
        if (!same_tree(*a.operands[i], *b.operands[i])) {
            return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Evaluation

struct ScalarEnv {
    std::map<std::string, double, std::less<>> vars;
    const TimeScale* ts = nullptr;

    ScalarEnv& set(const std::string& name, double value) {
        vars[name] = value;
        return *this;
    }
};

namespace detail {

inline std::size_t point_or_throw(const ScalarEnv& env, double t, const ScalarNode& at) {
    if (!env.ts) {
        throw EvalError(at.name + "() needs a time-scale context", at.span);
    }
    const auto i = env.ts->find(t);
    if (!i) {
        throw EvalError(at.name + "(): t = " + std::to_string(t) + " is not on the time scale",
                        at.span);
    }
    if (env.ts->is_terminal(*i)) {
        throw EvalError(at.name + "(): t = " + std::to_string(t) + " has no successor", at.span);
    }
    return *i;
}

}  // namespace detail

inline double eval_scalar(const ScalarNode& n, const ScalarEnv& env) {
    using K = ScalarNode::Kind;
    switch (n.kind) {
        case K::number:
            return n.value;
        case K::variable: {
            auto it = env.vars.find(n.name);
            if (it == env.vars.end()) {
                throw EvalError("unbound variable '" + n.name + "'", n.span);
            }
            return it->second;
        }
        case K::negate:
            return -eval_scalar(*n.args[0], env);
        case K::binary: {
            const double a = eval_scalar(*n.args[0], env);
            const double b = eval_scalar(*n.args[1], env);
            switch (n.op) {
                case '+': return a + b;
                case '-': return a - b;
                case '*': return a * b;
                case '/':
                    if (b == 0.0) {
                        throw EvalError("division by zero", n.span);
                    }
                    return a / b;
            }
            break;
        }
        case K::call: {
            const double x = eval_scalar(*n.args[0], env);
            if (n.name == "abs") return std::abs(x);
            if (n.name == "min") return std::min(x, eval_scalar(*n.args[1], env));
            if (n.name == "max") return std::max(x, eval_scalar(*n.args[1], env));
            if (n.name == "pow") return std::pow(x, eval_scalar(*n.args[1], env));
            const std::size_t i = detail::point_or_throw(env, x, n);
            const double mu = env.ts->mu_at(i);
            if (n.name == "mu") return mu;
            if (n.name == "sigma") return (*env.ts)[i + 1];
            if (n.name == "eta") return 1.0 / (1.0 + mu);
            break;
        }
    }
    throw EvalError("malformed expression node", n.span);
}

inline double eval_scalar(const ScalarExpr& e, const ScalarEnv& env) {
    return eval_scalar(e.root(), env);
}

struct FuzzyEnv {
    ScalarEnv scalar;
    const FuzzyNumber* u = nullptr;
    const FuzzyNumber* u_k = nullptr;
    const FuzzyNumber* lam = nullptr;
    std::optional<AlphaGrid> grid;
};

namespace detail {

inline const AlphaGrid& grid_of(const FuzzyEnv& env, const FuzzyNode& at) {
    if (env.grid) {
        return *env.grid;
    }
    for (const auto* p : {env.u, env.u_k, env.lam}) {
        if (p) {
            return p->grid();
        }
    }
    throw EvalError("no alpha grid available for fuzzy literal", at.span);
}

}  // namespace detail

inline FuzzyNumber eval_fuzzy(const FuzzyNode& n, const FuzzyEnv& env) {
    using K = FuzzyNode::Kind;
    auto s = [&](std::size_t i) { return eval_scalar(*n.scalars[i], env.scalar); };
    switch (n.kind) {
        case K::variable: {
            const FuzzyNumber* p = n.name == "u" ? env.u : n.name == "u_k" ? env.u_k : env.lam;
            if (!p) {
                throw EvalError("unbound fuzzy variable '" + n.name + "'", n.span);
            }
            return *p;
        }
        case K::tri:
        case K::trap:
        case K::crisp: {
            const AlphaGrid& g = detail::grid_of(env, n);
            try {
                if (n.kind == K::crisp) {
                    return FuzzyNumber::crisp(s(0), g);
                }
                if (n.kind == K::tri) {
                    return make_triangle(s(0), s(1), s(2), g);
                }
                return make_trapezoid(s(0), s(1), s(2), s(3), g);
            } catch (const InvalidShape& e) {
                throw EvalError(e.what(), n.span);
            }
        }
        case K::smul:
            return scale(s(0), eval_fuzzy(*n.operands[0], env));
        case K::ghsub: {
            auto d = gh_difference(eval_fuzzy(*n.operands[0], env), eval_fuzzy(*n.operands[1], env));
            if (!d) {
                throw GhNonExistence(n.span);
            }
            return *d;
        }
        case K::circminus: {
            auto it = env.scalar.vars.find("t");
            if (it == env.scalar.vars.end()) {
                throw EvalError("circminus needs the current time t", n.span);
            }
            ScalarNode at;
            at.name = "circminus";
            at.span = n.span;
            const std::size_t i = detail::point_or_throw(env.scalar, it->second, at);
            return scale(-1.0 / (1.0 + env.scalar.ts->mu_at(i)), eval_fuzzy(*n.operands[0], env));
        }
        case K::fadd:
            return add(eval_fuzzy(*n.operands[0], env), eval_fuzzy(*n.operands[1], env));
    }
    throw EvalError("malformed expression node", n.span);
}

inline FuzzyNumber eval_fuzzy(const FuzzyExpr& e, const FuzzyEnv& env) {
    return eval_fuzzy(e.root(), env);
}

}  // namespace ftl::dsl
