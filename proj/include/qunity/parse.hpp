#pragma once

#include <cctype>
#include <string>
#include <vector>

#include "qunity/error.hpp"
#include "qunity/surface.hpp"

namespace qunity {

// Recursive-descent parser for .qunity files.
//
// Operator binding, tightest first:
//   ^           tensor power
//   juxt        application (left-assoc)
//   .           program composition (right-assoc)
//   (x)         type product (right-assoc)
//   (+)         type sum (right-assoc)
//   |>          pipeline (left-assoc)
//
// "(x)" and "(+)" are single tokens when written without interior spaces;
// write "( x )" to parenthesize a variable literally named x.

namespace detail {

enum class Tok {
    End, Ident, Nat,
    LParen, RParen, LBrace, RBrace, LBracket, RBracket,
    Comma, Colon, ColonEq, Eq, Bar, Pipeline, FatArrow, Arrow,
    Caret, Plus, Minus, Star, Slash, Dot, SumOp, ProdOp, Unit,
};

struct Token {
    Tok kind;
    std::string text;
    long long nat = 0;
    int line = 1, column = 1;
};

class Lexer {
public:
    explicit Lexer(const std::string &src) : src_(src) { advance(); }

    const Token &peek() const { return tok_; }

    Token next() {
        Token t = tok_;
        advance();
        return t;
    }

private:
    void advance() {
        skip_ws();
        tok_ = Token{Tok::End, "", 0, line_, col_};
        if (pos_ >= src_.size())
            return;
        char c = src_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                    src_[pos_] == '_' || src_[pos_] == '\''))
                take();
            tok_.kind = Tok::Ident;
            tok_.text = src_.substr(start, pos_ - start);
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                take();
            tok_.kind = Tok::Nat;
            tok_.text = src_.substr(start, pos_ - start);
            tok_.nat = std::stoll(tok_.text);
            return;
        }
        switch (c) {
        case '(':
            if (match3('(', '+', ')')) { tok_.kind = Tok::SumOp; return; }
            if (match3('(', 'x', ')')) { tok_.kind = Tok::ProdOp; return; }
            if (match2('(', ')')) { tok_.kind = Tok::Unit; return; }
            take(); tok_.kind = Tok::LParen; return;
        case ')': take(); tok_.kind = Tok::RParen; return;
        case '{': take(); tok_.kind = Tok::LBrace; return;
        case '}': take(); tok_.kind = Tok::RBrace; return;
        case '[': take(); tok_.kind = Tok::LBracket; return;
        case ']': take(); tok_.kind = Tok::RBracket; return;
        case ',': take(); tok_.kind = Tok::Comma; return;
        case ':':
            if (match2(':', '=')) { tok_.kind = Tok::ColonEq; return; }
            take(); tok_.kind = Tok::Colon; return;
        case '=':
            if (match2('=', '>')) { tok_.kind = Tok::FatArrow; return; }
            take(); tok_.kind = Tok::Eq; return;
        case '|':
            if (match2('|', '>')) { tok_.kind = Tok::Pipeline; return; }
            take(); tok_.kind = Tok::Bar; return;
        case '-':
            if (match2('-', '>')) { tok_.kind = Tok::Arrow; return; }
            take(); tok_.kind = Tok::Minus; return;
        case '^': take(); tok_.kind = Tok::Caret; return;
        case '+': take(); tok_.kind = Tok::Plus; return;
        case '*': take(); tok_.kind = Tok::Star; return;
        case '/': take(); tok_.kind = Tok::Slash; return;
        case '.': take(); tok_.kind = Tok::Dot; return;
        default:
            throw ParseError(std::string("unexpected character '") + c + "'", line_, col_);
        }
    }

    bool match2(char a, char b) {
        if (pos_ + 1 < src_.size() && src_[pos_] == a && src_[pos_ + 1] == b) {
            take(); take();
            return true;
        }
        return false;
    }

    bool match3(char a, char b, char c) {
        if (pos_ + 2 < src_.size() && src_[pos_] == a && src_[pos_ + 1] == b &&
            src_[pos_ + 2] == c) {
            take(); take(); take();
            return true;
        }
        return false;
    }

    void skip_ws() {
        for (;;) {
            while (pos_ < src_.size() &&
                   std::isspace(static_cast<unsigned char>(src_[pos_])))
                take();
            if (pos_ + 1 < src_.size() && src_[pos_] == '/' && src_[pos_ + 1] == '/') {
                while (pos_ < src_.size() && src_[pos_] != '\n')
                    take();
                continue;
            }
            break;
        }
    }

    void take() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    const std::string &src_;
    std::size_t pos_ = 0;
    int line_ = 1, col_ = 1;
    Token tok_;
};

inline bool is_keyword(const std::string &s) {
    static const char *kws[] = {
        "def", "ctrl", "try", "catch", "lambda", "let", "in", "dagger", "u3",
        "left", "right", "rphase", "gphase", "equals", "reflect", "fst", "snd",
        "Maybe", "nothing", "just",
    };
    for (const char *k : kws)
        if (s == k)
            return true;
    return false;
}

class Parser {
public:
    explicit Parser(const std::string &src) : lex_(src) {}

    SourceProgram parse_program() {
        SourceProgram prog;
        while (at_ident("def"))
            prog.defs.push_back(parse_def());
        if (lex_.peek().kind == Tok::End) {
            // no trailing term: the entry point is the definition named main
            bool has_main = false;
            for (const auto &d : prog.defs)
                if (d.name == "main")
                    has_main = true;
            if (!has_main)
                throw ParseError("file has no entry-point term and no definition named 'main'",
                                 lex_.peek().line, lex_.peek().column);
            auto n = make_sterm(STerm::Kind::Name);
            n->name = "main";
            prog.main_term = n;
        } else {
            prog.main_term = parse_term();
            expect(Tok::End, "end of input");
        }
        return prog;
    }

    STermPtr parse_term() { return parse_pipe(); }

private:
    SDefn parse_def() {
        SDefn d;
        d.line = lex_.peek().line;
        expect_ident("def");
        d.name = expect_name();
        if (lex_.peek().kind == Tok::LBracket) {
            lex_.next();
            if (lex_.peek().kind == Tok::Nat) {
                d.param_kind = SDefn::ParamKind::Lit;
                d.lit = lex_.next().nat;
            } else {
                d.param_kind = SDefn::ParamKind::VarPlus;
                d.pvar = expect_name();
                d.plus = 0;
                if (lex_.peek().kind == Tok::Plus) {
                    lex_.next();
                    Token t = expect(Tok::Nat, "natural number");
                    d.plus = t.nat;
                }
            }
            expect(Tok::RBracket, "']'");
        }
        expect(Tok::ColonEq, "':='");
        d.body = parse_term();
        return d;
    }

    // pipe := typesum ("|>" typesum)*
    STermPtr parse_pipe() {
        STermPtr t = parse_typesum();
        while (lex_.peek().kind == Tok::Pipeline) {
            lex_.next();
            auto n = make_sterm(STerm::Kind::Pipe);
            n->a = t;
            n->b = parse_typesum();
            t = n;
        }
        return t;
    }

    // typesum := typeprod ("(+)" typesum)?
    STermPtr parse_typesum() {
        STermPtr t = parse_typeprod();
        if (lex_.peek().kind == Tok::SumOp) {
            lex_.next();
            auto n = make_sterm(STerm::Kind::SumT);
            n->a = t;
            n->b = parse_typesum();
            return n;
        }
        return t;
    }

    // typeprod := compose ("(x)" typeprod)?
    STermPtr parse_typeprod() {
        STermPtr t = parse_compose();
        if (lex_.peek().kind == Tok::ProdOp) {
            lex_.next();
            auto n = make_sterm(STerm::Kind::ProdT);
            n->a = t;
            n->b = parse_typeprod();
            return n;
        }
        return t;
    }

    // compose := juxt ("." compose)?
    STermPtr parse_compose() {
        STermPtr t = parse_juxt();
        if (lex_.peek().kind == Tok::Dot) {
            lex_.next();
            auto n = make_sterm(STerm::Kind::Compose);
            n->a = t;
            n->b = parse_compose();
            return n;
        }
        return t;
    }

    // juxt := power+   (left-assoc application)
    STermPtr parse_juxt() {
        STermPtr t = parse_power();
        while (starts_atom()) {
            auto n = make_sterm(STerm::Kind::Juxt);
            n->a = t;
            n->b = parse_power();
            t = n;
        }
        return t;
    }

    // power := atom ("^" intatom)*
    STermPtr parse_power() {
        STermPtr t = parse_atom();
        while (lex_.peek().kind == Tok::Caret) {
            lex_.next();
            auto n = make_sterm(STerm::Kind::Power);
            n->a = t;
            n->power = parse_int_atom();
            t = n;
        }
        return t;
    }

    bool starts_atom() {
        switch (lex_.peek().kind) {
        case Tok::Unit:
        case Tok::LParen:
        case Tok::Nat:
            return true;
        case Tok::Ident: {
            const std::string &s = lex_.peek().text;
            // keywords that begin an atom
            if (s == "ctrl" || s == "try" || s == "lambda" || s == "let" ||
                s == "dagger" || s == "u3" || s == "left" || s == "right" ||
                s == "rphase" || s == "gphase" || s == "equals" || s == "reflect" ||
                s == "fst" || s == "snd" || s == "Maybe" || s == "nothing" || s == "just")
                return true;
            return !is_keyword(s);
        }
        default:
            return false;
        }
    }

    STermPtr parse_atom() {
        Token t = lex_.peek();
        auto positioned = [&](std::shared_ptr<STerm> n) {
            n->line = t.line;
            n->column = t.column;
            return n;
        };
        switch (t.kind) {
        case Tok::Unit:
            lex_.next();
            return positioned(make_sterm(STerm::Kind::Unit));
        case Tok::Nat: {
            lex_.next();
            auto n = make_sterm(STerm::Kind::Nat);
            n->nat = t.nat;
            return positioned(n);
        }
        case Tok::LParen: {
            lex_.next();
            STermPtr inner = parse_term();
            if (lex_.peek().kind == Tok::Comma) {
                lex_.next();
                auto n = make_sterm(STerm::Kind::Pair);
                n->a = inner;
                n->b = parse_term();
                expect(Tok::RParen, "')'");
                return positioned(n);
            }
            expect(Tok::RParen, "')'");
            return inner;
        }
        case Tok::Ident:
            break;
        default:
            throw ParseError("expected a term", t.line, t.column);
        }

        const std::string &name = t.text;
        if (name == "ctrl")
            return positioned(parse_ctrl());
        if (name == "try") {
            lex_.next();
            auto n = make_sterm(STerm::Kind::Try);
            n->a = parse_term();
            expect_ident("catch");
            n->b = parse_term();
            return positioned(n);
        }
        if (name == "lambda") {
            lex_.next();
            auto n = make_sterm(STerm::Kind::Lambda);
            n->a = parse_juxt();
            expect(Tok::Colon, "':'");
            n->b = parse_typesum();
            expect(Tok::Arrow, "'->'");
            n->c = parse_term();
            return positioned(n);
        }
        if (name == "let") {
            lex_.next();
            auto n = make_sterm(STerm::Kind::Let);
            n->a = parse_juxt();
            expect(Tok::Colon, "':'");
            n->b = parse_typesum();
            expect(Tok::Eq, "'='");
            n->c = parse_term();
            expect_ident("in");
            n->d = parse_term();
            return positioned(n);
        }
        if (name == "dagger") {
            lex_.next();
            auto n = make_sterm(STerm::Kind::Dagger);
            n->a = parse_power();
            return positioned(n);
        }
        if (name == "u3") {
            lex_.next();
            auto n = make_sterm(STerm::Kind::U3);
            expect(Tok::LParen, "'('");
            n->r0 = parse_real();
            expect(Tok::Comma, "','");
            n->r1 = parse_real();
            expect(Tok::Comma, "','");
            n->r2 = parse_real();
            expect(Tok::RParen, "')'");
            return positioned(n);
        }
        if (name == "Void") {
            lex_.next();
            return positioned(make_sterm(STerm::Kind::VoidT));
        }

        // bracketed builtins and user definitions
        lex_.next();
        auto n = make_sterm(STerm::Kind::Name);
        n->name = name;
        if (lex_.peek().kind != Tok::LBracket) {
            if (is_keyword(name))
                throw ParseError("'" + name + "' requires bracket arguments", t.line, t.column);
            return positioned(n);
        }
        lex_.next();
        n->kind = STerm::Kind::Call;
        if (name == "left" || name == "right") {
            n->args.push_back(term_arg());
            if (lex_.peek().kind == Tok::Comma) {
                lex_.next();
                n->args.push_back(term_arg());
            }
        } else if (name == "Maybe" || name == "nothing" || name == "just") {
            n->args.push_back(term_arg());
        } else if (name == "fst" || name == "snd") {
            n->args.push_back(term_arg());
            expect(Tok::Comma, "','");
            n->args.push_back(term_arg());
        } else if (name == "equals" || name == "reflect") {
            n->args.push_back(term_arg());
            expect(Tok::Comma, "','");
            n->args.push_back(term_arg());
        } else if (name == "gphase") {
            n->args.push_back(term_arg());
            expect(Tok::Comma, "','");
            n->args.push_back(real_arg());
        } else if (name == "rphase") {
            n->args.push_back(term_arg());
            expect(Tok::Comma, "','");
            n->args.push_back(term_arg());
            expect(Tok::Comma, "','");
            n->args.push_back(real_arg());
            expect(Tok::Comma, "','");
            n->args.push_back(real_arg());
        } else {
            // user definition call: one integer expression
            SArg a;
            a.iexpr = parse_int_expr();
            n->args.push_back(a);
        }
        expect(Tok::RBracket, "']'");
        return positioned(n);
    }

    std::shared_ptr<STerm> parse_ctrl() {
        expect_ident("ctrl");
        auto n = make_sterm(STerm::Kind::Ctrl);
        n->scrutinee = parse_juxt();
        expect(Tok::Colon, "':'");
        n->stype = parse_typesum();
        expect(Tok::LBrace, "'{'");
        if (lex_.peek().kind != Tok::RBrace) {
            for (;;) {
                SBranch br;
                br.pattern = parse_term();
                expect(Tok::FatArrow, "'=>'");
                br.body = parse_term();
                n->branches.push_back(br);
                if (lex_.peek().kind == Tok::Bar) {
                    lex_.next();
                    continue;
                }
                break;
            }
        }
        expect(Tok::RBrace, "'}'");
        expect(Tok::Colon, "':'");
        n->rtype = parse_typesum();
        return n;
    }

    SArg term_arg() {
        SArg a;
        a.term = parse_term();
        return a;
    }

    SArg real_arg() {
        SArg a;
        a.real = parse_real();
        return a;
    }

    // ---- real constants (Appendix-F style grammar) ----

    RealPtr parse_real() { return parse_real_sum(); }

    RealPtr parse_real_sum() {
        RealPtr t = parse_real_prod();
        for (;;) {
            if (lex_.peek().kind == Tok::Plus) {
                lex_.next();
                t = real_binop(RealExpr::Kind::Add, t, parse_real_prod());
            } else if (lex_.peek().kind == Tok::Minus) {
                lex_.next();
                t = real_binop(RealExpr::Kind::Add, t,
                               real_unop(RealExpr::Kind::Neg, parse_real_prod()));
            } else {
                return t;
            }
        }
    }

    RealPtr parse_real_prod() {
        RealPtr t = parse_real_unary();
        for (;;) {
            if (lex_.peek().kind == Tok::Star) {
                lex_.next();
                t = real_binop(RealExpr::Kind::Mul, t, parse_real_unary());
            } else if (lex_.peek().kind == Tok::Slash) {
                lex_.next();
                t = real_binop(RealExpr::Kind::Div, t, parse_real_unary());
            } else {
                return t;
            }
        }
    }

    RealPtr parse_real_unary() {
        if (lex_.peek().kind == Tok::Minus) {
            lex_.next();
            return real_unop(RealExpr::Kind::Neg, parse_real_unary());
        }
        return parse_real_atom();
    }

    RealPtr parse_real_atom() {
        Token t = lex_.peek();
        if (t.kind == Tok::LParen) {
            lex_.next();
            RealPtr r = parse_real();
            expect(Tok::RParen, "')'");
            return r;
        }
        if (t.kind == Tok::Nat || t.kind == Tok::Ident) {
            if (t.kind == Tok::Ident) {
                static const char *funcs[] = {"sin", "cos", "tan", "arcsin", "arccos",
                                              "arctan", "exp", "ln", "sqrt"};
                for (const char *f : funcs) {
                    if (t.text == f) {
                        lex_.next();
                        expect(Tok::LParen, "'('");
                        RealPtr arg = parse_real();
                        expect(Tok::RParen, "')'");
                        RealExpr::Kind k =
                            t.text == "sin" ? RealExpr::Kind::Sin :
                            t.text == "cos" ? RealExpr::Kind::Cos :
                            t.text == "tan" ? RealExpr::Kind::Tan :
                            t.text == "arcsin" ? RealExpr::Kind::Arcsin :
                            t.text == "arccos" ? RealExpr::Kind::Arccos :
                            t.text == "arctan" ? RealExpr::Kind::Arctan :
                            t.text == "exp" ? RealExpr::Kind::Exp :
                            t.text == "ln" ? RealExpr::Kind::Ln : RealExpr::Kind::Sqrt;
                        return real_unop(k, arg);
                    }
                }
                if (t.text == "pi") {
                    lex_.next();
                    return real_pi();
                }
                if (t.text == "euler") {
                    lex_.next();
                    return real_euler();
                }
            }
            // natural or integer metavariable, possibly with '^'
            IntPtr ie = parse_int_atom();
            if (ie->kind == IntExpr::Kind::Nat)
                return real_nat(ie->nat);
            return real_int_atom(ie);
        }
        throw ParseError("expected a real constant", t.line, t.column);
    }

    // ---- integer metavariable expressions ----

    IntPtr parse_int_expr() {
        IntPtr t = parse_int_prod();
        while (lex_.peek().kind == Tok::Plus) {
            lex_.next();
            t = int_binop(IntExpr::Kind::Add, t, parse_int_prod());
        }
        return t;
    }

    IntPtr parse_int_prod() {
        IntPtr t = parse_int_atom();
        while (lex_.peek().kind == Tok::Star) {
            lex_.next();
            t = int_binop(IntExpr::Kind::Mul, t, parse_int_atom());
        }
        return t;
    }

    IntPtr parse_int_atom() {
        Token t = lex_.peek();
        IntPtr base;
        if (t.kind == Tok::Nat) {
            lex_.next();
            base = int_nat(t.nat);
        } else if (t.kind == Tok::Ident && !is_keyword(t.text)) {
            lex_.next();
            base = int_var(t.text);
        } else if (t.kind == Tok::LParen) {
            lex_.next();
            base = parse_int_expr();
            expect(Tok::RParen, "')'");
        } else {
            throw ParseError("expected an integer expression", t.line, t.column);
        }
        if (lex_.peek().kind == Tok::Caret) {
            lex_.next();
            return int_binop(IntExpr::Kind::Pow, base, parse_int_atom());
        }
        return base;
    }

    // ---- token helpers ----

    bool at_ident(const char *kw) {
        return lex_.peek().kind == Tok::Ident && lex_.peek().text == kw;
    }

    Token expect(Tok kind, const char *what) {
        Token t = lex_.peek();
        if (t.kind != kind)
            throw ParseError(std::string("expected ") + what, t.line, t.column);
        return lex_.next();
    }

    void expect_ident(const char *kw) {
        Token t = lex_.peek();
        if (t.kind != Tok::Ident || t.text != kw)
            throw ParseError(std::string("expected '") + kw + "'", t.line, t.column);
        lex_.next();
    }

    std::string expect_name() {
        Token t = lex_.peek();
        if (t.kind != Tok::Ident || is_keyword(t.text))
            throw ParseError("expected an identifier", t.line, t.column);
        lex_.next();
        return t.text;
    }

    Lexer lex_;
};

} // namespace detail

inline SourceProgram parse(const std::string &text) {
    detail::Parser p(text);
    return p.parse_program();
}

inline STermPtr parse_term(const std::string &text) {
    detail::Parser p(text);
    return p.parse_term();
}

} // namespace qunity
