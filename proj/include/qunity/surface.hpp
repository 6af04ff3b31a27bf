#pragma once

#include <memory>
#include <string>
#include <vector>

#include "qunity/real.hpp"

namespace qunity {

// Surface terms cover types, expressions, and programs in one grammar; the
// expander sorts out which category a term belongs to. Definitions may be
// parameterized by one non-negative integer metavariable, with clause heads
// matching a literal, any value, or "n+k".

struct STerm;
using STermPtr = std::shared_ptr<const STerm>;

struct SBranch {
    STermPtr pattern;
    STermPtr body;
};

// One bracket argument of a builtin or user call.
struct SArg {
    STermPtr term; // types and expressions
    RealPtr real;
    IntPtr iexpr;
};

struct STerm {
    enum class Kind {
        Unit, Name, Nat,
        Pair, Ctrl, Try, Lambda, Let,
        U3, Call,
        Juxt, Pipe, Dagger, Compose,
        SumT, ProdT, Power,
        VoidT,
    };
    Kind kind;
    std::string name;                // Name / Call
    long long nat = 0;               // Nat
    STermPtr a, b, c;                // generic operands:
                                     //   Pair(a,b), Juxt(a,b), Pipe(a,b), Compose(a,b)
                                     //   SumT(a,b), ProdT(a,b), Try(a,b), Dagger(a)
                                     //   Lambda(pattern=a, type=b, body=c)
                                     //   Let(pattern=a, type=b, rhs=c, body=d)
    STermPtr d;
    STermPtr scrutinee, stype, rtype; // Ctrl
    std::vector<SBranch> branches;    // Ctrl
    RealPtr r0, r1, r2;               // U3
    std::vector<SArg> args;           // Call
    IntPtr power;                     // Power (exponent), base in a
    int line = 0, column = 0;
};

inline std::shared_ptr<STerm> make_sterm(STerm::Kind k) {
    auto t = std::make_shared<STerm>();
    t->kind = k;
    return t;
}

struct SDefn {
    enum class ParamKind { None, Lit, VarPlus };
    std::string name;
    ParamKind param_kind = ParamKind::None;
    long long lit = 0;        // Lit: exact match
    std::string pvar;         // VarPlus: variable name
    long long plus = 0;       // VarPlus: matches values >= plus, binds pvar = value - plus
    STermPtr body;
    int line = 0;
};

struct SourceProgram {
    std::vector<SDefn> defs;
    STermPtr main_term;
};

} // namespace qunity
