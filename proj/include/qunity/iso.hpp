#pragma once

#include <string>
#include <vector>

#include "qunity/classical.hpp"
#include "qunity/typecheck.hpp"

namespace qunity {

// The iso judgment: a syntactic certificate that a term's denotation is
// norm-preserving (pure) or trace-preserving (mixed). The trace records which
// rules fired, for inspection.

struct IsoFlag {
    bool iso = false;
    std::vector<std::string> trace;
};

bool check_iso_expr(const ExprPtr &e, std::vector<std::string> &trace);
bool check_iso_prog(const ProgPtr &f, std::vector<std::string> &trace);

inline bool check_iso_prog(const ProgPtr &f, std::vector<std::string> &trace) {
    switch (f->kind) {
    case Prog::Kind::U3:
        trace.push_back("I-Gate");
        return true;
    case Prog::Kind::Left:
        trace.push_back("I-Left");
        return true;
    case Prog::Kind::Right:
        trace.push_back("I-Right");
        return true;
    case Prog::Kind::Rphase:
        trace.push_back("I-Rphase");
        return true;
    case Prog::Kind::Abs: {
        try {
            check_spanning(f->domain, {f->pattern});
        } catch (const TypeError &) {
            return false;
        }
        if (!check_iso_expr(f->body, trace))
            return false;
        trace.push_back("I-Abs");
        return true;
    }
    }
    return false;
}

inline bool check_iso_expr(const ExprPtr &e, std::vector<std::string> &trace) {
    switch (e->kind) {
    case Expr::Kind::Unit:
        trace.push_back("I-Unit");
        return true;
    case Expr::Kind::Var:
        trace.push_back("I-Var");
        return true;
    case Expr::Kind::Pair: {
        if (!check_iso_expr(e->first, trace) || !check_iso_expr(e->second, trace))
            return false;
        trace.push_back("I-Pair");
        return true;
    }
    case Expr::Kind::TryCatch: {
        std::vector<std::string> t1 = trace;
        if (check_iso_expr(e->first, t1)) {
            trace = t1;
            trace.push_back("I-Try");
            return true;
        }
        if (check_iso_expr(e->second, trace)) {
            trace.push_back("I-Catch");
            return true;
        }
        return false;
    }
    case Expr::Kind::App: {
        if (!check_iso_prog(e->prog, trace) || !check_iso_expr(e->arg, trace))
            return false;
        trace.push_back("I-App");
        return true;
    }
    case Expr::Kind::Ctrl: {
        if (!is_classical(e->scrutinee))
            return false;
        if (!check_iso_expr(e->scrutinee, trace))
            return false;
        std::vector<ExprPtr> patterns;
        for (const auto &br : e->branches)
            patterns.push_back(br.pattern);
        try {
            check_spanning(e->scrutinee_type, patterns);
        } catch (const TypeError &) {
            return false;
        }
        for (const auto &br : e->branches)
            if (!check_iso_expr(br.body, trace))
                return false;
        trace.push_back("I-Ctrl");
        return true;
    }
    }
    return false;
}

inline IsoFlag check_iso(const ExprPtr &e) {
    IsoFlag f;
    f.iso = check_iso_expr(e, f.trace);
    return f;
}

inline IsoFlag check_iso(const ProgPtr &p) {
    IsoFlag f;
    f.iso = check_iso_prog(p, f.trace);
    return f;
}

} // namespace qunity
