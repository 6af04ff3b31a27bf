// Command-line front end: check, simulate, compile, verify, and classical-run
// .qunity files.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "qunity/qunity.hpp"

namespace {

using namespace qunity;

std::string read_file(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Checked {
    Expanded term;
    DerivPtr deriv;       // most specific derivation
    bool pure = false;    // pure expression / coherent program
    std::string judgment; // printable judgment
};

Checked check_file(const std::string &path) {
    Checked out;
    SourceProgram src = parse(read_file(path));
    out.term = expand(src);
    if (out.term.cat == Expanded::Cat::Type)
        throw Error("entry point is a type, not an expression or program");
    if (out.term.cat == Expanded::Cat::Expr) {
        try {
            out.deriv = infer_pure_expr({}, {}, out.term.expr);
            out.pure = true;
            out.judgment = ". ; . |- main : " + print_type(out.deriv->type) +
                           "    (pure expression)";
        } catch (const TypeError &) {
            out.deriv = infer_mixed_expr({}, out.term.expr);
            out.judgment = ". ||- main : " + print_type(out.deriv->type) +
                           "    (mixed expression)";
        }
    } else {
        out.deriv = infer_prog(out.term.prog);
        out.pure = out.deriv->prog_type.coherent;
        out.judgment = "|- main : " + print_prog_type(out.deriv->prog_type) +
                       (out.pure ? "    (coherent map)" : "    (quantum channel)");
    }
    validate(out.deriv);
    return out;
}

// The derivation used for compilation and mixed semantics: expressions become
// mixed judgments, programs become channels.
DerivPtr as_mixed(const Checked &c) {
    if (c.term.cat == Expanded::Cat::Expr)
        return c.pure ? infer_mixed_expr({}, c.term.expr) : c.deriv;
    return infer_prog_channel(c.term.prog);
}

ValuePtr parse_value_literal(const std::string &text, const TypePtr &t) {
    SourceProgram sp;
    sp.main_term = parse_term(text);
    Expander ex(sp);
    Expanded e = ex.expand_main();
    if (e.cat != Expanded::Cat::Expr)
        throw Error("--input must be a value literal");
    // evaluate the closed classical expression to a value
    DerivPtr d = infer_pure_expr({}, {}, e.expr);
    if (!type_equal(d->type, t))
        throw Error("--input has type " + print_type(d->type) + ", expected " + print_type(t));
    if (!is_classical(e.expr))
        throw Error("--input must be a classical value literal");
    PartialResult r = classical_pure_eval(d, {}, {});
    if (!r)
        throw Error("--input does not evaluate to a value");
    return *r;
}

int cmd_check(const std::string &path, bool show_derivation) {
    auto t0 = std::chrono::steady_clock::now();
    Checked c = check_file(path);
    std::cout << c.judgment << "\n";
    if (show_derivation)
        std::cout << print_derivation(c.deriv);
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::steady_clock::now() - t0)
                  .count();
    std::cerr << "// checked in " << ms << " ms\n";
    return 0;
}

int cmd_simulate(const std::string &path, bool force_mixed, const std::string &input,
                 const std::string &out_path) {
    Checked c = check_file(path);
    std::ostringstream body;
    if (c.term.cat == Expanded::Cat::Expr && c.pure && !force_mixed) {
        CMat m = pure_expr_sem(c.deriv, {});
        std::cout << "pure state over " << print_type(c.deriv->type) << ":\n";
        dump_matrix(body, m);
    } else if (c.term.cat == Expanded::Cat::Expr) {
        DerivPtr d = as_mixed(c);
        CMat rho = mixed_expr_sem(d).apply(CMat::Ones(1, 1));
        std::cout << "output density over " << print_type(d->type) << ":\n";
        dump_matrix(body, rho);
    } else if (c.pure && !force_mixed) {
        CMat m = pure_prog_sem(c.deriv);
        if (!input.empty()) {
            ValuePtr v = parse_value_literal(input, c.deriv->prog_type.domain);
            CVec col = m.col(static_cast<Eigen::Index>(value_index(v)));
            std::cout << "output state over " << print_type(c.deriv->prog_type.codomain)
                      << ":\n";
            dump_matrix(body, col);
        } else {
            std::cout << "operator " << print_prog_type(c.deriv->prog_type) << ":\n";
            dump_matrix(body, m);
        }
    } else {
        DerivPtr d = as_mixed(c);
        Superop s = mixed_prog_sem(d);
        if (!input.empty()) {
            ValuePtr v = parse_value_literal(input, d->prog_type.domain);
            std::uint64_t i = value_index(v);
            CMat rho = CMat::Zero(s.dim_in, s.dim_in);
            rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 1.0;
            std::cout << "output density over " << print_type(d->prog_type.codomain) << ":\n";
            dump_matrix(body, s.apply(rho));
        } else {
            std::cout << "superoperator " << print_prog_type(d->prog_type) << ":\n";
            dump_matrix(body, s.m);
        }
    }
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        out << body.str() << "\n";
        std::cout << "written to " << out_path << "\n";
    } else {
        std::cout << body.str() << "\n";
    }
    return 0;
}

LowLevelCircuit compile_checked(const Checked &c) {
    if (c.term.cat == Expanded::Cat::Expr)
        return c.pure ? compile(c.deriv) : compile(as_mixed(c));
    return compile(c.deriv);
}

void print_stats(const LowLevelCircuit &cc) {
    std::cout << "circuit: " << cc.total << " qubits, " << gate_count(cc) << " gates, prep "
              << cc.prep << ", flag " << cc.flag << ", garbage " << cc.garb << "\n";
}

int cmd_compile(const std::string &path, const std::string &qasm_path,
                const std::string &json_path) {
    Checked c = check_file(path);
    LowLevelCircuit cc = compile_checked(c);
    print_stats(cc);
    if (!qasm_path.empty()) {
        std::ofstream out(qasm_path);
        emit_qasm3(out, cc);
        std::cout << "qasm written to " << qasm_path << "\n";
    } else if (json_path.empty()) {
        emit_qasm3(std::cout, cc);
    }
    if (!json_path.empty()) {
        std::ofstream out(json_path);
        dump_circuit_json(out, cc);
        std::cout << "json written to " << json_path << "\n";
    }
    return 0;
}

int cmd_verify(const std::string &path, int cap) {
    Checked c = check_file(path);
    auto t0 = std::chrono::steady_clock::now();
    double dev = 0;
    bool ok = false;
    if (c.term.cat == Expanded::Cat::Expr && c.pure) {
        LowLevelCircuit cc = compile(c.deriv);
        print_stats(cc);
        ok = verify_kraus(cc, pure_expr_sem(c.deriv, {}), unit_type(), c.deriv->type, 1e-6,
                          &dev, cap);
    } else if (c.term.cat == Expanded::Cat::Expr) {
        LowLevelCircuit cc = compile(c.deriv);
        print_stats(cc);
        ok = verify_superop(cc, mixed_expr_sem(c.deriv), unit_type(), c.deriv->type, 1e-6,
                            &dev, cap);
    } else if (c.pure) {
        LowLevelCircuit cc = compile(c.deriv);
        print_stats(cc);
        ok = verify_kraus(cc, pure_prog_sem(c.deriv), c.deriv->prog_type.domain,
                          c.deriv->prog_type.codomain, 1e-6, &dev, cap);
    } else {
        LowLevelCircuit cc = compile(c.deriv);
        print_stats(cc);
        ok = verify_superop(cc, mixed_prog_sem(c.deriv), c.deriv->prog_type.domain,
                            c.deriv->prog_type.codomain, 1e-6, &dev, cap);
    }
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::steady_clock::now() - t0)
                  .count();
    std::cout << (ok ? "PASS" : "FAIL") << ": max deviation " << dev << " (tolerance 1e-6)\n";
    std::cerr << "// verified in " << ms << " ms\n";
    return ok ? 0 : 1;
}

int cmd_classical(const std::string &path, const std::string &input) {
    Checked c = check_file(path);
    if (c.term.cat == Expanded::Cat::Expr) {
        if (!is_classical(c.term.expr))
            throw Error("the term is not in the classical sublanguage");
        DerivPtr d = as_mixed(c);
        PartialResult r = classical_mixed_eval(d, {});
        std::cout << (r ? print_value(*r) : "undefined") << "\n";
        return 0;
    }
    if (!is_classical(c.term.prog))
        throw Error("the program is not in the classical sublanguage");
    if (input.empty())
        throw Error("a program needs --input <value>");
    DerivPtr d = as_mixed(c);
    ValuePtr v = parse_value_literal(input, d->prog_type.domain);
    PartialResult r = classical_mixed_prog_eval(d, v);
    std::cout << (r ? print_value(*r) : "undefined") << "\n";
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Qunity toolchain: type check, simulate, compile, and verify"};
    app.require_subcommand(1);

    std::string path, input, qasm_path, json_path, out_path;
    bool show_derivation = false, force_mixed = false;
    int cap = 22;

    auto *check = app.add_subcommand("check", "type-check a file and print its judgment");
    check->add_option("file", path)->required();
    check->add_flag("--show-derivation", show_derivation, "print the derivation tree");

    auto *simulate = app.add_subcommand("simulate", "evaluate the denotational semantics");
    simulate->add_option("file", path)->required();
    simulate->add_flag("--mixed", force_mixed, "use the mixed (density) semantics");
    simulate->add_option("--input", input, "input value literal (programs only)");
    simulate->add_option("--out", out_path, "write the matrix dump to a file");

    auto *compilec = app.add_subcommand("compile", "compile to a qubit circuit");
    compilec->add_option("file", path)->required();
    compilec->add_option("--qasm3", qasm_path, "write OpenQASM 3 to a file");
    compilec->add_option("--json", json_path, "write the circuit JSON dump to a file");

    auto *verify = app.add_subcommand("verify", "compile, simulate, and compare against the "
                                                "denotational semantics");
    verify->add_option("file", path)->required();
    verify->add_option("--cap", cap, "simulation qubit cap (default 22)");

    auto *classical = app.add_subcommand("classical", "run the classical interpreter");
    classical->add_option("file", path)->required();
    classical->add_option("--input", input, "input value literal (programs only)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (check->parsed())
            return cmd_check(path, show_derivation);
        if (simulate->parsed())
            return cmd_simulate(path, force_mixed, input, out_path);
        if (compilec->parsed())
            return cmd_compile(path, qasm_path, json_path);
        if (verify->parsed())
            return cmd_verify(path, cap);
        if (classical->parsed())
            return cmd_classical(path, input);
    } catch (const InternalError &e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    } catch (const Error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception &e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
