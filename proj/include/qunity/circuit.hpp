#pragma once

#include <cmath>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "qunity/matrix.hpp"

namespace qunity {

// ---------------------------------------------------------------------------
// Gates
// ---------------------------------------------------------------------------

struct Gate {
    enum class Kind { U3, GlobalPhase, Swap, Controlled };
    Kind kind;
    double theta = 0, phi = 0, lam = 0; // U3
    int target = -1;                    // U3
    double phase = 0;                   // GlobalPhase
    int a = -1, b = -1;                 // Swap
    std::vector<std::pair<int, bool>> controls; // (qubit, positive polarity)
    std::shared_ptr<const Gate> inner;
};

inline Gate gate_u3(double theta, double phi, double lam, int target) {
    Gate g;
    g.kind = Gate::Kind::U3;
    g.theta = theta;
    g.phi = phi;
    g.lam = lam;
    g.target = target;
    return g;
}

inline Gate gate_x(int target) { return gate_u3(M_PI, 0.0, M_PI, target); }

inline Gate gate_phase(double r) {
    Gate g;
    g.kind = Gate::Kind::GlobalPhase;
    g.phase = r;
    return g;
}

inline Gate gate_swap(int a, int b) {
    Gate g;
    g.kind = Gate::Kind::Swap;
    g.a = a;
    g.b = b;
    return g;
}

inline Gate gate_controlled(std::vector<std::pair<int, bool>> controls, Gate inner) {
    if (controls.empty())
        return inner;
    if (inner.kind == Gate::Kind::Controlled) {
        // merge nested controls into one modifier list
        controls.insert(controls.end(), inner.controls.begin(), inner.controls.end());
        Gate g;
        g.kind = Gate::Kind::Controlled;
        g.controls = std::move(controls);
        g.inner = inner.inner;
        return g;
    }
    Gate g;
    g.kind = Gate::Kind::Controlled;
    g.controls = std::move(controls);
    g.inner = std::make_shared<Gate>(std::move(inner));
    return g;
}

inline Gate gate_cnot(int control, int target) {
    return gate_controlled({{control, true}}, gate_x(target));
}

inline Gate remap_gate(const Gate &g, const std::vector<int> &slots) {
    Gate out = g;
    switch (g.kind) {
    case Gate::Kind::U3:
        out.target = slots[static_cast<std::size_t>(g.target)];
        break;
    case Gate::Kind::GlobalPhase:
        break;
    case Gate::Kind::Swap:
        out.a = slots[static_cast<std::size_t>(g.a)];
        out.b = slots[static_cast<std::size_t>(g.b)];
        break;
    case Gate::Kind::Controlled: {
        out.controls.clear();
        for (auto [q, pol] : g.controls)
            out.controls.push_back({slots[static_cast<std::size_t>(q)], pol});
        out.inner = std::make_shared<Gate>(remap_gate(*g.inner, slots));
        break;
    }
    }
    return out;
}

inline Gate adjoint_gate(const Gate &g) {
    switch (g.kind) {
    case Gate::Kind::U3:
        return gate_u3(-g.theta, -g.lam, -g.phi, g.target);
    case Gate::Kind::GlobalPhase:
        return gate_phase(-g.phase);
    case Gate::Kind::Swap:
        return g;
    case Gate::Kind::Controlled: {
        Gate out = g;
        out.inner = std::make_shared<Gate>(adjoint_gate(*g.inner));
        return out;
    }
    }
    throw InternalError("unhandled gate kind");
}

// ---------------------------------------------------------------------------
// Circuits with prep/flag/garbage register bookkeeping
// ---------------------------------------------------------------------------

// Qubit layout (qubit 0 is the most significant bit of basis indices):
//   input:  [context][in_data][prep]
//   output: [context][out_data][flag][garbage]
// The circuit implements a Kraus operator (garb = 0) per the amplitude
// condition of the low-level implementation definition, or a superoperator
// when garbage qubits are discarded.
struct LowLevelCircuit {
    int context = 0;
    int in_data = 0;
    int prep = 0;
    int out_data = 0;
    int flag = 0;
    int garb = 0;
    int total = 0;
    std::vector<Gate> gates;

    void check_invariants() const {
        if (context + in_data + prep != total || context + out_data + flag + garb != total)
            throw InternalError("circuit register spans do not partition the qubits");
    }
};

inline void gate_qubits(const Gate &g, std::vector<int> &out) {
    switch (g.kind) {
    case Gate::Kind::U3:
        out.push_back(g.target);
        break;
    case Gate::Kind::GlobalPhase:
        break;
    case Gate::Kind::Swap:
        out.push_back(g.a);
        out.push_back(g.b);
        break;
    case Gate::Kind::Controlled:
        for (auto [q, pol] : g.controls)
            out.push_back(q);
        gate_qubits(*g.inner, out);
        break;
    }
}

// Gates reversed and inverted; prep and flag registers exchange roles. Only
// meaningful for garbage-free circuits.
inline LowLevelCircuit adjoint_circuit(const LowLevelCircuit &c) {
    if (c.garb != 0)
        throw CompileError("cannot take the adjoint of a circuit with garbage qubits");
    LowLevelCircuit out;
    out.context = c.context;
    out.in_data = c.out_data;
    out.prep = c.flag;
    out.out_data = c.in_data;
    out.flag = c.prep;
    out.garb = 0;
    out.total = c.total;
    for (auto it = c.gates.rbegin(); it != c.gates.rend(); ++it)
        out.gates.push_back(adjoint_gate(*it));
    out.check_invariants();
    return out;
}

// Emits swap gates realizing a wire permutation: the content currently at
// slot s ends up at slot perm[s].
inline void emit_wire_permutation(std::vector<Gate> &gates, std::vector<int> perm) {
    for (std::size_t i = 0; i < perm.size(); ++i) {
        while (perm[i] != static_cast<int>(i)) {
            int j = perm[i];
            gates.push_back(gate_swap(static_cast<int>(i), j));
            std::swap(perm[i], perm[static_cast<std::size_t>(j)]);
        }
    }
}

// ---------------------------------------------------------------------------
// Simulation
// ---------------------------------------------------------------------------

namespace detail {

inline bool controls_satisfied(const std::vector<std::pair<int, bool>> &controls,
                               std::uint64_t index, int n) {
    for (auto [q, pol] : controls) {
        bool bit = (index >> (n - 1 - q)) & 1u;
        if (bit != pol)
            return false;
    }
    return true;
}

inline void apply_gate_impl(CVec &state, const Gate &g,
                            std::vector<std::pair<int, bool>> &controls, int n) {
    switch (g.kind) {
    case Gate::Kind::Controlled: {
        std::size_t before = controls.size();
        controls.insert(controls.end(), g.controls.begin(), g.controls.end());
        apply_gate_impl(state, *g.inner, controls, n);
        controls.resize(before);
        return;
    }
    case Gate::Kind::GlobalPhase: {
        Complex ph = std::exp(Complex(0, g.phase));
        for (std::uint64_t i = 0; i < static_cast<std::uint64_t>(state.size()); ++i)
            if (controls_satisfied(controls, i, n))
                state(static_cast<Eigen::Index>(i)) *= ph;
        return;
    }
    case Gate::Kind::U3: {
        Complex m00 = std::cos(g.theta / 2);
        Complex m01 = -std::exp(Complex(0, g.lam)) * std::sin(g.theta / 2);
        Complex m10 = std::exp(Complex(0, g.phi)) * std::sin(g.theta / 2);
        Complex m11 = std::exp(Complex(0, g.phi + g.lam)) * std::cos(g.theta / 2);
        std::uint64_t mask = 1ull << (n - 1 - g.target);
        for (std::uint64_t i = 0; i < static_cast<std::uint64_t>(state.size()); ++i) {
            if (i & mask)
                continue;
            if (!controls_satisfied(controls, i, n))
                continue;
            std::uint64_t j = i | mask;
            Complex a0 = state(static_cast<Eigen::Index>(i));
            Complex a1 = state(static_cast<Eigen::Index>(j));
            state(static_cast<Eigen::Index>(i)) = m00 * a0 + m01 * a1;
            state(static_cast<Eigen::Index>(j)) = m10 * a0 + m11 * a1;
        }
        return;
    }
    case Gate::Kind::Swap: {
        std::uint64_t ma = 1ull << (n - 1 - g.a);
        std::uint64_t mb = 1ull << (n - 1 - g.b);
        for (std::uint64_t i = 0; i < static_cast<std::uint64_t>(state.size()); ++i) {
            if ((i & ma) && !(i & mb)) {
                if (!controls_satisfied(controls, i, n))
                    continue;
                std::uint64_t j = (i & ~ma) | mb;
                std::swap(state(static_cast<Eigen::Index>(i)),
                          state(static_cast<Eigen::Index>(j)));
            }
        }
        return;
    }
    }
}

} // namespace detail

inline void apply_gate(CVec &state, const Gate &g, int n) {
    std::vector<std::pair<int, bool>> controls;
    detail::apply_gate_impl(state, g, controls, n);
}

inline void apply_circuit(CVec &state, const LowLevelCircuit &c) {
    for (const auto &g : c.gates)
        apply_gate(state, g, c.total);
}

// State vector produced by running the circuit on a basis input.
inline CVec simulate_basis_input(const LowLevelCircuit &c, std::uint64_t index, int cap = 22) {
    if (c.total > cap)
        throw CompileError("simulation cap exceeded: circuit uses " +
                           std::to_string(c.total) + " qubits, cap is " + std::to_string(cap));
    CVec state = CVec::Zero(1ll << c.total);
    state(static_cast<Eigen::Index>(index)) = 1.0;
    apply_circuit(state, c);
    return state;
}

// Dense unitary of the whole circuit. Only sensible for small circuits; the
// verification paths use simulate_basis_input on the valid encodings instead.
inline CMat simulate_unitary(const LowLevelCircuit &c, int cap = 22) {
    if (c.total > cap)
        throw CompileError("simulation cap exceeded: circuit uses " +
                           std::to_string(c.total) + " qubits, cap is " + std::to_string(cap));
    std::uint64_t dim = 1ull << c.total;
    CMat u(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::uint64_t j = 0; j < dim; ++j)
        u.col(static_cast<Eigen::Index>(j)) = simulate_basis_input(c, j, cap);
    return u;
}

// ---------------------------------------------------------------------------
// Emission
// ---------------------------------------------------------------------------

namespace detail {

inline std::string fmt_angle(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

inline void emit_gate(std::ostream &os, const Gate &g,
                      std::vector<std::pair<int, bool>> inherited) {
    if (g.kind == Gate::Kind::Controlled) {
        inherited.insert(inherited.end(), g.controls.begin(), g.controls.end());
        emit_gate(os, *g.inner, std::move(inherited));
        return;
    }
    // negative-polarity controls are realized by X sandwiching
    for (auto [q, pol] : inherited)
        if (!pol)
            os << "x q[" << q << "];\n";
    std::string mods;
    std::string ctrl_operands;
    for (auto [q, pol] : inherited) {
        mods += "ctrl @ ";
        ctrl_operands += "q[" + std::to_string(q) + "], ";
    }
    switch (g.kind) {
    case Gate::Kind::U3:
        os << mods << "U(" << fmt_angle(g.theta) << ", " << fmt_angle(g.phi) << ", "
           << fmt_angle(g.lam) << ") " << ctrl_operands << "q[" << g.target << "];\n";
        break;
    case Gate::Kind::GlobalPhase:
        if (!mods.empty()) {
            ctrl_operands.resize(ctrl_operands.size() - 2); // trailing ", "
            os << mods << "gphase(" << fmt_angle(g.phase) << ") " << ctrl_operands << ";\n";
        } else {
            os << "gphase(" << fmt_angle(g.phase) << ");\n";
        }
        break;
    case Gate::Kind::Swap:
        os << mods << "swap " << ctrl_operands << "q[" << g.a << "], q[" << g.b << "];\n";
        break;
    case Gate::Kind::Controlled:
        break;
    }
    for (auto [q, pol] : inherited)
        if (!pol)
            os << "x q[" << q << "];\n";
}

} // namespace detail

inline void emit_qasm3(std::ostream &os, const LowLevelCircuit &c) {
    c.check_invariants();
    os << "OPENQASM 3.0;\n";
    os << "include \"stdgates.inc\";\n";
    os << "// context qubits: [0, " << c.context << ")\n";
    os << "// input qubits:   [" << c.context << ", " << c.context + c.in_data << ")\n";
    os << "// prep qubits:    [" << c.context + c.in_data << ", " << c.total << ")\n";
    os << "// output qubits:  [" << c.context << ", " << c.context + c.out_data << ")\n";
    os << "// flag qubits:    [" << c.context + c.out_data << ", "
       << c.context + c.out_data + c.flag << ")\n";
    os << "// garbage qubits: [" << c.context + c.out_data + c.flag << ", " << c.total << ")\n";
    if (c.total > 0)
        os << "qubit[" << c.total << "] q;\n";
    for (const auto &g : c.gates)
        detail::emit_gate(os, g, {});
}

inline std::string emit_qasm3(const LowLevelCircuit &c) {
    std::ostringstream os;
    emit_qasm3(os, c);
    return os.str();
}

inline std::size_t gate_count(const LowLevelCircuit &c) { return c.gates.size(); }

namespace detail {

inline void dump_gate_json(std::ostream &os, const Gate &g) {
    switch (g.kind) {
    case Gate::Kind::U3:
        os << "{\"kind\": \"u3\", \"theta\": " << g.theta << ", \"phi\": " << g.phi
           << ", \"lambda\": " << g.lam << ", \"target\": " << g.target << "}";
        break;
    case Gate::Kind::GlobalPhase:
        os << "{\"kind\": \"gphase\", \"phase\": " << g.phase << "}";
        break;
    case Gate::Kind::Swap:
        os << "{\"kind\": \"swap\", \"a\": " << g.a << ", \"b\": " << g.b << "}";
        break;
    case Gate::Kind::Controlled: {
        os << "{\"kind\": \"ctrl\", \"controls\": [";
        for (std::size_t i = 0; i < g.controls.size(); ++i) {
            if (i)
                os << ", ";
            os << "[" << g.controls[i].first << ", " << (g.controls[i].second ? 1 : 0) << "]";
        }
        os << "], \"gate\": ";
        dump_gate_json(os, *g.inner);
        os << "}";
        break;
    }
    }
}

} // namespace detail

inline void dump_circuit_json(std::ostream &os, const LowLevelCircuit &c) {
    os << "{\"qubits\": " << c.total << ", \"context\": " << c.context
       << ", \"in_data\": " << c.in_data << ", \"prep\": " << c.prep
       << ", \"out_data\": " << c.out_data << ", \"flag\": " << c.flag
       << ", \"garbage\": " << c.garb << ", \"gates\": [";
    for (std::size_t i = 0; i < c.gates.size(); ++i) {
        if (i)
            os << ", ";
        detail::dump_gate_json(os, c.gates[i]);
    }
    os << "]}";
}

} // namespace qunity
