#pragma once

#include <string>
#include <vector>

#include "qunity/circuit.hpp"
#include "qunity/matrix.hpp"
#include "qunity/typecheck.hpp"

namespace qunity {

// Checks that compiled circuits implement their denotations: the amplitude
// condition for Kraus operators and the garbage-summed bilinear condition for
// superoperators, both entrywise within a tolerance.

namespace verify_detail {

inline std::uint64_t encoding_index(const ValuePtr &v, int width, int shift_right) {
    std::string bits = encode(v);
    std::uint64_t idx = 0;
    for (char c : bits)
        idx = (idx << 1) | static_cast<std::uint64_t>(c == '1');
    // place the payload at the top `bits.size()` qubits of a `width`-qubit
    // register, keeping the remaining (lower) qubits zero
    (void)width;
    return idx << shift_right;
}

} // namespace verify_detail

// Amplitudes <enc(v'), 0_flag | U | enc(v), 0_prep> collected column by
// column; rows indexed by the output type's value basis.
inline CMat circuit_kraus_matrix(const LowLevelCircuit &c, const TypePtr &in_type,
                                 const TypePtr &out_type, int cap = 22) {
    c.check_invariants();
    if (c.context != 0)
        throw InternalError("kraus extraction expects a context-free circuit");
    if (c.garb != 0)
        throw InternalError("kraus extraction expects a garbage-free circuit");
    if (type_size(in_type) != c.in_data || type_size(out_type) != c.out_data)
        throw InternalError("kraus extraction: type widths do not match the circuit");
    auto in_values = values_of(in_type);
    auto out_values = values_of(out_type);
    CMat m(static_cast<Eigen::Index>(out_values.size()),
           static_cast<Eigen::Index>(in_values.size()));
    for (std::size_t j = 0; j < in_values.size(); ++j) {
        std::uint64_t in_idx = verify_detail::encoding_index(
            in_values[j], c.total, c.total - c.in_data);
        CVec state = simulate_basis_input(c, in_idx, cap);
        for (std::size_t i = 0; i < out_values.size(); ++i) {
            std::uint64_t out_idx = verify_detail::encoding_index(
                out_values[i], c.total, c.total - c.out_data);
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                state(static_cast<Eigen::Index>(out_idx));
        }
    }
    return m;
}

inline bool verify_kraus(const LowLevelCircuit &c, const CMat &expected,
                         const TypePtr &in_type, const TypePtr &out_type,
                         double tol = 1e-6, double *max_dev = nullptr, int cap = 22) {
    CMat got = circuit_kraus_matrix(c, in_type, out_type, cap);
    double dev = (got.rows() * got.cols()) == 0
                     ? 0.0
                     : (got - expected).cwiseAbs().maxCoeff();
    if (max_dev)
        *max_dev = dev;
    return dev <= tol;
}

// Superoperator entries per the garbage-summed condition:
//   <v1'| E(|v1><v2|) |v2'> =
//     sum_b <enc(v1'), 0_flag, b| U |enc(v1), 0_prep> <enc(v2), 0_prep| U^dag |enc(v2'), 0_flag, b>
inline Superop circuit_superop(const LowLevelCircuit &c, const TypePtr &in_type,
                               const TypePtr &out_type, int cap = 22) {
    c.check_invariants();
    if (c.context != 0)
        throw InternalError("superoperator extraction expects a context-free circuit");
    if (type_size(in_type) != c.in_data || type_size(out_type) != c.out_data)
        throw InternalError("superoperator extraction: type widths do not match the circuit");
    auto in_values = values_of(in_type);
    auto out_values = values_of(out_type);
    std::uint64_t din = in_values.size(), dout = out_values.size();
    int garb = c.garb;
    int flag = c.flag;
    int out_width = c.out_data;

    (void)flag; // flag qubits sit between out_data and garbage and stay zero
    // per input value: amps[v](b, v') = <enc(v'), 0_flag, b| U |enc(v), 0_prep>
    std::vector<CMat> amps(static_cast<std::size_t>(din));
    for (std::size_t j = 0; j < din; ++j) {
        std::uint64_t in_idx = verify_detail::encoding_index(
            in_values[j], c.total, c.total - c.in_data);
        CVec state = simulate_basis_input(c, in_idx, cap);
        CMat a = CMat::Zero(1ll << garb, static_cast<Eigen::Index>(dout));
        for (std::size_t i = 0; i < dout; ++i) {
            std::uint64_t base = verify_detail::encoding_index(
                out_values[i], c.total, c.total - out_width);
            for (std::uint64_t bbits = 0; bbits < (1ull << garb); ++bbits)
                a(static_cast<Eigen::Index>(bbits), static_cast<Eigen::Index>(i)) =
                    state(static_cast<Eigen::Index>(base | bbits));
        }
        amps[j] = a;
    }

    // E(|v1><v2|)(v1', v2') = sum_b amps[v1](b, v1') . conj(amps[v2](b, v2'))
    Superop s = superop_zero(static_cast<Eigen::Index>(din), static_cast<Eigen::Index>(dout));
    for (std::uint64_t v1 = 0; v1 < din; ++v1)
        for (std::uint64_t v2 = 0; v2 < din; ++v2) {
            CMat e = (amps[v2].adjoint() * amps[v1]).transpose();
            s.m.col(static_cast<Eigen::Index>(v1 * din + v2)) = vec_rm(e);
        }
    return s;
}

inline bool verify_superop(const LowLevelCircuit &c, const Superop &expected,
                           const TypePtr &in_type, const TypePtr &out_type,
                           double tol = 1e-6, double *max_dev = nullptr, int cap = 22) {
    Superop got = circuit_superop(c, in_type, out_type, cap);
    double dev =
        (got.m.rows() * got.m.cols()) == 0 ? 0.0 : (got.m - expected.m).cwiseAbs().maxCoeff();
    if (max_dev)
        *max_dev = dev;
    return dev <= tol;
}

} // namespace qunity
