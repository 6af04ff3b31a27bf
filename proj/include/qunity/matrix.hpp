#pragma once

#include <complex>
#include <ostream>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "qunity/error.hpp"

namespace qunity {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

inline CMat tensor(const CMat &a, const CMat &b) {
    CMat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// Block-diagonal embedding of two operators.
inline CMat direct_sum(const CMat &a, const CMat &b) {
    CMat out = CMat::Zero(a.rows() + b.rows(), a.cols() + b.cols());
    out.topLeftCorner(a.rows(), a.cols()) = a;
    out.bottomRightCorner(b.rows(), b.cols()) = b;
    return out;
}

inline CMat adjoint(const CMat &a) { return a.adjoint(); }

inline CMat compose(const CMat &a, const CMat &b) {
    if (a.cols() != b.rows())
        throw InternalError("matrix dimension mismatch in composition");
    return a * b;
}

// Partial trace over the trailing factor of H_keep (x) H_trace.
inline CMat partial_trace(const CMat &m, Eigen::Index keep_dim, Eigen::Index trace_dim) {
    if (m.rows() != keep_dim * trace_dim || m.cols() != keep_dim * trace_dim)
        throw InternalError("partial_trace dimension mismatch");
    CMat out = CMat::Zero(keep_dim, keep_dim);
    for (Eigen::Index i = 0; i < keep_dim; ++i)
        for (Eigen::Index j = 0; j < keep_dim; ++j)
            for (Eigen::Index k = 0; k < trace_dim; ++k)
                out(i, j) += m(i * trace_dim + k, j * trace_dim + k);
    return out;
}

// True iff every eigenvalue of m^dagger m is at most 1 + tol, i.e. m is a
// Kraus operator (norm-non-increasing).
inline bool kraus_check(const CMat &m, double tol = 1e-9) {
    if (m.rows() == 0 || m.cols() == 0)
        return true;
    CMat gram = m.adjoint() * m;
    Eigen::SelfAdjointEigenSolver<CMat> es(gram);
    return es.eigenvalues().maxCoeff() <= 1.0 + tol;
}

// Row-major vectorization: vec(rho)[i*cols + j] = rho(i, j).
inline CVec vec_rm(const CMat &rho) {
    CVec v(rho.rows() * rho.cols());
    for (Eigen::Index i = 0; i < rho.rows(); ++i)
        for (Eigen::Index j = 0; j < rho.cols(); ++j)
            v(i * rho.cols() + j) = rho(i, j);
    return v;
}

inline CMat unvec_rm(const CVec &v, Eigen::Index dim) {
    if (v.size() != dim * dim)
        throw InternalError("unvec dimension mismatch");
    CMat rho(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = 0; j < dim; ++j)
            rho(i, j) = v(i * dim + j);
    return rho;
}

// A superoperator on vectorized density matrices (row-major convention),
// mapping L(H_in) to L(H_out).
struct Superop {
    Eigen::Index dim_in = 0, dim_out = 0;
    CMat m; // (dim_out^2) x (dim_in^2)

    CMat apply(const CMat &rho) const {
        if (rho.rows() != dim_in || rho.cols() != dim_in)
            throw InternalError("superoperator input dimension mismatch");
        return unvec_rm(m * vec_rm(rho), dim_out);
    }
};

inline Superop superop_zero(Eigen::Index dim_in, Eigen::Index dim_out) {
    Superop s;
    s.dim_in = dim_in;
    s.dim_out = dim_out;
    s.m = CMat::Zero(dim_out * dim_out, dim_in * dim_in);
    return s;
}

// The conjugation superoperator rho -> E rho E^dagger.
inline Superop conjugation_superop(const CMat &e) {
    Superop s;
    s.dim_in = e.cols();
    s.dim_out = e.rows();
    s.m = tensor(e, e.conjugate());
    return s;
}

inline Superop superop_compose(const Superop &a, const Superop &b) {
    if (a.dim_in != b.dim_out)
        throw InternalError("superoperator dimension mismatch in composition");
    Superop s;
    s.dim_in = b.dim_in;
    s.dim_out = a.dim_out;
    s.m = a.m * b.m;
    return s;
}

inline CMat superop_apply(const Superop &s, const CMat &rho) { return s.apply(rho); }

inline bool is_hermitian(const CMat &m, double tol = 1e-9) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

inline bool is_positive_semidefinite(const CMat &m, double tol = 1e-9) {
    if (!is_hermitian(m, tol))
        return false;
    if (m.rows() == 0)
        return true;
    Eigen::SelfAdjointEigenSolver<CMat> es(m);
    return es.eigenvalues().minCoeff() >= -tol;
}

inline bool is_density_matrix(const CMat &m, double tol = 1e-9) {
    return is_positive_semidefinite(m, tol) && m.trace().real() <= 1.0 + tol &&
           std::abs(m.trace().imag()) <= tol;
}

// Text dump: dimensions plus row-major (re, im) pairs.
inline void dump_matrix(std::ostream &os, const CMat &m) {
    os << "{\"rows\": " << m.rows() << ", \"cols\": " << m.cols() << ", \"data\": [";
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (i || j)
                os << ", ";
            os << "[" << m(i, j).real() << ", " << m(i, j).imag() << "]";
        }
    }
    os << "]}";
}

} // namespace qunity
