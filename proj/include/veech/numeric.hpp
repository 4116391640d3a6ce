#pragma once

#include "errors.hpp"
#include "exact.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

namespace veech {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double pi = std::numbers::pi;

inline CMatrix to_complex(const IntMatrix& m) {
    CMatrix c(static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols()));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) c(i, j) = cplx(m(i, j).convert_to<double>(), 0.0);
    return c;
}

inline CMatrix identity(Eigen::Index n) { return CMatrix::Identity(n, n); }

// <A, B> = sum conj(a_ij) b_ij
inline cplx frobenius_inner(const CMatrix& a, const CMatrix& b) { return (a.conjugate().cwiseProduct(b)).sum(); }

// ||A - l* B|| / ||A|| with l* the least-squares scalar; zero exactly when A is proportional to B.
inline double proj_distance(const CMatrix& a, const CMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw InvalidArgument("proj_distance: dimension mismatch");
    const double bb = b.squaredNorm();
    if (bb == 0.0) throw InvalidArgument("proj_distance: reference matrix is zero");
    const double an = a.norm();
    if (an == 0.0) return 0.0;
    const cplx lambda = frobenius_inner(b, a) / bb;
    return (a - lambda * b).norm() / an;
}

// Unit Frobenius norm, first entry above a relative threshold made real and positive.
inline CMatrix projective_normalize(const CMatrix& m) {
    const double nrm = m.norm();
    if (nrm == 0.0) throw InvalidArgument("cannot normalize the zero matrix");
    CMatrix out = m / nrm;
    for (Eigen::Index i = 0; i < out.size(); ++i) {
        const cplx v = out.data()[i];
        if (std::abs(v) > 1e-12) {
            out *= std::conj(v) / std::abs(v);
            break;
        }
    }
    return out;
}

inline CMatrix expm(const CMatrix& m) { return m.exp(); }

inline CMatrix inverse(const CMatrix& m) {
    Eigen::PartialPivLU<CMatrix> lu(m);
    const double rc = lu.rcond();
    if (!(rc > 1e3 * std::numeric_limits<double>::epsilon()))
        throw SingularError("matrix is numerically singular (rcond " + std::to_string(rc) + ")");
    return lu.inverse();
}

inline std::vector<cplx> eigenvalues(const CMatrix& m) {
    Eigen::ComplexEigenSolver<CMatrix> es(m, false);
    if (es.info() != Eigen::Success) throw NumericConsistencyError("eigenvalue solver did not converge");
    std::vector<cplx> out(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    std::sort(out.begin(), out.end(), [](cplx a, cplx b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return out;
}

// Max distance over a greedy nearest-neighbour matching of two multisets of equal size.
inline double multiset_distance(std::vector<cplx> a, std::vector<cplx> b) {
    if (a.size() != b.size()) throw InvalidArgument("multiset_distance: size mismatch");
    double worst = 0.0;
    for (const cplx& x : a) {
        auto best = b.begin();
        for (auto it = b.begin(); it != b.end(); ++it)
            if (std::abs(*it - x) < std::abs(*best - x)) best = it;
        worst = std::max(worst, std::abs(*best - x));
        b.erase(best);
    }
    return worst;
}

inline cplx zeta_power(int i) { return std::polar(1.0, 2.0 * pi * (((i % 5) + 5) % 5) / 5.0); }

} // namespace veech
