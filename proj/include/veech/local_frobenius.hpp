#pragma once

#include "errors.hpp"
#include "kz_connection.hpp"
#include "numeric.hpp"
#include "path.hpp"
#include "transport.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace veech {

// Y(b) = Q(b) b^{hbar A} near the pole zeta^pole, with b = t - zeta^pole.
struct LocalSeries {
    int level = 0;
    int pole = 5;
    double hbar = 0.0;
    CMatrix residue;
    std::vector<CMatrix> q;   // q[0] = Id
    double radius = 0.0;      // distance to the nearest other pole
    std::size_t ad_terms = 0; // largest number of Neumann terms used for one coefficient

    int order() const { return int(q.size()) - 1; }
    cplx center() const { return zeta_power(pole); }

    CMatrix value(cplx b) const {
        CMatrix acc = q.back();
        for (int r = order() - 1; r >= 0; --r) acc = (acc * b).eval() + q[r];
        return acc;
    }

    CMatrix derivative(cplx b) const {
        const Eigen::Index n = residue.rows();
        if (order() == 0) return CMatrix::Zero(n, n);
        CMatrix acc = double(order()) * q.back();
        for (int r = order() - 1; r >= 1; --r) acc = (acc * b).eval() + double(r) * q[r];
        return acc;
    }
};

namespace detail {

inline CMatrix ad(const CMatrix& a, const CMatrix& x) { return a * x - x * a; }

inline double ad_spectral_bound(double hbar, const CMatrix& a) {
    const auto ev = eigenvalues(a);
    double spread = 0.0;
    for (const auto& x : ev)
        for (const auto& y : ev) spread = std::max(spread, std::abs(x - y));
    return std::abs(hbar) * spread;
}

} // namespace detail

// Coefficients from (r - hbar ad A) q_r = -hbar sum_{l=1..r} C_l q_{r-l}, C_l = sum_{j != pole} A_j / (zeta^j - zeta^pole)^l,
// inverting the left side with its Neumann series in hbar ad A / r.
inline LocalSeries q_series(const PulledBackConnection& conn, int pole, int order, double term_cutoff = 1e-15) {
    if (pole < 1 || pole > 5) throw InvalidPole("pole index must lie in 1..5");
    if (order < 0) throw InvalidArgument("series order must be non-negative");
    LocalSeries s;
    s.level = conn.level();
    s.pole = pole;
    s.hbar = conn.hbar_value();
    s.residue = conn.residue(pole);
    const Eigen::Index n = conn.dim();
    s.radius = std::numeric_limits<double>::infinity();
    for (int j = 1; j <= 5; ++j)
        if (j != pole) s.radius = std::min(s.radius, std::abs(zeta_power(j) - zeta_power(pole)));
    s.q.push_back(identity(n));

    const double spread = order > 0 ? detail::ad_spectral_bound(s.hbar, s.residue) : 0.0;
    if (order > 0 && spread >= 1.0)
        throw SpectralRadiusError("|hbar| times the eigenvalue spread of the residue is " + std::to_string(spread) +
                                  ", the ad-inverse series does not converge");

    std::vector<CMatrix> C(order + 1);
    for (int l = 1; l <= order; ++l) {
        C[l] = CMatrix::Zero(n, n);
        for (int j = 1; j <= 5; ++j)
            if (j != pole) C[l] += conn.residue(j) / std::pow(zeta_power(j) - zeta_power(pole), l);
    }
    for (int r = 1; r <= order; ++r) {
        CMatrix rhs = CMatrix::Zero(n, n);
        for (int l = 1; l <= r; ++l) rhs -= s.hbar * (C[l] * s.q[r - l]);
        CMatrix term = rhs / double(r);
        CMatrix acc = term;
        const double scale = std::max(acc.norm(), 1e-300);
        std::size_t terms = 1;
        for (; terms < 500; ++terms) {
            term = (s.hbar / double(r)) * detail::ad(s.residue, term);
            acc += term;
            if (term.norm() <= term_cutoff * scale) break;
        }
        if (terms >= 500) throw SpectralRadiusError("ad-inverse series failed to converge");
        s.ad_terms = std::max(s.ad_terms, terms);
        s.q.push_back(std::move(acc));
    }
    return s;
}

inline LocalSeries q_series(int k, int pole, int order, double term_cutoff = 1e-15) {
    return q_series(PulledBackConnection(k), pole, order, term_cutoff);
}

// b Q' - hbar [A, Q] + hbar sum_{j != pole} A_j b Q / ((zeta^j - zeta^pole) - b)
inline CMatrix frobenius_residual(const LocalSeries& s, const PulledBackConnection& conn, cplx b) {
    const CMatrix Q = s.value(b);
    CMatrix out = b * s.derivative(b) - s.hbar * detail::ad(s.residue, Q);
    for (int j = 1; j <= 5; ++j) {
        if (j == s.pole) continue;
        const cplx d = zeta_power(j) - zeta_power(s.pole);
        out += s.hbar * (conn.residue(j) * Q) * (b / (d - b));
    }
    return out;
}

// Raises the order until the residual at |b| = radius drops below tol (cap 40).
inline LocalSeries adaptive_q_series(const PulledBackConnection& conn, int pole, double radius, double tol,
                                     int max_order = 40) {
    if (!(radius > 0.0)) throw InvalidArgument("evaluation radius must be positive");
    for (int order = 2;; order += 2) {
        order = std::min(order, max_order);
        LocalSeries s = q_series(conn, pole, order);
        if (radius >= s.radius / 2.0)
            throw SeriesRadiusError("radius " + std::to_string(radius) + " exceeds half the pole separation");
        double worst = 0.0;
        for (int m = 0; m < 8; ++m) worst = std::max(worst, frobenius_residual(s, conn, std::polar(radius, 2 * pi * m / 8 + 0.1)).norm());
        if (worst < tol || order >= max_order) return s;
    }
}

// The cut is the ray at angle `cut_angle`; arguments are taken in (cut_angle, cut_angle + 2 pi).
struct BranchSpec {
    double cut_angle = 0.0;

    static BranchSpec principal() { return {-pi}; }

    cplx log(cplx b) const {
        if (b == cplx(0.0)) throw SingularError("logarithm at b = 0");
        double phi = std::arg(b) - cut_angle;
        phi -= 2.0 * pi * std::floor(phi / (2.0 * pi));
        if (phi <= 1e-15 * 2.0 * pi || phi >= 2.0 * pi * (1.0 - 1e-15))
            throw BranchError("point lies on the branch cut");
        return {std::log(std::abs(b)), cut_angle + phi};
    }
};

inline CMatrix matrix_branch_power(cplx b, const CMatrix& exponent, const BranchSpec& branch = {}) {
    return expm(branch.log(b) * exponent);
}

inline void check_local_radius(const LocalSeries& s, double eps) {
    if (!(eps > 0.0) || eps >= s.radius / 2.0)
        throw SeriesRadiusError("local radius " + std::to_string(eps) + " must lie in (0, " + std::to_string(s.radius / 2.0) + ")");
}

// Transport along the half circle b = eps e^{i theta}, theta from start_angle through a half turn
// (anticlockwise for orientation +1).
inline CMatrix semicircle_transport(const LocalSeries& s, double eps, int orientation = +1, double start_angle = pi / 2) {
    if (orientation != 1 && orientation != -1) throw InvalidArgument("orientation must be +1 or -1");
    check_local_radius(s, eps);
    const cplx b0 = std::polar(eps, start_angle);
    const cplx b1 = std::polar(eps, start_angle + orientation * pi);
    return s.value(b1) * expm(cplx(0.0, orientation * pi * s.hbar) * s.residue) * inverse(s.value(b0));
}

inline CMatrix loop_transport(const LocalSeries& s, cplx b, int orientation = +1) {
    check_local_radius(s, std::abs(b));
    const CMatrix Q = s.value(b);
    return Q * expm(cplx(0.0, 2.0 * pi * orientation * s.hbar) * s.residue) * inverse(Q);
}

inline PathSpec semicircle_path(int pole, double eps, int orientation = +1, double start_angle = pi / 2) {
    return PathSpec({arc(zeta_power(pole), eps, start_angle, start_angle + orientation * pi, true)});
}

inline PathSpec loop_path(int pole, double eps, double start_angle, int orientation = +1) {
    return PathSpec({arc(zeta_power(pole), eps, start_angle, start_angle + orientation * 2 * pi, true)});
}

struct SignCheck {
    double distance_plus = 0.0;  // ODE vs Q exp(+i pi hbar A) Q^-1
    double distance_minus = 0.0; // ODE vs Q exp(-i pi hbar A) Q^-1
    int preferred_sign = +1;
};

// Compares both signs of the half-turn exponential against direct ODE transport on the anticlockwise semicircle.
inline SignCheck semicircle_sign_check(const PulledBackConnection& conn, int pole, double eps,
                                       const TransportSettings& settings = {}) {
    const LocalSeries s = adaptive_q_series(conn, pole, eps, 1e-14);
    const CMatrix ode = ode_transport(conn, semicircle_path(pole, eps, +1), settings).value;
    const cplx b0 = std::polar(eps, pi / 2), b1 = std::polar(eps, 3 * pi / 2);
    const CMatrix qi = inverse(s.value(b0));
    const CMatrix plus = s.value(b1) * expm(cplx(0.0, pi * s.hbar) * s.residue) * qi;
    const CMatrix minus = s.value(b1) * expm(cplx(0.0, -pi * s.hbar) * s.residue) * qi;
    SignCheck out;
    out.distance_plus = (plus - ode).norm();
    out.distance_minus = (minus - ode).norm();
    out.preferred_sign = out.distance_plus <= out.distance_minus ? +1 : -1;
    return out;
}

} // namespace veech
