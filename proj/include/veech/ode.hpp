#pragma once

#include "errors.hpp"
#include "numeric.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <string>

namespace veech {

struct OdeOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    std::size_t max_steps = 2000000;
};

struct OdeResult {
    CMatrix value;
    double error_estimate = 0.0; // sum of accepted local error estimates (Frobenius)
    std::size_t steps = 0;
    std::size_t rejected = 0;
};

using MatrixField = std::function<CMatrix(double, const CMatrix&)>;

// Dormand-Prince 5(4) with FSAL and standard step-size control, integrating Y' = f(s, Y) on [s0, s1].
inline OdeResult integrate_dopri5(const MatrixField& f, double s0, double s1, CMatrix y, const OdeOptions& opt = {}) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                            e6 = 22.0 / 525, e7 = -1.0 / 40;

    OdeResult res;
    const double span = s1 - s0;
    if (span == 0.0) {
        res.value = std::move(y);
        return res;
    }
    const double dir = span > 0 ? 1.0 : -1.0;
    const double total = std::abs(span);

    auto err_norm = [&](const CMatrix& y0, const CMatrix& y1, const CMatrix& e) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < e.size(); ++i) {
            const double sc = opt.atol + opt.rtol * std::max(std::abs(y0.data()[i]), std::abs(y1.data()[i]));
            const double r = std::abs(e.data()[i]) / sc;
            acc += r * r;
        }
        return std::sqrt(acc / static_cast<double>(e.size()));
    };

    double s = s0;
    CMatrix k1 = f(s, y);
    double h;
    {
        const double d0 = y.norm() / std::sqrt(double(y.size()));
        const double d1 = k1.norm() / std::sqrt(double(y.size()));
        double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 * total : 0.01 * d0 / d1;
        h0 = std::min(h0, total);
        h = std::max(h0, 1e-12 * total);
    }

    double facold = 1e-4;
    while (true) {
        const double remaining = total - std::abs(s - s0);
        if (remaining <= 1e-15 * total) break;
        if (h >= remaining) h = remaining;
        if (h < 1e-14 * std::max(1.0, std::abs(s)) && h < remaining)
            throw StiffnessError("step size underflow at s = " + std::to_string(s));
        if (res.steps + res.rejected >= opt.max_steps)
            throw StiffnessError("step budget exhausted at s = " + std::to_string(s));

        const double hs = dir * h;
        const CMatrix k2 = f(s + c2 * hs, y + hs * (a21 * k1));
        const CMatrix k3 = f(s + c3 * hs, y + hs * (a31 * k1 + a32 * k2));
        const CMatrix k4 = f(s + c4 * hs, y + hs * (a41 * k1 + a42 * k2 + a43 * k3));
        const CMatrix k5 = f(s + c5 * hs, y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const double snew = (h == remaining) ? s0 + dir * total : s + hs;
        const CMatrix k6 = f(snew, y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        CMatrix ynew = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        CMatrix k7 = f(snew, ynew);
        const CMatrix e = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        const double err = err_norm(y, ynew, e);

        if (!std::isfinite(err)) {
            ++res.rejected;
            h *= 0.1;
            continue;
        }
        if (err <= 1.0) {
            // Lund stabilisation as in DOPRI5.
            double fac = std::pow(err, 0.2 - 0.04) / std::pow(facold, 0.04) / 0.9;
            fac = std::clamp(fac, 0.1, 5.0);
            facold = std::max(err, 1e-4);
            res.error_estimate += e.norm();
            ++res.steps;
            s = snew;
            y = std::move(ynew);
            k1 = std::move(k7);
            h = h / fac;
        } else {
            ++res.rejected;
            const double fac = std::min(10.0, std::pow(err, 0.2) / 0.9);
            h = h / fac;
        }
    }
    res.value = std::move(y);
    return res;
}

} // namespace veech
