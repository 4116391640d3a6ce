#pragma once

#include "errors.hpp"
#include "exact.hpp"
#include "numeric.hpp"
#include "ode.hpp"
#include "operator_algebra.hpp"

#include <array>
#include <cmath>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace veech {

struct HBar {
    int level;
    Rational value;
    double as_double() const { return value.convert_to<double>(); }
};

inline HBar hbar(int k) { return {k, hbar_value(k)}; }

struct VerlindeResult {
    long long value;
    double raw;
    double defect;
};

inline VerlindeResult verlinde_eval(int g, int k) {
    if (g < 2) throw InvalidArgument("genus must be at least 2, got " + std::to_string(g));
    if (k < 1) throw InvalidLevel("level must be at least 1, got " + std::to_string(k));
    const double kk = k + 2;
    double sum = 0.0;
    for (int j = 1; j <= k + 1; ++j) sum += std::pow(std::sin(j * pi / kk), 2.0 * (1 - g));
    const double raw = std::pow(kk / 2.0, g - 1) * sum;
    const double rounded = std::round(raw);
    return {static_cast<long long>(rounded), raw, std::abs(raw - rounded)};
}

inline long long verlinde_dim(int g, int k) {
    const auto r = verlinde_eval(g, k);
    if (r.defect >= 1e-6)
        throw NumericConsistencyError("Verlinde sum is not integral: " + std::to_string(r.raw));
    return r.value;
}

struct ExtendedPoint {
    bool infinite = false;
    cplx z{};

    static ExtendedPoint at(cplx v) { return {false, v}; }
    static ExtendedPoint infinity() { return {true, {}}; }
};

struct Configuration {
    std::array<ExtendedPoint, 6> points{};

    static Configuration finite(const std::array<cplx, 6>& z) {
        Configuration c;
        for (int i = 0; i < 6; ++i) c.points[i] = ExtendedPoint::at(z[i]);
        return c;
    }

    std::array<cplx, 6> finite_points() const {
        std::array<cplx, 6> out{};
        for (int i = 0; i < 6; ++i) {
            if (points[i].infinite) throw OutOfChartError("point " + std::to_string(i + 1) + " is at infinity");
            out[i] = points[i].z;
        }
        return out;
    }

    void validate() const {
        int inf = 0;
        for (int i = 0; i < 6; ++i) {
            if (points[i].infinite) {
                ++inf;
                continue;
            }
            for (int j = i + 1; j < 6; ++j)
                if (!points[j].infinite && points[i].z == points[j].z)
                    throw PoleError("points " + std::to_string(i + 1) + " and " + std::to_string(j + 1) + " coincide");
        }
        if (inf > 1) throw PoleError("more than one point at infinity");
    }
};

using Tangent = std::array<cplx, 6>;

class ConnectionForm {
public:
    explicit ConnectionForm(int k) : level_(k), hbar_(hbar(k).as_double()), family_(omega_family(k)) {
        for (std::size_t p = 0; p < 15; ++p) {
            const auto [i, j] = all_pairs()[p];
            mats_[p] = to_complex(family_->hat(i, j));
        }
    }

    int level() const { return level_; }
    double hbar_value() const { return hbar_; }
    Eigen::Index dim() const { return mats_[0].rows(); }
    const CMatrix& hat(int i, int j) const {
        if (i > j) std::swap(i, j);
        return mats_[pair_index(i, j)];
    }

    CMatrix evaluate(const Configuration& config, const Tangent& v) const {
        config.validate();
        const auto z = config.finite_points();
        return evaluate_raw(z, v);
    }

    // No validation; callers guarantee distinct finite points.
    CMatrix evaluate_raw(const std::array<cplx, 6>& z, const Tangent& v) const {
        CMatrix out = CMatrix::Zero(dim(), dim());
        for (std::size_t p = 0; p < 15; ++p) {
            const auto [i, j] = all_pairs()[p];
            const cplx w = (v[i - 1] - v[j - 1]) / (z[i - 1] - z[j - 1]);
            if (w != cplx(0.0)) out += w * mats_[p];
        }
        return hbar_ * out;
    }

private:
    int level_;
    double hbar_;
    std::shared_ptr<const OmegaFamily> family_;
    std::array<CMatrix, 15> mats_;
};

inline CMatrix omega_eval(int k, const Configuration& config, const Tangent& direction) {
    return ConnectionForm(k).evaluate(config, direction);
}

// Residues A_1..A_5 indexed by pole location zeta^i.
struct ResidueSet {
    int level = 0;
    std::array<IntMatrix, 5> exact;
    std::array<std::array<std::pair<int, int>, 2>, 5> pairs{};

    const IntMatrix& exact_at(int i) const {
        if (i < 1 || i > 5) throw InvalidPole("residue index must lie in 1..5");
        return exact[i - 1];
    }
    CMatrix at(int i) const { return to_complex(exact_at(i)); }

    static int index_of_pole(cplx p, double tol = 1e-9) {
        for (int i = 1; i <= 5; ++i)
            if (std::abs(p - zeta_power(i)) < tol) return i;
        throw InvalidPole("point (" + std::to_string(p.real()) + "," + std::to_string(p.imag()) +
                          ") is not a fifth root of unity");
    }
    CMatrix at_location(cplx p) const { return at(index_of_pole(p)); }
};

inline std::array<std::array<std::pair<int, int>, 2>, 5> residue_partition() {
    std::array<std::array<std::pair<int, int>, 2>, 5> out{};
    std::array<int, 5> filled{};
    for (int a = 1; a <= 5; ++a)
        for (int b = a + 1; b <= 5; ++b) {
            int r = (a + b) % 5;
            if (r == 0) r = 5;
            if (filled[r - 1] >= 2) throw NumericConsistencyError("pair partition is not two-to-one");
            out[r - 1][filled[r - 1]++] = {a, b};
        }
    return out;
}

inline ResidueSet residues(int k) {
    const auto fam = omega_family(k);
    ResidueSet rs;
    rs.level = k;
    rs.pairs = residue_partition();
    for (int i = 0; i < 5; ++i) {
        const auto& [p, q] = rs.pairs[i];
        rs.exact[i] = fam->hat(p.first, p.second) + fam->hat(q.first, q.second);
    }
    return rs;
}

// t -> (1/(zeta^i + zeta^-i t) for i = 1..5, 0)
inline std::array<cplx, 6> veech_configuration(cplx t) {
    std::array<cplx, 6> z{};
    for (int i = 1; i <= 5; ++i) {
        const cplx den = zeta_power(i) + zeta_power(-i) * t;
        if (std::abs(den) == 0.0) throw OutOfChartError("configuration point at infinity");
        z[i - 1] = 1.0 / den;
    }
    z[5] = 0.0;
    return z;
}

inline Tangent veech_tangent(cplx t) {
    Tangent v{};
    for (int i = 1; i <= 5; ++i) {
        const cplx den = zeta_power(i) + zeta_power(-i) * t;
        v[i - 1] = -zeta_power(-i) / (den * den);
    }
    v[5] = 0.0;
    return v;
}

// The connection form evaluated on the Veech curve, directly from the six-point form.
inline CMatrix pulled_back_form(const ConnectionForm& form, cplx t) {
    return form.evaluate_raw(veech_configuration(t), veech_tangent(t));
}

// Residue of the pulled-back form at a fifth root of unity, divided by hbar, by a trapezoid contour integral.
inline CMatrix pullback_residue_at(int k, cplx pole, double radius = 0.1, int samples = 128) {
    ResidueSet::index_of_pole(pole);
    const ConnectionForm form(k);
    CMatrix acc = CMatrix::Zero(form.dim(), form.dim());
    for (int n = 0; n < samples; ++n) {
        const cplx u = std::polar(1.0, 2.0 * pi * n / samples);
        acc += (radius * u) * pulled_back_form(form, pole + radius * u);
    }
    return acc / (static_cast<double>(samples) * form.hbar_value());
}

// hbar * (sum_i A_i / (t - zeta^i)) with an optional scalar tail from the fixed-j Ward scalar.
class PulledBackConnection {
public:
    explicit PulledBackConnection(int k, bool with_tail = false)
        : level_(k), hbar_(hbar(k).as_double()), with_tail_(with_tail), residues_(residues(k)) {
        for (int i = 1; i <= 5; ++i) a_[i - 1] = residues_.at(i);
        const auto w = ward_report(k);
        ward_fixed_ = w.fixed_scalar[0].convert_to<double>();
        zero_ = std::all_of(residues_.exact.begin(), residues_.exact.end(), [](const IntMatrix& m) { return m.is_zero(); });
    }

    int level() const { return level_; }
    double hbar_value() const { return hbar_; }
    bool with_tail() const { return with_tail_; }
    bool trivial() const { return zero_ && (!with_tail_ || ward_fixed_ == 0.0); }
    Eigen::Index dim() const { return a_[0].rows(); }
    const ResidueSet& residue_set() const { return residues_; }
    const CMatrix& residue(int i) const { return a_.at(i - 1); }
    double ward_fixed_scalar() const { return ward_fixed_; }

    CMatrix operator()(cplx t) const {
        CMatrix out = CMatrix::Zero(dim(), dim());
        for (int i = 0; i < 5; ++i) out += a_[i] / (t - zeta_power(i + 1));
        if (with_tail_) {
            cplx s = 0.0;
            for (int i = 1; i <= 5; ++i) s += 1.0 / (t + zeta_power(2 * i));
            out.diagonal().array() -= ward_fixed_ * s;
        }
        return hbar_ * out;
    }

    // Same as operator() with the pole at `excluded` removed.
    CMatrix without(cplx t, int excluded) const {
        CMatrix out = CMatrix::Zero(dim(), dim());
        for (int i = 0; i < 5; ++i)
            if (i + 1 != excluded) out += a_[i] / (t - zeta_power(i + 1));
        return hbar_ * out;
    }

private:
    int level_;
    double hbar_;
    bool with_tail_;
    ResidueSet residues_;
    std::array<CMatrix, 5> a_;
    double ward_fixed_ = 0.0;
    bool zero_ = false;
};

struct MoebiusCheck {
    std::string kind;
    double difference = 0.0;       // ||omega - tau* omega|| / ||omega||
    double identity_defect = 0.0;  // relative distance of the difference from the scalar line
    cplx measured_scalar{};
    cplx predicted_scalar{};
    bool ok = false;
};

struct Psl2Report {
    std::vector<MoebiusCheck> checks;
    bool ok() const {
        return std::all_of(checks.begin(), checks.end(), [](const MoebiusCheck& c) { return c.ok; });
    }
};

inline Psl2Report psl2_invariance_check(int k, const std::vector<std::pair<Configuration, Tangent>>& samples,
                                        cplx translation = {1.0, 1.0}, cplx dilation = 2.0) {
    const ConnectionForm form(k);
    const double w = ward_report(k).fixed_scalar[0].convert_to<double>();
    Psl2Report rep;
    const CMatrix id = identity(form.dim());
    for (const auto& [config, v] : samples) {
        config.validate();
        const auto z = config.finite_points();
        const CMatrix base = form.evaluate_raw(z, v);
        const double scale = std::max(base.norm(), 1e-300);

        std::array<cplx, 6> zt{}, zd{}, zi{};
        Tangent vd{}, vi{};
        cplx sum_vz = 0.0;
        for (int i = 0; i < 6; ++i) {
            zt[i] = z[i] + translation;
            zd[i] = dilation * z[i];
            vd[i] = dilation * v[i];
            if (z[i] == cplx(0.0)) throw OutOfChartError("inversion check needs configurations avoiding 0");
            zi[i] = 1.0 / z[i];
            vi[i] = -v[i] / (z[i] * z[i]);
            sum_vz += v[i] / z[i];
        }

        MoebiusCheck tr{"translation"};
        tr.difference = (base - form.evaluate_raw(zt, v)).norm() / scale;
        tr.ok = tr.difference < 1e-12;
        rep.checks.push_back(tr);

        MoebiusCheck dl{"dilation"};
        dl.difference = (base - form.evaluate_raw(zd, vd)).norm() / scale;
        dl.ok = dl.difference < 1e-12;
        rep.checks.push_back(dl);

        MoebiusCheck inv{"inversion"};
        const CMatrix diff = base - form.evaluate_raw(zi, vi);
        inv.difference = diff.norm() / scale;
        inv.measured_scalar = diff.trace() / static_cast<double>(form.dim());
        inv.predicted_scalar = form.hbar_value() * w * sum_vz;
        const double dn = diff.norm();
        inv.identity_defect = dn == 0.0 ? 0.0 : (diff - inv.measured_scalar * id).norm() / dn;
        const double pred_scale = std::max(std::abs(inv.predicted_scalar), 1e-300);
        inv.ok = (dn == 0.0 || inv.identity_defect < 1e-10) &&
                 std::abs(inv.measured_scalar - inv.predicted_scalar) <= 1e-10 * std::max(pred_scale, scale);
        rep.checks.push_back(inv);
    }
    return rep;
}

// Deterministic sample configurations with well separated finite nonzero points.
inline std::vector<std::pair<Configuration, Tangent>> sample_configurations(std::size_t count, unsigned seed = 7) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<std::pair<Configuration, Tangent>> out;
    for (std::size_t n = 0; n < count; ++n) {
        std::array<cplx, 6> z{};
        Tangent v{};
        for (int i = 0; i < 6; ++i) {
            z[i] = std::polar(0.5 + 0.25 * i, 2.0 * pi * i / 6.0 + 0.3 * u(rng));
            v[i] = {u(rng), u(rng)};
        }
        out.emplace_back(Configuration::finite(z), v);
    }
    return out;
}

struct FlatnessReport {
    double loop_defect = 0.0; // ||Y(loop) - Id||
    std::size_t steps = 0;
    bool ok = false;
};

// Transport around a small two-parameter loop in configuration space; flatness predicts the identity.
inline FlatnessReport config_loop_flatness(int k, const Configuration& base, const Tangent& u1, const Tangent& u2,
                                           double radius = 0.05, const OdeOptions& opt = {}) {
    base.validate();
    const ConnectionForm form(k);
    const auto z0 = base.finite_points();
    auto field = [&](double s, const CMatrix& y) -> CMatrix {
        const double th = 2.0 * pi * s;
        std::array<cplx, 6> z{};
        Tangent v{};
        for (int i = 0; i < 6; ++i) {
            z[i] = z0[i] + radius * (std::cos(th) * u1[i] + std::sin(th) * u2[i]);
            v[i] = radius * 2.0 * pi * (-std::sin(th) * u1[i] + std::cos(th) * u2[i]);
        }
        return form.evaluate_raw(z, v) * y;
    };
    const auto r = integrate_dopri5(field, 0.0, 1.0, identity(form.dim()), opt);
    FlatnessReport rep;
    rep.loop_defect = (r.value - identity(form.dim())).norm();
    rep.steps = r.steps;
    rep.ok = rep.loop_defect < 1e-8;
    return rep;
}

} // namespace veech
