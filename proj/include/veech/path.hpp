#pragma once

#include "errors.hpp"
#include "numeric.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <variant>
#include <vector>

namespace veech {

struct LineSegment {
    cplx from;
    cplx to;
};

// Arc around `center`; the sign of to_angle - from_angle gives the orientation.
struct ArcSegment {
    cplx center;
    double radius;
    double from_angle;
    double to_angle;
};

struct Segment {
    std::variant<LineSegment, ArcSegment> shape;
    bool pole_adjacent = false;

    cplx start() const { return point(0.0); }
    cplx end() const { return point(1.0); }

    cplx point(double s) const {
        if (const auto* l = std::get_if<LineSegment>(&shape)) return l->from + s * (l->to - l->from);
        const auto& a = std::get<ArcSegment>(shape);
        return a.center + std::polar(a.radius, a.from_angle + s * (a.to_angle - a.from_angle));
    }

    cplx derivative(double s) const {
        if (const auto* l = std::get_if<LineSegment>(&shape)) return l->to - l->from;
        const auto& a = std::get<ArcSegment>(shape);
        const double span = a.to_angle - a.from_angle;
        return cplx(0.0, span) * std::polar(a.radius, a.from_angle + s * span);
    }

    double length() const {
        if (const auto* l = std::get_if<LineSegment>(&shape)) return std::abs(l->to - l->from);
        const auto& a = std::get<ArcSegment>(shape);
        return a.radius * std::abs(a.to_angle - a.from_angle);
    }

    double distance_to(cplx p) const {
        if (const auto* l = std::get_if<LineSegment>(&shape)) {
            const cplx d = l->to - l->from;
            const double len2 = std::norm(d);
            if (len2 == 0.0) return std::abs(p - l->from);
            const double s = std::clamp(((p - l->from) * std::conj(d)).real() / len2, 0.0, 1.0);
            return std::abs(p - (l->from + s * d));
        }
        const auto& a = std::get<ArcSegment>(shape);
        const cplx rel = p - a.center;
        double best = std::min(std::abs(p - start()), std::abs(p - end()));
        if (std::abs(rel) > 0.0) {
            const double lo = std::min(a.from_angle, a.to_angle);
            const double hi = std::max(a.from_angle, a.to_angle);
            double th = std::arg(rel);
            th += 2.0 * pi * std::ceil((lo - th) / (2.0 * pi));
            if (th <= hi) best = std::min(best, std::abs(std::abs(rel) - a.radius));
        } else {
            best = std::min(best, a.radius);
        }
        return best;
    }

    Segment reversed() const {
        Segment out = *this;
        if (auto* l = std::get_if<LineSegment>(&out.shape)) std::swap(l->from, l->to);
        else {
            auto& a = std::get<ArcSegment>(out.shape);
            std::swap(a.from_angle, a.to_angle);
        }
        return out;
    }

    // The sub-segment covering parameters [s0, s1].
    Segment piece(double s0, double s1) const {
        Segment out = *this;
        if (auto* l = std::get_if<LineSegment>(&out.shape)) {
            const auto orig = *l;
            l->from = orig.from + s0 * (orig.to - orig.from);
            l->to = orig.from + s1 * (orig.to - orig.from);
        } else {
            auto& a = std::get<ArcSegment>(out.shape);
            const auto orig = a;
            const double span = orig.to_angle - orig.from_angle;
            a.from_angle = orig.from_angle + s0 * span;
            a.to_angle = orig.from_angle + s1 * span;
        }
        return out;
    }
};

inline Segment line(cplx from, cplx to, bool pole_adjacent = false) { return {LineSegment{from, to}, pole_adjacent}; }
inline Segment arc(cplx center, double radius, double from_angle, double to_angle, bool pole_adjacent = false) {
    if (!(radius > 0.0)) throw PathError("arc radius must be positive");
    return {ArcSegment{center, radius, from_angle, to_angle}, pole_adjacent};
}

inline const std::vector<cplx>& unit_fifth_roots() {
    static const std::vector<cplx> poles = [] {
        std::vector<cplx> p;
        for (int i = 1; i <= 5; ++i) p.push_back(zeta_power(i));
        return p;
    }();
    return poles;
}

struct PathSpec {
    std::vector<Segment> segments;

    PathSpec() = default;
    explicit PathSpec(std::vector<Segment> segs) : segments(std::move(segs)) {}

    cplx start() const {
        if (segments.empty()) throw PathError("empty path");
        return segments.front().start();
    }
    cplx end() const {
        if (segments.empty()) throw PathError("empty path");
        return segments.back().end();
    }

    // Throws PathError on gaps between segments or when a segment not marked pole-adjacent
    // comes closer than `clearance` to one of `poles`.
    void validate(double clearance, const std::vector<cplx>& poles = unit_fifth_roots()) const {
        if (segments.empty()) throw PathError("empty path");
        for (std::size_t i = 0; i + 1 < segments.size(); ++i)
            if (std::abs(segments[i].end() - segments[i + 1].start()) > 1e-12)
                throw PathError("segments " + std::to_string(i) + " and " + std::to_string(i + 1) + " do not join");
        for (std::size_t i = 0; i < segments.size(); ++i) {
            for (const cplx& p : poles) {
                const double d = segments[i].distance_to(p);
                if (d == 0.0) throw PathError("segment " + std::to_string(i) + " passes through a pole");
                if (!segments[i].pole_adjacent && d < clearance)
                    throw PathError("segment " + std::to_string(i) + " comes within " + std::to_string(d) +
                                    " of a pole (clearance " + std::to_string(clearance) + ")");
            }
        }
    }

    PathSpec reversed() const {
        PathSpec out;
        for (auto it = segments.rbegin(); it != segments.rend(); ++it) out.segments.push_back(it->reversed());
        return out;
    }

    // Every segment cut into `pieces` equal-parameter parts.
    PathSpec split(int pieces) const {
        if (pieces < 1) throw PathError("split count must be positive");
        PathSpec out;
        for (const auto& s : segments)
            for (int n = 0; n < pieces; ++n) out.segments.push_back(s.piece(double(n) / pieces, double(n + 1) / pieces));
        return out;
    }

    // This path followed by `next`.
    PathSpec then(const PathSpec& next) const {
        PathSpec out = *this;
        out.segments.insert(out.segments.end(), next.segments.begin(), next.segments.end());
        return out;
    }
};

} // namespace veech
