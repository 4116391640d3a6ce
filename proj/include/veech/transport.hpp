#pragma once

#include "errors.hpp"
#include "hyperlog.hpp"
#include "kz_connection.hpp"
#include "numeric.hpp"
#include "ode.hpp"
#include "path.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <thread>
#include <vector>

namespace veech {

struct TransportSettings {
    double rtol = 1e-10;
    double atol = 1e-12;
    int max_word_length = 8;
    int nodes_per_panel = 32;
    double series_cutoff = 1e-12;
    double clearance = 1e-3;
    bool scalar_tail = false;
    unsigned threads = 1;

    void validate() const {
        if (!(rtol > 0.0) || !(atol > 0.0)) throw InvalidArgument("ODE tolerances must be positive");
        if (max_word_length < 1) throw InvalidArgument("maximum word length must be at least 1");
        if (nodes_per_panel < 2) throw InvalidArgument("need at least two nodes per panel");
        if (!(series_cutoff > 0.0)) throw InvalidArgument("series cutoff must be positive");
        if (!(clearance > 0.0)) throw InvalidArgument("pole clearance must be positive");
    }

    OdeOptions ode() const { return {rtol, atol}; }
};

struct TransportResult {
    CMatrix value;
    double error_estimate = 0.0;
    std::size_t steps = 0;
};

// Solves Y' = Omega(t) Y along the path with Y(start) = Id.
inline TransportResult ode_transport(const PulledBackConnection& conn, const PathSpec& path,
                                     const TransportSettings& settings = {}) {
    settings.validate();
    path.validate(settings.clearance);
    TransportResult res;
    res.value = identity(conn.dim());
    if (conn.trivial()) return res;
    for (const auto& seg : path.segments) {
        if (seg.length() == 0.0) continue;
        auto field = [&](double s, const CMatrix& y) -> CMatrix { return (conn(seg.point(s)) * seg.derivative(s)) * y; };
        auto r = integrate_dopri5(field, 0.0, 1.0, res.value, settings.ode());
        res.value = std::move(r.value);
        res.error_estimate += r.error_estimate;
        res.steps += r.steps;
    }
    return res;
}

inline TransportResult ode_transport(int k, const PathSpec& path, const TransportSettings& settings = {}) {
    return ode_transport(PulledBackConnection(k, settings.scalar_tail), path, settings);
}

struct SeriesResult {
    CMatrix value;
    std::vector<double> order_norms; // order_norms[r] = ||order-r contribution||, r = 0..max_len
    double tail_bound = 0.0;
    bool truncation_warning = false;
    std::size_t words = 0;
};

namespace detail {

struct ChenJob {
    const HyperlogEngine<double>* engine;
    const std::array<CMatrix, 5>* residues;
    double hbar;
    int max_len;
    int skip_outer; // letter whose words are dropped when outermost, or 0
};

struct ChenPartial {
    std::vector<CMatrix> orders;
    std::size_t words = 0;
};

inline void chen_node(const ChenJob& job, int depth, const std::vector<cplx>& f, const CMatrix& prod,
                      std::vector<std::vector<cplx>>& buffers, ChenPartial& out) {
    const auto& A = *job.residues;
    const Eigen::Index n = prod.rows();
    CMatrix comb = CMatrix::Zero(n, n);
    for (int a = 1; a <= 5; ++a) {
        if (a == job.skip_outer) continue;
        comb += job.engine->total(f, a) * A[a - 1];
        ++out.words;
    }
    out.orders[depth + 1] += std::pow(job.hbar, depth + 1) * (comb * prod);
    if (depth + 1 >= job.max_len) return;
    auto& child = buffers[depth + 1];
    for (int a = 1; a <= 5; ++a) {
        job.engine->extend(f, a, child);
        const CMatrix next = A[a - 1] * prod;
        chen_node(job, depth + 1, child, next, buffers, out);
    }
}

// Sums hbar^r L(w) A_{w_r} ... A_{w_1} over all words up to max_len, outermost letter on the left.
inline SeriesResult chen_accumulate(const PulledBackConnection& conn, cplx upper, int max_len, int skip_outer,
                                    const TransportSettings& settings) {
    const Eigen::Index n = conn.dim();
    SeriesResult res;
    res.value = identity(n);
    res.order_norms.assign(std::size_t(std::max(max_len, 0)) + 1, 0.0);
    res.order_norms[0] = res.value.norm();
    if (max_len <= 0 || conn.trivial()) return res;

    const HyperlogEngine<double> engine(upper, settings.nodes_per_panel);
    std::array<CMatrix, 5> A;
    for (int a = 1; a <= 5; ++a) A[a - 1] = conn.residue(a);
    const ChenJob job{&engine, &A, conn.hbar_value(), max_len, skip_outer};

    // Root level, then one independent subtree per innermost letter.
    ChenPartial root;
    root.orders.assign(max_len + 1, CMatrix::Zero(n, n));
    const std::vector<cplx> unit = engine.unit();
    {
        CMatrix comb = CMatrix::Zero(n, n);
        for (int a = 1; a <= 5; ++a) {
            if (a == skip_outer) continue;
            comb += engine.total(unit, a) * A[a - 1];
            ++root.words;
        }
        root.orders[1] += conn.hbar_value() * comb;
    }
    std::array<ChenPartial, 5> parts;
    if (max_len > 1) {
        auto run = [&](int a) {
            auto& part = parts[a - 1];
            part.orders.assign(max_len + 1, CMatrix::Zero(n, n));
            std::vector<std::vector<cplx>> buffers(max_len + 1);
            engine.extend(unit, a, buffers[1]);
            chen_node(job, 1, buffers[1], A[a - 1], buffers, part);
        };
        const unsigned threads = std::max(1u, std::min(settings.threads, 5u));
        if (threads == 1) {
            for (int a = 1; a <= 5; ++a) run(a);
        } else {
            for (int first = 1; first <= 5; first += int(threads)) {
                std::vector<std::thread> pool;
                for (int a = first; a < first + int(threads) && a <= 5; ++a) pool.emplace_back(run, a);
                for (auto& t : pool) t.join();
            }
        }
    }

    std::vector<CMatrix> orders = root.orders;
    res.words = root.words;
    for (const auto& part : parts) {
        if (part.orders.empty()) continue;
        res.words += part.words;
        for (int r = 0; r <= max_len; ++r) orders[r] += part.orders[r];
    }
    for (int r = 1; r <= max_len; ++r) {
        res.value += orders[r];
        res.order_norms[r] = orders[r].norm();
    }
    const double last = res.order_norms[max_len];
    const double prev = res.order_norms[max_len - 1];
    if (last == 0.0) res.tail_bound = 0.0;
    else if (max_len >= 2 && prev > 0.0 && last < prev) {
        const double q = last / prev;
        res.tail_bound = last * q / (1.0 - q);
    } else res.tail_bound = std::numeric_limits<double>::infinity();
    res.truncation_warning = res.tail_bound > settings.series_cutoff;
    return res;
}

} // namespace detail

inline SeriesResult chen_series(const PulledBackConnection& conn, double x, int max_len,
                                const TransportSettings& settings = {}) {
    if (!(x > 0.0 && x < 1.0)) throw InvalidArgument("chen_series needs 0 < x < 1");
    if (max_len < 0) throw InvalidArgument("maximum word length must be non-negative");
    return detail::chen_accumulate(conn, cplx(x, 0.0), max_len, 0, settings);
}

inline SeriesResult chen_series(int k, double x, int max_len, const TransportSettings& settings = {}) {
    return chen_series(PulledBackConnection(k), x, max_len, settings);
}

// Series at upper limit 1 over the words whose outermost letter avoids the pole at 1.
inline SeriesResult phi_regularized(const PulledBackConnection& conn, int max_len,
                                    const TransportSettings& settings = {}) {
    if (max_len < 0) throw InvalidArgument("maximum word length must be non-negative");
    return detail::chen_accumulate(conn, cplx(1.0, 0.0), max_len, 5, settings);
}

inline SeriesResult phi_regularized(int k, int max_len, const TransportSettings& settings = {}) {
    return phi_regularized(PulledBackConnection(k), max_len, settings);
}

// Straight segment from 0 to x as a path.
inline PathSpec real_segment(double from, double to, bool pole_adjacent = false) {
    return PathSpec({line(cplx(from, 0.0), cplx(to, 0.0), pole_adjacent)});
}

} // namespace veech
