#pragma once

#include "errors.hpp"
#include "exact.hpp"
#include "monomial.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace veech {

// Normal-ordered monomial differential operator x_{xs...} d_{ds...}; indices are 1-based and sorted.
struct DiffKey {
    std::vector<int> xs;
    std::vector<int> ds;

    friend bool operator==(const DiffKey&, const DiffKey&) = default;
    friend auto operator<=>(const DiffKey&, const DiffKey&) = default;

    std::string to_string() const {
        std::string s;
        for (int i : xs) s += "x" + std::to_string(i);
        for (int j : ds) s += "d" + std::to_string(j);
        return s.empty() ? "1" : s;
    }
};

struct FirstOrderTerm {
    int coef;
    int i; // x_i
    int j; // d_j
    friend bool operator==(const FirstOrderTerm&, const FirstOrderTerm&) = default;
};

inline void check_variable(int v) {
    if (v < 1 || v > 4) throw InvalidIndex("variable index must lie in 1..4, got " + std::to_string(v));
}

// Linear combination of c * x_i d_j with a canonical (sorted, merged, zero-free) term list.
class FirstOrderOp {
public:
    FirstOrderOp() = default;
    explicit FirstOrderOp(std::vector<FirstOrderTerm> terms) {
        std::map<std::pair<int, int>, int> merged;
        for (const auto& t : terms) {
            check_variable(t.i);
            check_variable(t.j);
            merged[{t.i, t.j}] += t.coef;
        }
        for (const auto& [ij, c] : merged)
            if (c != 0) terms_.push_back({c, ij.first, ij.second});
    }

    const std::vector<FirstOrderTerm>& terms() const { return terms_; }

    // 4x4 coefficient matrix C with C(i-1, j-1) = coefficient of x_i d_j.
    IntMatrix coefficient_matrix() const {
        IntMatrix c(4, 4);
        for (const auto& t : terms_) c(t.i - 1, t.j - 1) += t.coef;
        return c;
    }

    friend bool operator==(const FirstOrderOp&, const FirstOrderOp&) = default;

private:
    std::vector<FirstOrderTerm> terms_;
};

// Degree-preserving-or-not differential operator with exact integer coefficients.
class SecondOrderOp {
public:
    SecondOrderOp() = default;

    static SecondOrderOp from_first_order(const FirstOrderOp& d) {
        SecondOrderOp op;
        for (const auto& t : d.terms()) op.add({{t.i}, {t.j}}, t.coef);
        return op;
    }

    void add(DiffKey key, const Int& coef) {
        for (int v : key.xs) check_variable(v);
        for (int v : key.ds) check_variable(v);
        std::sort(key.xs.begin(), key.xs.end());
        std::sort(key.ds.begin(), key.ds.end());
        auto& slot = terms_[key];
        slot += coef;
        if (slot == 0) terms_.erase(key);
    }

    const std::map<DiffKey, Int>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    Int coefficient(DiffKey key) const {
        std::sort(key.xs.begin(), key.xs.end());
        std::sort(key.ds.begin(), key.ds.end());
        auto it = terms_.find(key);
        return it == terms_.end() ? Int(0) : it->second;
    }

    bool is_degree_preserving() const {
        return std::all_of(terms_.begin(), terms_.end(),
                           [](const auto& kv) { return kv.first.xs.size() == kv.first.ds.size(); });
    }

    SecondOrderOp& operator+=(const SecondOrderOp& o) {
        for (const auto& [k, c] : o.terms_) add(k, c);
        return *this;
    }
    SecondOrderOp& operator*=(const Int& s) {
        if (s == 0) {
            terms_.clear();
            return *this;
        }
        for (auto& kv : terms_) kv.second *= s;
        return *this;
    }
    friend SecondOrderOp operator+(SecondOrderOp a, const SecondOrderOp& b) { return a += b; }
    friend SecondOrderOp operator*(const Int& s, SecondOrderOp a) { return a *= s; }
    friend bool operator==(const SecondOrderOp&, const SecondOrderOp&) = default;

    std::string to_string() const {
        if (terms_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (const auto& [k, c] : terms_) {
            if (!first) os << (c < 0 ? " - " : " + ");
            else if (c < 0) os << "-";
            first = false;
            const Int a = c < 0 ? Int(-c) : c;
            if (a != 1) os << a << "*";
            os << k.to_string();
        }
        return os.str();
    }

private:
    std::map<DiffKey, Int> terms_;
};

// (x_i d_j)(x_k d_l) = x_i x_k d_j d_l + delta_jk x_i d_l
inline SecondOrderOp compose(std::pair<int, int> left, std::pair<int, int> right) {
    const auto [i, j] = left;
    const auto [k, l] = right;
    for (int v : {i, j, k, l}) check_variable(v);
    SecondOrderOp op;
    op.add({{i, k}, {j, l}}, 1);
    if (j == k) op.add({{i}, {l}}, 1);
    return op;
}

inline SecondOrderOp square(const FirstOrderOp& d) {
    SecondOrderOp op;
    for (const auto& a : d.terms())
        for (const auto& b : d.terms()) op += Int(a.coef * b.coef) * compose({a.i, a.j}, {b.i, b.j});
    return op;
}

inline SecondOrderOp degree_two_part(const SecondOrderOp& op) {
    SecondOrderOp out;
    for (const auto& [k, c] : op.terms())
        if (k.xs.size() == 2 && k.ds.size() == 2) out.add(k, c);
    return out;
}

struct OmegaGenerator {
    int sign;
    FirstOrderOp generator;
};

inline void check_pair(int i, int j) {
    if (i < 1 || j > 6 || i >= j)
        throw InvalidPair("pair must satisfy 1 <= i < j <= 6, got (" + std::to_string(i) + "," +
                          std::to_string(j) + ")");
}

inline std::size_t pair_index(int i, int j) {
    check_pair(i, j);
    std::size_t idx = 0;
    for (int a = 1; a <= 6; ++a)
        for (int b = a + 1; b <= 6; ++b, ++idx)
            if (a == i && b == j) return idx;
    return idx;
}

inline const std::array<std::pair<int, int>, 15>& all_pairs() {
    static const std::array<std::pair<int, int>, 15> pairs = [] {
        std::array<std::pair<int, int>, 15> p{};
        std::size_t n = 0;
        for (int a = 1; a <= 6; ++a)
            for (int b = a + 1; b <= 6; ++b) p[n++] = {a, b};
        return p;
    }();
    return pairs;
}

inline const OmegaGenerator& omega_generator(int i, int j) {
    static const std::array<OmegaGenerator, 15> table = {{
        {-1, FirstOrderOp({{1, 1, 1}, {1, 2, 2}, {-1, 3, 3}, {-1, 4, 4}})},  // (1,2)
        {-1, FirstOrderOp({{1, 1, 4}, {-1, 2, 3}, {-1, 3, 2}, {1, 4, 1}})},  // (1,3)
        {+1, FirstOrderOp({{1, 1, 4}, {1, 2, 3}, {-1, 3, 2}, {-1, 4, 1}})},  // (1,4)
        {+1, FirstOrderOp({{1, 1, 3}, {-1, 2, 4}, {-1, 3, 1}, {1, 4, 2}})},  // (1,5)
        {-1, FirstOrderOp({{1, 1, 3}, {1, 2, 4}, {1, 3, 1}, {1, 4, 2}})},    // (1,6)
        {+1, FirstOrderOp({{1, 1, 4}, {-1, 2, 3}, {1, 3, 2}, {-1, 4, 1}})},  // (2,3)
        {-1, FirstOrderOp({{1, 1, 4}, {1, 2, 3}, {1, 3, 2}, {1, 4, 1}})},    // (2,4)
        {-1, FirstOrderOp({{1, 1, 3}, {-1, 2, 4}, {1, 3, 1}, {-1, 4, 2}})},  // (2,5)
        {+1, FirstOrderOp({{1, 1, 3}, {1, 2, 4}, {-1, 3, 1}, {-1, 4, 2}})},  // (2,6)
        {-1, FirstOrderOp({{1, 1, 1}, {-1, 2, 2}, {1, 3, 3}, {-1, 4, 4}})},  // (3,4)
        {-1, FirstOrderOp({{1, 1, 2}, {1, 2, 1}, {1, 3, 4}, {1, 4, 3}})},    // (3,5)
        {+1, FirstOrderOp({{1, 1, 2}, {-1, 2, 1}, {-1, 3, 4}, {1, 4, 3}})},  // (3,6)
        {+1, FirstOrderOp({{1, 1, 2}, {-1, 2, 1}, {1, 3, 4}, {-1, 4, 3}})},  // (4,5)
        {-1, FirstOrderOp({{1, 1, 2}, {1, 2, 1}, {-1, 3, 4}, {-1, 4, 3}})},  // (4,6)
        {-1, FirstOrderOp({{1, 1, 1}, {-1, 2, 2}, {-1, 3, 3}, {1, 4, 4}})},  // (5,6)
    }};
    return table[pair_index(i, j)];
}

inline SecondOrderOp omega(int i, int j) {
    const auto& g = omega_generator(i, j);
    return Int(g.sign) * square(g.generator);
}

inline SecondOrderOp omega_hat_op(int i, int j) { return degree_two_part(omega(i, j)); }

// Column m holds the image of basis monomial m.
inline IntMatrix matrix_of(const SecondOrderOp& op, int k) {
    if (!op.is_degree_preserving())
        throw ContractViolation("operator " + op.to_string() + " does not preserve polynomial degree");
    const MonomialBasis b(k);
    IntMatrix m(b.size(), b.size());
    for (std::size_t col = 0; col < b.size(); ++col) {
        for (const auto& [key, coef] : op.terms()) {
            Monomial mono = b[col];
            Int factor = coef;
            bool vanished = false;
            for (int d : key.ds) {
                int& e = mono.exponents[d - 1];
                if (e == 0) {
                    vanished = true;
                    break;
                }
                factor *= e;
                --e;
            }
            if (vanished) continue;
            for (int x : key.xs) ++mono.exponents[x - 1];
            m(b.index_of(mono), col) += factor;
        }
    }
    return m;
}

inline IntMatrix matrix_of(const FirstOrderOp& op, int k) { return matrix_of(SecondOrderOp::from_first_order(op), k); }

// The fifteen level-k matrices of the degree-two parts, built once per level.
class OmegaFamily {
public:
    explicit OmegaFamily(int k) : level_(k) {
        level_dimension(k);
        for (std::size_t p = 0; p < 15; ++p) {
            const auto [i, j] = all_pairs()[p];
            mats_[p] = matrix_of(omega_hat_op(i, j), k);
        }
    }

    int level() const { return level_; }
    std::size_t dim() const { return mats_[0].rows(); }

    // Symmetric in its arguments: hat(j, i) == hat(i, j).
    const IntMatrix& hat(int i, int j) const {
        if (i > j) std::swap(i, j);
        return mats_[pair_index(i, j)];
    }

private:
    int level_;
    std::array<IntMatrix, 15> mats_;
};

inline std::shared_ptr<const OmegaFamily> omega_family(int k) {
    static std::mutex mu;
    static std::map<int, std::shared_ptr<const OmegaFamily>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[k];
    if (!slot) slot = std::make_shared<const OmegaFamily>(k);
    return slot;
}

struct BraidViolation {
    std::string relation;
};

struct BraidReport {
    int level = 0;
    std::size_t checked = 0;
    std::vector<BraidViolation> violations;
    bool ok() const { return violations.empty(); }
};

inline BraidReport check_braid_relations(int k) {
    const auto fam = omega_family(k);
    BraidReport rep;
    rep.level = k;
    auto name = [](int a, int b) { return "O" + std::to_string(a) + std::to_string(b); };
    for (std::size_t p = 0; p < 15; ++p)
        for (std::size_t q = p + 1; q < 15; ++q) {
            const auto [s, t] = all_pairs()[p];
            const auto [u, v] = all_pairs()[q];
            if (s == u || s == v || t == u || t == v) continue;
            ++rep.checked;
            if (!commutator(fam->hat(s, t), fam->hat(u, v)).is_zero())
                rep.violations.push_back({"[" + name(s, t) + "," + name(u, v) + "]"});
        }
    for (int s = 1; s <= 6; ++s)
        for (int t = 1; t <= 6; ++t)
            for (int u = 1; u <= 6; ++u) {
                if (s == t || t == u || s == u) continue;
                ++rep.checked;
                if (!commutator(fam->hat(s, u), fam->hat(s, t) + fam->hat(t, u)).is_zero())
                    rep.violations.push_back({"[" + name(s, u) + "," + name(s, t) + "+" + name(t, u) + "]"});
            }
    return rep;
}

// Scalars measured by brute force next to the constants 3*hbar*k^2 and hbar*k^2 quoted for them.
struct WardReport {
    int level = 0;
    bool total_is_scalar = false;
    Int total_scalar = 0;
    std::array<bool, 6> fixed_is_scalar{};
    std::array<Int, 6> fixed_scalar{};
    Rational quoted_total = 0;
    Rational quoted_fixed = 0;

    bool fixed_scalars_agree() const {
        for (int j = 0; j < 6; ++j)
            if (!fixed_is_scalar[j] || fixed_scalar[j] != fixed_scalar[0]) return false;
        return true;
    }
    bool ok() const { return total_is_scalar && fixed_scalars_agree(); }
    bool matches_quoted() const {
        return Rational(total_scalar) == quoted_total && Rational(fixed_scalar[0]) == quoted_fixed;
    }
};

inline Rational hbar_value(int k) {
    if (k < 1) throw InvalidLevel("level must be at least 1, got " + std::to_string(k));
    return Rational(-1, 16 * (k + 2));
}

inline WardReport ward_report(int k) {
    const auto fam = omega_family(k);
    const std::size_t n = fam->dim();
    WardReport rep;
    rep.level = k;
    IntMatrix total(n, n);
    for (const auto& [i, j] : all_pairs()) total += fam->hat(i, j);
    if (auto s = total.scalar_multiple_of_identity()) {
        rep.total_is_scalar = true;
        rep.total_scalar = *s;
    }
    for (int j = 1; j <= 6; ++j) {
        IntMatrix sum(n, n);
        for (int i = 1; i <= 6; ++i)
            if (i != j) sum += fam->hat(i, j);
        if (auto s = sum.scalar_multiple_of_identity()) {
            rep.fixed_is_scalar[j - 1] = true;
            rep.fixed_scalar[j - 1] = *s;
        }
    }
    rep.quoted_total = 3 * hbar_value(k) * k * k;
    rep.quoted_fixed = hbar_value(k) * k * k;
    return rep;
}

} // namespace veech
