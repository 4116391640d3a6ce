#pragma once

#include "errors.hpp"

#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace veech {

struct Monomial {
    std::array<int, 4> exponents{};

    int degree() const { return exponents[0] + exponents[1] + exponents[2] + exponents[3]; }

    friend bool operator==(const Monomial&, const Monomial&) = default;
    friend auto operator<=>(const Monomial&, const Monomial&) = default;

    std::string to_string() const {
        std::string s;
        for (int v = 0; v < 4; ++v) {
            if (exponents[v] == 0) continue;
            if (!s.empty()) s += '*';
            s += "x" + std::to_string(v + 1);
            if (exponents[v] > 1) s += "^" + std::to_string(exponents[v]);
        }
        return s.empty() ? "1" : s;
    }
};

inline std::size_t binomial(std::size_t n, std::size_t r) {
    if (r > n) return 0;
    std::size_t out = 1;
    for (std::size_t i = 1; i <= r; ++i) out = out * (n - r + i) / i;
    return out;
}

inline std::size_t level_dimension(int k) {
    if (k < 1) throw InvalidLevel("level must be at least 1, got " + std::to_string(k));
    return binomial(static_cast<std::size_t>(k) + 3, 3);
}

// Degree-k monomials in x1..x4, ordered graded-lex descending on (a,b,c,d).
class MonomialBasis {
public:
    explicit MonomialBasis(int k) : level_(k) {
        if (k < 1) throw InvalidLevel("level must be at least 1, got " + std::to_string(k));
        for (int a = k; a >= 0; --a)
            for (int b = k - a; b >= 0; --b)
                for (int c = k - a - b; c >= 0; --c) {
                    Monomial m{{a, b, c, k - a - b - c}};
                    index_.emplace(m, monomials_.size());
                    monomials_.push_back(m);
                }
    }

    int level() const { return level_; }
    std::size_t size() const { return monomials_.size(); }
    const Monomial& operator[](std::size_t i) const { return monomials_.at(i); }
    const std::vector<Monomial>& monomials() const { return monomials_; }

    std::size_t index_of(const Monomial& m) const {
        auto it = index_.find(m);
        if (it == index_.end()) throw InvalidArgument("monomial " + m.to_string() + " not in basis");
        return it->second;
    }

private:
    int level_;
    std::vector<Monomial> monomials_;
    std::map<Monomial, std::size_t> index_;
};

inline MonomialBasis basis(int k) { return MonomialBasis(k); }

} // namespace veech
