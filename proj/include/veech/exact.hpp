#pragma once

#include "errors.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace veech {

using Int = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Dense row-major matrix over an exact ring (Int or Rational).
template <class T>
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    static DenseMatrix identity(std::size_t n) {
        DenseMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }

    static DenseMatrix from_rows(const std::vector<std::vector<T>>& rows) {
        if (rows.empty()) return {};
        DenseMatrix m(rows.size(), rows.front().size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != m.cols_) throw InvalidArgument("ragged row list");
            for (std::size_t j = 0; j < m.cols_; ++j) m(i, j) = rows[i][j];
        }
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    const std::vector<T>& data() const { return data_; }

    bool is_zero() const {
        for (const auto& v : data_)
            if (v != 0) return false;
        return true;
    }

    DenseMatrix& operator+=(const DenseMatrix& o) {
        check_same(o);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
        return *this;
    }
    DenseMatrix& operator-=(const DenseMatrix& o) {
        check_same(o);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
        return *this;
    }
    DenseMatrix& operator*=(const T& s) {
        for (auto& v : data_) v *= s;
        return *this;
    }

    friend DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b) { return a += b; }
    friend DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b) { return a -= b; }
    friend DenseMatrix operator-(DenseMatrix a) {
        for (auto& v : a.data_) v = -v;
        return a;
    }
    friend DenseMatrix operator*(DenseMatrix a, const T& s) { return a *= s; }
    friend DenseMatrix operator*(const T& s, DenseMatrix a) { return a *= s; }

    friend DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
        if (a.cols_ != b.rows_) throw InvalidArgument("matrix product dimension mismatch");
        DenseMatrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t l = 0; l < a.cols_; ++l) {
                const T& ail = a(i, l);
                if (ail == 0) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) {
                    const T& blj = b(l, j);
                    if (blj != 0) c(i, j) += ail * blj;
                }
            }
        return c;
    }

    friend bool operator==(const DenseMatrix& a, const DenseMatrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

    DenseMatrix transpose() const {
        DenseMatrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    T trace() const {
        T s = 0;
        for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) s += (*this)(i, i);
        return s;
    }

    // Returns c when the matrix equals c * Id, nothing otherwise.
    std::optional<T> scalar_multiple_of_identity() const {
        if (!square()) return std::nullopt;
        if (rows_ == 0) return T(0);
        const T c = (*this)(0, 0);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                if ((*this)(i, j) != (i == j ? c : T(0))) return std::nullopt;
        return c;
    }

    std::string to_string() const {
        std::ostringstream os;
        for (std::size_t i = 0; i < rows_; ++i) {
            os << '[';
            for (std::size_t j = 0; j < cols_; ++j) os << (j ? " " : "") << (*this)(i, j);
            os << "]\n";
        }
        return os.str();
    }

private:
    void check_same(const DenseMatrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) throw InvalidArgument("matrix dimension mismatch");
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

using IntMatrix = DenseMatrix<Int>;
using RationalMatrix = DenseMatrix<Rational>;

template <class T>
DenseMatrix<T> commutator(const DenseMatrix<T>& a, const DenseMatrix<T>& b) {
    return a * b - b * a;
}

template <class T>
DenseMatrix<T> power(DenseMatrix<T> base, unsigned exponent) {
    if (!base.square()) throw InvalidArgument("power of a non-square matrix");
    DenseMatrix<T> result = DenseMatrix<T>::identity(base.rows());
    while (exponent) {
        if (exponent & 1u) result = result * base;
        exponent >>= 1u;
        if (exponent) base = base * base;
    }
    return result;
}

// Fraction-free Bareiss elimination.
inline Int determinant(const IntMatrix& m) {
    if (!m.square()) throw InvalidArgument("determinant of a non-square matrix");
    const std::size_t n = m.rows();
    if (n == 0) return 1;
    IntMatrix a = m;
    Int sign = 1;
    Int prev = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a(k, k) == 0) {
            std::size_t p = k + 1;
            while (p < n && a(p, k) == 0) ++p;
            if (p == n) return 0;
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) = (a(i, j) * a(k, k) - a(i, k) * a(k, j)) / prev;
            a(i, k) = 0;
        }
        prev = a(k, k);
    }
    return sign * a(n - 1, n - 1);
}

inline RationalMatrix to_rational(const IntMatrix& m) {
    RationalMatrix r(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) r(i, j) = Rational(m(i, j));
    return r;
}

// Exact inverse over the rationals by Gauss-Jordan; throws SingularError.
inline RationalMatrix rational_inverse(const RationalMatrix& m) {
    if (!m.square()) throw InvalidArgument("inverse of a non-square matrix");
    const std::size_t n = m.rows();
    RationalMatrix a = m;
    RationalMatrix inv = RationalMatrix::identity(n);
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (p < n && a(p, c) == 0) ++p;
        if (p == n) throw SingularError("matrix is singular");
        if (p != c)
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(a(p, j), a(c, j));
                std::swap(inv(p, j), inv(c, j));
            }
        const Rational piv = a(c, c);
        for (std::size_t j = 0; j < n; ++j) {
            a(c, j) /= piv;
            inv(c, j) /= piv;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (i == c || a(i, c) == 0) continue;
            const Rational f = a(i, c);
            for (std::size_t j = 0; j < n; ++j) {
                a(i, j) -= f * a(c, j);
                inv(i, j) -= f * inv(c, j);
            }
        }
    }
    return inv;
}

// Inverse of a unimodular integer matrix; throws SingularError when the inverse is not integral.
inline IntMatrix integer_inverse(const IntMatrix& m) {
    const RationalMatrix r = rational_inverse(to_rational(m));
    IntMatrix out(r.rows(), r.cols());
    for (std::size_t i = 0; i < r.rows(); ++i)
        for (std::size_t j = 0; j < r.cols(); ++j) {
            if (denominator(r(i, j)) != 1) throw SingularError("inverse is not integral");
            out(i, j) = numerator(r(i, j));
        }
    return out;
}

} // namespace veech
