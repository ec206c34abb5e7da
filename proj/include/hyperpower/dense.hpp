#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

namespace hyperpower {

template <typename T>
inline constexpr bool is_complex_v = false;
template <typename T>
inline constexpr bool is_complex_v<std::complex<T>> = true;

namespace detail {

/// Compensated (Kahan) accumulator; keeps long reductions near 1-ulp accuracy.
/// The coefficient solve differences Gram entries that all approach n, so the
/// entries themselves must not carry O(n^2 * eps) summation noise.
template <typename T>
struct kahan_sum {
    T sum{};
    T carry{};

    void add(const T& value) {
        const T y = value - carry;
        const T t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

template <typename T>
struct real_part_of {
    using type = T;
};
template <typename T>
struct real_part_of<std::complex<T>> {
    using type = T;
};

}  // namespace detail

/// Dense row-major matrix over double or std::complex<double>.
/// Value semantics; all operations below are pure functions on const inputs.
template <typename Scalar>
class DenseMatrix {
    static_assert(std::is_same_v<Scalar, double> ||
                      std::is_same_v<Scalar, std::complex<double>>,
                  "DenseMatrix supports double and std::complex<double>");

 public:
    using scalar_type = Scalar;
    using real_type = typename detail::real_part_of<Scalar>::type;

    DenseMatrix() = default;

    /// Zero-initialized rows x cols matrix.
    DenseMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, Scalar{}) {}

    /// Takes ownership of row-major data; length must equal rows*cols.
    DenseMatrix(std::size_t rows, std::size_t cols, std::vector<Scalar> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        if (data_.size() != rows_ * cols_) {
            throw std::invalid_argument("DenseMatrix: data length " +
                                        std::to_string(data_.size()) +
                                        " does not match " + std::to_string(rows_) +
                                        "x" + std::to_string(cols_));
        }
    }

    /// n x n identity.
    static DenseMatrix identity(std::size_t n) {
        DenseMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = Scalar{1};
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    Scalar& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Scalar& operator()(std::size_t i, std::size_t j) const {
        return data_[i * cols_ + j];
    }

    std::vector<Scalar>& data() { return data_; }
    const std::vector<Scalar>& data() const { return data_; }

 private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Scalar> data_;
};

using RealMatrix = DenseMatrix<double>;
using ComplexMatrix = DenseMatrix<std::complex<double>>;

namespace detail {

inline double conj_if_complex(double x) { return x; }
inline std::complex<double> conj_if_complex(const std::complex<double>& x) {
    return std::conj(x);
}

inline double abs_sq(double x) { return x * x; }
inline double abs_sq(const std::complex<double>& x) { return std::norm(x); }

inline bool entry_finite(double x) { return std::isfinite(x); }
inline bool entry_finite(const std::complex<double>& x) {
    return std::isfinite(x.real()) && std::isfinite(x.imag());
}

}  // namespace detail

/// True when every entry (both components for complex) is finite.
template <typename Scalar>
bool all_finite(const DenseMatrix<Scalar>& a) {
    for (const Scalar& v : a.data()) {
        if (!detail::entry_finite(v)) return false;
    }
    return true;
}

/// Matrix product a*b. Fixed i-k-j loop order accumulating into the output
/// row, so the per-entry reduction order (and thus the result) is
/// bit-reproducible run to run.
template <typename Scalar>
DenseMatrix<Scalar> matmul(const DenseMatrix<Scalar>& a, const DenseMatrix<Scalar>& b) {
    if (a.cols() != b.rows()) {
        throw std::invalid_argument("matmul: dimension mismatch " +
                                    std::to_string(a.rows()) + "x" +
                                    std::to_string(a.cols()) + " * " +
                                    std::to_string(b.rows()) + "x" +
                                    std::to_string(b.cols()));
    }
    DenseMatrix<Scalar> c(a.rows(), b.cols());
    const std::size_t n = a.rows(), k_dim = a.cols(), m = b.cols();
    for (std::size_t i = 0; i < n; ++i) {
        Scalar* ci = &c.data()[i * m];
        for (std::size_t k = 0; k < k_dim; ++k) {
            const Scalar aik = a(i, k);
            const Scalar* bk = &b.data()[k * m];
            for (std::size_t j = 0; j < m; ++j) ci[j] += aik * bk[j];
        }
    }
    return c;
}

/// Transpose (real) or conjugate transpose (complex): A*.
template <typename Scalar>
DenseMatrix<Scalar> adjoint(const DenseMatrix<Scalar>& a) {
    DenseMatrix<Scalar> t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            t(j, i) = detail::conj_if_complex(a(i, j));
        }
    }
    return t;
}

/// Sum of diagonal entries. Square input only.
template <typename Scalar>
Scalar trace(const DenseMatrix<Scalar>& a) {
    if (!a.square()) {
        throw std::invalid_argument("trace: matrix is " + std::to_string(a.rows()) +
                                    "x" + std::to_string(a.cols()) + ", not square");
    }
    detail::kahan_sum<Scalar> s;
    for (std::size_t i = 0; i < a.rows(); ++i) s.add(a(i, i));
    return s.sum;
}

/// Frobenius inner product <a,b> = sum conj(a_ij) * b_ij.
template <typename Scalar>
Scalar frob_inner(const DenseMatrix<Scalar>& a, const DenseMatrix<Scalar>& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument("frob_inner: shape mismatch");
    }
    detail::kahan_sum<Scalar> s;
    const std::size_t len = a.data().size();
    for (std::size_t i = 0; i < len; ++i) {
        s.add(detail::conj_if_complex(a.data()[i]) * b.data()[i]);
    }
    return s.sum;
}

/// Frobenius norm sqrt(sum |a_ij|^2); always a real scalar.
template <typename Scalar>
double frob_norm(const DenseMatrix<Scalar>& a) {
    detail::kahan_sum<double> s;
    for (const Scalar& v : a.data()) s.add(detail::abs_sq(v));
    return std::sqrt(s.sum);
}

/// c0*I + c1*F + c2*F2 entrywise; performs no matrix multiplication.
/// Coefficients are real in both the real and complex paths.
template <typename Scalar>
DenseMatrix<Scalar> affine_combine(double c0, double c1, double c2,
                                   const DenseMatrix<Scalar>& f,
                                   const DenseMatrix<Scalar>& f2) {
    if (!f.square() || f.rows() != f2.rows() || f.cols() != f2.cols()) {
        throw std::invalid_argument("affine_combine: inputs must be square and same shape");
    }
    const std::size_t n = f.rows();
    DenseMatrix<Scalar> r(n, n);
    for (std::size_t i = 0; i < n * n; ++i) {
        r.data()[i] = c1 * f.data()[i] + c2 * f2.data()[i];
    }
    for (std::size_t i = 0; i < n; ++i) r(i, i) += c0;
    return r;
}

/// tr(a*b) computed as sum_ij a_ij * b_ji without forming the product.
template <typename Scalar>
Scalar trace_of_product(const DenseMatrix<Scalar>& a, const DenseMatrix<Scalar>& b) {
    if (a.cols() != b.rows() || a.rows() != b.cols()) {
        throw std::invalid_argument("trace_of_product: shape mismatch");
    }
    detail::kahan_sum<Scalar> s;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) s.add(a(i, j) * b(j, i));
    }
    return s.sum;
}

}  // namespace hyperpower
