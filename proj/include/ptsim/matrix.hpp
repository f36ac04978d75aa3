#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace ptsim {

using cplx = std::complex<double>;

inline constexpr cplx kI{0.0, 1.0};

/// Dense complex matrix, row-major.
class CMatrix {
public:
    CMatrix() = default;
    CMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
    CMatrix(std::initializer_list<std::initializer_list<cplx>> rows);

    static CMatrix identity(std::size_t n);
    static CMatrix zeros(std::size_t n) { return CMatrix(n, n); }
    static CMatrix diagonal(std::span<const cplx> diag);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool square() const noexcept { return rows_ == cols_; }

    cplx& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

    std::span<cplx> data() noexcept { return data_; }
    std::span<const cplx> data() const noexcept { return data_; }

    CMatrix adjoint() const;
    CMatrix transpose() const;
    cplx trace() const;

    /// Largest entry modulus.
    double max_abs() const noexcept;
    /// Induced 1-norm (max column sum).
    double norm1() const noexcept;
    bool all_finite() const noexcept;

    CMatrix& operator+=(const CMatrix& other);
    CMatrix& operator-=(const CMatrix& other);
    CMatrix& operator*=(cplx s) noexcept;

    friend CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
    friend CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
    friend CMatrix operator*(CMatrix a, cplx s) { return a *= s; }
    friend CMatrix operator*(cplx s, CMatrix a) { return a *= s; }
    friend CMatrix operator*(const CMatrix& a, const CMatrix& b);

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> data_;
};

/// max |a_ij - b_ij|; matrices must share a shape.
double max_abs_diff(const CMatrix& a, const CMatrix& b);

/// Largest modulus strictly below the main diagonal.
double max_below_diagonal(const CMatrix& a) noexcept;

/// max |A - A^dagger|.
double hermiticity_defect(const CMatrix& a);

/// max |U^dagger U - I|.
double unitarity_defect(const CMatrix& u);

}  // namespace ptsim
