#include "ptsim/linalg.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "ptsim/error.hpp"

namespace ptsim {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void require_square_finite(const CMatrix& a, const char* op) {
    if (!a.square())
        throw ValidationError(std::string(op) + ": matrix must be square, got " + std::to_string(a.rows()) + "x" +
                              std::to_string(a.cols()));
    if (!a.all_finite()) throw ValidationError(std::string(op) + ": matrix has non-finite entries");
}

// ---------------------------------------------------------------------------
// LU with partial pivoting, in place. Returns the permutation parity (+1/-1)
// or 0 when a zero pivot column is met.

int lu_in_place(CMatrix& a, std::vector<std::size_t>& perm) {
    const std::size_t n = a.rows();
    perm.resize(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    int parity = 1;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        double best = std::abs(a(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::abs(a(i, k)) > best) {
                best = std::abs(a(i, k));
                p = i;
            }
        }
        if (best == 0.0) return 0;
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
            std::swap(perm[k], perm[p]);
            parity = -parity;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const cplx f = a(i, k) / a(k, k);
            a(i, k) = f;
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
        }
    }
    return parity;
}

// ---------------------------------------------------------------------------
// Complex Givens rotation G = [[c, s], [-conj(s), c]] with G * (a, b)^T = (r, 0)^T.

struct Givens {
    double c = 1.0;
    cplx s = 0.0;
};

Givens make_givens(cplx a, cplx b) {
    const double abs_b = std::abs(b);
    if (abs_b == 0.0) return {};
    const double abs_a = std::abs(a);
    if (abs_a == 0.0) return {0.0, cplx{1.0, 0.0}};
    const double norm = std::hypot(abs_a, abs_b);
    return {abs_a / norm, (a / abs_a) * std::conj(b) / norm};
}

// Rows p, q of m, columns [col_begin, col_end).
void rotate_rows(CMatrix& m, const Givens& g, std::size_t p, std::size_t q, std::size_t col_begin,
                 std::size_t col_end) {
    for (std::size_t j = col_begin; j < col_end; ++j) {
        const cplx x = m(p, j);
        const cplx y = m(q, j);
        m(p, j) = g.c * x + g.s * y;
        m(q, j) = -std::conj(g.s) * x + g.c * y;
    }
}

// m <- m * G^dagger restricted to rows [row_begin, row_end).
void rotate_cols(CMatrix& m, const Givens& g, std::size_t p, std::size_t q, std::size_t row_begin,
                 std::size_t row_end) {
    for (std::size_t i = row_begin; i < row_end; ++i) {
        const cplx x = m(i, p);
        const cplx y = m(i, q);
        m(i, p) = x * g.c + y * std::conj(g.s);
        m(i, q) = -x * g.s + y * g.c;
    }
}

void reduce_to_hessenberg(CMatrix& t, CMatrix& q) {
    const std::size_t n = t.rows();
    if (n < 3) return;
    std::vector<cplx> v;
    for (std::size_t k = 0; k + 2 < n; ++k) {
        const std::size_t m = n - k - 1;
        v.assign(m, cplx{});
        double xnorm2 = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            v[i] = t(k + 1 + i, k);
            xnorm2 += std::norm(v[i]);
        }
        double tail2 = xnorm2 - std::norm(v[0]);
        if (tail2 == 0.0) continue;
        const double xnorm = std::sqrt(xnorm2);
        const cplx phase = std::abs(v[0]) == 0.0 ? cplx{1.0, 0.0} : v[0] / std::abs(v[0]);
        v[0] += phase * xnorm;
        double vnorm2 = 0.0;
        for (const auto& z : v) vnorm2 += std::norm(z);
        const double beta = 2.0 / vnorm2;

        // t <- P t, P = I - beta v v^dagger acting on rows k+1..n-1
        for (std::size_t j = k; j < n; ++j) {
            cplx s = 0.0;
            for (std::size_t i = 0; i < m; ++i) s += std::conj(v[i]) * t(k + 1 + i, j);
            s *= beta;
            for (std::size_t i = 0; i < m; ++i) t(k + 1 + i, j) -= v[i] * s;
        }
        // t <- t P, q <- q P
        for (CMatrix* target : {&t, &q}) {
            for (std::size_t r = 0; r < n; ++r) {
                cplx s = 0.0;
                for (std::size_t l = 0; l < m; ++l) s += (*target)(r, k + 1 + l) * v[l];
                s *= beta;
                for (std::size_t l = 0; l < m; ++l) (*target)(r, k + 1 + l) -= s * std::conj(v[l]);
            }
        }
        t(k + 1, k) = -phase * xnorm;
        for (std::size_t i = k + 2; i < n; ++i) t(i, k) = 0.0;
    }
}

cplx wilkinson_shift(const CMatrix& t, std::size_t iu) {
    const cplx a = t(iu - 1, iu - 1);
    const cplx b = t(iu - 1, iu);
    const cplx c = t(iu, iu - 1);
    const cplx d = t(iu, iu);
    const cplx half = 0.5 * (a - d);
    const cplx disc = std::sqrt(half * half + b * c);
    const cplx mean = 0.5 * (a + d);
    const cplx mu1 = mean + disc;
    const cplx mu2 = mean - disc;
    return std::abs(mu1 - d) <= std::abs(mu2 - d) ? mu1 : mu2;
}

// One implicit single-shift QR sweep on the active window [il, iu].
void qr_sweep(CMatrix& t, CMatrix& q, std::size_t il, std::size_t iu, cplx shift) {
    const std::size_t n = t.rows();
    Givens g = make_givens(t(il, il) - shift, t(il + 1, il));
    rotate_rows(t, g, il, il + 1, il, n);
    rotate_cols(t, g, il, il + 1, 0, std::min(il + 2, iu) + 1);
    rotate_cols(q, g, il, il + 1, 0, n);
    for (std::size_t k = il + 1; k < iu; ++k) {
        g = make_givens(t(k, k - 1), t(k + 1, k - 1));
        rotate_rows(t, g, k, k + 1, k - 1, n);
        t(k + 1, k - 1) = 0.0;
        rotate_cols(t, g, k, k + 1, 0, std::min(k + 2, iu) + 1);
        rotate_cols(q, g, k, k + 1, 0, n);
    }
}

void qr_iterate(CMatrix& t, CMatrix& q) {
    const std::size_t n = t.rows();
    const double scale = std::max(t.max_abs(), std::numeric_limits<double>::min());
    const std::size_t budget = 100 * n * n;
    std::size_t total = 0;
    std::size_t since_deflation = 0;
    std::size_t iu = n - 1;
    while (iu > 0) {
        std::size_t il = iu;
        while (il > 0) {
            const double sub = std::abs(t(il, il - 1));
            const double local = std::abs(t(il - 1, il - 1)) + std::abs(t(il, il));
            if (sub <= kEps * local || sub <= kEps * scale) {
                t(il, il - 1) = 0.0;
                break;
            }
            --il;
        }
        if (il == iu) {
            --iu;
            since_deflation = 0;
            continue;
        }
        if (++total > budget) {
            double residual = 0.0;
            for (std::size_t k = il + 1; k <= iu; ++k) residual = std::max(residual, std::abs(t(k, k - 1)));
            throw NumericalError("schur_decompose: QR iteration did not converge within " +
                                     std::to_string(budget) + " sweeps (subdiagonal residual " +
                                     std::to_string(residual) + ")",
                                 residual);
        }
        ++since_deflation;
        cplx shift;
        if (since_deflation == 10 || since_deflation == 30) {
            shift = std::abs(t(iu, iu - 1).real());
            if (iu >= 2) shift += std::abs(t(iu - 1, iu - 2).real());
        } else {
            shift = wilkinson_shift(t, iu);
        }
        qr_sweep(t, q, il, iu, shift);
    }
}

// Exchange adjacent diagonal entries k, k+1 of an upper-triangular t.
void swap_adjacent(CMatrix& t, CMatrix& q, std::size_t k) {
    const std::size_t n = t.rows();
    const cplx t11 = t(k, k);
    const cplx t22 = t(k + 1, k + 1);
    const Givens g = make_givens(t(k, k + 1), t22 - t11);
    rotate_rows(t, g, k, k + 1, k, n);
    rotate_cols(t, g, k, k + 1, 0, k + 2);
    rotate_cols(q, g, k, k + 1, 0, n);
    t(k, k) = t22;
    t(k + 1, k + 1) = t11;
    t(k + 1, k) = 0.0;
}

void sort_diagonal(CMatrix& t, CMatrix& q) {
    const std::size_t n = t.rows();
    const double tol = 64.0 * kEps * std::max(t.max_abs(), 1.0);
    auto precedes = [tol](cplx x, cplx y) {
        if (x.imag() > y.imag() + tol) return true;
        if (std::abs(x.imag() - y.imag()) <= tol) return x.real() < y.real() - tol;
        return false;
    };
    for (std::size_t pass = 0; pass < n; ++pass) {
        bool swapped = false;
        for (std::size_t k = 0; k + 1 < n; ++k) {
            if (precedes(t(k + 1, k + 1), t(k, k))) {
                swap_adjacent(t, q, k);
                swapped = true;
            }
        }
        if (!swapped) break;
    }
}

// Degree-13 Pade coefficients and the matching scaling threshold.
constexpr std::array<double, 14> kPade13 = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0, 129060195264000.0,
    10559470521600.0,    670442572800.0,      33522128640.0,      1323241920.0,       40840800.0,
    960960.0,            16380.0,             182.0,              1.0};
constexpr double kTheta13 = 5.371920351148152;

}  // namespace

CMatrix solve(const CMatrix& a, const CMatrix& b) {
    require_square_finite(a, "solve");
    if (b.rows() != a.rows()) throw ValidationError("solve: right-hand side row count mismatch");
    CMatrix lu = a;
    std::vector<std::size_t> perm;
    if (lu_in_place(lu, perm) == 0) throw NumericalError("solve: matrix is singular", 0.0);
    const std::size_t n = a.rows();
    CMatrix x(n, b.cols());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) x(i, j) = b(perm[i], j);
    for (std::size_t j = 0; j < b.cols(); ++j) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < i; ++k) x(i, j) -= lu(i, k) * x(k, j);
        for (std::size_t i = n; i-- > 0;) {
            for (std::size_t k = i + 1; k < n; ++k) x(i, j) -= lu(i, k) * x(k, j);
            x(i, j) /= lu(i, i);
        }
    }
    return x;
}

CMatrix mat_exp(const CMatrix& a, double t) {
    require_square_finite(a, "mat_exp");
    if (!std::isfinite(t)) throw ValidationError("mat_exp: non-finite scale factor");
    const std::size_t n = a.rows();
    CMatrix x = a * cplx{t, 0.0};
    const double norm = x.norm1();
    int squarings = 0;
    if (norm > kTheta13) squarings = static_cast<int>(std::ceil(std::log2(norm / kTheta13)));
    if (squarings > 0) x *= cplx{std::ldexp(1.0, -squarings), 0.0};

    const CMatrix id = CMatrix::identity(n);
    const CMatrix x2 = x * x;
    const CMatrix x4 = x2 * x2;
    const CMatrix x6 = x4 * x2;
    const auto& b = kPade13;
    CMatrix u_inner = x6 * (b[13] * x6 + b[11] * x4 + b[9] * x2) + b[7] * x6 + b[5] * x4 + b[3] * x2 + b[1] * id;
    CMatrix u = x * u_inner;
    CMatrix v = x6 * (b[12] * x6 + b[10] * x4 + b[8] * x2) + b[6] * x6 + b[4] * x4 + b[2] * x2 + b[0] * id;
    CMatrix r = solve(v - u, v + u);
    for (int s = 0; s < squarings; ++s) r = r * r;
    return r;
}

SchurFactorization schur_decompose(const CMatrix& a) {
    require_square_finite(a, "schur_decompose");
    const std::size_t n = a.rows();
    SchurFactorization out{CMatrix::identity(n), a, {}};
    if (n > 1) {
        reduce_to_hessenberg(out.triangular, out.rotation);
        qr_iterate(out.triangular, out.rotation);
        for (std::size_t i = 1; i < n; ++i)
            for (std::size_t j = 0; j < i; ++j) out.triangular(i, j) = 0.0;
        sort_diagonal(out.triangular, out.rotation);
    }
    out.diagonal_order.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.diagonal_order.push_back(out.triangular(i, i));
    return out;
}

std::vector<cplx> eigenvalues(const CMatrix& a) { return schur_decompose(a).diagonal_order; }

std::vector<double> hermitian_eigenvalues(const CMatrix& a) {
    const auto diag = eigenvalues(a);
    std::vector<double> out;
    out.reserve(diag.size());
    for (const auto& z : diag) out.push_back(z.real());
    std::sort(out.begin(), out.end());
    return out;
}

cplx determinant(const CMatrix& a) {
    require_square_finite(a, "determinant");
    CMatrix lu = a;
    std::vector<std::size_t> perm;
    const int parity = lu_in_place(lu, perm);
    if (parity == 0) return 0.0;
    cplx det = static_cast<double>(parity);
    for (std::size_t i = 0; i < a.rows(); ++i) det *= lu(i, i);
    return det;
}

cplx permanent(const CMatrix& a) {
    require_square_finite(a, "permanent");
    const std::size_t n = a.rows();
    if (n > kMaxPermanentSize)
        throw ValidationError("permanent: size " + std::to_string(n) + " exceeds the supported maximum of " +
                              std::to_string(kMaxPermanentSize));
    if (n == 0) return 1.0;

    std::vector<cplx> row_sums(n, cplx{});
    std::uint32_t subset = 0;
    cplx total = 0.0;
    const std::uint32_t count = std::uint32_t{1} << n;
    for (std::uint32_t k = 1; k < count; ++k) {
        const int col = std::countr_zero(k);
        subset ^= std::uint32_t{1} << col;
        const double sign = (subset >> col) & 1U ? 1.0 : -1.0;
        cplx prod = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            row_sums[i] += sign * a(i, static_cast<std::size_t>(col));
            prod *= row_sums[i];
        }
        total += (std::popcount(subset) & 1) ? -prod : prod;
    }
    return (n & 1U) ? -total : total;
}

double spectral_norm(const CMatrix& a) {
    if (a.rows() == 0 || a.cols() == 0) return 0.0;
    const auto ev = hermitian_eigenvalues(a.adjoint() * a);
    return std::sqrt(std::max(ev.back(), 0.0));
}

}  // namespace ptsim
