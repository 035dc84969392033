#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <vector>

namespace evmarl {

// Dense row-major matrix of doubles. Only what the MLP core needs: the
// three GEMM shapes of a forward/backward pass, written so gcc vectorizes
// the inner loops on one core.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> d;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), d(r * c, 0.0) {}

    void resize(std::size_t r, std::size_t c) {
        rows = r;
        cols = c;
        d.assign(r * c, 0.0);
    }

    double* row(std::size_t i) { return d.data() + i * cols; }
    const double* row(std::size_t i) const { return d.data() + i * cols; }

    double& at(std::size_t i, std::size_t j) { return d[i * cols + j]; }
    double at(std::size_t i, std::size_t j) const { return d[i * cols + j]; }

    void fill(double v) { std::fill(d.begin(), d.end(), v); }

    bool all_finite() const {
        for (double v : d)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

// C = A(m,k) * B(k,n). Broadcast-saxpy ordering: unit stride on B and C.
inline void matmul_nn(Matrix& C, const Matrix& A, const Matrix& B) {
    assert(A.cols == B.rows);
    C.resize(A.rows, B.cols);
    const std::size_t n = B.cols;
    for (std::size_t i = 0; i < A.rows; ++i) {
        double* __restrict ci = C.row(i);
        const double* __restrict ai = A.row(i);
        for (std::size_t k = 0; k < A.cols; ++k) {
            const double a = ai[k];
            const double* __restrict bk = B.row(k);
            for (std::size_t j = 0; j < n; ++j) ci[j] += a * bk[j];
        }
    }
}

// C += A^T(k,m)^T * B -- that is, C(m,n) accumulates A(b,m)^T * B(b,n),
// summing over the leading (batch) dimension of both. Used for dW = X^T dZ.
inline void matmul_tn_accum(Matrix& C, const Matrix& A, const Matrix& B) {
    assert(A.rows == B.rows);
    assert(C.rows == A.cols && C.cols == B.cols);
    const std::size_t n = B.cols;
    for (std::size_t b = 0; b < A.rows; ++b) {
        const double* __restrict ab = A.row(b);
        const double* __restrict bb = B.row(b);
        for (std::size_t i = 0; i < A.cols; ++i) {
            const double a = ab[i];
            double* __restrict ci = C.row(i);
            for (std::size_t j = 0; j < n; ++j) ci[j] += a * bb[j];
        }
    }
}

// C = A(m,n) * B(k,n)^T. Reduction over n; relies on -fassociative-math to
// vectorize. Used for dX = dZ * W^T.
inline void matmul_nt(Matrix& C, const Matrix& A, const Matrix& B) {
    assert(A.cols == B.cols);
    C.resize(A.rows, B.rows);
    const std::size_t n = A.cols;
    for (std::size_t i = 0; i < A.rows; ++i) {
        const double* __restrict ai = A.row(i);
        double* __restrict ci = C.row(i);
        for (std::size_t j = 0; j < B.rows; ++j) {
            const double* __restrict bj = B.row(j);
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += ai[k] * bj[k];
            ci[j] = s;
        }
    }
}

}  // namespace evmarl
