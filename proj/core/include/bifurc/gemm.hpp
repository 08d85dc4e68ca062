#ifndef BIFURC_GEMM_HPP
#define BIFURC_GEMM_HPP

#include <cstddef>

namespace bifurc {

// Small row-major GEMM kernels used by the conv (im2col) and FC layers.
//
// Every output element is reduced over k in a fixed order that depends only
// on K, never on M, N or blocking. That makes batched and single-sample
// evaluation of the same dot product bit-identical, which the activation-
// sharing and batch-consistency tests rely on.

// C[M,N] = beta*C + A[M,K] * B[K,N]
template <typename T>
void gemm_nn(std::size_t M, std::size_t N, std::size_t K,
             const T* A, std::size_t lda,
             const T* B, std::size_t ldb,
             T beta, T* C, std::size_t ldc) {
    constexpr std::size_t JB = 64;
    for (std::size_t i = 0; i < M; ++i) {
        const T* a = A + i * lda;
        T* c = C + i * ldc;
        for (std::size_t j0 = 0; j0 < N; j0 += JB) {
            const std::size_t jn = (N - j0 < JB) ? (N - j0) : JB;
            T acc[JB];
            for (std::size_t jj = 0; jj < jn; ++jj) acc[jj] = T(0);
            for (std::size_t k = 0; k < K; ++k) {
                const T av = a[k];
                const T* b = B + k * ldb + j0;
                for (std::size_t jj = 0; jj < jn; ++jj) acc[jj] += av * b[jj];
            }
            if (beta == T(0)) {
                for (std::size_t jj = 0; jj < jn; ++jj) c[j0 + jj] = acc[jj];
            } else {
                for (std::size_t jj = 0; jj < jn; ++jj) c[j0 + jj] = beta * c[j0 + jj] + acc[jj];
            }
        }
    }
}

// C[M,N] = beta*C + A[K,M]^T * B[K,N]
template <typename T>
void gemm_tn(std::size_t M, std::size_t N, std::size_t K,
             const T* A, std::size_t lda,
             const T* B, std::size_t ldb,
             T beta, T* C, std::size_t ldc) {
    constexpr std::size_t JB = 64;
    for (std::size_t i = 0; i < M; ++i) {
        T* c = C + i * ldc;
        for (std::size_t j0 = 0; j0 < N; j0 += JB) {
            const std::size_t jn = (N - j0 < JB) ? (N - j0) : JB;
            T acc[JB];
            for (std::size_t jj = 0; jj < jn; ++jj) acc[jj] = T(0);
            for (std::size_t k = 0; k < K; ++k) {
                const T av = A[k * lda + i];
                const T* b = B + k * ldb + j0;
                for (std::size_t jj = 0; jj < jn; ++jj) acc[jj] += av * b[jj];
            }
            if (beta == T(0)) {
                for (std::size_t jj = 0; jj < jn; ++jj) c[j0 + jj] = acc[jj];
            } else {
                for (std::size_t jj = 0; jj < jn; ++jj) c[j0 + jj] = beta * c[j0 + jj] + acc[jj];
            }
        }
    }
}

// C[M,N] = beta*C + A[M,K] * B[N,K]^T
//
// Dot-product form. The reduction uses 16 strided partial sums combined in a
// fixed tree, identical for every (i, j), so the K-only ordering guarantee
// holds here too.
template <typename T>
void gemm_nt(std::size_t M, std::size_t N, std::size_t K,
             const T* A, std::size_t lda,
             const T* B, std::size_t ldb,
             T beta, T* C, std::size_t ldc) {
    constexpr std::size_t L = 16;
    for (std::size_t i = 0; i < M; ++i) {
        const T* a = A + i * lda;
        T* c = C + i * ldc;
        for (std::size_t j = 0; j < N; ++j) {
            const T* b = B + j * ldb;
            T acc[L];
            for (std::size_t l = 0; l < L; ++l) acc[l] = T(0);
            std::size_t k = 0;
            for (; k + L <= K; k += L)
                for (std::size_t l = 0; l < L; ++l) acc[l] += a[k + l] * b[k + l];
            T tail = T(0);
            for (; k < K; ++k) tail += a[k] * b[k];
            for (std::size_t h = L / 2; h > 0; h /= 2)
                for (std::size_t l = 0; l < h; ++l) acc[l] += acc[l + h];
            const T dot = acc[0] + tail;
            c[j] = (beta == T(0)) ? dot : beta * c[j] + dot;
        }
    }
}

} // namespace bifurc

#endif
