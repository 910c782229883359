// Compiled with -mavx2 -mfma. Keep this file free of standard-library
// templates so no AVX2-encoded inline function can leak into other objects.
#include "smlab/simd/kernels.hpp"

#if defined(__x86_64__) && defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>

namespace smlab::simd {
namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

inline __m256d vabs(__m256d v) {
    return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v);
}

inline double sabs(double x) { return x < 0.0 ? -x : x; }

void abs_col_sums(const double* re, const double* im, std::size_t rows, std::size_t cols,
                  const double* w, double* out) {
    for (std::size_t j = 0; j < cols; ++j) {
        const double* r = re + j * rows;
        const double* q = im ? im + j * rows : nullptr;
        __m256d acc0 = _mm256_setzero_pd();
        __m256d acc1 = _mm256_setzero_pd();
        std::size_t i = 0;
        if (q) {
            for (; i + 8 <= rows; i += 8) {
                __m256d r0 = _mm256_loadu_pd(r + i), r1 = _mm256_loadu_pd(r + i + 4);
                __m256d q0 = _mm256_loadu_pd(q + i), q1 = _mm256_loadu_pd(q + i + 4);
                __m256d m0 = _mm256_sqrt_pd(_mm256_fmadd_pd(r0, r0, _mm256_mul_pd(q0, q0)));
                __m256d m1 = _mm256_sqrt_pd(_mm256_fmadd_pd(r1, r1, _mm256_mul_pd(q1, q1)));
                acc0 = _mm256_fmadd_pd(m0, _mm256_loadu_pd(w + i), acc0);
                acc1 = _mm256_fmadd_pd(m1, _mm256_loadu_pd(w + i + 4), acc1);
            }
        } else {
            for (; i + 8 <= rows; i += 8) {
                acc0 = _mm256_fmadd_pd(vabs(_mm256_loadu_pd(r + i)), _mm256_loadu_pd(w + i), acc0);
                acc1 = _mm256_fmadd_pd(vabs(_mm256_loadu_pd(r + i + 4)), _mm256_loadu_pd(w + i + 4),
                                       acc1);
            }
        }
        double s = hsum(_mm256_add_pd(acc0, acc1));
        for (; i < rows; ++i) {
            double a = q ? __builtin_sqrt(r[i] * r[i] + q[i] * q[i]) : sabs(r[i]);
            s += a * w[i];
        }
        out[j] = s;
    }
}

void abs_row_sums(const double* re, const double* im, std::size_t rows, std::size_t cols,
                  const double* w, double* out) {
    for (std::size_t i = 0; i < rows; ++i) out[i] = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
        const double* r = re + j * rows;
        const double* q = im ? im + j * rows : nullptr;
        const __m256d wj = _mm256_set1_pd(w[j]);
        std::size_t i = 0;
        for (; i + 4 <= rows; i += 4) {
            __m256d rv = _mm256_loadu_pd(r + i);
            __m256d a;
            if (q) {
                __m256d qv = _mm256_loadu_pd(q + i);
                a = _mm256_sqrt_pd(_mm256_fmadd_pd(rv, rv, _mm256_mul_pd(qv, qv)));
            } else {
                a = vabs(rv);
            }
            _mm256_storeu_pd(out + i, _mm256_fmadd_pd(a, wj, _mm256_loadu_pd(out + i)));
        }
        for (; i < rows; ++i) {
            double a = q ? __builtin_sqrt(r[i] * r[i] + q[i] * q[i]) : sabs(r[i]);
            out[i] += a * w[j];
        }
    }
}

void sq_row_sums(const double* re, const double* im, std::size_t rows, std::size_t cols,
                 const double* w, double* out) {
    for (std::size_t i = 0; i < rows; ++i) out[i] = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
        const double* r = re + j * rows;
        const double* q = im ? im + j * rows : nullptr;
        const __m256d wj = _mm256_set1_pd(w[j]);
        std::size_t i = 0;
        for (; i + 4 <= rows; i += 4) {
            __m256d rv = _mm256_loadu_pd(r + i);
            __m256d m = _mm256_mul_pd(rv, rv);
            if (q) {
                __m256d qv = _mm256_loadu_pd(q + i);
                m = _mm256_fmadd_pd(qv, qv, m);
            }
            _mm256_storeu_pd(out + i, _mm256_fmadd_pd(m, wj, _mm256_loadu_pd(out + i)));
        }
        for (; i < rows; ++i) {
            double m = r[i] * r[i];
            if (q) m += q[i] * q[i];
            out[i] += m * w[j];
        }
    }
}

void gemv(const double* a, std::size_t rows, std::size_t cols, const double* c, double* out) {
    for (std::size_t i = 0; i < rows; ++i) out[i] = 0.0;
    std::size_t j = 0;
    for (; j + 4 <= cols; j += 4) {
        const double* a0 = a + j * rows;
        const double* a1 = a0 + rows;
        const double* a2 = a1 + rows;
        const double* a3 = a2 + rows;
        const __m256d c0 = _mm256_set1_pd(c[j]), c1 = _mm256_set1_pd(c[j + 1]);
        const __m256d c2 = _mm256_set1_pd(c[j + 2]), c3 = _mm256_set1_pd(c[j + 3]);
        std::size_t i = 0;
        for (; i + 4 <= rows; i += 4) {
            __m256d acc = _mm256_loadu_pd(out + i);
            acc = _mm256_fmadd_pd(_mm256_loadu_pd(a0 + i), c0, acc);
            acc = _mm256_fmadd_pd(_mm256_loadu_pd(a1 + i), c1, acc);
            acc = _mm256_fmadd_pd(_mm256_loadu_pd(a2 + i), c2, acc);
            acc = _mm256_fmadd_pd(_mm256_loadu_pd(a3 + i), c3, acc);
            _mm256_storeu_pd(out + i, acc);
        }
        for (; i < rows; ++i)
            out[i] += a0[i] * c[j] + a1[i] * c[j + 1] + a2[i] * c[j + 2] + a3[i] * c[j + 3];
    }
    for (; j < cols; ++j) {
        const double* col = a + j * rows;
        const __m256d cj = _mm256_set1_pd(c[j]);
        std::size_t i = 0;
        for (; i + 4 <= rows; i += 4)
            _mm256_storeu_pd(out + i, _mm256_fmadd_pd(_mm256_loadu_pd(col + i), cj,
                                                      _mm256_loadu_pd(out + i)));
        for (; i < rows; ++i) out[i] += col[i] * c[j];
    }
}

void masked_abs_col_sums(const double* re, const double* im, const double* d, std::size_t rows,
                         std::size_t cols, double radius, const double* w, double* out) {
    const __m256d rad = _mm256_set1_pd(radius);
    for (std::size_t j = 0; j < cols; ++j) {
        const double* r = re + j * rows;
        const double* q = im ? im + j * rows : nullptr;
        const double* dj = d + j * rows;
        __m256d acc = _mm256_setzero_pd();
        std::size_t i = 0;
        for (; i + 4 <= rows; i += 4) {
            __m256d mask = _mm256_cmp_pd(_mm256_loadu_pd(dj + i), rad, _CMP_GT_OQ);
            __m256d rv = _mm256_loadu_pd(r + i);
            __m256d a;
            if (q) {
                __m256d qv = _mm256_loadu_pd(q + i);
                a = _mm256_sqrt_pd(_mm256_fmadd_pd(rv, rv, _mm256_mul_pd(qv, qv)));
            } else {
                a = vabs(rv);
            }
            acc = _mm256_fmadd_pd(_mm256_and_pd(a, mask), _mm256_loadu_pd(w + i), acc);
        }
        double s = hsum(acc);
        for (; i < rows; ++i) {
            if (dj[i] <= radius) continue;
            double a = q ? __builtin_sqrt(r[i] * r[i] + q[i] * q[i]) : sabs(r[i]);
            s += a * w[i];
        }
        out[j] = s;
    }
}

const KernelTable table{abs_col_sums, abs_row_sums, sq_row_sums, gemv, masked_abs_col_sums};

}  // namespace

const KernelTable* avx2_kernels() { return &table; }

}  // namespace smlab::simd

#else

namespace smlab::simd {
const KernelTable* avx2_kernels() { return nullptr; }
}  // namespace smlab::simd

#endif
