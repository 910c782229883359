#include "smlab/simd/kernels.hpp"

#include <cmath>

namespace smlab::simd {
namespace {

void abs_col_sums(const double* re, const double* im, std::size_t rows, std::size_t cols,
                  const double* w, double* out) {
    for (std::size_t j = 0; j < cols; ++j) {
        const double* r = re + j * rows;
        double s = 0.0;
        if (im) {
            const double* q = im + j * rows;
            for (std::size_t i = 0; i < rows; ++i) s += std::sqrt(r[i] * r[i] + q[i] * q[i]) * w[i];
        } else {
            for (std::size_t i = 0; i < rows; ++i) s += std::fabs(r[i]) * w[i];
        }
        out[j] = s;
    }
}

void abs_row_sums(const double* re, const double* im, std::size_t rows, std::size_t cols,
                  const double* w, double* out) {
    for (std::size_t i = 0; i < rows; ++i) out[i] = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
        const double* r = re + j * rows;
        const double wj = w[j];
        if (im) {
            const double* q = im + j * rows;
            for (std::size_t i = 0; i < rows; ++i) out[i] += std::sqrt(r[i] * r[i] + q[i] * q[i]) * wj;
        } else {
            for (std::size_t i = 0; i < rows; ++i) out[i] += std::fabs(r[i]) * wj;
        }
    }
}

void sq_row_sums(const double* re, const double* im, std::size_t rows, std::size_t cols,
                 const double* w, double* out) {
    for (std::size_t i = 0; i < rows; ++i) out[i] = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
        const double* r = re + j * rows;
        const double wj = w[j];
        if (im) {
            const double* q = im + j * rows;
            for (std::size_t i = 0; i < rows; ++i) out[i] += (r[i] * r[i] + q[i] * q[i]) * wj;
        } else {
            for (std::size_t i = 0; i < rows; ++i) out[i] += r[i] * r[i] * wj;
        }
    }
}

void gemv(const double* a, std::size_t rows, std::size_t cols, const double* c, double* out) {
    for (std::size_t i = 0; i < rows; ++i) out[i] = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
        const double* col = a + j * rows;
        const double cj = c[j];
        if (cj == 0.0) continue;
        for (std::size_t i = 0; i < rows; ++i) out[i] += col[i] * cj;
    }
}

void masked_abs_col_sums(const double* re, const double* im, const double* d, std::size_t rows,
                         std::size_t cols, double radius, const double* w, double* out) {
    for (std::size_t j = 0; j < cols; ++j) {
        const double* r = re + j * rows;
        const double* dj = d + j * rows;
        double s = 0.0;
        for (std::size_t i = 0; i < rows; ++i) {
            if (dj[i] <= radius) continue;
            const double a = im ? std::sqrt(r[i] * r[i] + im[j * rows + i] * im[j * rows + i])
                                : std::fabs(r[i]);
            s += a * w[i];
        }
        out[j] = s;
    }
}

}  // namespace

const KernelTable& scalar_kernels() {
    static const KernelTable table{abs_col_sums, abs_row_sums, sq_row_sums, gemv, masked_abs_col_sums};
    return table;
}

}  // namespace smlab::simd
