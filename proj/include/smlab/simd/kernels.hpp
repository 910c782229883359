#pragma once

// Hot loops of the norm and diagonal-sum code. Matrices are column-major
// with leading dimension `rows`. Complex data is passed as separate real
// and imaginary planes; a null `im` means the data is real.

#include <cstddef>
#include <string_view>

namespace smlab::simd {

enum class Isa { scalar, avx2 };

struct KernelTable {
    // out[j] = sum_i |k(i,j)| * w[i]
    void (*abs_col_sums)(const double* re, const double* im, std::size_t rows,
                         std::size_t cols, const double* w, double* out);
    // out[i] = sum_j |k(i,j)| * w[j]
    void (*abs_row_sums)(const double* re, const double* im, std::size_t rows,
                         std::size_t cols, const double* w, double* out);
    // out[i] = sum_j |k(i,j)|^2 * w[j]
    void (*sq_row_sums)(const double* re, const double* im, std::size_t rows,
                        std::size_t cols, const double* w, double* out);
    // out[i] = sum_j a(i,j) * c[j]
    void (*gemv)(const double* a, std::size_t rows, std::size_t cols,
                 const double* c, double* out);
    // out[j] = sum_{i : d(i,j) > radius} |k(i,j)| * w[i]
    void (*masked_abs_col_sums)(const double* re, const double* im, const double* d,
                                std::size_t rows, std::size_t cols, double radius,
                                const double* w, double* out);
};

const KernelTable& scalar_kernels();
// Null when the binary was built without AVX2 support.
const KernelTable* avx2_kernels();

bool cpu_has_avx2();

// Dispatch table chosen at first use: AVX2+FMA when the CPU supports it,
// unless SMLAB_FORCE_SCALAR is set in the environment.
const KernelTable& kernels();
Isa active_isa();
std::string_view isa_name(Isa isa);

}  // namespace smlab::simd
