#include <cmath>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "smlab/simd/kernels.hpp"

using namespace smlab;

namespace {

void require_close(const std::vector<double>& a, const std::vector<double>& b) {
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-13));
}

void compare_tables(const simd::KernelTable& s, const simd::KernelTable& v, std::size_t rows, std::size_t cols,
                    bool complex) {
    const auto re = test::random_vector(rows * cols, 11 + rows);
    const auto imv = test::random_vector(rows * cols, 13 + cols);
    const double* im = complex ? imv.data() : nullptr;
    const auto wr = test::random_vector(rows, 17, 0.1, 2.0);
    const auto wc = test::random_vector(cols, 19, 0.1, 2.0);
    auto d = test::random_vector(rows * cols, 23, 0.0, 10.0);

    std::vector<double> a(cols), b(cols);
    s.abs_col_sums(re.data(), im, rows, cols, wr.data(), a.data());
    v.abs_col_sums(re.data(), im, rows, cols, wr.data(), b.data());
    require_close(a, b);

    std::vector<double> c(rows), e(rows);
    s.abs_row_sums(re.data(), im, rows, cols, wc.data(), c.data());
    v.abs_row_sums(re.data(), im, rows, cols, wc.data(), e.data());
    require_close(c, e);

    s.sq_row_sums(re.data(), im, rows, cols, wc.data(), c.data());
    v.sq_row_sums(re.data(), im, rows, cols, wc.data(), e.data());
    require_close(c, e);

    s.gemv(re.data(), rows, cols, wc.data(), c.data());
    v.gemv(re.data(), rows, cols, wc.data(), e.data());
    for (std::size_t i = 0; i < rows; ++i) CHECK(c[i] == doctest::Approx(e[i]).epsilon(1e-12).scale(1.0));

    s.masked_abs_col_sums(re.data(), im, d.data(), rows, cols, 5.0, wr.data(), a.data());
    v.masked_abs_col_sums(re.data(), im, d.data(), rows, cols, 5.0, wr.data(), b.data());
    require_close(a, b);
}

}  // namespace

TEST_CASE("scalar kernels match a direct loop") {
    const std::size_t rows = 7, cols = 5;
    const auto re = test::random_vector(rows * cols, 1);
    const auto im = test::random_vector(rows * cols, 2);
    const auto w = test::random_vector(rows, 3, 0.5, 1.5);
    std::vector<double> out(cols);
    simd::scalar_kernels().abs_col_sums(re.data(), im.data(), rows, cols, w.data(), out.data());
    for (std::size_t j = 0; j < cols; ++j) {
        double expect = 0.0;
        for (std::size_t i = 0; i < rows; ++i) expect += std::hypot(re[j * rows + i], im[j * rows + i]) * w[i];
        CHECK(out[j] == doctest::Approx(expect).epsilon(1e-14));
    }
}

TEST_CASE("AVX2 kernels agree with the scalar reference") {
    const auto* avx = simd::avx2_kernels();
    if (!avx || !simd::cpu_has_avx2()) {
        MESSAGE("AVX2 kernels unavailable; equivalence not exercised");
        return;
    }
    for (std::size_t rows : {1u, 3u, 4u, 5u, 8u, 17u, 33u})
        for (std::size_t cols : {1u, 2u, 7u})
            for (bool complex : {false, true}) compare_tables(simd::scalar_kernels(), *avx, rows, cols, complex);
}

TEST_CASE("dispatch names an ISA") {
    const auto isa = simd::active_isa();
    CHECK((simd::isa_name(isa) == "scalar" || simd::isa_name(isa) == "avx2"));
}
