#include "smlab/simd/kernels.hpp"

#include <cstdlib>

namespace smlab::simd {

bool cpu_has_avx2() {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

namespace {

struct Selection {
    const KernelTable* table;
    Isa isa;
};

Selection select() {
    const char* force = std::getenv("SMLAB_FORCE_SCALAR");
    const bool forced = force && *force && *force != '0';
    if (!forced && cpu_has_avx2() && avx2_kernels()) return {avx2_kernels(), Isa::avx2};
    return {&scalar_kernels(), Isa::scalar};
}

const Selection& selection() {
    static const Selection s = select();
    return s;
}

}  // namespace

const KernelTable& kernels() { return *selection().table; }

Isa active_isa() { return selection().isa; }

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

}  // namespace smlab::simd
