#include "flatlab/simd.hpp"

#include <cstdlib>
#include <cstring>

namespace flatlab::simd {

bool cpu_has_avx2() {
#if defined(__x86_64__) && defined(__GNUC__)
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const KernelTable& active() {
    static const KernelTable* chosen = [] {
        const char* env = std::getenv("FLATLAB_SIMD");
        if (env && std::strcmp(env, "scalar") == 0) return &scalar_kernels();
        if (const KernelTable* t = avx2_kernels(); t && cpu_has_avx2()) return t;
        return &scalar_kernels();
    }();
    return *chosen;
}

const char* isa_name(Isa isa) {
    return isa == Isa::avx2 ? "avx2" : "scalar";
}

}  // namespace flatlab::simd
