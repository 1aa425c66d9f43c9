#include "fbpool/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace fbpool::kernels {

const Dispatch& scalar() { return detail::kScalar; }

const Dispatch* avx2() {
#if defined(FBPOOL_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    return ok ? &detail::kAvx2 : nullptr;
#else
    return nullptr;
#endif
}

const Dispatch& active() {
    static const Dispatch* chosen = [] {
        const char* env = std::getenv("FBPOOL_FORCE_SCALAR");
        if (env && *env && std::strcmp(env, "0") != 0) return &detail::kScalar;
        const Dispatch* v = avx2();
        return v ? v : &detail::kScalar;
    }();
    return *chosen;
}

}  // namespace fbpool::kernels
