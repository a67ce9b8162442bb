#include <atomic>
#include <cstdlib>
#include <string>

#include "mcwave/kernels.hpp"

namespace mcwave::kernels {

#ifndef MCWAVE_HAVE_AVX2
const KernelTable* avx2_table() { return nullptr; }
#endif

bool cpu_has_avx2() {
#if defined(MCWAVE_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

namespace {

const KernelTable* initial_table() {
    if (const char* env = std::getenv("MCWAVE_SIMD")) {
        if (std::string(env) == "scalar") return &scalar_table();
    }
    if (cpu_has_avx2() && avx2_table() != nullptr) return avx2_table();
    return &scalar_table();
}

std::atomic<const KernelTable*>& current() {
    static std::atomic<const KernelTable*> table{initial_table()};
    return table;
}

}  // namespace

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

void force_level(SimdLevel level) {
    if (level == SimdLevel::Scalar) {
        current().store(&scalar_table(), std::memory_order_release);
        return;
    }
    if (!cpu_has_avx2() || avx2_table() == nullptr)
        throw InvalidArgument("AVX2 kernels are not available on this machine");
    current().store(avx2_table(), std::memory_order_release);
}

std::string_view level_name(SimdLevel level) {
    switch (level) {
        case SimdLevel::Scalar: return "scalar";
        case SimdLevel::Avx2: return "avx2";
    }
    return "unknown";
}

}  // namespace mcwave::kernels
