// dispatch.cpp — runtime selection of the kernel table

#include "kernels_impl.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace corrnoise::kernels {

namespace {

constexpr KernelTable kScalar{scalar::caxpy, scalar::cmul_acc, scalar::cxpay, scalar::filon_sum};
constexpr KernelTable kAvx2{avx2::caxpy, avx2::cmul_acc, avx2::cxpay, avx2::filon_sum};

Isa detect() {
    if (const char* env = std::getenv("CORRNOISE_SIMD")) {
        if (std::string(env) == "scalar") return Isa::scalar;
    }
    return isa_supported(Isa::avx2) ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& current() {
    static std::atomic<Isa> isa{detect()};
    return isa;
}

} // namespace

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

bool isa_supported(Isa isa) {
    if (isa == Isa::scalar) return true;
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

const KernelTable& table(Isa isa) {
    if (!isa_supported(isa)) throw std::runtime_error("kernel ISA not supported on this CPU");
    return isa == Isa::avx2 ? kAvx2 : kScalar;
}

const KernelTable& active() {
    return current().load(std::memory_order_relaxed) == Isa::avx2 ? kAvx2 : kScalar;
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void force_isa(Isa isa) {
    if (!isa_supported(isa)) throw std::runtime_error("kernel ISA not supported on this CPU");
    current().store(isa, std::memory_order_relaxed);
}

} // namespace corrnoise::kernels
