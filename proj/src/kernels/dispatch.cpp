#include "kernels_internal.hpp"

#include "tclsim/error.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace tclsim::kernels {

namespace {

bool cpu_has_avx2()
{
#if defined(TCLSIM_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

const KernelTable* pick_default()
{
    const char* env = std::getenv("TCLSIM_KERNELS");
    const std::string want = env ? env : "auto";
    if (want == "scalar")
        return &scalar_table();
    if (want == "avx2") {
        if (const KernelTable* t = avx2_table())
            return t;
        throw ConfigError("TCLSIM_KERNELS=avx2 but AVX2 kernels are unavailable on this machine");
    }
    if (want != "auto" && !want.empty())
        throw ConfigError("TCLSIM_KERNELS must be scalar, avx2 or auto (got '" + want + "')");
    if (const KernelTable* t = avx2_table())
        return t;
    return &scalar_table();
}

std::atomic<const KernelTable*> g_active{nullptr};

}  // namespace

const KernelTable* avx2_table()
{
#if defined(TCLSIM_HAVE_AVX2)
    if (cpu_has_avx2())
        return &avx2_table_unchecked();
#endif
    return nullptr;
}

const KernelTable& active()
{
    const KernelTable* t = g_active.load(std::memory_order_acquire);
    if (t == nullptr) {
        t = pick_default();
        g_active.store(t, std::memory_order_release);
    }
    return *t;
}

void select(Backend b)
{
    switch (b) {
    case Backend::Scalar:
        g_active.store(&scalar_table(), std::memory_order_release);
        return;
    case Backend::Avx2:
        if (const KernelTable* t = avx2_table()) {
            g_active.store(t, std::memory_order_release);
            return;
        }
        throw ConfigError("AVX2 kernels are unavailable on this machine");
    case Backend::Auto:
        g_active.store(avx2_table() ? avx2_table() : &scalar_table(), std::memory_order_release);
        return;
    }
}

std::vector<std::string_view> available()
{
    std::vector<std::string_view> out{scalar_table().name};
    if (const KernelTable* t = avx2_table())
        out.push_back(t->name);
    return out;
}

}  // namespace tclsim::kernels
