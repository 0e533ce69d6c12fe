#include "mixcf/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace mixcf::kernels {

#ifdef MIXCF_BUILD_AVX2
const KernelTable* avx2_table_impl();
#endif

const KernelTable* avx2_table() {
#ifdef MIXCF_BUILD_AVX2
  return avx2_table_impl();
#else
  return nullptr;
#endif
}

bool cpu_has_avx2() {
#if defined(__GNUC__) && (defined(__x86_64__) || defined(__i386__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

namespace {

const KernelTable* initial_table() {
  const char* env = std::getenv("MIXCF_ISA");
  if (env != nullptr && std::string(env) == "scalar") return &scalar_table();
  if (avx2_table() != nullptr && cpu_has_avx2()) return avx2_table();
  return &scalar_table();
}

std::atomic<const KernelTable*>& slot() {
  static std::atomic<const KernelTable*> current{initial_table()};
  return current;
}

}  // namespace

const KernelTable& active() { return *slot().load(std::memory_order_acquire); }

bool select(Isa isa) {
  if (isa == Isa::Scalar) {
    slot().store(&scalar_table(), std::memory_order_release);
    return true;
  }
  if (avx2_table() == nullptr || !cpu_has_avx2()) return false;
  slot().store(avx2_table(), std::memory_order_release);
  return true;
}

std::string_view isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

}  // namespace mixcf::kernels
