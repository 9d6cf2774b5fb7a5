#include <atomic>
#include <cstdlib>
#include <string_view>

#include "tubeswarm/kernels.hpp"

namespace tubeswarm::kernels {

namespace {

constexpr KernelTable kScalarTable{Backend::kScalar, &scalar::repulsion_sum, &scalar::min_pair_distance_sq};

#if defined(TUBESWARM_HAVE_AVX2)
constexpr KernelTable kAvx2Table{Backend::kAvx2, &avx2::repulsion_sum, &avx2::min_pair_distance_sq};
#endif

const KernelTable* detect() noexcept {
  Backend wanted = backend_available(Backend::kAvx2) ? Backend::kAvx2 : Backend::kScalar;
  if (const char* env = std::getenv("TUBESWARM_SIMD")) {
    const std::string_view choice(env);
    if (choice == "scalar") wanted = Backend::kScalar;
    if (choice == "avx2") wanted = Backend::kAvx2;
  }
  return &table(wanted);
}

std::atomic<const KernelTable*>& slot() noexcept {
  static std::atomic<const KernelTable*> current{detect()};
  return current;
}

}  // namespace

bool backend_available(Backend backend) noexcept {
  switch (backend) {
    case Backend::kScalar:
      return true;
    case Backend::kAvx2:
#if defined(TUBESWARM_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table(Backend backend) noexcept {
#if defined(TUBESWARM_HAVE_AVX2)
  if (backend == Backend::kAvx2 && backend_available(Backend::kAvx2)) return kAvx2Table;
#else
  (void)backend;
#endif
  return kScalarTable;
}

const KernelTable& active() noexcept { return *slot().load(std::memory_order_acquire); }

void set_active_backend(Backend backend) noexcept { slot().store(&table(backend), std::memory_order_release); }

std::string_view backend_name(Backend backend) noexcept {
  switch (backend) {
    case Backend::kScalar:
      return "scalar";
    case Backend::kAvx2:
      return "avx2";
  }
  return "unknown";
}

}  // namespace tubeswarm::kernels
