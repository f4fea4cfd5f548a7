#include <cstdlib>
#include <string_view>

#include "rideshare/kernels/kernels.h"

namespace rideshare::kernels {

namespace {

const KernelTable& select() {
  const char* forced = std::getenv("RIDESHARE_SIMD");
  if (forced != nullptr && std::string_view(forced) == "scalar") {
    return scalar_kernels();
  }
  if (const KernelTable* avx2 = avx2_kernels(); avx2 != nullptr && cpu_has_avx2()) {
    return *avx2;
  }
  return scalar_kernels();
}

}  // namespace

const KernelTable& active() {
  static const KernelTable& table = select();
  return table;
}

}  // namespace rideshare::kernels
