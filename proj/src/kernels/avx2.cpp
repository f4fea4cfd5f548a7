#include "rideshare/kernels/kernels.h"

#if defined(__x86_64__) || defined(_M_X64)
#define RIDESHARE_HAVE_AVX2 1
#include <immintrin.h>
#else
#define RIDESHARE_HAVE_AVX2 0
#endif

namespace rideshare::kernels {

#if RIDESHARE_HAVE_AVX2
namespace {

#define RS_AVX2 __attribute__((target("avx2")))

RS_AVX2 void column_dots_avx2(const BlockedEll& ell, int begin, int end,
                              const double* y, const double* base,
                              double* out) {
  const int width = ell.width;
  int j = begin;
  // Full blocks only; the ragged tail goes through the scalar path below.
  for (; j + kLanes <= end; j += kLanes) {
    const std::size_t first = ell.slot(j, 0);
    __m256d acc = _mm256_setzero_pd();
    for (int k = 0; k < width; ++k) {
      const std::size_t s = first + static_cast<std::size_t>(k) * kLanes;
      const __m128i idx = _mm_loadu_si128(
          reinterpret_cast<const __m128i*>(ell.rows.data() + s));
      const __m256d yv = _mm256_i32gather_pd(y, idx, 8);
      const __m256d vv = _mm256_loadu_pd(ell.values.data() + s);
      acc = _mm256_add_pd(acc, _mm256_mul_pd(yv, vv));
    }
    const __m256d b =
        base != nullptr ? _mm256_loadu_pd(base + j) : _mm256_setzero_pd();
    _mm256_storeu_pd(out + j, _mm256_sub_pd(b, acc));
  }
  for (; j < end; ++j) {
    double acc = 0.0;
    for (int k = 0; k < width; ++k) {
      const std::size_t s = ell.slot(j, k);
      const double prod = y[ell.rows[s]] * ell.values[s];
      acc = acc + prod;
    }
    out[j] = (base != nullptr ? base[j] : 0.0) - acc;
  }
}

RS_AVX2 Candidate dantzig_select_avx2(std::span<const double> d,
                                      std::span<const double> direction,
                                      double tol, int index_offset) {
  const std::size_t n = d.size();
  std::size_t j = 0;
  __m256d best = _mm256_set1_pd(tol);
  __m256d best_idx = _mm256_set1_pd(-1.0);
  __m256d lane_idx = _mm256_setr_pd(0.0, 1.0, 2.0, 3.0);
  const __m256d step = _mm256_set1_pd(static_cast<double>(kLanes));
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  for (; j + kLanes <= n; j += kLanes) {
    const __m256d dv = _mm256_loadu_pd(d.data() + j);
    const __m256d dir = _mm256_loadu_pd(direction.data() + j);
    const __m256d score = _mm256_xor_pd(_mm256_mul_pd(dir, dv), sign_mask);
    const __m256d better = _mm256_cmp_pd(score, best, _CMP_GT_OQ);
    best = _mm256_blendv_pd(best, score, better);
    best_idx = _mm256_blendv_pd(best_idx, lane_idx, better);
    lane_idx = _mm256_add_pd(lane_idx, step);
  }
  alignas(32) double lane_best[kLanes];
  alignas(32) double lane_best_idx[kLanes];
  _mm256_store_pd(lane_best, best);
  _mm256_store_pd(lane_best_idx, best_idx);

  Candidate out;
  double out_score = tol;
  for (int l = 0; l < kLanes; ++l) {
    if (lane_best_idx[l] < 0.0) continue;
    const int idx = static_cast<int>(lane_best_idx[l]);
    if (lane_best[l] > out_score ||
        (lane_best[l] == out_score && out.index >= 0 && idx < out.index)) {
      out_score = lane_best[l];
      out.index = idx;
    }
  }
  for (; j < n; ++j) {
    const double score = -(direction[j] * d[j]);
    if (score > out_score) {
      out_score = score;
      out.index = static_cast<int>(j);
    }
  }
  if (out.index >= 0) {
    out.index += index_offset;
    out.score = out_score;
  }
  return out;
}

RS_AVX2 int argmin_avx2(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n == 0) return -1;
  std::size_t j = 0;
  int best = -1;
  double best_value = 0.0;
  if (n >= kLanes) {
    __m256d lo = _mm256_loadu_pd(values.data());
    __m256d lo_idx = _mm256_setr_pd(0.0, 1.0, 2.0, 3.0);
    __m256d lane_idx = lo_idx;
    const __m256d step = _mm256_set1_pd(static_cast<double>(kLanes));
    for (j = kLanes; j + kLanes <= n; j += kLanes) {
      lane_idx = _mm256_add_pd(lane_idx, step);
      const __m256d v = _mm256_loadu_pd(values.data() + j);
      const __m256d less = _mm256_cmp_pd(v, lo, _CMP_LT_OQ);
      lo = _mm256_blendv_pd(lo, v, less);
      lo_idx = _mm256_blendv_pd(lo_idx, lane_idx, less);
    }
    alignas(32) double lane_lo[kLanes];
    alignas(32) double lane_lo_idx[kLanes];
    _mm256_store_pd(lane_lo, lo);
    _mm256_store_pd(lane_lo_idx, lo_idx);
    for (int l = 0; l < kLanes; ++l) {
      const int idx = static_cast<int>(lane_lo_idx[l]);
      if (best < 0 || lane_lo[l] < best_value ||
          (lane_lo[l] == best_value && idx < best)) {
        best = idx;
        best_value = lane_lo[l];
      }
    }
  }
  for (; j < n; ++j) {
    if (best < 0 || values[j] < best_value) {
      best = static_cast<int>(j);
      best_value = values[j];
    }
  }
  return best;
}

#undef RS_AVX2

constexpr KernelTable kAvx2{"avx2", column_dots_avx2, dantzig_select_avx2,
                            argmin_avx2};

}  // namespace

const KernelTable* avx2_kernels() { return &kAvx2; }
bool cpu_has_avx2() { return __builtin_cpu_supports("avx2"); }

#else

const KernelTable* avx2_kernels() { return nullptr; }
bool cpu_has_avx2() { return false; }

#endif

}  // namespace rideshare::kernels
