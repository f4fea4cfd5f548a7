#pragma once

// Data-parallel inner loops shared by the LP engine and the fleet planners.
//
// Every kernel has a scalar reference implementation and an AVX2 variant.
// The active variant is chosen once at runtime from CPUID (override with
// RIDESHARE_SIMD=scalar). Variants perform the same floating-point operations
// in the same order without contraction, so their results are bit-identical;
// the equivalence tests rely on that.

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace rideshare::kernels {

inline constexpr int kLanes = 4;

// Sparse columns padded to a fixed number of slots and interleaved in blocks
// of kLanes columns: entry (column j, slot k) lives at
// ((j / kLanes) * width + k) * kLanes + j % kLanes.
// Unused slots carry row 0 and value 0.0.
struct BlockedEll {
  int width = 0;
  int columns = 0;
  std::vector<std::int32_t> rows;
  std::vector<double> values;

  [[nodiscard]] std::size_t slot(int column, int k) const {
    return (static_cast<std::size_t>(column / kLanes) * width + k) * kLanes +
           column % kLanes;
  }
  [[nodiscard]] int padded_columns() const {
    return (columns + kLanes - 1) / kLanes * kLanes;
  }
};

struct Candidate {
  int index = -1;
  double score = 0.0;
};

// out[j] = base[j] - sum_k y[row(j,k)] * value(j,k) for j in [begin, end).
// A null base means zero. begin must be a multiple of kLanes.
using ColumnDotsFn = void (*)(const BlockedEll& ell, int begin, int end,
                              const double* y, const double* base, double* out);

// Largest -direction[j] * d[j] strictly above tol, lowest index on ties.
// direction is +1 for columns that may increase, -1 for columns that may
// decrease and 0 for columns that may not move.
using DantzigSelectFn = Candidate (*)(std::span<const double> d,
                                      std::span<const double> direction,
                                      double tol, int index_offset);

// Smallest value, lowest index on ties; -1 for an empty span.
using ArgminFn = int (*)(std::span<const double> values);

struct KernelTable {
  std::string_view name;
  ColumnDotsFn column_dots;
  DantzigSelectFn dantzig_select;
  ArgminFn argmin;
};

const KernelTable& scalar_kernels();
// Null when the binary was built without AVX2 support.
const KernelTable* avx2_kernels();
bool cpu_has_avx2();

// The table selected for this process.
const KernelTable& active();

// Appends one column; a column with more than ell.width entries gets empty
// slots and must be handled by the caller.
void append_column(BlockedEll& ell, std::span<const std::int32_t> rows,
                   std::span<const double> values);

BlockedEll make_blocked_ell(int columns, int width,
                            std::span<const std::int64_t> col_start,
                            std::span<const std::int32_t> row_index,
                            std::span<const double> value);

}  // namespace rideshare::kernels
