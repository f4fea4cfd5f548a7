#include "rideshare/kernels/kernels.h"

namespace rideshare::kernels {
namespace {

void column_dots_scalar(const BlockedEll& ell, int begin, int end,
                        const double* y, const double* base, double* out) {
  const int width = ell.width;
  for (int j = begin; j < end; ++j) {
    double acc = 0.0;
    for (int k = 0; k < width; ++k) {
      const std::size_t s = ell.slot(j, k);
      const double prod = y[ell.rows[s]] * ell.values[s];
      acc = acc + prod;
    }
    out[j] = (base != nullptr ? base[j] : 0.0) - acc;
  }
}

Candidate dantzig_select_scalar(std::span<const double> d,
                                std::span<const double> direction, double tol,
                                int index_offset) {
  Candidate best;
  double best_score = tol;
  for (std::size_t j = 0; j < d.size(); ++j) {
    const double score = -(direction[j] * d[j]);
    if (score > best_score) {
      best_score = score;
      best.index = static_cast<int>(j) + index_offset;
    }
  }
  best.score = best.index >= 0 ? best_score : 0.0;
  return best;
}

int argmin_scalar(std::span<const double> values) {
  int best = -1;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (best < 0 || values[i] < values[best]) best = static_cast<int>(i);
  }
  return best;
}

constexpr KernelTable kScalar{"scalar", column_dots_scalar,
                              dantzig_select_scalar, argmin_scalar};

}  // namespace

const KernelTable& scalar_kernels() { return kScalar; }

BlockedEll make_blocked_ell(int columns, int width,
                            std::span<const std::int64_t> col_start,
                            std::span<const std::int32_t> row_index,
                            std::span<const double> value) {
  BlockedEll ell;
  ell.width = width;
  ell.columns = columns;
  const std::size_t padded =
      static_cast<std::size_t>(ell.padded_columns()) * width;
  ell.rows.assign(padded, 0);
  ell.values.assign(padded, 0.0);
  for (int j = 0; j < columns; ++j) {
    const auto nnz = col_start[j + 1] - col_start[j];
    if (nnz > width) continue;  // long columns are handled by the caller
    for (int k = 0; k < nnz; ++k) {
      const std::size_t s = ell.slot(j, k);
      ell.rows[s] = row_index[col_start[j] + k];
      ell.values[s] = value[col_start[j] + k];
    }
  }
  return ell;
}

void append_column(BlockedEll& ell, std::span<const std::int32_t> rows,
                   std::span<const double> values) {
  const int j = ell.columns++;
  const std::size_t needed = static_cast<std::size_t>(ell.padded_columns()) * ell.width;
  if (ell.rows.size() < needed) {
    ell.rows.resize(needed, 0);
    ell.values.resize(needed, 0.0);
  }
  if (static_cast<int>(rows.size()) > ell.width) return;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const std::size_t s = ell.slot(j, static_cast<int>(k));
    ell.rows[s] = rows[k];
    ell.values[s] = values[k];
  }
}

}  // namespace rideshare::kernels
