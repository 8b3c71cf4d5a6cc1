// Copyright 2026 The Stocheq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "stocheq/linalg.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace stocheq {

SingularMatrixError::SingularMatrixError(int column_, double pivot_)
    : std::runtime_error("singular matrix: pivot " + std::to_string(pivot_) +
                         " at elimination step " + std::to_string(column_)),
      column(column_),
      pivot(pivot_) {}

LuFactorization::LuFactorization(std::vector<double> matrix, int n, double pivot_tol)
    : n_(n), lu_(std::move(matrix)), pivots_(static_cast<size_t>(n)), min_pivot_(0.0) {
  if (lu_.size() != static_cast<size_t>(n) * static_cast<size_t>(n)) {
    throw std::invalid_argument("LuFactorization: matrix size does not match n");
  }
  double min_pivot = 0.0;
  for (int k = 0; k < n_; ++k) {
    // Partial pivoting: largest magnitude in column k, rows k..n-1.
    int pivot_row = k;
    double pivot_mag = std::fabs(lu_[static_cast<size_t>(k) * n_ + k]);
    for (int r = k + 1; r < n_; ++r) {
      const double mag = std::fabs(lu_[static_cast<size_t>(r) * n_ + k]);
      if (mag > pivot_mag) {
        pivot_mag = mag;
        pivot_row = r;
      }
    }
    if (pivot_mag < pivot_tol) {
      throw SingularMatrixError(k, pivot_mag);
    }
    min_pivot = (k == 0) ? pivot_mag : std::min(min_pivot, pivot_mag);
    pivots_[static_cast<size_t>(k)] = pivot_row;
    if (pivot_row != k) {
      for (int c = 0; c < n_; ++c) {
        std::swap(lu_[static_cast<size_t>(k) * n_ + c],
                  lu_[static_cast<size_t>(pivot_row) * n_ + c]);
      }
    }
    const double pivot = lu_[static_cast<size_t>(k) * n_ + k];
    for (int r = k + 1; r < n_; ++r) {
      double& factor = lu_[static_cast<size_t>(r) * n_ + k];
      factor /= pivot;
      if (factor == 0.0) continue;
      const double f = factor;
      const double* urow = &lu_[static_cast<size_t>(k) * n_];
      double* row = &lu_[static_cast<size_t>(r) * n_];
      for (int c = k + 1; c < n_; ++c) row[c] -= f * urow[c];
    }
  }
  min_pivot_ = min_pivot;
}

std::vector<double> LuFactorization::solve(std::vector<double> rhs) const {
  if (rhs.size() != static_cast<size_t>(n_)) {
    throw std::invalid_argument("LuFactorization::solve: rhs size mismatch");
  }
  // Apply the row permutation, then forward- and back-substitute.
  for (int k = 0; k < n_; ++k) {
    const int p = pivots_[static_cast<size_t>(k)];
    if (p != k) std::swap(rhs[static_cast<size_t>(k)], rhs[static_cast<size_t>(p)]);
  }
  for (int r = 1; r < n_; ++r) {
    double acc = rhs[static_cast<size_t>(r)];
    const double* row = &lu_[static_cast<size_t>(r) * n_];
    for (int c = 0; c < r; ++c) acc -= row[c] * rhs[static_cast<size_t>(c)];
    rhs[static_cast<size_t>(r)] = acc;
  }
  for (int r = n_ - 1; r >= 0; --r) {
    double acc = rhs[static_cast<size_t>(r)];
    const double* row = &lu_[static_cast<size_t>(r) * n_];
    for (int c = r + 1; c < n_; ++c) acc -= row[c] * rhs[static_cast<size_t>(c)];
    rhs[static_cast<size_t>(r)] = acc / row[r];
  }
  return rhs;
}

std::vector<double> solve_dense(std::vector<double> matrix, int n,
                                std::vector<double> rhs, double pivot_tol) {
  return LuFactorization(std::move(matrix), n, pivot_tol).solve(std::move(rhs));
}

double residual_inf_norm(std::span<const double> matrix, int n,
                         std::span<const double> x, std::span<const double> b) {
  double worst = 0.0;
  for (int r = 0; r < n; ++r) {
    double acc = -b[static_cast<size_t>(r)];
    const double* row = &matrix[static_cast<size_t>(r) * n];
    for (int c = 0; c < n; ++c) acc += row[c] * x[static_cast<size_t>(c)];
    worst = std::max(worst, std::fabs(acc));
  }
  return worst;
}

}  // namespace stocheq
