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

#ifndef STOCHEQ_LINALG_HPP_
#define STOCHEQ_LINALG_HPP_

#include <span>
#include <stdexcept>
#include <vector>

namespace stocheq {

struct SingularMatrixError : std::runtime_error {
  explicit SingularMatrixError(int column, double pivot);
  int column;    // elimination step at which the pivot collapsed
  double pivot;  // magnitude of the offending pivot
};

inline constexpr double kPivotTol = 1e-12;

// LU factorization with partial (row) pivoting of a small dense row-major
// matrix. One factorization serves any number of right-hand sides. The state
// counts here are a few hundred at most, so a direct dense solve is exact to
// machine precision and nothing fancier is warranted.
class LuFactorization {
 public:
  // Throws SingularMatrixError if any pivot magnitude drops below pivot_tol.
  LuFactorization(std::vector<double> matrix, int n, double pivot_tol = kPivotTol);

  int size() const { return n_; }
  double min_pivot() const { return min_pivot_; }

  std::vector<double> solve(std::vector<double> rhs) const;

 private:
  int n_;
  std::vector<double> lu_;   // row-major, L below the diagonal, U on and above
  std::vector<int> pivots_;  // row swapped into position k at step k
  double min_pivot_;
};

// Convenience single-shot solve of a*x = b.
std::vector<double> solve_dense(std::vector<double> matrix, int n,
                                std::vector<double> rhs,
                                double pivot_tol = kPivotTol);

// max_i |(a*x - b)_i| for a row-major n x n matrix.
double residual_inf_norm(std::span<const double> matrix, int n,
                         std::span<const double> x, std::span<const double> b);

}  // namespace stocheq

#endif  // STOCHEQ_LINALG_HPP_
