// Copyright 2026 The shhlab Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>

#include <Eigen/Core>

namespace shhlab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Spectral norm via power iteration on M^T M.
///
/// Working on M^T M (always PSD) avoids the sign-flip stall of plain power
/// iteration on indefinite symmetric matrices and handles rectangular M.
inline double spectral_norm(const Mat& m, int iters = 50) {
  if (m.size() == 0) return 0.0;
  const Mat mtm = m.transpose() * m;
  const int n = static_cast<int>(mtm.rows());
  Vec v = Vec::Ones(n);
  for (int i = 0; i < n; ++i) v[i] += 1e-3 * (i + 1);  // break symmetry deterministically
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < iters; ++it) {
    Vec w = mtm * v;
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    lambda = norm;
    v = w / norm;
  }
  return std::sqrt(lambda);
}

}  // namespace shhlab
