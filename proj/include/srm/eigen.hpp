#pragma once

#include <vector>

namespace srm {

struct EigenResult {
  int n = 0;
  std::vector<double> values;   // ascending
  std::vector<double> vectors;  // row-major n x n, column k is the k-th eigenvector
};

// Cyclic Jacobi for dense real symmetric matrices (row-major n x n).
// Deterministic sweep order, so repeated calls are bit-identical.
EigenResult jacobi_eigensymm(std::vector<double> a, int n, int max_sweeps = 64);

}  // namespace srm
