#pragma once

#include "hjfbio/numerics.hpp"

namespace hjfbio {

struct EigenDecomposition {
  Vector eigenvalues;   // ascending
  Matrix eigenvectors;  // column k pairs with eigenvalues[k]

  /// Q diag(values) Q^T for an arbitrary replacement spectrum.
  SymMatrix reconstruct(const Vector& values) const;
  SymMatrix reconstruct() const { return reconstruct(eigenvalues); }
};

struct JacobiOptions {
  Index max_size = 512;
  int max_sweeps = 100;
};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
///
/// Sweeps over all (p, q) pairs in row order, annihilating each
/// off-diagonal entry with a single plane rotation, until the off-diagonal
/// Frobenius norm drops below machine epsilon times |A|_F. Throws ConvergenceError
/// (carrying the final off-diagonal norm) when the sweep cap is reached and
/// InvalidArgument when the matrix exceeds the size cap.
EigenDecomposition sym_eigen(const SymMatrix& m, const JacobiOptions& options = {});

}  // namespace hjfbio
