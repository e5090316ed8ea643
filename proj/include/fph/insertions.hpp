#pragma once

#include <vector>

namespace fph {

/// One fermion field in a correlation function. q = +1 stands for psi^dagger,
/// q = -1 for psi.
struct InsertionPoint {
  int r = 1;
  int q = 1;
  double x = 0.0;
  double t = 0.0;
};

/// Ordered product of insertions, leftmost first.
struct CorrelatorSpec {
  std::vector<InsertionPoint> insertions;
  double ell = 1.0;
  /// Finite stand-in for the i0+ prescription (continuum) or the smearing
  /// length epsilon (finite system).
  double regulator = 1e-8;
};

}  // namespace fph
