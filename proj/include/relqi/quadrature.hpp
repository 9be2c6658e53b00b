#pragma once

#include <vector>

namespace relqi {

/// n-point Gauss–Hermite rule: ∫ e^{-x²} f(x) dx ≈ Σ w_i f(x_i).
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  static GaussHermiteRule make(int n);
};

}  // namespace relqi
