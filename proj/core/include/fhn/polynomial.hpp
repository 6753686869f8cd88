#pragma once

#include <vector>

namespace fhn {

/// Real roots of c2 x^2 + c1 x + c0, ascending. Degenerate leading
/// coefficients fall through to lower degree; the zero polynomial has no
/// isolated roots and yields an empty list. A double root is reported once.
std::vector<double> real_roots_quadratic(double c2, double c1, double c0);

/// Real roots of c3 x^3 + c2 x^2 + c1 x + c0, ascending, Newton polished.
std::vector<double> real_roots_cubic(double c3, double c2, double c1, double c0);

}  // namespace fhn
