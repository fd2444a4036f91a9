#pragma once

#include <functional>

namespace embedstab {

/// Adaptive Simpson quadrature of f over [a, b] to absolute tolerance `tol`.
/// The interval is first cut into `panels` equal pieces so narrow features
/// are not skipped by the initial five-point estimate.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int panels = 32, int max_depth = 48);

}  // namespace embedstab
