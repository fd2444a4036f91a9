#include "embedstab/numeric.hpp"

#include <cmath>

namespace embedstab {

namespace {

double simpson_step(const std::function<double(double)>& f, double a, double b, double fa,
                    double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int panels, int max_depth) {
  if (b <= a) return 0.0;
  const double h = (b - a) / panels;
  double total = 0.0;
  double x0 = a, f0 = f(a);
  for (int i = 0; i < panels; ++i) {
    const double x1 = i + 1 == panels ? b : a + h * (i + 1);
    const double xm = 0.5 * (x0 + x1);
    const double fm = f(xm), f1 = f(x1);
    const double whole = (x1 - x0) / 6.0 * (f0 + 4.0 * fm + f1);
    total += simpson_step(f, x0, x1, f0, fm, f1, whole, tol / panels, max_depth);
    x0 = x1;
    f0 = f1;
  }
  return total;
}

}  // namespace embedstab
