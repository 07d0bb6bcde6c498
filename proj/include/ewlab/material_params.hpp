#pragma once

#include <stdexcept>

namespace ewlab {

/// Pressure and shear wave speeds. Physical admissibility requires
/// c1^2 > (4/3) c2^2.
struct MaterialParams {
  double c1 = 2.0;
  double c2 = 1.0;

  void validate() const {
    if (!(c1 > 0.0) || !(c2 > 0.0) || !(c1 * c1 > (4.0 / 3.0) * c2 * c2)) {
      throw std::invalid_argument("MaterialParams: requires c1 > 0, c2 > 0, c1^2 > (4/3) c2^2");
    }
  }
  double speed(int a) const { return a == 1 ? c1 : c2; }
};

}  // namespace ewlab
