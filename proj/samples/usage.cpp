#include <iostream>

#include "isozonoid/isozonoid.hpp"

using namespace isozonoid;

int main() {
  const auto hex = equiangular_measure(3);
  std::cout << "isotropy deviation  " << check_isotropy(hex).deviation << "\n";

  for (double p : {1.0, 3.0, kInf}) {
    const auto z = volume(body_Zp(hex, p));
    const auto zs = volume(body_Zp_star(hex, p));
    std::cout << "p=" << p << "  V(Z)=" << z.value << " (ref " << reference_volume(ReferenceKind::Z, 2, p)
              << ")  V(Z*)=" << zs.value << " (ref " << reference_volume(ReferenceKind::ZStar, 2, p) << ")\n";
  }

  std::cout << "delta_WO  " << wasserstein_to_cross(hex).value << "\n";
  std::cout << "delta_HO  " << hausdorff_to_cross(hex.directions()).orbit.value << "\n";

  const auto john = john_ellipsoid(cube(3));
  std::cout << "John ellipsoid of W^3 has volume " << john.ellipsoid.volume() << "\n";

  const auto s1 = stability::s1_sharp_check(hex);
  std::cout << "sharp S^1: " << s1.area_z << " >= " << s1.bound_z << ", " << s1.area_zstar
            << " <= " << s1.bound_zstar << "\n";
  return 0;
}
