// Hoermander-Mikhlin check on T^3: the Riesz-type multiplier k_1 / <k> passes,
// <k> itself fails.

#include <iostream>

#include "ncfourier.hpp"

int main() {
  using namespace ncf;
  const Torus t3(3);
  const HalfInt support(12);
  const CheckOptions opt{{HalfInt(2), HalfInt(4), HalfInt(8)}, std::nullopt};

  const auto riesz = spectral_multiplier(t3, support, [&](const Torus::Label& k) {
    return cplx(k[0] / t3.casimir_weight(k), 0.0);
  });
  const auto growing = spectral_multiplier(t3, support, [&](const Torus::Label& k) { return t3.casimir_weight(k); });

  for (const auto* s : {&riesz, &growing}) {
    const auto r = check_hm(*s, opt);
    std::cout << to_string(r.verdict) << ": max constant " << r.max_constant() << ", cap " << r.cap << "\n";
  }
}
