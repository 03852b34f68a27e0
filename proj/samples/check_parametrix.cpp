// Class check of the sub-Laplacian parametrix on SU(2): constants stay
// bounded for (m, rho) = (-1, 1/2) and grow for rho = 1.

#include <iostream>

#include "ncfourier.hpp"

int main() {
  using namespace ncf;
  const CheckOptions opt{{HalfInt(4), HalfInt(8), HalfInt(16)}, std::nullopt};
  const auto q = parametrix_symbol(NamedOperator::sub_laplacian(), HalfInt(18));
  for (double rho : {0.5, 1.0}) {
    const auto r = check_class(q, -1.0, rho, 2, opt);
    std::cout << "rho = " << rho << ": " << to_string(r.verdict) << ", max constant " << r.max_constant()
              << ", instability " << r.instability << "\n";
  }
}
