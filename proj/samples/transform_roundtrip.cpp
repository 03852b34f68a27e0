// Forward and inverse transform of a random band-limited function on SU(2).

#include <iostream>

#include "ncfourier.hpp"

int main() {
  using namespace ncf;
  const SU2 g;
  const HalfInt band(8);
  const auto grid = haar_grid(g, band);
  const auto c = random_coefficients(g, band, 2024);
  const auto f = inverse(c, grid);
  const auto back = forward(f);

  double err = 0.0;
  for (std::size_t i = 0; i < c.entries.size(); ++i) err = std::max(err, op_norm(c.entries[i] - back.entries[i]));
  std::cout << "nodes:            " << grid->size() << "\n"
            << "round-trip error: " << err << "\n"
            << "Plancherel:       " << plancherel_norm(c) << " vs " << quadrature_l2_norm(f) << "\n";
}
