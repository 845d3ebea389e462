// Walk-through: build |z>, check its overlap, the measure and a sliced trace.

#include <cstdio>
#include <fstream>
#include <vector>

#include "bgcs/coherent.hpp"
#include "bgcs/measure.hpp"
#include "bgcs/pathint.hpp"

int main(int argc, char** argv) {
  using namespace bgcs;

  const double k = 2.5;
  const Label z{{0.3, 0.4}, {-0.6, 0.1}};
  const TruncatedRepSpace space(2, k, 30);

  const CoherentVector v = state_vector(z, space);
  std::printf("<z|z> series       %.15f\n", inner_product(z, z, k).real());
  std::printf("<z|z> cutoff 30    %.15f\n", v.dot(v).real());
  std::printf("eigen residual     %.3e\n", eigen_residual(z, space, 1).relative());

  const MeasureModel model(2, k);
  const std::vector<double> n{1, 2};
  const IdentityCheck m = moment_check(model, n);
  std::printf("moment (1,2)       lhs %.12f rhs %.12f\n", m.lhs, m.rhs);

  const std::vector<double> mu{1.0, 2.0};
  const auto hp = HamiltonianParams::from_mu(mu);
  TraceConfig config;
  config.horizon = 1.0;
  config.slices = 64;
  config.cutoff = 6;
  const double sliced = sliced_trace(hp, k, config).value.real();
  std::printf("sliced trace M=64  %.10f  (cutoff-6 spectral %.10f)\n", sliced,
              exact_spectral_trace(hp, k, 1.0, 6));
  std::printf("kernel trace       %.10f  (spectral %.10f)\n",
              exact_kernel_trace(hp, k, 1.0, EvaluationMode::quadrature).value.real(),
              exact_spectral_trace(hp, k, 1.0));

  // optional: dump the truncated Hamiltonian as row col re im triplets
  if (argc > 1) {
    std::ofstream out(argv[1]);
    hamiltonian_operator(TruncatedRepSpace(2, k, 3), hp).write_triplets(out);
    std::printf("wrote %s\n", argv[1]);
  }
  return 0;
}
