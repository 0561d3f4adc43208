// Prints the correlation profile of a state: multi-information, c_k and the
// irreducible parts C_k, plus the divergence from an optional hypergraph.
//
//   correlation_profile [state.json [hypergraph.json]]

#include <cstdio>
#include <exception>
#include <string>

#include "hmdiv/hmdiv.hpp"

#ifndef HMDIV_SAMPLE_DATA
#define HMDIV_SAMPLE_DATA "data"
#endif

int main(int argc, char** argv) {
  using namespace hmdiv;
  const std::string state_path = argc > 1 ? argv[1] : HMDIV_SAMPLE_DATA "/ghz.json";
  try {
    const DensityMatrix rho = read_state(state_path);
    const int n = rho.shape().units();
    std::printf("state %s, shape %s\n", state_path.c_str(), rho.shape().to_string().c_str());
    std::printf("H(rho) = %.10f   I(rho) = %.10f nats\n", von_neumann_entropy(rho), multi_information(rho));

    const Decomposition d = decompose(rho);
    for (int k = 1; k <= n; ++k) {
      const ProjectionResult& p = d.projections[static_cast<std::size_t>(k - 1)];
      std::printf("c_%d = %.10f  (%s, residual %.1e%s)\n", k, d.c[static_cast<std::size_t>(k - 1)],
                  to_string(p.method).c_str(), p.constraint_residual, p.boundary ? ", boundary" : "");
    }
    for (int k = 2; k <= n; ++k)
      std::printf("C_%d = %.10f\n", k, d.C_difference[static_cast<std::size_t>(k - 2)]);
    std::printf("sum C_k = %.10f\n", d.sum_C);

    if (argc > 2) {
      const Hypergraph u = read_hypergraph(argv[2]);
      const ProjectionResult r = maxent_project(rho, build_model(rho.shape(), u));
      std::printf("d(rho, %s) = %.10f  (converged %d)\n", u.to_string().c_str(), r.divergence, r.converged ? 1 : 0);
      return r.converged ? 0 : 3;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
