// Measures a small Model-n run on the simulated executor and prints measured vs predicted speedup.

#include <iostream>

#include "nslp/nslp.hpp"

int main() {
  nslp::ExperimentConfig cfg;
  cfg.n = 48;
  cfg.iterations = 10;
  cfg.workers = {1, 2, 4, 8};
  cfg.backend = nslp::bsf::Backend::sequential_sim;
  const auto result = nslp::run_experiment(cfg);
  nslp::write_results_csv(std::cout, result.rows);
  std::cout << "scalability bound at n = " << cfg.n << ": " << result.rows.front().bound << " workers\n";
}
