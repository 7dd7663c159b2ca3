// Loads a port-Hamiltonian system from JSON and reports boundary-matrix
// invertibility, the characterisation constants and one resolvent solve.
//
//   phs_config [config.json]

#include <cstdio>
#include <iostream>

#include <semiuniform/semiuniform.hpp>

using namespace semiuniform;

int main(int argc, char** argv) {
  const std::string path = argc > 1 ? argv[1] : SAMPLES_DIR "/two_piece.json";
  try {
    PHSystem s = phs_from_json(nlohmann::json::parse(read_file(path)));
    validate(s);
    std::cout << s.name << ": d = " << s.d << ", " << s.pieces() << " pieces on [" << s.a() << ", " << s.b() << "]\n";

    std::vector<double> grid;
    for (int i = 0; i <= 300; ++i) grid.push_back(0.1 * i);
    auto rep = stability_scan(s, grid);
    std::cout << rep.verdict << "; B = " << rep.B << '\n';

    auto cc = char_constants(s, {1, 5, 10, 20});
    std::printf("Ctilde = %.4g, C = %.4g\n", cc.Ctilde, cc.C);
    for (const auto& r : cc.rows)
      std::printf("  t = %4g  ||T^-1|| = %.4g  ||R|| >= %.4g (%s)\n", r.t, r.inv_norm_T, r.R_lower,
                  r.best_probe.c_str());

    auto res = resolvent_solve(s, 5.0, [](double x) {
      VecC f(2);
      f << std::cos(x), cplx(0, 1);
      return f;
    });
    std::printf("resolvent at t = 5: %zu nodes, boundary residual %.2e, ODE residual %.2e\n", res.nodes,
                res.boundary_residual, res.ode_residual);
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    return 2;
  }
  return 0;
}
