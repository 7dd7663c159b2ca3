// A short walk through the library: convergents, resolvent growth of the
// 2x2 example, a constructed alpha and the decay rates its growth implies.

#include <cstdio>
#include <iostream>

#include <semiuniform/semiuniform.hpp>

using namespace semiuniform;

int main() {
  auto sqrt2 = IrrationalSpec::sqrt_of(2);
  auto table = expand(sqrt2, 8);
  std::cout << "sqrt 2 convergents:";
  for (const auto& c : table.c) std::cout << ' ' << c.p.get_str() << '/' << c.q.get_str();
  std::cout << "\nodd/odd approximants:";
  for (const auto& a : odd_odd_stream(expand(sqrt2, 20), 5)) std::cout << ' ' << a.u.get_str() << '/' << a.v.get_str();
  std::cout << "\n\n";

  // m(eta) brackets grow like eta^2 for a badly approximable alpha.
  auto gc = growth_curve(sqrt2, {10, 100, 1000});
  std::printf("%8s %14s %14s %10s\n", "eta", "m_lower", "m_upper", "m/eta^2");
  for (const auto& p : gc.points)
    std::printf("%8g %14.6g %14.6g %10.4f\n", p.eta, p.m_lower.lower_double(), p.m_upper.upper_double(),
                p.m_upper.upper_double() / (p.eta * p.eta));

  // Quadratic growth gives t^-1/2 decay on classical solutions.
  auto pred = predict(MonotoneFn::from_curve(gc), DecayKind::LowerBound, 1, 1, {1e3, 1e5});
  std::cout << '\n' << pred.theorem << '\n';
  for (auto [t, b] : pred.rows) std::printf("  t = %g: %.4g\n", t, b);

  // An alpha whose growth follows f(t) = e^-t has long flat stretches.
  auto ca = construct(DecayTarget::exp_decay(1), 1024);
  std::cout << "\nconstructed alpha for e^-t: depth " << ca.depth << ", quotients";
  for (const auto& a : ca.table.a) std::cout << ' ' << (bit_length(a) < 40 ? a.get_str() : "<" + std::to_string(bit_length(a)) + " bits>");
  auto flat = growth_curve(ca.alpha, {10, 100, 1000});
  std::cout << "\nm(10), m(1000): " << flat.points[0].m_upper.upper_double() << ", "
            << flat.points[2].m_upper.upper_double() << '\n';
  auto pi = positive_increase_estimate(MonotoneFn::from_curve(flat), {1, 10, 100}, {10});
  std::cout << pi.note << '\n';
  return 0;
}
