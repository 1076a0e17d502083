#pragma once

// In-code copies of the shipped scenario gallery, for unit tests.

#include <numbers>
#include <string>

#include "affsym/geometry.hpp"

namespace test_scenarios {

using affsym::geometry::ScenarioSource;

inline ScenarioSource paraboloid() {
  ScenarioSource s;
  s.name = "paraboloid";
  s.coords = {"u1", "u2", "u3", "u4"};
  s.immersion = {"u1", "u2", "u3", "u4", "u1^2 + u2^2 + u3^2 + u4^2"};
  s.transversal = {"0", "0", "0", "0", "1"};
  s.sample_points = {{0, 0, 0, 0}, {0.5, -1, 2, 0.25}, {-1.5, 0.3, -0.7, 1.1}};
  return s;
}

// The immersion y*gamma'(x) + x*alpha_0(z0) + sum_i alpha_i(z_i) with all signs +1.
inline ScenarioSource paper_example(int n) {
  constexpr double pi = std::numbers::pi;
  ScenarioSource s;
  s.name = "paper_example_n" + std::to_string(n);
  const int dim = 2 * n;
  s.coords = {"x", "y"};
  for (int i = 0; i + 2 < dim; ++i) s.coords.push_back("z" + std::to_string(i));
  std::vector<std::string> f(static_cast<std::size_t>(dim + 1));
  f[0] = "-y*sin(x)";
  f[1] = "y*cos(x)";
  auto add = [&](std::size_t pos, const std::string& term) { f[pos] = f[pos].empty() ? term : f[pos] + " + " + term; };
  add(2, "x*cos(z0)");
  add(3, "x*sin(z0)");
  for (int i = 1; i + 2 < dim; ++i) {
    const std::string z = "z" + std::to_string(i);
    add(static_cast<std::size_t>(i + 2), "cos(" + z + ")");
    add(static_cast<std::size_t>(i + 3), "sin(" + z + ")");
  }
  s.immersion = f;
  s.transversal.assign(static_cast<std::size_t>(dim + 1), "0");
  s.transversal[0] = "-cos(x)";
  s.transversal[1] = "-sin(x)";
  s.constraints.push_back({"x_nonzero", "x", "!=", 0.0});
  s.constraints.push_back({"y_positive", "y", ">", 0.0});
  for (int i = 0; i + 2 < dim; ++i) {
    const std::string z = "z" + std::to_string(i);
    s.constraints.push_back({z + "_positive", z, ">", 0.0});
    s.constraints.push_back({z + "_below_half_pi", z, "<", pi / 2});
  }
  if (n == 2) {
    s.sample_points = {{1, 2, pi / 4, pi / 6}, {-1, 1, pi / 3, pi / 4}, {2, 0.5, pi / 6, pi / 3}};
  } else {
    s.sample_points = {{1, 2, pi / 4, pi / 6, pi / 5, pi / 7}, {-1, 1, pi / 3, pi / 4, pi / 8, pi / 3}};
  }
  return s;
}

inline ScenarioSource centroaffine_sphere() {
  ScenarioSource s;
  s.name = "centroaffine_sphere";
  s.coords = {"a", "b", "c", "d"};
  s.immersion = {"cos(a)*cos(b)*cos(c)*cos(d)", "cos(a)*cos(b)*cos(c)*sin(d)", "cos(a)*cos(b)*sin(c)",
                 "cos(a)*sin(b)", "sin(a)"};
  for (const auto& e : s.immersion) s.transversal.push_back("-(" + e + ")");
  s.sample_points = {{0.3, 0.4, 0.5, 0.6}, {-0.7, 1.1, 0.2, 2.5}};
  return s;
}

}  // namespace test_scenarios
