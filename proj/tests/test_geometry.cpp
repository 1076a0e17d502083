#include <cmath>
#include <numbers>
#include <random>

#include "affsym/error.hpp"
#include "affsym/geometry.hpp"
#include "affsym/model.hpp"
#include "doctest.h"
#include "scenarios.hpp"

using namespace affsym;
using namespace affsym::geometry;
using std::numbers::pi;

TEST_CASE("paraboloid: flat graph with constant transversal") {
  const Scenario s = build_scenario(test_scenarios::paraboloid());
  for (const auto& p : s.sample_points) {
    const InducedStructure st = induced_structure(s, p);
    for (double g : st.gamma) CHECK(std::abs(g) < 1e-14);
    CHECK((st.h - 2.0 * MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(st.S.cwiseAbs().maxCoeff() < 1e-14);
    CHECK(st.tau.cwiseAbs().maxCoeff() < 1e-14);
    const CurvatureTensor R = curvature(st);
    for (double r : R.R) CHECK(std::abs(r) < 1e-13);
    const Residuals res = fundamental_residuals(st, R);
    CHECK(res.gauss < 1e-12);
    CHECK(res.codazzi_h < 1e-12);
    CHECK(res.codazzi_s < 1e-12);
    CHECK(res.ricci < 1e-12);
  }
}

TEST_CASE("nilpotent example n=2: closed-form h, S, tau") {
  const Scenario s = build_scenario(test_scenarios::paper_example(2));
  REQUIRE(s.sample_points.size() == 3);
  for (const auto& p : s.sample_points) {
    CAPTURE(p[0]);
    const double x = p[0], y = p[1], z0 = p[2], z1 = p[3];
    const InducedStructure st = induced_structure(s, p);
    MatrixXd S_expect = MatrixXd::Zero(4, 4);
    S_expect(1, 0) = 1.0;  // S d_x = d_y
    CHECK((st.S - S_expect).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(st.tau.cwiseAbs().maxCoeff() < 1e-10);
    MatrixXd h_expect = MatrixXd::Zero(4, 4);
    h_expect(0, 1) = h_expect(1, 0) = 1.0;
    h_expect(2, 2) = x * y;
    h_expect(3, 3) = y * std::sin(z0) / std::cos(z1);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        CHECK(std::abs(st.h(i, j) - h_expect(i, j)) <= 1e-9 * std::max(1.0, std::abs(h_expect(i, j))));
    CHECK(st.dtau.cwiseAbs().maxCoeff() < 1e-10);
    CHECK(frame_consistency(s, st) < 1e-9);

    const CurvatureTensor R = curvature(st);
    CHECK(gauss_model_deviation(st, R) < 1e-8);
    const Residuals res = fundamental_residuals(st, R);
    CHECK(res.gauss < 1e-8);
    CHECK(res.codazzi_h < 1e-8);
    CHECK(res.codazzi_s < 1e-8);
    CHECK(res.ricci < 1e-8);
  }
  // first sample point: h(d_z1, d_z1) = 2 sin(pi/4) / cos(pi/6)
  const InducedStructure st = induced_structure(s, s.sample_points[0]);
  CHECK(st.h(3, 3) == doctest::Approx(1.6329932).epsilon(1e-7));
  CHECK(st.h(2, 2) == doctest::Approx(2.0));
}

TEST_CASE("centroaffine sphere: S = Id, tau = 0, h = round metric") {
  const Scenario s = build_scenario(test_scenarios::centroaffine_sphere());
  for (const auto& p : s.sample_points) {
    const InducedStructure st = induced_structure(s, p);
    CHECK((st.S - MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(st.tau.cwiseAbs().maxCoeff() < 1e-12);
    const double ca = std::cos(p[0]), cb = std::cos(p[1]), cc = std::cos(p[2]);
    const Eigen::Vector4d g(1.0, ca * ca, ca * ca * cb * cb, ca * ca * cb * cb * cc * cc);
    CHECK((st.h - MatrixXd(g.asDiagonal())).cwiseAbs().maxCoeff() < 1e-12);
    const CurvatureTensor R = curvature(st);
    // R(X,Y)Z = h(Y,Z)X - h(X,Z)Y
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int t = 0; t < 10; ++t) {
      VectorXd X(4), Y(4), Z(4);
      for (int i = 0; i < 4; ++i) X(i) = u(rng), Y(i) = u(rng), Z(i) = u(rng);
      const VectorXd expect = Y.dot(st.h * Z) * X - X.dot(st.h * Z) * Y;
      CHECK((R.apply(X, Y, Z) - expect).cwiseAbs().maxCoeff() < 1e-8);
    }
    const Residuals res = fundamental_residuals(st, R);
    CHECK(res.gauss < 1e-8);
    CHECK(res.codazzi_h < 1e-8);
    CHECK(res.codazzi_s < 1e-8);
    CHECK(res.ricci < 1e-8);
  }
}

TEST_CASE("non-equiaffine transversal: tau and d tau nonzero, Ricci residual still vanishes") {
  // xi = (u2, 0, 0, 0, 1) along the paraboloid: by hand, with q = 1 - 2 u1 u2,
  // tau = (0, -2 u1 / q, 0, 0) and S d_2 = -(1/q) d_1 (+ nothing else).
  ScenarioSource src = test_scenarios::paraboloid();
  src.transversal = {"u2", "0", "0", "0", "1"};
  src.sample_points = {{0.3, -0.7, 0.2, 0.1}, {-0.4, 0.5, 1.0, -2.0}};
  const Scenario s = build_scenario(src);
  for (const auto& p : s.sample_points) {
    const InducedStructure st = induced_structure(s, p);
    const double q = 1.0 - 2.0 * p[0] * p[1];
    Eigen::Vector4d tau_expect(0, -2.0 * p[0] / q, 0, 0);
    CHECK((st.tau - tau_expect).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::abs(st.S(0, 1) + 1.0 / q) < 1e-12);
    // d_1 tau_2 - d_2 tau_1 = d/du1 (-2 u1 / (1 - 2 u1 u2)) = -2 / q^2
    CHECK(std::abs(st.dtau(0, 1) + 2.0 / (q * q)) < 1e-12);
    CHECK(std::abs(st.dtau(0, 1) + st.dtau(1, 0)) == 0.0);
    const CurvatureTensor R = curvature(st);
    const Residuals res = fundamental_residuals(st, R);
    CHECK(res.ricci < 1e-10);
    CHECK(res.gauss < 1e-10);
    CHECK(res.codazzi_h < 1e-10);
    CHECK(res.codazzi_s < 1e-10);
    CHECK(frame_consistency(s, st) < 1e-9);
  }
}

TEST_CASE("derivatives of Gamma agree with finite differences") {
  const Scenario s = build_scenario(test_scenarios::paper_example(2));
  const std::vector<double> p = s.sample_points[1];
  const InducedStructure st = induced_structure(s, p);
  const int n = 4;
  const double hstep = 1e-5;
  for (int l = 0; l < n; ++l) {
    std::vector<double> a = p, b = p;
    a[l] += hstep;
    b[l] -= hstep;
    const InducedStructure sa = induced_structure(s, a), sb = induced_structure(s, b);
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const double fd = (sa.Gamma(k, i, j) - sb.Gamma(k, i, j)) / (2 * hstep);
          CHECK(std::abs(fd - st.dGamma(l, k, i, j)) < 1e-6);
        }
  }
}

TEST_CASE("invariants: symmetric h, torsion-free Gamma, antisymmetric R") {
  const Scenario s = build_scenario(test_scenarios::paper_example(3));
  for (const auto& p : s.sample_points) {
    const InducedStructure st = induced_structure(s, p);
    const int n = st.dim;
    CHECK((st.h - st.h.transpose()).cwiseAbs().maxCoeff() <= 1e-10);
    const CurvatureTensor R = curvature(st);
    for (int l = 0; l < n; ++l)
      for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            CHECK(st.Gamma(l, i, j) == st.Gamma(l, j, i));
            CHECK(std::abs(R(l, k, i, j) + R(l, k, j, i)) < 1e-10);
          }
    // Gauss-equation equivalence with the algebraic model built from the same (S, h)
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1, 1);
    model::GaussModel m;
    m.dim = n;
    m.S = st.S;
    m.H = st.h;
    for (int t = 0; t < 5; ++t) {
      VectorXd X(n), Y(n), Z(n);
      for (int i = 0; i < n; ++i) X(i) = u(rng), Y(i) = u(rng), Z(i) = u(rng);
      CHECK((R.apply(X, Y, Z) - model::model_curvature(m, X, Y, Z)).cwiseAbs().maxCoeff() < 1e-8);
    }
    const Residuals res = fundamental_residuals(st, R);
    CHECK(res.codazzi_h < 1e-8);
    CHECK(res.codazzi_s < 1e-8);
    CHECK(res.ricci < 1e-8);
  }
}

TEST_CASE("errors: singular frame, constraints, malformed input") {
  ScenarioSource src = test_scenarios::paraboloid();
  src.transversal = {"1", "0", "0", "0", "2*u1"};  // tangent at every point: xi = d_1 f
  src.sample_points = {{0.5, 0.0, 0.0, 0.0}};
  const Scenario s = build_scenario(src);
  try {
    induced_structure(s, s.sample_points[0]);
    FAIL("expected a singular frame");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingularFrame);
  }

  ScenarioSource bad = test_scenarios::paper_example(2);
  bad.sample_points.push_back({0.0, 1.0, 0.5, 0.5});
  try {
    build_scenario(bad);
    FAIL("expected a domain error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Domain);
    CHECK(std::string(e.what()).find("x_nonzero") != std::string::npos);
  }

  ScenarioSource syntax = test_scenarios::paraboloid();
  syntax.immersion[0] = "u1 + * u2";
  CHECK_THROWS_AS(build_scenario(syntax), ParseError);

  ScenarioSource unknown = test_scenarios::paraboloid();
  unknown.immersion[0] = "w0";
  try {
    build_scenario(unknown);
    FAIL("expected unknown identifier");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownIdentifier);
  }

  ScenarioSource sym = test_scenarios::paraboloid();
  sym.omega.assign(16, "0");
  sym.omega[1] = "1";
  sym.omega[4] = "1";
  CHECK_THROWS_AS(build_scenario(sym), Error);

  const std::vector<double> origin{0, 0, 0, 0};
  CHECK_THROWS_AS(induced_jets(build_scenario(test_scenarios::paraboloid()), origin, 4), Error);
}
