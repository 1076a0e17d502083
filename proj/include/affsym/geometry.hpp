#pragma once

// Induced affine structure of an immersion f: U -> R^{m+1} with transversal xi:
//   d_i d_j f = Gamma^k_ij d_k f + h_ij xi,   d_i xi = -S^k_i d_k f + tau_i xi.
// Indices are 0-based; R(d_i,d_j)d_k = sum_l R^l_kij d_l.

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "affsym/calculus.hpp"

namespace affsym::geometry {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using calculus::Expr;
using calculus::Jet;

enum class ConstraintOp { Gt, Ge, Lt, Le, Ne };

struct Constraint {
  std::string name;
  std::string source;
  Expr expr;
  ConstraintOp op = ConstraintOp::Gt;
  double value = 0.0;
};

struct Scenario {
  std::string name;
  int dim = 0;
  std::vector<std::string> coords;
  std::vector<Expr> immersion;    // dim + 1
  std::vector<Expr> transversal;  // dim + 1
  std::vector<Expr> omega;        // dim * dim, row-major
  std::vector<std::vector<double>> sample_points;
  std::vector<Constraint> constraints;
};

/// Textual form of a scenario, as read from a scenario file.
struct ScenarioSource {
  struct ConstraintSource {
    std::string name;
    std::string expr;
    std::string op;  // one of > >= < <= !=
    double value = 0.0;
  };
  std::string name;
  std::vector<std::string> coords;
  std::vector<std::string> immersion;
  std::vector<std::string> transversal;
  std::vector<std::string> omega;  // row-major; empty selects the default tridiagonal form
  std::vector<std::vector<double>> sample_points;
  std::vector<ConstraintSource> constraints;
};

/// Parses every expression, validates, and checks all sample points against the constraints.
Scenario build_scenario(const ScenarioSource& src);

/// Structural checks (counts, dim even >= 4, variables in range). Throws InvalidArgument.
void validate(const Scenario& s);

/// Throws DomainError naming the first violated constraint.
void check_constraints(const Scenario& s, std::span<const double> x);

/// omega at x; throws InvalidArgument if not antisymmetric (1e-12).
MatrixXd omega_at(const Scenario& s, std::span<const double> x);

/// Jet-valued induced structure: every entry is a jet of `order` about x.
/// Needs immersion jets of order + 2.
struct InducedJets {
  int dim = 0;
  int order = 0;
  std::vector<Jet> gamma;  // (k * dim + i) * dim + j  ->  Gamma^k_ij
  std::vector<Jet> h;      // i * dim + j
  std::vector<Jet> S;      // k * dim + i  ->  S^k_i
  std::vector<Jet> tau;    // i
  double frame_rcond = 0.0;

  const Jet& Gamma(int k, int i, int j) const { return gamma[static_cast<std::size_t>((k * dim + i) * dim + j)]; }
};

InducedJets induced_jets(const Scenario& s, std::span<const double> x, int order);

struct InducedStructure {
  std::vector<double> point;
  int dim = 0;
  std::vector<double> gamma;   // Gamma^k_ij at (k*dim + i)*dim + j
  std::vector<double> dgamma;  // d_l Gamma^k_ij at ((l*dim + k)*dim + i)*dim + j
  MatrixXd h;
  MatrixXd S;                  // S(k, i) = S^k_i, so S * e_i = S e_i
  VectorXd tau;
  MatrixXd dtau;               // d_i tau_j - d_j tau_i
  std::vector<double> dh;      // d_l h_ij at (l*dim + i)*dim + j
  std::vector<double> dS;      // d_l S^k_i at (l*dim + k)*dim + i
  double frame_rcond = 0.0;

  double Gamma(int k, int i, int j) const { return gamma[static_cast<std::size_t>((k * dim + i) * dim + j)]; }
  double dGamma(int l, int k, int i, int j) const {
    return dgamma[static_cast<std::size_t>(((l * dim + k) * dim + i) * dim + j)];
  }
  double dH(int l, int i, int j) const { return dh[static_cast<std::size_t>((l * dim + i) * dim + j)]; }
  double dShape(int l, int k, int i) const { return dS[static_cast<std::size_t>((l * dim + k) * dim + i)]; }
};

/// Throws SingularFrame when the frame's reciprocal condition is below 1e-12.
InducedStructure induced_structure(const Scenario& s, std::span<const double> x);

struct CurvatureTensor {
  std::vector<double> point;
  int dim = 0;
  std::vector<double> R;  // R^l_kij at ((l*dim + k)*dim + i)*dim + j

  double operator()(int l, int k, int i, int j) const {
    return R[static_cast<std::size_t>(((l * dim + k) * dim + i) * dim + j)];
  }
  /// Matrix L with L Z = R(X,Y) Z.
  MatrixXd operator_matrix(const VectorXd& X, const VectorXd& Y) const;
  VectorXd apply(const VectorXd& X, const VectorXd& Y, const VectorXd& Z) const;
};

CurvatureTensor curvature(const InducedStructure& st);

struct Residuals {
  double gauss = 0.0;
  double codazzi_h = 0.0;
  double codazzi_s = 0.0;
  double ricci = 0.0;
};

Residuals fundamental_residuals(const InducedStructure& st, const CurvatureTensor& R);

/// Relative residual of substituting (Gamma, h, S, tau) back into the Gauss and
/// Weingarten formulas at x.
double frame_consistency(const Scenario& s, const InducedStructure& st);

/// max |R^l_kij - (h_jk S^l_i - h_ik S^l_j)|.
double gauss_model_deviation(const InducedStructure& st, const CurvatureTensor& R);

}  // namespace affsym::geometry
