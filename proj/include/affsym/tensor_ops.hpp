#pragma once

// Iterated curvature action R^k.T and covariant derivatives nabla^k T of (0,p)
// tensors. Slot order: (R^k.T)(X1,Y1,...,Xk,Yk,Z1..Zp) with (X1,Y1) outermost;
// (nabla^k T)(D1,...,Dk,Z1..Zp) with D1 the last derivative taken.

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "affsym/geometry.hpp"
#include "affsym/model.hpp"

namespace affsym::tensor_ops {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline constexpr int kAlgebraicPowerCap = 8;
inline constexpr int kGeometricPowerCap = 3;

class CurvatureProvider {
 public:
  virtual ~CurvatureProvider() = default;
  virtual int dim() const = 0;
  /// L with L Z = R(X,Y) Z.
  virtual MatrixXd operator_matrix(const VectorXd& X, const VectorXd& Y) const = 0;
  virtual bool algebraic() const = 0;
  VectorXd apply(const VectorXd& X, const VectorXd& Y, const VectorXd& Z) const { return operator_matrix(X, Y) * Z; }
  int power_cap() const { return algebraic() ? kAlgebraicPowerCap : kGeometricPowerCap; }
};

/// Gauss-equation curvature of a model: R(X,Y) = SX (HY)^T - SY (HX)^T.
class ModelCurvature final : public CurvatureProvider {
 public:
  explicit ModelCurvature(model::GaussModel m) : m_(std::move(m)) {}
  int dim() const override { return m_.dim; }
  MatrixXd operator_matrix(const VectorXd& X, const VectorXd& Y) const override;
  bool algebraic() const override { return true; }
  const model::GaussModel& model() const { return m_; }

 private:
  model::GaussModel m_;
};

class GeometricCurvature final : public CurvatureProvider {
 public:
  explicit GeometricCurvature(geometry::CurvatureTensor R) : R_(std::move(R)) {}
  int dim() const override { return R_.dim; }
  MatrixXd operator_matrix(const VectorXd& X, const VectorXd& Y) const override { return R_.operator_matrix(X, Y); }
  bool algebraic() const override { return false; }

 private:
  geometry::CurvatureTensor R_;
};

/// Dense (0,p) tensor at a point; component (i1,...,ip) at ((i1*dim + i2)*dim + ...).
struct Tensor {
  int dim = 0;
  int rank = 0;
  std::vector<double> c;

  static Tensor zeros(int dim, int rank);
  static Tensor from_matrix(const MatrixXd& w);
  double at(std::span<const int> idx) const;
  /// Multilinear evaluation on arbitrary vectors.
  double eval(std::span<const VectorXd> args) const;
  double max_abs() const;
};

/// Recursive point evaluator for R^k.T with an optional per-session memo keyed
/// on (k, argument bits).
class RPowerEvaluator {
 public:
  RPowerEvaluator(const CurvatureProvider& c, const Tensor& T, bool memo = true);
  /// Throws InvalidArgument on arity mismatch, OrderExceeded above the provider's cap.
  double operator()(int k, std::span<const VectorXd> args);
  std::size_t memo_size() const { return memo_.size(); }
  std::size_t memo_hits() const { return hits_; }

 private:
  double eval(int k, std::vector<VectorXd>& args);

  const CurvatureProvider& c_;
  const Tensor& T_;
  bool use_memo_;
  std::unordered_map<std::string, double> memo_;
  std::size_t hits_ = 0;
};

double r_power_action(const CurvatureProvider& c, const Tensor& T, int k, std::span<const VectorXd> args,
                      bool memo = true);

/// Same on basis vectors (0-based indices).
double r_power_action_basis(const CurvatureProvider& c, const Tensor& T, int k, std::span<const int> args,
                            bool memo = true);

/// All components of R^k.T over basis tuples (rank 2k + p). Throws
/// InvalidArgument if the result would exceed kMaxTensorEntries.
inline constexpr std::size_t kMaxTensorEntries = std::size_t{1} << 25;
Tensor r_power_tensor(const CurvatureProvider& c, const Tensor& T, int k);

/// A (0,p) field given by component expressions in the scenario coordinates.
struct CovariantField {
  int dim = 0;
  int rank = 0;
  std::vector<calculus::Expr> components;

  static CovariantField omega(const geometry::Scenario& s);
  Tensor at(std::span<const double> x) const;
};

/// All components of nabla^k T at x (rank k + p), by jet-valued recursion.
/// Requires k <= kGeometricPowerCap.
Tensor nabla_power_tensor(const CovariantField& T, const geometry::Scenario& s, int k, std::span<const double> x);

double nabla_power(const CovariantField& T, const geometry::Scenario& s, int k, std::span<const double> x,
                   std::span<const int> args);

/// Both sides of Codazzi for S: (nabla_X S)Y - tau(X) SY and (nabla_Y S)X - tau(Y) SX.
struct VectorPair {
  VectorXd lhs;
  VectorXd rhs;
};
VectorPair nabla_S_codazzi(const geometry::Scenario& s, std::span<const double> x, int X, int Y);

struct ScalarPair {
  double lhs = 0.0;
  double rhs = 0.0;
};

/// lhs = (R^k.T)(X1,X-1,...,Xk,X-k,Y...) from the provider; rhs = signed sum of
/// nabla^{2k}T over all sign assignments. `pairs` lists X1,X-1,X2,X-2,... (2k basis
/// indices); `ys` the p trailing basis indices.
ScalarPair alternating_sum_identity(const CovariantField& T, const geometry::Scenario& s, const CurvatureProvider& c,
                                    int k, std::span<const double> x, std::span<const int> pairs,
                                    std::span<const int> ys);

}  // namespace affsym::tensor_ops
