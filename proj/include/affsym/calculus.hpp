#pragma once

// Closed-form coordinate expressions and truncated multivariate Taylor jets.
//
// A Jet stores the Taylor coefficients of a scalar function at a base point,
// densely over all multi-indices of total degree <= order. The coefficient of
// multi-index m is the partial derivative d^m f divided by m!. Coefficients are
// laid out graded by degree, so a jet of order k is a prefix of the same
// function's jet of any higher order.

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "affsym/error.hpp"

#ifndef AFFSYM_MAX_JET_ORDER
#define AFFSYM_MAX_JET_ORDER 5
#endif

namespace affsym::calculus {

inline constexpr int kMaxJetOrder = AFFSYM_MAX_JET_ORDER;
inline constexpr int kMaxJetVariables = 16;

// ---------------------------------------------------------------------------
// Expressions

enum class BinaryOp { Add, Sub, Mul, Div };
enum class Function { Sin, Cos, Tan, Exp, Ln, Sqrt };

std::string_view function_name(Function f);

class Expr;

struct NumberNode {
  double value;
};
struct VariableNode {
  int index;
  std::string name;
};
struct NegateNode;
struct BinaryNode;
struct PowerNode;
struct CallNode;

/// Immutable expression tree; copies share structure.
class Expr {
 public:
  using Node = std::variant<NumberNode, VariableNode, NegateNode, BinaryNode, PowerNode, CallNode>;

  Expr() = default;

  static Expr number(double v);
  static Expr variable(int index, std::string name);
  static Expr negate(Expr operand);
  static Expr binary(BinaryOp op, Expr lhs, Expr rhs);
  static Expr power(Expr base, double exponent);
  static Expr call(Function f, Expr arg);

  bool valid() const;
  const Node& node() const;

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

struct NegateNode {
  Expr operand;
};
struct BinaryNode {
  BinaryOp op;
  Expr lhs;
  Expr rhs;
};
struct PowerNode {
  Expr base;
  double exponent;
};
struct CallNode {
  Function function;
  Expr arg;
};

inline bool Expr::valid() const { return static_cast<bool>(node_); }
inline const Expr::Node& Expr::node() const { return *node_; }

/// Named constants substituted as literals at parse time (e.g. "pi").
using ConstantTable = std::map<std::string, double, std::less<>>;
const ConstantTable& default_constants();

/// Parses `source` against the coordinate list. Precedence from loosest to
/// tightest: + -, * /, unary -, ^. Binary + - * / are left-associative, ^ is
/// right-associative and takes a numeric literal exponent.
Expr parse_expr(std::string_view source, std::span<const std::string> coords,
                const ConstantTable* constants = nullptr);

/// Renders with the minimal parentheses; parse_expr(to_string(e)) == e.
std::string to_string(const Expr& e);

/// Plain double evaluation. Throws DomainError outside ln/sqrt/tan domains.
double evaluate(const Expr& e, std::span<const double> point);

/// Largest variable index referenced plus one (0 for constant expressions).
int variable_extent(const Expr& e);

// ---------------------------------------------------------------------------
// Jets

/// Shared indexing tables for jets with a given variable count and order.
class JetLayout {
 public:
  struct ProductTerm {
    std::uint32_t a;
    std::uint32_t b;
    std::uint32_t out;
  };

  static std::shared_ptr<const JetLayout> get(int nvars, int order);

  int nvars() const { return nvars_; }
  int order() const { return order_; }
  std::size_t size() const { return degrees_.size(); }

  std::span<const std::uint8_t> exponents(std::size_t idx) const {
    return {exponents_.data() + idx * static_cast<std::size_t>(nvars_), static_cast<std::size_t>(nvars_)};
  }
  int degree(std::size_t idx) const { return degrees_[idx]; }
  /// Number of coefficients of total degree <= d.
  std::size_t prefix_size(int d) const { return degree_end_[static_cast<std::size_t>(d)]; }
  /// Throws InvalidArgument if the multi-index is not stored in this layout.
  std::size_t index_of(std::span<const int> multi) const;
  std::size_t unit_index(int var) const { return 1 + static_cast<std::size_t>(var); }
  /// m! for the multi-index at idx.
  double factorial_weight(std::size_t idx) const { return weights_[idx]; }

  const std::vector<ProductTerm>& products() const { return products_; }
  /// For coefficient t of the order-1-lower layout, the index of t + e_var here.
  const std::vector<std::uint32_t>& derivative_sources(int var) const {
    return derivative_sources_[static_cast<std::size_t>(var)];
  }

 private:
  JetLayout(int nvars, int order);
  static std::uint64_t pack(std::span<const int> multi);
  static std::uint64_t pack(std::span<const std::uint8_t> multi);

  int nvars_;
  int order_;
  std::vector<std::uint8_t> exponents_;
  std::vector<int> degrees_;
  std::vector<std::size_t> degree_end_;
  std::vector<double> weights_;
  std::map<std::uint64_t, std::uint32_t> lookup_;
  std::vector<ProductTerm> products_;
  std::vector<std::vector<std::uint32_t>> derivative_sources_;
};

class Jet {
 public:
  Jet() = default;
  Jet(std::shared_ptr<const JetLayout> layout, double constant);

  static Jet constant(int nvars, int order, double c);
  /// The coordinate function x_var expanded about `at`.
  static Jet variable(int nvars, int order, int var, double at);

  bool valid() const { return layout_ != nullptr; }
  const JetLayout& layout() const { return *layout_; }
  const std::shared_ptr<const JetLayout>& layout_ptr() const { return layout_; }
  int nvars() const { return layout_->nvars(); }
  int order() const { return layout_->order(); }

  double value() const { return coeffs_[0]; }
  std::span<const double> coefficients() const { return coeffs_; }
  std::span<double> coefficients() { return coeffs_; }
  /// Taylor-normalized coefficient (partial / m!).
  double coeff(std::span<const int> multi) const;
  /// The partial derivative itself.
  double partial(std::span<const int> multi) const;
  /// First partial d/dx_var at the base point.
  double gradient(int var) const;

  /// d/dx_var as a jet one order lower. Requires order >= 1.
  Jet derivative(int var) const;
  Jet truncated(int order) const;

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(const Jet& o);
  Jet& operator/=(const Jet& o);
  Jet& operator+=(double c);
  Jet& operator-=(double c);
  Jet& operator*=(double c);
  Jet& operator/=(double c);

  friend Jet operator-(const Jet& a);
  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator/(const Jet& a, const Jet& b);
  friend Jet operator+(Jet a, double c) { return a += c; }
  friend Jet operator+(double c, Jet a) { return a += c; }
  friend Jet operator-(Jet a, double c) { return a -= c; }
  friend Jet operator-(double c, const Jet& a) { return (-a) += c; }
  friend Jet operator*(Jet a, double c) { return a *= c; }
  friend Jet operator*(double c, Jet a) { return a *= c; }
  friend Jet operator/(Jet a, double c) { return a /= c; }
  friend Jet operator/(double c, const Jet& a);

 private:
  friend Jet compose_series(const Jet& a, std::span<const double> taylor);

  std::shared_ptr<const JetLayout> layout_;
  std::vector<double> coeffs_;
};

Jet exp(const Jet& a);
Jet log(const Jet& a);
Jet sin(const Jet& a);
Jet cos(const Jet& a);
Jet tan(const Jet& a);
Jet sqrt(const Jet& a);
Jet pow(const Jet& a, double exponent);
Jet reciprocal(const Jet& a);

/// Coefficient-wise max |a - b|; layouts must agree in nvars, compared up to the lower order.
double max_abs_difference(const Jet& a, const Jet& b);

/// Jet of `e` about `point` truncated at `order` (<= kMaxJetOrder).
Jet eval_jet(const Expr& e, std::span<const double> point, int order);

/// Evaluates `e` on jet-valued coordinates (all sharing one layout).
Jet eval_jet_on(const Expr& e, std::span<const Jet> coords);

}  // namespace affsym::calculus
