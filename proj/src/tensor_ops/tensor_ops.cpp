#include "affsym/tensor_ops.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "affsym/error.hpp"

namespace affsym::tensor_ops {

namespace {

using calculus::Jet;

std::size_t sz(int v) { return static_cast<std::size_t>(v); }

std::size_t ipow(int base, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= sz(base);
  return r;
}

void check_power(const CurvatureProvider& c, int k) {
  if (k < 0) throw Error(ErrorCode::InvalidArgument, "curvature power must be >= 0");
  if (k > c.power_cap())
    throw Error(ErrorCode::OrderExceeded, "curvature power " + std::to_string(k) + " exceeds the cap " +
                                              std::to_string(c.power_cap()) + " for this provider");
}

VectorXd unit(int dim, int i) {
  if (i < 0 || i >= dim) throw Error(ErrorCode::InvalidArgument, "basis index out of range");
  VectorXd v = VectorXd::Zero(dim);
  v(i) = 1.0;
  return v;
}

}  // namespace

MatrixXd ModelCurvature::operator_matrix(const VectorXd& X, const VectorXd& Y) const {
  const VectorXd SX = m_.S * X, SY = m_.S * Y, HX = m_.H * X, HY = m_.H * Y;
  return SX * HY.transpose() - SY * HX.transpose();
}

// ---------------------------------------------------------------------------
// Tensor

Tensor Tensor::zeros(int dim, int rank) {
  Tensor t;
  t.dim = dim;
  t.rank = rank;
  t.c.assign(ipow(dim, rank), 0.0);
  return t;
}

Tensor Tensor::from_matrix(const MatrixXd& w) {
  Tensor t = zeros(static_cast<int>(w.rows()), 2);
  for (int i = 0; i < t.dim; ++i)
    for (int j = 0; j < t.dim; ++j) t.c[sz(i * t.dim + j)] = w(i, j);
  return t;
}

double Tensor::at(std::span<const int> idx) const {
  if (static_cast<int>(idx.size()) != rank) throw Error(ErrorCode::InvalidArgument, "tensor index arity mismatch");
  std::size_t flat = 0;
  for (int i : idx) {
    if (i < 0 || i >= dim) throw Error(ErrorCode::InvalidArgument, "tensor index out of range");
    flat = flat * sz(dim) + sz(i);
  }
  return c[flat];
}

double Tensor::eval(std::span<const VectorXd> args) const {
  if (static_cast<int>(args.size()) != rank) throw Error(ErrorCode::InvalidArgument, "tensor arity mismatch");
  if (rank == 0) return c[0];
  // contract the last slot repeatedly
  std::vector<double> v = c;
  for (int slot = rank - 1; slot >= 0; --slot) {
    const VectorXd& a = args[sz(slot)];
    const std::size_t outer = v.size() / sz(dim);
    std::vector<double> next(outer, 0.0);
    for (std::size_t o = 0; o < outer; ++o) {
      double acc = 0.0;
      for (int i = 0; i < dim; ++i) acc += v[o * sz(dim) + sz(i)] * a(i);
      next[o] = acc;
    }
    v.swap(next);
  }
  return v[0];
}

double Tensor::max_abs() const {
  double m = 0.0;
  for (double x : c) m = std::max(m, std::abs(x));
  return m;
}

// ---------------------------------------------------------------------------
// R^k.T

RPowerEvaluator::RPowerEvaluator(const CurvatureProvider& c, const Tensor& T, bool memo)
    : c_(c), T_(T), use_memo_(memo) {
  if (T.dim != c.dim()) throw Error(ErrorCode::InvalidArgument, "tensor and curvature dimensions differ");
}

double RPowerEvaluator::operator()(int k, std::span<const VectorXd> args) {
  check_power(c_, k);
  if (static_cast<int>(args.size()) != 2 * k + T_.rank)
    throw Error(ErrorCode::InvalidArgument, "R^k.T takes 2k+p = " + std::to_string(2 * k + T_.rank) +
                                                " arguments, got " + std::to_string(args.size()));
  for (const auto& a : args)
    if (a.size() != c_.dim()) throw Error(ErrorCode::InvalidArgument, "argument vector has wrong dimension");
  std::vector<VectorXd> v(args.begin(), args.end());
  return eval(k, v);
}

double RPowerEvaluator::eval(int k, std::vector<VectorXd>& args) {
  if (k == 0) return T_.eval(args);
  std::string key;
  if (use_memo_) {
    const std::size_t n = sz(c_.dim());
    key.resize(1 + args.size() * n * sizeof(double));
    key[0] = static_cast<char>(k);
    char* p = key.data() + 1;
    for (const auto& a : args) {
      std::memcpy(p, a.data(), n * sizeof(double));
      p += n * sizeof(double);
    }
    if (auto it = memo_.find(key); it != memo_.end()) {
      ++hits_;
      return it->second;
    }
  }
  const MatrixXd L = c_.operator_matrix(args[0], args[1]);
  std::vector<VectorXd> rest(args.begin() + 2, args.end());
  auto term = [&](std::size_t s) {
    const VectorXd saved = rest[s];
    rest[s] = L * saved;
    const double v = eval(k - 1, rest);
    rest[s] = saved;
    return v;
  };
  // Terms are summed pairwise along slot pairs so that swapping the two vectors
  // of any pair negates the result exactly.
  double acc = 0.0;
  for (std::size_t s = 0; s < rest.size(); s += 2) {
    double pair = term(s);
    if (s + 1 < rest.size()) pair += term(s + 1);
    acc += pair;
  }
  const double out = -acc;
  if (use_memo_) memo_.emplace(std::move(key), out);
  return out;
}

double r_power_action(const CurvatureProvider& c, const Tensor& T, int k, std::span<const VectorXd> args, bool memo) {
  RPowerEvaluator ev(c, T, memo);
  return ev(k, args);
}

double r_power_action_basis(const CurvatureProvider& c, const Tensor& T, int k, std::span<const int> args,
                            bool memo) {
  std::vector<VectorXd> v;
  v.reserve(args.size());
  for (int i : args) v.push_back(unit(c.dim(), i));
  return r_power_action(c, T, k, v, memo);
}

Tensor r_power_tensor(const CurvatureProvider& c, const Tensor& T, int k) {
  check_power(c, k);
  const int d = c.dim();
  if (T.dim != d) throw Error(ErrorCode::InvalidArgument, "tensor and curvature dimensions differ");
  if (ipow(d, 2 * k + T.rank) > kMaxTensorEntries)
    throw Error(ErrorCode::InvalidArgument, "full R^k.T tensor too large (dim " + std::to_string(d) + ", rank " +
                                                std::to_string(2 * k + T.rank) + ")");
  std::vector<MatrixXd> L(sz(d * d));
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) L[sz(a * d + b)] = c.operator_matrix(unit(d, a), unit(d, b));

  Tensor cur = T;
  for (int j = 1; j <= k; ++j) {
    const int m = cur.rank;
    const std::size_t inner = ipow(d, m);
    std::vector<std::size_t> stride(sz(m));
    for (int s = 0; s < m; ++s) stride[sz(s)] = ipow(d, m - 1 - s);
    Tensor next = Tensor::zeros(d, m + 2);
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b) {
        const MatrixXd& Lab = L[sz(a * d + b)];
        if (Lab.isZero(0.0)) continue;
        double* out = next.c.data() + sz(a * d + b) * inner;
        for (std::size_t r = 0; r < inner; ++r) {
          double acc = 0.0;
          for (int s = 0; s < m; ++s) {
            const std::size_t st = stride[sz(s)];
            const int rs = static_cast<int>((r / st) % sz(d));
            const std::size_t base = r - sz(rs) * st;
            for (int q = 0; q < d; ++q) {
              const double l = Lab(q, rs);
              if (l != 0.0) acc += l * cur.c[base + sz(q) * st];
            }
          }
          out[r] = -acc;
        }
      }
    }
    cur = std::move(next);
  }
  return cur;
}

// ---------------------------------------------------------------------------
// Covariant derivatives

CovariantField CovariantField::omega(const geometry::Scenario& s) {
  CovariantField f;
  f.dim = s.dim;
  f.rank = 2;
  f.components = s.omega;
  return f;
}

Tensor CovariantField::at(std::span<const double> x) const {
  Tensor t = Tensor::zeros(dim, rank);
  if (components.size() != t.c.size()) throw Error(ErrorCode::InvalidArgument, "field component count mismatch");
  for (std::size_t i = 0; i < t.c.size(); ++i) t.c[i] = calculus::evaluate(components[i], x);
  return t;
}

Tensor nabla_power_tensor(const CovariantField& T, const geometry::Scenario& s, int k, std::span<const double> x) {
  if (k < 0) throw Error(ErrorCode::InvalidArgument, "derivative order must be >= 0");
  if (k > kGeometricPowerCap)
    throw Error(ErrorCode::OrderExceeded, "nabla^" + std::to_string(k) + " exceeds the cap " +
                                              std::to_string(kGeometricPowerCap));
  if (T.dim != s.dim) throw Error(ErrorCode::InvalidArgument, "field and scenario dimensions differ");
  if (k == 0) return T.at(x);
  const int d = s.dim;
  const geometry::InducedJets G = geometry::induced_jets(s, x, k - 1);

  std::vector<Jet> U;
  U.reserve(T.components.size());
  for (const auto& e : T.components) U.push_back(calculus::eval_jet(e, x, k));
  int rank = T.rank;
  for (int j = 0; j < k; ++j) {
    const int ord = k - j - 1;
    std::vector<Jet> gamma;
    std::vector<char> nonzero;
    for (const auto& g : G.gamma) {
      gamma.push_back(g.truncated(ord));
      const auto cs = gamma.back().coefficients();
      nonzero.push_back(std::any_of(cs.begin(), cs.end(), [](double v) { return v != 0.0; }));
    }
    std::vector<Jet> Ut;
    Ut.reserve(U.size());
    for (const auto& u : U) Ut.push_back(u.truncated(ord));

    const std::size_t inner = U.size();
    std::vector<std::size_t> stride(sz(rank));
    for (int s2 = 0; s2 < rank; ++s2) stride[sz(s2)] = ipow(d, rank - 1 - s2);
    std::vector<Jet> next;
    next.reserve(sz(d) * inner);
    for (int i = 0; i < d; ++i) {
      for (std::size_t r = 0; r < inner; ++r) {
        Jet v = U[r].derivative(i);
        for (int s2 = 0; s2 < rank; ++s2) {
          const std::size_t st = stride[sz(s2)];
          const int rs = static_cast<int>((r / st) % sz(d));
          const std::size_t base = r - sz(rs) * st;
          for (int q = 0; q < d; ++q) {
            const std::size_t g = sz((q * d + i) * d + rs);
            if (nonzero[g]) v -= gamma[g] * Ut[base + sz(q) * st];
          }
        }
        next.push_back(std::move(v));
      }
    }
    U = std::move(next);
    ++rank;
  }
  Tensor out = Tensor::zeros(d, rank);
  for (std::size_t i = 0; i < U.size(); ++i) out.c[i] = U[i].value();
  return out;
}

double nabla_power(const CovariantField& T, const geometry::Scenario& s, int k, std::span<const double> x,
                   std::span<const int> args) {
  if (static_cast<int>(args.size()) != k + T.rank)
    throw Error(ErrorCode::InvalidArgument, "nabla^k T takes k+p arguments");
  return nabla_power_tensor(T, s, k, x).at(args);
}

VectorPair nabla_S_codazzi(const geometry::Scenario& s, std::span<const double> x, int X, int Y) {
  const int d = s.dim;
  if (X < 0 || X >= d || Y < 0 || Y >= d) throw Error(ErrorCode::InvalidArgument, "basis index out of range");
  const geometry::InducedJets J = geometry::induced_jets(s, x, 1);
  auto Sv = [&](int l, int j) { return J.S[sz(l * d + j)].value(); };
  auto side = [&](int i, int j) {
    VectorXd v(d);
    for (int l = 0; l < d; ++l) {
      double a = J.S[sz(l * d + j)].gradient(i);
      for (int m = 0; m < d; ++m) a += J.Gamma(l, i, m).value() * Sv(m, j) - Sv(l, m) * J.Gamma(m, i, j).value();
      v(l) = a - J.tau[sz(i)].value() * Sv(l, j);
    }
    return v;
  };
  return {side(X, Y), side(Y, X)};
}

ScalarPair alternating_sum_identity(const CovariantField& T, const geometry::Scenario& s, const CurvatureProvider& c,
                                    int k, std::span<const double> x, std::span<const int> pairs,
                                    std::span<const int> ys) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "identity needs k >= 1");
  if (static_cast<int>(pairs.size()) != 2 * k || static_cast<int>(ys.size()) != T.rank)
    throw Error(ErrorCode::InvalidArgument, "identity needs 2k pair arguments and p trailing arguments");
  if (2 * k > kGeometricPowerCap)
    throw Error(ErrorCode::OrderExceeded, "identity for k = " + std::to_string(k) + " needs nabla^" +
                                              std::to_string(2 * k) + ", above the cap " +
                                              std::to_string(kGeometricPowerCap));
  std::vector<int> args(pairs.begin(), pairs.end());
  args.insert(args.end(), ys.begin(), ys.end());
  ScalarPair out;
  const Tensor Tx = T.at(x);
  out.lhs = r_power_action_basis(c, Tx, k, args);

  const Tensor N = nabla_power_tensor(T, s, 2 * k, x);
  for (unsigned mask = 0; mask < (1u << k); ++mask) {
    std::vector<int> tuple = args;
    int sign = 1;
    for (int i = 0; i < k; ++i)
      if (mask & (1u << i)) {
        std::swap(tuple[sz(2 * i)], tuple[sz(2 * i + 1)]);
        sign = -sign;
      }
    out.rhs += sign * N.at(tuple);
  }
  return out;
}

}  // namespace affsym::tensor_ops
