#include "affsym/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "affsym/error.hpp"

namespace affsym::geometry {

namespace {

using calculus::JetLayout;

std::size_t sz(int v) { return static_cast<std::size_t>(v); }

std::string point_string(std::span<const double> x) {
  std::string out = "(";
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) out += ", ";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x[i]);
    out += buf;
  }
  return out + ")";
}

void check_point(const Scenario& s, std::span<const double> x) {
  if (static_cast<int>(x.size()) != s.dim)
    throw Error(ErrorCode::InvalidArgument, "point has " + std::to_string(x.size()) + " coordinates, scenario dim is " +
                                                std::to_string(s.dim));
}

// N x N jet matrix times N jet vector.
std::vector<Jet> mat_vec(const std::vector<Jet>& M, const std::vector<Jet>& v, int N) {
  std::vector<Jet> out;
  out.reserve(sz(N));
  for (int r = 0; r < N; ++r) {
    Jet acc(v[0].layout_ptr(), 0.0);
    for (int c = 0; c < N; ++c) acc += M[sz(r * N + c)] * v[sz(c)];
    out.push_back(std::move(acc));
  }
  return out;
}

// Power series inverse of a jet matrix F about its constant part F0:
// X <- X + F0^-1 (I - F X); each sweep fixes one more order.
std::vector<Jet> series_inverse(const std::vector<Jet>& F, const MatrixXd& F0inv, int N, int order) {
  const auto layout = F[0].layout_ptr();
  std::vector<Jet> X;
  X.reserve(F.size());
  for (int r = 0; r < N; ++r)
    for (int c = 0; c < N; ++c) X.emplace_back(layout, F0inv(r, c));
  for (int sweep = 0; sweep < order; ++sweep) {
    std::vector<Jet> E;
    E.reserve(F.size());
    for (int r = 0; r < N; ++r) {
      for (int c = 0; c < N; ++c) {
        Jet acc(layout, r == c ? 1.0 : 0.0);
        for (int m = 0; m < N; ++m) acc -= F[sz(r * N + m)] * X[sz(m * N + c)];
        E.push_back(std::move(acc));
      }
    }
    for (int r = 0; r < N; ++r) {
      for (int c = 0; c < N; ++c) {
        Jet& x = X[sz(r * N + c)];
        for (int m = 0; m < N; ++m) {
          const double a = F0inv(r, m);
          if (a != 0.0) x += a * E[sz(m * N + c)];
        }
      }
    }
  }
  return X;
}

double frame_rcond(const MatrixXd& F0) {
  Eigen::JacobiSVD<MatrixXd> svd(F0);
  const VectorXd& sv = svd.singularValues();
  if (!(sv(0) > 0.0)) return 0.0;
  return sv(sv.size() - 1) / sv(0);
}

}  // namespace

void validate(const Scenario& s) {
  const int n = s.dim;
  if (n < 4 || n % 2 != 0) throw Error(ErrorCode::InvalidArgument, "scenario dim must be even and >= 4");
  if (static_cast<int>(s.coords.size()) != n)
    throw Error(ErrorCode::InvalidArgument, "scenario needs exactly dim coordinate names");
  if (std::set<std::string>(s.coords.begin(), s.coords.end()).size() != s.coords.size())
    throw Error(ErrorCode::InvalidArgument, "coordinate names must be distinct");
  if (static_cast<int>(s.immersion.size()) != n + 1)
    throw Error(ErrorCode::InvalidArgument, "immersion needs dim + 1 components");
  if (static_cast<int>(s.transversal.size()) != n + 1)
    throw Error(ErrorCode::InvalidArgument, "transversal needs dim + 1 components");
  if (static_cast<int>(s.omega.size()) != n * n)
    throw Error(ErrorCode::InvalidArgument, "omega needs dim x dim entries");
  auto in_range = [&](const Expr& e) { return variable_extent(e) <= n; };
  if (!std::all_of(s.immersion.begin(), s.immersion.end(), in_range) ||
      !std::all_of(s.transversal.begin(), s.transversal.end(), in_range) ||
      !std::all_of(s.omega.begin(), s.omega.end(), in_range))
    throw Error(ErrorCode::InvalidArgument, "expression references a variable outside the coordinate list");
  for (const auto& p : s.sample_points)
    if (static_cast<int>(p.size()) != n)
      throw Error(ErrorCode::InvalidArgument, "sample point with wrong coordinate count");
}

void check_constraints(const Scenario& s, std::span<const double> x) {
  check_point(s, x);
  for (const auto& c : s.constraints) {
    const double v = calculus::evaluate(c.expr, x);
    bool ok = false;
    switch (c.op) {
      case ConstraintOp::Gt: ok = v > c.value; break;
      case ConstraintOp::Ge: ok = v >= c.value; break;
      case ConstraintOp::Lt: ok = v < c.value; break;
      case ConstraintOp::Le: ok = v <= c.value; break;
      case ConstraintOp::Ne: ok = std::abs(v - c.value) > 1e-12 * std::max(1.0, std::abs(c.value)); break;
    }
    if (!ok)
      throw DomainError("sample point " + point_string(x) + " violates constraint '" + c.name + "' (" + c.source +
                        ")");
  }
}

MatrixXd omega_at(const Scenario& s, std::span<const double> x) {
  check_point(s, x);
  const int n = s.dim;
  MatrixXd w(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) w(i, j) = calculus::evaluate(s.omega[sz(i * n + j)], x);
  if ((w + w.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw Error(ErrorCode::InvalidArgument, "omega is not antisymmetric at " + point_string(x));
  return w;
}

InducedJets induced_jets(const Scenario& s, std::span<const double> x, int order) {
  check_point(s, x);
  if (order < 0) throw Error(ErrorCode::InvalidArgument, "negative order");
  if (order + 2 > calculus::kMaxJetOrder)
    throw Error(ErrorCode::OrderExceeded, "induced structure of order " + std::to_string(order) +
                                              " needs immersion jets of order " + std::to_string(order + 2) +
                                              " (maximum " + std::to_string(calculus::kMaxJetOrder) + ")");
  const int n = s.dim, N = n + 1;
  std::vector<Jet> f, xi;
  for (int a = 0; a < N; ++a) {
    f.push_back(calculus::eval_jet(s.immersion[sz(a)], x, order + 2));
    xi.push_back(calculus::eval_jet(s.transversal[sz(a)], x, order + 1));
  }

  // Frame: columns d_0 f, ..., d_{n-1} f, xi.
  std::vector<Jet> F;
  F.reserve(sz(N * N));
  MatrixXd F0(N, N);
  for (int a = 0; a < N; ++a) {
    for (int c = 0; c < N; ++c) {
      Jet e = c < n ? f[sz(a)].derivative(c).truncated(order) : xi[sz(a)].truncated(order);
      F0(a, c) = e.value();
      F.push_back(std::move(e));
    }
  }
  InducedJets out;
  out.dim = n;
  out.order = order;
  out.frame_rcond = frame_rcond(F0);
  if (!(out.frame_rcond >= 1e-12))
    throw Error(ErrorCode::SingularFrame, "frame {f_*d_i, xi} is singular at " + point_string(x) +
                                              " (reciprocal condition " + std::to_string(out.frame_rcond) + ")");
  const MatrixXd F0inv = F0.partialPivLu().inverse();
  const std::vector<Jet> X = series_inverse(F, F0inv, N, order);

  const auto layout = F[0].layout_ptr();
  out.gamma.assign(sz(n * n * n), Jet(layout, 0.0));
  out.h.assign(sz(n * n), Jet(layout, 0.0));
  std::vector<Jet> rhs(sz(N));
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      for (int a = 0; a < N; ++a) rhs[sz(a)] = f[sz(a)].derivative(i).derivative(j);
      const std::vector<Jet> c = mat_vec(X, rhs, N);
      for (int k = 0; k < n; ++k) {
        out.gamma[sz((k * n + i) * n + j)] = c[sz(k)];
        out.gamma[sz((k * n + j) * n + i)] = c[sz(k)];
      }
      out.h[sz(i * n + j)] = c[sz(n)];
      out.h[sz(j * n + i)] = c[sz(n)];
    }
  }
  out.S.assign(sz(n * n), Jet(layout, 0.0));
  for (int i = 0; i < n; ++i) {
    for (int a = 0; a < N; ++a) rhs[sz(a)] = xi[sz(a)].derivative(i);
    const std::vector<Jet> c = mat_vec(X, rhs, N);
    for (int k = 0; k < n; ++k) out.S[sz(k * n + i)] = -c[sz(k)];
    out.tau.push_back(c[sz(n)]);
  }
  return out;
}

InducedStructure induced_structure(const Scenario& s, std::span<const double> x) {
  const InducedJets J = induced_jets(s, x, 1);
  const int n = J.dim;
  InducedStructure st;
  st.point.assign(x.begin(), x.end());
  st.dim = n;
  st.frame_rcond = J.frame_rcond;
  st.gamma.resize(sz(n * n * n));
  st.dgamma.resize(sz(n * n * n * n));
  for (std::size_t q = 0; q < st.gamma.size(); ++q) {
    st.gamma[q] = J.gamma[q].value();
    for (int l = 0; l < n; ++l) st.dgamma[sz(l) * st.gamma.size() + q] = J.gamma[q].gradient(l);
  }
  st.h.resize(n, n);
  st.S.resize(n, n);
  st.dh.resize(sz(n * n * n));
  st.dS.resize(sz(n * n * n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      st.h(i, j) = J.h[sz(i * n + j)].value();
      st.S(i, j) = J.S[sz(i * n + j)].value();
      for (int l = 0; l < n; ++l) {
        st.dh[sz((l * n + i) * n + j)] = J.h[sz(i * n + j)].gradient(l);
        st.dS[sz((l * n + i) * n + j)] = J.S[sz(i * n + j)].gradient(l);
      }
    }
  }
  st.tau.resize(n);
  st.dtau.resize(n, n);
  for (int i = 0; i < n; ++i) st.tau(i) = J.tau[sz(i)].value();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) st.dtau(i, j) = J.tau[sz(j)].gradient(i) - J.tau[sz(i)].gradient(j);
  return st;
}

MatrixXd CurvatureTensor::operator_matrix(const VectorXd& X, const VectorXd& Y) const {
  MatrixXd L = MatrixXd::Zero(dim, dim);
  for (int l = 0; l < dim; ++l)
    for (int k = 0; k < dim; ++k) {
      double acc = 0.0;
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) acc += (*this)(l, k, i, j) * X(i) * Y(j);
      L(l, k) = acc;
    }
  return L;
}

VectorXd CurvatureTensor::apply(const VectorXd& X, const VectorXd& Y, const VectorXd& Z) const {
  return operator_matrix(X, Y) * Z;
}

CurvatureTensor curvature(const InducedStructure& st) {
  const int n = st.dim;
  CurvatureTensor R;
  R.point = st.point;
  R.dim = n;
  R.R.resize(sz(n * n * n * n));
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double v = st.dGamma(i, l, j, k) - st.dGamma(j, l, i, k);
          for (int m = 0; m < n; ++m) v += st.Gamma(l, i, m) * st.Gamma(m, j, k) - st.Gamma(l, j, m) * st.Gamma(m, i, k);
          R.R[sz(((l * n + k) * n + i) * n + j)] = v;
        }
  return R;
}

double gauss_model_deviation(const InducedStructure& st, const CurvatureTensor& R) {
  const int n = st.dim;
  double worst = 0.0;
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const double model = st.h(j, k) * st.S(l, i) - st.h(i, k) * st.S(l, j);
          worst = std::max(worst, std::abs(R(l, k, i, j) - model));
        }
  return worst;
}

Residuals fundamental_residuals(const InducedStructure& st, const CurvatureTensor& R) {
  const int n = st.dim;
  Residuals r;
  r.gauss = gauss_model_deviation(st, R);

  // (nabla_i h)_jk + tau_i h_jk, symmetric in (i, j)
  auto ch = [&](int i, int j, int k) {
    double v = st.dH(i, j, k) + st.tau(i) * st.h(j, k);
    for (int m = 0; m < n; ++m) v -= st.Gamma(m, i, j) * st.h(m, k) + st.Gamma(m, i, k) * st.h(j, m);
    return v;
  };
  // (nabla_i S)^l_j - tau_i S^l_j, symmetric in (i, j)
  auto cs = [&](int i, int l, int j) {
    double v = st.dShape(i, l, j) - st.tau(i) * st.S(l, j);
    for (int m = 0; m < n; ++m) v += st.Gamma(l, i, m) * st.S(m, j) - st.S(l, m) * st.Gamma(m, i, j);
    return v;
  };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        r.codazzi_h = std::max(r.codazzi_h, std::abs(ch(i, j, k) - ch(j, i, k)));
        r.codazzi_s = std::max(r.codazzi_s, std::abs(cs(i, k, j) - cs(j, k, i)));
      }

  const MatrixXd hS = st.h * st.S;  // h(e_i, S e_j)
  const MatrixXd ricci = hS - hS.transpose() - st.dtau;
  r.ricci = ricci.cwiseAbs().maxCoeff();
  return r;
}

double frame_consistency(const Scenario& s, const InducedStructure& st) {
  const int n = s.dim, N = n + 1;
  std::vector<Jet> f, xi;
  for (int a = 0; a < N; ++a) {
    f.push_back(calculus::eval_jet(s.immersion[sz(a)], st.point, 2));
    xi.push_back(calculus::eval_jet(s.transversal[sz(a)], st.point, 1));
  }
  double worst = 0.0;
  for (int a = 0; a < N; ++a) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const double target = f[sz(a)].derivative(i).derivative(j).value();
        double v = st.h(i, j) * xi[sz(a)].value();
        for (int k = 0; k < n; ++k) v += st.Gamma(k, i, j) * f[sz(a)].gradient(k);
        worst = std::max(worst, std::abs(target - v) / std::max(1.0, std::abs(target)));
      }
      const double target = xi[sz(a)].gradient(i);
      double v = st.tau(i) * xi[sz(a)].value();
      for (int k = 0; k < n; ++k) v -= st.S(k, i) * f[sz(a)].gradient(k);
      worst = std::max(worst, std::abs(target - v) / std::max(1.0, std::abs(target)));
    }
  }
  return worst;
}

}  // namespace affsym::geometry

namespace affsym::geometry {

Scenario build_scenario(const ScenarioSource& src) {
  Scenario s;
  s.name = src.name;
  s.dim = static_cast<int>(src.coords.size());
  s.coords = src.coords;
  const auto& consts = calculus::default_constants();
  auto parse_list = [&](const std::vector<std::string>& in, const char* what) {
    std::vector<Expr> out;
    for (std::size_t i = 0; i < in.size(); ++i) {
      try {
        out.push_back(calculus::parse_expr(in[i], s.coords, &consts));
      } catch (const ParseError& e) {
        throw ParseError(e.offset(), e.expected(),
                         std::string(what) + "[" + std::to_string(i) + "] \"" + in[i] + "\": " + e.what());
      } catch (const UnknownIdentifierError& e) {
        throw Error(ErrorCode::UnknownIdentifier,
                    std::string(what) + "[" + std::to_string(i) + "] \"" + in[i] + "\": " + e.what());
      }
    }
    return out;
  };
  s.immersion = parse_list(src.immersion, "immersion");
  s.transversal = parse_list(src.transversal, "transversal");
  if (src.omega.empty()) {
    const int n = s.dim;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) s.omega.push_back(Expr::number(j == i + 1 ? 1.0 : (i == j + 1 ? -1.0 : 0.0)));
  } else {
    s.omega = parse_list(src.omega, "omega");
  }
  for (const auto& c : src.constraints) {
    Constraint k;
    k.name = c.name;
    k.source = c.expr + " " + c.op + " " + std::to_string(c.value);
    k.expr = parse_list({c.expr}, ("constraint " + c.name).c_str()).front();
    k.value = c.value;
    if (c.op == ">") k.op = ConstraintOp::Gt;
    else if (c.op == ">=") k.op = ConstraintOp::Ge;
    else if (c.op == "<") k.op = ConstraintOp::Lt;
    else if (c.op == "<=") k.op = ConstraintOp::Le;
    else if (c.op == "!=") k.op = ConstraintOp::Ne;
    else throw Error(ErrorCode::InvalidArgument, "constraint '" + c.name + "' has unknown operator '" + c.op + "'");
    s.constraints.push_back(std::move(k));
  }
  s.sample_points = src.sample_points;
  validate(s);
  for (const auto& p : s.sample_points) {
    check_constraints(s, p);
    omega_at(s, p);
  }
  return s;
}

}  // namespace affsym::geometry
