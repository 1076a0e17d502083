#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <limits>
#include <sstream>

#include "affsym/error.hpp"
#include "affsym/tensor_ops.hpp"
#include "affsym/verify.hpp"

namespace affsym::verify {

namespace {

using model::BlockSpec;
using model::ComplexBlock;
using model::RealBlock;
using Rng = std::mt19937_64;

[[noreturn]] void hyp(const OracleSpec& s, const std::string& msg) {
  throw Error(ErrorCode::Hypothesis, s.id + ": hypothesis violated: " + msg);
}

double par(const OracleSpec& s, const std::string& name) {
  const auto it = s.params.find(name);
  if (it == s.params.end()) hyp(s, "missing parameter '" + name + "'");
  if (!std::isfinite(it->second)) hyp(s, "parameter '" + name + "' is not finite");
  return it->second;
}

int ipar(const OracleSpec& s, const std::string& name) {
  const double v = par(s, name);
  if (v != std::floor(v) || std::abs(v) > 1e6) hyp(s, "parameter '" + name + "' must be an integer");
  return static_cast<int>(v);
}

int sgn(const OracleSpec& s, const std::string& name) {
  const int v = ipar(s, name);
  if (v != 1 && v != -1) hyp(s, "parameter '" + name + "' must be +1 or -1");
  return v;
}

void need(const OracleSpec& s, bool cond, const std::string& what) {
  if (!cond) hyp(s, what);
}

double pw(double b, int e) { return std::pow(b, e); }

double fact(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

// Argument tuple with labels.
struct Args {
  int n = 0;
  std::vector<VectorXd> v;
  std::vector<std::string> lab;

  explicit Args(int dim) : n(dim) {}
  Args& e(int i) {
    v.push_back(model::basis(n, i));
    lab.push_back("e" + std::to_string(i));
    return *this;
  }
  Args& vec(const VectorXd& x, std::string l) {
    v.push_back(x);
    lab.push_back(std::move(l));
    return *this;
  }
  Args& rep(int a, int b, int times) {
    for (int t = 0; t < times; ++t) e(a).e(b);
    return *this;
  }
  std::string str() const {
    std::string r = "(";
    for (std::size_t i = 0; i < lab.size(); ++i) r += (i ? "," : "") + lab[i];
    return r + ")";
  }
};

struct Bench {
  model::GaussModel m;
  MatrixXd W;
  tensor_ops::Tensor T;
  std::optional<tensor_ops::ModelCurvature> C;
  int n = 0;

  VectorXd e(int i) const { return model::basis(n, i); }
  double w(int i, int j) const { return W(i - 1, j - 1); }
  double wv(const VectorXd& a, const VectorXd& b) const { return a.dot(W * b); }
  double h(int i, int j) const { return m.H(i - 1, j - 1); }
  VectorXd Se(int i) const { return m.S.col(i - 1); }
  double R(int power, const Args& a) const { return tensor_ops::r_power_action(*C, T, power, a.v); }
};

struct Outcome {
  double brute = 0.0;
  double closed = 0.0;
  std::string tuple;
};

// Vector-valued identities: report the component with the largest deviation.
Outcome vector_outcome(const VectorXd& brute, const VectorXd& closed, std::string label) {
  Eigen::Index at = 0;
  (brute - closed).cwiseAbs().maxCoeff(&at);
  return {brute(at), closed(at), std::move(label) + "[" + std::to_string(at + 1) + "]"};
}

struct Family {
  OracleInfo info;
  int power_mult = 1;  // the recursion order is power_mult * p
  std::function<std::vector<BlockSpec>(const OracleSpec&)> primary;
  std::function<Outcome(const OracleSpec&, const Bench&)> eval;
  std::function<OracleSpec(int, Rng&)> draw;
};

// ---- drawing helpers ----

double uni(Rng& g, double a, double b) { return std::uniform_real_distribution<double>(a, b)(g); }
int pick(Rng& g, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(g); }
int sign(Rng& g) { return pick(g, 0, 1) ? 1 : -1; }
double beta_draw(Rng& g) { return uni(g, 0.3, 2.0) * sign(g); }

template <class Pred>
int pick_if(Rng& g, int lo, int hi, Pred ok) {
  std::vector<int> c;
  for (int i = lo; i <= hi; ++i)
    if (ok(i)) c.push_back(i);
  if (c.empty()) throw Error(ErrorCode::Internal, "empty index range while drawing");
  return c[static_cast<std::size_t>(pick(g, 0, static_cast<int>(c.size()) - 1))];
}

// Total even dimension in [max(4, lo), 10] (lo rounded up to even).
int draw_dim(Rng& g, int lo) {
  lo = std::max(4, lo + (lo & 1));
  const int hi = std::max(lo, 10);
  return lo + 2 * pick(g, 0, (hi - lo) / 2);
}

// Tail of total dimension t: 1x1 blocks, plus (if allowed) occasional 2x2 real
// Jordan blocks and 2x2 complex blocks.
std::vector<BlockSpec> draw_tail(Rng& g, int t, bool jordan) {
  std::vector<BlockSpec> out;
  while (t > 0) {
    const int kind = jordan && t >= 2 ? pick(g, 0, 7) : 0;
    if (kind == 6) {
      out.push_back(RealBlock{2, uni(g, -1, 1), sign(g)});
      t -= 2;
    } else if (kind == 7) {
      out.push_back(ComplexBlock{1, uni(g, -1, 1), beta_draw(g)});
      t -= 2;
    } else {
      out.push_back(RealBlock{1, uni(g, -1, 1), sign(g)});
      t -= 1;
    }
  }
  return out;
}

int tail_dim(const std::vector<BlockSpec>& t) {
  int d = 0;
  for (const auto& b : t) d += model::block_dim(b);
  return d;
}

OracleSpec base(const std::string& id, int p, int variant = 0) {
  OracleSpec s;
  s.id = id;
  s.p = p;
  s.variant = variant;
  return s;
}

// ---- shared block shapes ----

std::vector<BlockSpec> real_k(const OracleSpec& s, int k_min) {
  const int k = ipar(s, "k");
  need(s, k >= k_min, "k >= " + std::to_string(k_min) + " required (k = " + std::to_string(k) + ")");
  return {RealBlock{k, par(s, "alpha"), sgn(s, "eps")}};
}

std::vector<BlockSpec> real_3(const OracleSpec& s) { return {RealBlock{3, par(s, "alpha"), sgn(s, "eps")}}; }

std::vector<BlockSpec> real_3_a0(const OracleSpec& s) {
  need(s, par(s, "alpha") == 0.0, "alpha = 0 required");
  return real_3(s);
}

std::vector<BlockSpec> two_real_2(const OracleSpec& s) {
  return {RealBlock{2, par(s, "alpha"), sgn(s, "eps")}, RealBlock{2, par(s, "beta"), sgn(s, "eta")}};
}

std::vector<BlockSpec> complex_k(const OracleSpec& s, int k_min, int k_max = 1 << 20) {
  const int k = ipar(s, "k");
  need(s, k >= k_min && k <= k_max, "complex half-size k out of range");
  const double b = par(s, "beta");
  need(s, b != 0.0, "beta != 0 required");
  return {ComplexBlock{k, par(s, "alpha"), b}};
}

// Draw a spec for a real block of size k placed first.
OracleSpec draw_real(const std::string& id, int p, Rng& g, int k, int min_tail, int variant = 0, bool alpha0 = false) {
  OracleSpec s = base(id, p, variant);
  s.params["k"] = k;
  s.params["alpha"] = alpha0 ? 0.0 : uni(g, -2, 2);
  s.params["eps"] = sign(g);
  const int n = draw_dim(g, k + min_tail);
  s.tail = draw_tail(g, n - k, true);
  return s;
}

OracleSpec draw_complex(const std::string& id, int p, Rng& g, int k, int min_tail, int variant = 0) {
  OracleSpec s = base(id, p, variant);
  s.params["k"] = k;
  s.params["alpha"] = uni(g, -1.5, 1.5);
  s.params["beta"] = beta_draw(g);
  const int n = draw_dim(g, 2 * k + min_tail);
  s.tail = draw_tail(g, n - 2 * k, true);
  return s;
}

int dim_of(const OracleSpec& s, const std::vector<BlockSpec>& primary) {
  int d = tail_dim(s.tail);
  for (const auto& b : primary) d += model::block_dim(b);
  return d;
}

// Indices with nonzero h-partner get picked more often so h(e_i, e_j) != 0 is exercised.
std::pair<int, int> draw_h_pair(Rng& g, const OracleSpec& s, const std::vector<BlockSpec>& primary, int lo) {
  std::vector<BlockSpec> all = primary;
  all.insert(all.end(), s.tail.begin(), s.tail.end());
  const model::GaussModel m = model::assemble(all);
  const int n = m.dim;
  const int i = pick(g, lo, n);
  if (pick(g, 0, 9) < 7) {
    std::vector<int> partners;
    for (int j = lo; j <= n; ++j)
      if (m.H(i - 1, j - 1) != 0.0) partners.push_back(j);
    if (!partners.empty()) return {i, partners[static_cast<std::size_t>(pick(g, 0, static_cast<int>(partners.size()) - 1))]};
  }
  return {i, pick(g, lo, n)};
}

// omega-vanishing conditions for the complex-block lemmas (1-based pairs)
std::vector<std::pair<int, int>> zeros_full(int K) {
  std::vector<std::pair<int, int>> z;
  for (int j = 3; j <= K; ++j) {
    z.emplace_back(j, K - 1);
    z.emplace_back(j, K);
  }
  return z;
}
std::vector<std::pair<int, int>> zeros_e3(int K) { return {{3, K - 1}, {3, K}}; }

void check_zeros(const OracleSpec& s, const Bench& b, const std::vector<std::pair<int, int>>& z) {
  for (auto [i, j] : z)
    if (b.w(i, j) != 0.0)
      hyp(s, "omega(e" + std::to_string(i) + ",e" + std::to_string(j) + ") = 0 required");
}

// (e1,e_{K-1})^p with pair i0 (1-based) replaced by (e_{K-1}, e_K)
Args replaced_pairs(int n, int p, int K, int i0) {
  Args a(n);
  for (int q = 1; q <= p; ++q) {
    if (q == i0)
      a.e(K - 1).e(K);
    else
      a.e(1).e(K - 1);
  }
  return a;
}

std::vector<Family> build_catalog() {
  std::vector<Family> F;

  // ---------------- real Jordan blocks ----------------

  F.push_back({{"with_pi_x", "R^p omega(X1,e_k,...,Xp,e_k,e_i,e_k) = pi(X1)...pi(Xp) eps^p alpha^p omega(e_i,e_k)", 1, 4, 1},
               1,
               [](const OracleSpec& s) { return real_k(s, 2); },
               [](const OracleSpec& s, const Bench& b) {
                 const int k = ipar(s, "k"), i = ipar(s, "i"), n = b.n;
                 need(s, i >= 2 && i <= n, "i in {2..2n} required");
                 need(s, static_cast<int>(s.vectors.size()) == s.p, "exactly p vectors X_j required");
                 double prod = 1.0;
                 Args a(n);
                 for (int j = 0; j < s.p; ++j) {
                   const VectorXd& X = s.vectors[static_cast<std::size_t>(j)];
                   need(s, X.size() == n, "X_j has wrong dimension");
                   for (int c = k; c < n; ++c) need(s, X(c) == 0.0, "X_j in span{e1..e_k} required");
                   prod *= X(0);
                   a.vec(X, "X" + std::to_string(j + 1)).e(k);
                 }
                 a.e(i).e(k);
                 const double eps = sgn(s, "eps"), al = par(s, "alpha");
                 return Outcome{b.R(s.p, a), prod * pw(eps, s.p) * pw(al, s.p) * b.w(i, k), a.str()};
               },
               [](int p, Rng& g) {
                 OracleSpec s = draw_real("with_pi_x", p, g, pick(g, 2, 6), 0);
                 const int k = ipar(s, "k"), n = dim_of(s, real_k(s, 2));
                 for (int j = 0; j < p; ++j) {
                   VectorXd X = VectorXd::Zero(n);
                   for (int c = 0; c < k; ++c) X(c) = uni(g, -1.5, 1.5);
                   s.vectors.push_back(X);
                 }
                 s.params["i"] = pick(g, 2, n);
                 return s;
               }});

  F.push_back({{"rp_ei_ek", "R^p omega(e1,e_k,...,e1,e_k,e_i,e_k) = eps^p alpha^p omega(e_i,e_k)", 1, 4, 1},
               1,
               [](const OracleSpec& s) { return real_k(s, 2); },
               [](const OracleSpec& s, const Bench& b) {
                 const int k = ipar(s, "k"), i = ipar(s, "i");
                 need(s, i >= 2 && i <= b.n, "i in {2..2n} required");
                 Args a(b.n);
                 a.rep(1, k, s.p).e(i).e(k);
                 const double eps = sgn(s, "eps"), al = par(s, "alpha");
                 return Outcome{b.R(s.p, a), pw(eps * al, s.p) * b.w(i, k), a.str()};
               },
               [](int p, Rng& g) {
                 OracleSpec s = draw_real("rp_ei_ek", p, g, pick(g, 2, 6), 0);
                 s.params["i"] = pick(g, 2, dim_of(s, real_k(s, 2)));
                 return s;
               }});

  F.push_back({{"kgt3_basics", "six curvature values R(e1,e_{k-1}).,  R(e_{k-1},e_k). for k > 3", 1, 1, 8},
               1,
               [](const OracleSpec& s) { return real_k(s, 4); },
               [](const OracleSpec& s, const Bench& b) {
                 const int k = ipar(s, "k");
                 const double eps = sgn(s, "eps"), al = par(s, "alpha");
                 need(s, s.variant >= 0 && s.variant < 8, "variant in 0..7");
                 static const int third[8] = {1, -1, 2, 0, 1, 2, -1, 0};  // -1: e_{k-1}, 0: e_k
                 const int v = s.variant;
                 const int x = v < 4 ? 1 : k - 1, y = v < 4 ? k - 1 : k;
                 const int z = third[v] == -1 ? k - 1 : third[v] == 0 ? k : third[v];
                 VectorXd expect = VectorXd::Zero(b.n);
                 if (v == 2) expect = eps * (al * b.e(1) + b.e(2));
                 if (v == 3) expect = -eps * (al * b.e(k - 1) + b.e(k));
                 if (v == 4) expect = eps * (al * b.e(k - 1) + b.e(k));
                 if (v == 5) expect = -eps * al * b.e(k);
                 const VectorXd got = b.C->apply(b.e(x), b.e(y), b.e(z));
                 return vector_outcome(got, expect,
                                       "R(e" + std::to_string(x) + ",e" + std::to_string(y) + ")e" + std::to_string(z));
               },
               [](int p, Rng& g) { return draw_real("kgt3_basics", p, g, pick(g, 4, 7), 0, pick(g, 0, 7)); }});

  F.push_back({{"lemma34", "three R^p omega values on (e1,e_{k-1})^p tuples, k > 3", 1, 4, 3},
               1,
               [](const OracleSpec& s) { return real_k(s, 4); },
               [](const OracleSpec& s, const Bench& b) {
                 const int k = ipar(s, "k"), p = s.p;
                 const double eps = sgn(s, "eps"), al = par(s, "alpha");
                 Args a(b.n);
                 double closed = 0.0;
                 if (s.variant == 0) {
                   a.rep(1, k - 1, p + 1);
                 } else if (s.variant == 1) {
                   a.rep(1, k - 1, p).e(2).e(k - 1);
                   closed = pw(-eps, p) * (al * b.w(1, k - 1) + b.w(2, k - 1));
                 } else if (s.variant == 2) {
                   const int i = ipar(s, "i");
                   need(s, i >= 1 && i <= b.n && i != 2 && i != k, "i not in {2, k} required");
                   a.rep(1, k - 1, p).e(i).e(k);
                   closed = pw(eps, p) * (al * b.w(i, k - 1) + b.w(i, k));
                 } else {
                   hyp(s, "variant in 0..2");
                 }
                 return Outcome{b.R(p, a), closed, a.str()};
               },
               [](int p, Rng& g) {
                 OracleSpec s = draw_real("lemma34", p, g, pick(g, 4, 7), 0, pick(g, 0, 2));
                 const int k = ipar(s, "k");
                 s.params["i"] = pick_if(g, 1, dim_of(s, real_k(s, 4)), [&](int i) { return i != 2 && i != k; });
                 return s;
               }});

  F.push_back({{"even_odd", "R^P omega((e1,e_{k-1})^P,e2,e_k): odd/even power closed forms, k > 3", 1, 4, 1},
               1,
               [](const OracleSpec& s) { return real_k(s, 4); },
               [](const OracleSpec& s, const Bench& b) {
                 const int k = ipar(s, "k"), p = s.p;
                 const double eps = sgn(s, "eps"), al = par(s, "alpha");
                 Args a(b.n);
                 a.rep(1, k - 1, p).e(2).e(k);
                 const double closed = p % 2 == 1 ? -eps * al * (b.w(1, k) - b.w(2, k - 1))
                                                  : -al * (2 * al * b.w(1, k - 1) + b.w(2, k - 1) + b.w(1, k));
                 return Outcome{b.R(p, a), closed, a.str()};
               },
               [](int p, Rng& g) { return draw_real("even_odd", p, g, pick(g, 4, 7), 0); }});

  F.push_back({{"lemma36", "R^p omega(e_{k-1},e_k,(e1,e_{k-1})^{p-1},e1,e2), k > 3", 1, 4, 1},
               1,
               [](const OracleSpec& s) { return real_k(s, 4); },
               [](const OracleSpec& s, const Bench& b) {
                 const int k = ipar(s, "k"), p = s.p;
                 const double eps = sgn(s, "eps"), al = par(s, "alpha");
                 Args a(b.n);
                 a.e(k - 1).e(k).rep(1, k - 1, p - 1).e(1).e(2);
                 const double closed = pw(eps, p) * al * (b.w(1, k) + b.w(2, k - 1)) + pw(eps, p) * b.w(2, k);
                 return Outcome{b.R(p, a), closed, a.str()};
               },
               [](int p, Rng& g) { return draw_real("lemma36", p, g, pick(g, 4, 7), 0); }});

  F.push_back({{"lematD", "R^p omega((e1,e_{k-1})^p,e1,e3) = 0, k > 3", 1, 4, 1},
               1,
               [](const OracleSpec& s) { return real_k(s, 4); },
               [](const OracleSpec& s, const Bench& b) {
                 const int k = ipar(s, "k");
                 Args a(b.n);
                 a.rep(1, k - 1, s.p).e(1).e(3);
                 return Outcome{b.R(s.p, a), 0.0, a.str()};
               },
               [](int p, Rng& g) { return draw_real("lematD", p, g, pick(g, 4, 7), 0); }});

  F.push_back({{"blk3_12", "3x3 real block: R^p omega((e1,e2)^{p+1}) = (-1)^p eps^p p! omega(e1,e2)", 1, 4, 1},
               1,
               real_3,
               [](const OracleSpec& s, const Bench& b) {
                 const double eps = sgn(s, "eps");
                 Args a(b.n);
                 a.rep(1, 2, s.p + 1);
                 return Outcome{b.R(s.p, a), pw(-eps, s.p) * fact(s.p) * b.w(1, 2), a.str()};
               },
               [](int p, Rng& g) { return draw_real("blk3_12", p, g, 3, 0); }});

  F.push_back({{"blk3_12ij", "3x3 real block: (e1,e2)^{p-1},e2,e_i,e1,e_j with i,j > 3", 2, 4, 1},
               1,
               real_3,
               [](const OracleSpec& s, const Bench& b) {
                 const int i = ipar(s, "i"), j = ipar(s, "j"), p = s.p;
                 need(s, i > 3 && j > 3 && i <= b.n && j <= b.n, "i, j > 3 required");
                 const double eps = sgn(s, "eps"), al = par(s, "alpha");
                 Args a(b.n);
                 a.rep(1, 2, p - 1).e(2).e(i).e(1).e(j);
                 const double closed =
                     pw(-1, p) * pw(eps, p - 1) * fact(p - 1) * b.h(i, j) * (2 * al * b.w(1, 2) + b.w(1, 3));
                 return Outcome{b.R(p, a), closed, a.str()};
               },
               [](int p, Rng& g) {
                 OracleSpec s = draw_real("blk3_12ij", p, g, 3, 1);
                 const auto [i, j] = draw_h_pair(g, s, real_3(s), 4);
                 s.params["i"] = i;
                 s.params["j"] = j;
                 return s;
               }});

  F.push_back({{"blk3_122i", "3x3 real block, alpha = 0: R^p omega((e1,e2)^p,e2,e_i), i != 3", 1, 4, 1},
               1,
               real_3_a0,
               [](const OracleSpec& s, const Bench& b) {
                 const int i = ipar(s, "i");
                 need(s, i >= 1 && i <= b.n && i != 3, "i != 3 required");
                 const double eps = sgn(s, "eps");
                 Args a(b.n);
                 a.rep(1, 2, s.p).e(2).e(i);
                 return Outcome{b.R(s.p, a), pw(-eps, s.p) * fact(s.p) * b.w(2, i), a.str()};
               },
               [](int p, Rng& g) {
                 OracleSpec s = draw_real("blk3_122i", p, g, 3, 0, 0, true);
                 s.params["i"] = pick_if(g, 1, dim_of(s, real_3(s)), [](int i) { return i != 3; });
                 return s;
               }});

  F.push_back({{"blk3_2312", "3x3 real block, alpha = 0: (e1,e2)^{p-1},e2,e3,e1,e2", 1, 4, 1},
               1,
               real_3_a0,
               [](const OracleSpec& s, const Bench& b) {
                 const double eps = sgn(s, "eps");
                 Args a(b.n);
                 a.rep(1, 2, s.p - 1).e(2).e(3).e(1).e(2);
                 return Outcome{b.R(s.p, a), pw(-1, s.p + 1) * pw(eps, s.p) * fact(s.p - 1) * b.w(2, 3), a.str()};
               },
               [](int p, Rng& g) { return draw_real("blk3_2312", p, g, 3, 0, 0, true); }});

  F.push_back({{"two_blk2", "two 2x2 real blocks: (e1,e3)^p,(e_i,e3) = 0; odd p: (e1,e3)^p,(e_i,e4)", 1, 4, 2},
               1,
               two_real_2,
               [](const OracleSpec& s, const Bench& b) {
                 const int i = ipar(s, "i"), p = s.p;
                 need(s, i >= 1 && i <= b.n && i != 2 && i != 4, "i not in {2, 4} required");
                 const double eps = sgn(s, "eps"), eta = sgn(s, "eta"), al = par(s, "alpha");
                 Args a(b.n);
                 if (s.variant == 0) {
                   a.rep(1, 3, p).e(i).e(3);
                   return Outcome{b.R(p, a), 0.0, a.str()};
                 }
                 need(s, s.variant == 1, "variant in 0..1");
                 need(s, p % 2 == 1, "odd power required for this formula");
                 const int q = (p - 1) / 2;
                 a.rep(1, 3, p).e(i).e(4);
                 return Outcome{b.R(p, a), pw(-1, q + 1) * pw(eta, q + 1) * pw(eps, q) * (al * b.w(i, 1) + b.w(i, 2)),
                                a.str()};
               },
               [](int p, Rng& g) {
                 OracleSpec s = base("two_blk2", p, p % 2 == 1 ? pick(g, 0, 1) : 0);
                 s.params["alpha"] = uni(g, -2, 2);
                 s.params["beta"] = uni(g, -2, 2);
                 s.params["eps"] = sign(g);
                 s.params["eta"] = sign(g);
                 s.tail = draw_tail(g, draw_dim(g, 4) - 4, true);
                 s.params["i"] = pick_if(g, 1, 4 + tail_dim(s.tail), [](int i) { return i != 2 && i != 4; });
                 return s;
               }});

  F.push_back({{"rw_double", "two nilpotent 2x2 real blocks: R^{2p} omega with powers of 2", 1, 4, 2},
               2,
               [](const OracleSpec& s) {
                 need(s, par(s, "alpha") == 0.0 && par(s, "beta") == 0.0, "alpha = beta = 0 required");
                 return two_real_2(s);
               },
               [](const OracleSpec& s, const Bench& b) {
                 const int p = s.p;
                 const double ee = sgn(s, "eps") * sgn(s, "eta");
                 Args a(b.n);
                 a.rep(1, 3, 2 * p - 1);
                 double closed = 0.0;
                 if (s.variant == 0) {
                   a.e(1).e(2).e(1).e(2);
                   closed = pw(-1, p) * pw(ee, p - 1) * pw(2, 2 * p - 2) * b.w(2, 4);
                 } else {
                   need(s, s.variant == 1, "variant in 0..1");
                   a.e(1).e(4).e(1).e(4);
                   closed = pw(-1, p + 1) * pw(ee, p) * pw(2, 2 * p - 2) * b.w(2, 4);
                 }
                 return Outcome{b.R(2 * p, a), closed, a.str()};
               },
               [](int p, Rng& g) {
                 OracleSpec s = base("rw_double", p, pick(g, 0, 1));
                 s.params["alpha"] = 0.0;
                 s.params["beta"] = 0.0;
                 s.params["eps"] = sign(g);
                 s.params["eta"] = sign(g);
                 s.tail = draw_tail(g, draw_dim(g, 4) - 4, true);
                 return s;
               }});

  // ---------------- complex Jordan blocks ----------------

  F.push_back({{"cx_basic", "2x2 complex block: R(e1,e2)e1 = Se1, R(e1,e2)e2 = -Se2, R(e1,e2)e_i = 0", 1, 1, 3},
               1,
               [](const OracleSpec& s) { return complex_k(s, 1, 1); },
               [](const OracleSpec& s, const Bench& b) {
                 const double al = par(s, "alpha"), be = par(s, "beta");
                 int z = 1;
                 VectorXd expect = VectorXd::Zero(b.n);
                 if (s.variant == 0) {
                   expect = al * b.e(1) - be * b.e(2);
                 } else if (s.variant == 1) {
                   z = 2;
                   expect = -be * b.e(1) - al * b.e(2);
                 } else {
                   need(s, s.variant == 2, "variant in 0..2");
                   z = ipar(s, "i");
                   need(s, z >= 3 && z <= b.n, "i >= 3 required");
                 }
                 return vector_outcome(b.C->apply(b.e(1), b.e(2), b.e(z)), expect, "R(e1,e2)e" + std::to_string(z));
               },
               [](int p, Rng& g) {
                 OracleSpec s = draw_complex("cx_basic", p, g, 1, 0, pick(g, 0, 2));
                 s.params["i"] = pick(g, 3, 2 + tail_dim(s.tail));
                 return s;
               }});

  F.push_back({{"cx_detpow", "2x2 complex block: R^{2p} omega((e1,e2)^{2p},e_a,e_i) = det^p omega(e_a,e_i)", 1, 4, 2},
               2,
               [](const OracleSpec& s) { return complex_k(s, 1, 1); },
               [](const OracleSpec& s, const Bench& b) {
                 const int i = ipar(s, "i"), p = s.p;
                 need(s, i >= 3 && i <= b.n, "i >= 3 required");
                 need(s, s.variant == 0 || s.variant == 1, "variant in 0..1");
                 const double al = par(s, "alpha"), be = par(s, "beta"), det = al * al + be * be;
                 const int first = s.variant == 0 ? 1 : 2;
                 Args a(b.n);
                 a.rep(1, 2, 2 * p).e(first).e(i);
                 return Outcome{b.R(2 * p, a), pw(det, p) * b.w(first, i), a.str()};
               },
               [](int p, Rng& g) {
                 OracleSpec s = draw_complex("cx_detpow", p, g, 1, 0, pick(g, 0, 1));
                 s.params["i"] = pick(g, 3, 2 + tail_dim(s.tail));
                 return s;
               }});

  F.push_back({{"cx_other", "2x2 complex block with other blocks: three B^{2p} formulas, i, j > 2", 1, 4, 3},
               2,
               [](const OracleSpec& s) { return complex_k(s, 1, 1); },
               [](const OracleSpec& s, const Bench& b) {
                 const int i = ipar(s, "i"), j = ipar(s, "j"), p = s.p;
                 need(s, i > 2 && j > 2 && i <= b.n && j <= b.n, "i, j > 2 required");
                 const double al = par(s, "alpha"), be = par(s, "beta"), det = al * al + be * be;
                 Args a(b.n);
                 a.rep(1, 2, 2 * p - 1);
                 const double hw = b.h(i, j) * b.w(1, 2) * pw(det, p - 1);
                 if (s.variant == 0 || s.variant == 1) {
                   const int x = s.variant == 0 ? 1 : 2, y = 3 - x;
                   a.e(x).e(i).e(y).e(j);
                   return Outcome{b.R(2 * p, a), pw(2, 2 * p - 1) * be * be * hw, a.str()};
                 }
                 need(s, s.variant == 2, "variant in 0..2");
                 Args a2 = a;
                 a.e(1).e(i).e(1).e(j);
                 a2.e(2).e(i).e(2).e(j);
                 return Outcome{b.R(2 * p, a) - b.R(2 * p, a2), -pw(2, 2 * p) * al * be * hw, a.str() + "-" + a2.str()};
               },
               [](int p, Rng& g) {
                 OracleSpec s = draw_complex("cx_other", p, g, 1, 1, pick(g, 0, 2));
                 const auto [i, j] = draw_h_pair(g, s, complex_k(s, 1, 1), 3);
                 s.params["i"] = i;
                 s.params["j"] = j;
                 return s;
               }});

  F.push_back({{"cx_c1", "complex block, k >= 2: (e1,e_{2k-2})^{p-1},e_i,e_s,e1,e_j, j > 2k", 1, 4, 1},
               1,
               [](const OracleSpec& s) { return complex_k(s, 2); },
               [](const OracleSpec& s, const Bench& b) {
                 const int K = 2 * ipar(s, "k"), i = ipar(s, "i"), sx = ipar(s, "s"), j = ipar(s, "j");
                 need(s, i >= 1 && i <= K - 1 && i != 3, "i in {1..2k-1} \\ {3} required");
                 need(s, sx >= 1 && sx <= K, "s in {1..2k} required");
                 need(s, j > K && j <= b.n, "j > 2k required");
                 Args a(b.n);
                 a.rep(1, K - 2, s.p - 1).e(i).e(sx).e(1).e(j);
                 const double closed = sx < K ? 0.0 : -b.wv(b.Se(i), b.e(j));
                 return Outcome{b.R(s.p, a), closed, a.str()};
               },
               [](int p, Rng& g) {
                 OracleSpec s = draw_complex("cx_c1", p, g, pick(g, 2, 4), 1);
                 const int K = 2 * ipar(s, "k");
                 s.params["i"] = pick_if(g, 1, K - 1, [](int i) { return i != 3; });
                 s.params["s"] = pick(g, 0, 1) ? K : pick(g, 1, K);
                 s.params["j"] = pick(g, K + 1, K + tail_dim(s.tail));
                 return s;
               }});

  F.push_back({{"cx_c2", "complex block, k >= 2: (e1,e_{2k-1})^{p-1},e3,e_{2k},e1,e_j, j > 2k", 1, 4, 1},
               1,
               [](const OracleSpec& s) { return complex_k(s, 2); },
               [](const OracleSpec& s, const Bench& b) {
                 const int K = 2 * ipar(s, "k"), j = ipar(s, "j");
                 need(s, j > K && j <= b.n, "j > 2k required");
                 const double be = par(s, "beta");
                 Args a(b.n);
                 a.rep(1, K - 1, s.p - 1).e(3).e(K).e(1).e(j);
                 return Outcome{b.R(s.p, a), -pw(-be, s.p - 1) * b.wv(b.Se(3), b.e(j)), a.str()};
               },
               [](int p, Rng& g) {
                 OracleSpec s = draw_complex("cx_c2", p, g, pick(g, 2, 4), 1);
                 const int K = 2 * ipar(s, "k");
                 s.params["j"] = pick(g, K + 1, K + tail_dim(s.tail));
                 return s;
               }});

  F.push_back({{"cx_c3", "complex block, k >= 2: (e2,e_{2k})^{p-1},e_i,e_{2k},e_{2k},e_j, j > 2k", 1, 4, 1},
               1,
               [](const OracleSpec& s) { return complex_k(s, 2); },
               [](const OracleSpec& s, const Bench& b) {
                 const int K = 2 * ipar(s, "k"), i = ipar(s, "i"), j = ipar(s, "j");
                 need(s, i >= 1 && i <= K, "i in {1..2k} required");
                 need(s, j > K && j <= b.n, "j > 2k required");
                 const double be = par(s, "beta");
                 Args a(b.n);
                 a.rep(2, K, s.p - 1).e(i).e(K).e(K).e(j);
                 const double closed = i == 1 ? pw(-be, s.p - 1) * b.wv(b.Se(K), b.e(j)) : 0.0;
                 return Outcome{b.R(s.p, a), closed, a.str()};
               },
               [](int p, Rng& g) {
                 OracleSpec s = draw_complex("cx_c3", p, g, pick(g, 2, 4), 1);
                 const int K = 2 * ipar(s, "k");
                 s.params["i"] = pick(g, 0, 1) ? 1 : pick(g, 1, K);
                 s.params["j"] = pick(g, K + 1, K + tail_dim(s.tail));
                 return s;
               }});

  F.push_back({{"cx_b2", "complex block, k >= 2: (e1,e_{2k-1})^p,e_i,e_{2k-1} = 0 and e_i,e_{2k} form", 1, 4, 2},
               1,
               [](const OracleSpec& s) { return complex_k(s, 2); },
               [](const OracleSpec& s, const Bench& b) {
                 const int K = 2 * ipar(s, "k"), i = ipar(s, "i");
                 need(s, i >= 1 && i <= K - 1 && i != 2, "i in {1..2k-1} \\ {2} required");
                 const double be = par(s, "beta");
                 Args a(b.n);
                 a.rep(1, K - 1, s.p);
                 if (s.variant == 0) {
                   a.e(i).e(K - 1);
                   return Outcome{b.R(s.p, a), 0.0, a.str()};
                 }
                 need(s, s.variant == 1, "variant in 0..1");
                 a.e(i).e(K);
                 return Outcome{b.R(s.p, a), pw(-be, s.p - 1) * b.wv(b.e(i), b.Se(K - 1)), a.str()};
               },
               [](int p, Rng& g) {
                 OracleSpec s = draw_complex("cx_b2", p, g, pick(g, 2, 4), 0, pick(g, 0, 1));
                 s.params["i"] = pick_if(g, 1, 2 * ipar(s, "k") - 1, [](int i) { return i != 2; });
                 return s;
               }});

  F.push_back({{"cx_b3", "complex block, k >= 2: (e2,e_{2k})^p,e_i,e_{2k} = 0 and e_i,e_{2k-1} form", 1, 4, 2},
               1,
               [](const OracleSpec& s) { return complex_k(s, 2); },
               [](const OracleSpec& s, const Bench& b) {
                 const int K = 2 * ipar(s, "k"), i = ipar(s, "i");
                 need(s, i >= 2 && i <= K && i != K - 1, "i in {1..2k} \\ {1, 2k-1} required");
                 const double be = par(s, "beta");
                 Args a(b.n);
                 a.rep(2, K, s.p);
                 if (s.variant == 0) {
                   a.e(i).e(K);
                   return Outcome{b.R(s.p, a), 0.0, a.str()};
                 }
                 need(s, s.variant == 1, "variant in 0..1");
                 a.e(i).e(K - 1);
                 return Outcome{b.R(s.p, a), pw(be, s.p - 1) * b.wv(b.e(i), b.Se(K)), a.str()};
               },
               [](int p, Rng& g) {
                 OracleSpec s = draw_complex("cx_b3", p, g, pick(g, 2, 4), 0, pick(g, 0, 1));
                 const int K = 2 * ipar(s, "k");
                 s.params["i"] = pick_if(g, 2, K, [&](int i) { return i != K - 1; });
                 return s;
               }});

  F.push_back({{"cx_b4", "complex block, omega(e_j,e_{2k-1}) = omega(e_j,e_{2k}) = 0: replaced pair, then e1,e3 -> 0", 1, 4, 1},
               1,
               [](const OracleSpec& s) { return complex_k(s, 2); },
               [](const OracleSpec& s, const Bench& b) {
                 const int K = 2 * ipar(s, "k"), i0 = ipar(s, "i0");
                 need(s, i0 >= 1 && i0 <= s.p, "i0 in {1..p} required");
                 check_zeros(s, b, zeros_full(K));
                 Args a = replaced_pairs(b.n, s.p, K, i0);
                 a.e(1).e(3);
                 return Outcome{b.R(s.p, a), 0.0, a.str()};
               },
               [](int p, Rng& g) {
                 OracleSpec s = draw_complex("cx_b4", p, g, pick(g, 2, 4), 0);
                 const int K = 2 * ipar(s, "k");
                 s.params["i0"] = pick(g, 1, p);
                 s.omega = random_omega(K + tail_dim(s.tail), g, zeros_full(K));
                 return s;
               }});

  F.push_back({{"cx_b45", "complex block, omega(e3,e_{2k-1}) = omega(e3,e_{2k}) = 0: three closed forms", 1, 4, 3},
               1,
               [](const OracleSpec& s) { return complex_k(s, 2); },
               [](const OracleSpec& s, const Bench& b) {
                 const int K = 2 * ipar(s, "k"), p = s.p;
                 check_zeros(s, b, zeros_e3(K));
                 const double al = par(s, "alpha"), be = par(s, "beta");
                 const double w1 = b.w(1, K - 1), w2 = b.w(2, K - 1), w1K = b.w(1, K);
                 Args a(b.n);
                 a.rep(1, K - 1, p);
                 double closed = 0.0;
                 if (s.variant == 0) {
                   a.e(2).e(K - 1);
                   closed = pw(be, p - 1) * (-al * w1 + be * w2);
                 } else if (s.variant == 1) {
                   a.e(2).e(K);
                   closed = al * pw(be, p - 2) * (-al * w1 + be * w2) - al * al * pw(-be, p - 2) * w1 -
                            al * pw(-be, p - 1) * w1K;
                 } else {
                   need(s, s.variant == 2, "variant in 0..2");
                   a.e(2).vec(b.Se(K - 1), "Se" + std::to_string(K - 1));
                   closed = pw(-1, p) * pw(be, p - 1) * al * (al * w1 - be * w1K);
                 }
                 return Outcome{b.R(p, a), closed, a.str()};
               },
               [](int p, Rng& g) {
                 OracleSpec s = draw_complex("cx_b45", p, g, pick(g, 2, 4), 0, pick(g, 0, 2));
                 const int K = 2 * ipar(s, "k");
                 s.omega = random_omega(K + tail_dim(s.tail), g, zeros_e3(K));
                 return s;
               }});

  F.push_back({{"cx_b5", "complex block, omega(e3,e_{2k-1}) = omega(e3,e_{2k}) = 0: replaced pair, then e1,e2", 1, 4, 1},
               1,
               [](const OracleSpec& s) { return complex_k(s, 2); },
               [](const OracleSpec& s, const Bench& b) {
                 const int K = 2 * ipar(s, "k"), i0 = ipar(s, "i0");
                 need(s, i0 >= 1 && i0 <= s.p, "i0 in {1..p} required");
                 check_zeros(s, b, zeros_e3(K));
                 const double be = par(s, "beta");
                 Args a = replaced_pairs(b.n, s.p, K, i0);
                 a.e(1).e(2);
                 const double closed =
                     i0 == 1 ? pw(-be, s.p - 1) * (-b.wv(b.Se(K - 1), b.e(2)) + b.wv(b.e(1), b.Se(K))) : 0.0;
                 return Outcome{b.R(s.p, a), closed, a.str()};
               },
               [](int p, Rng& g) {
                 OracleSpec s = draw_complex("cx_b5", p, g, pick(g, 2, 4), 0);
                 const int K = 2 * ipar(s, "k");
                 s.params["i0"] = pick(g, 0, 1) ? 1 : pick(g, 1, p);
                 s.omega = random_omega(K + tail_dim(s.tail), g, zeros_e3(K));
                 return s;
               }});

  F.push_back({{"cx_aij", "complex block, A^p_ij = R^p omega((e1,e_{2k-1})^{p-1},e_i,e_{2k-1},e_j,e_{2k-1}): vanishing, "
                          "recurrences, and closed forms",
                1, 4, 6},
               1,
               [](const OracleSpec& s) { return complex_k(s, 2); },
               [](const OracleSpec& s, const Bench& b) {
                 const int K = 2 * ipar(s, "k"), p = s.p;
                 const double al = par(s, "alpha"), be = par(s, "beta");
                 auto tuple = [&](int i, int j, int q) {
                   Args a(b.n);
                   a.rep(1, K - 1, q - 1).e(i).e(K - 1).e(j).e(K - 1);
                   return a;
                 };
                 auto A = [&](int i, int j, int q) { return b.R(q, tuple(i, j, q)); };
                 const int v = s.variant;
                 if (v == 0 || v == 1) {
                   const int i = ipar(s, "i"), j = ipar(s, "j");
                   const bool odd_pair = (i == 1 || i == 3) && (j == 1 || j == 3);
                   const bool mixed = (i == 2) != (j == 2) && i >= 1 && i <= 3 && j >= 1 && j <= 3;
                   if (v == 0) {
                     need(s, odd_pair, "i, j in {1, 3} required");
                     return Outcome{A(i, j, p), 0.0, tuple(i, j, p).str()};
                   }
                   need(s, mixed, "(i, j) in {(1,2),(2,1),(2,3),(3,2)} required");
                   return Outcome{A(i, j, p + 1), be * A(i, j, p), tuple(i, j, p + 1).str()};
                 }
                 if (v == 2) {
                   const double closed =
                       -al * (A(1, 2, p) + A(2, 1, p)) + 2 * be * A(2, 2, p) - (A(3, 2, p) + A(2, 3, p));
                   return Outcome{A(2, 2, p + 1), closed, tuple(2, 2, p + 1).str()};
                 }
                 need(s, v >= 3 && v <= 5, "variant in 0..5");
                 check_zeros(s, b, zeros_full(K));
                 const double w1 = b.w(1, K - 1), w2 = b.w(2, K - 1), w1K = b.w(1, K);
                 if (v == 3) return Outcome{A(1, 2, p), pw(be, p - 1) * (-al * w1 + be * w2), tuple(1, 2, p).str()};
                 if (v == 4) return Outcome{A(2, 1, p), pw(be, p - 1) * (al * w1 - be * w1K), tuple(2, 1, p).str()};
                 return Outcome{A(2, 2, p + 1), -al * pw(be, p) * (w2 - w1K) + 2 * be * A(2, 2, p),
                                tuple(2, 2, p + 1).str()};
               },
               [](int p, Rng& g) {
                 const int v = pick(g, 0, 5);
                 OracleSpec s = draw_complex("cx_aij", p, g, pick(g, 2, 4), 0, v);
                 const int K = 2 * ipar(s, "k");
                 if (v == 0) {
                   s.params["i"] = pick(g, 0, 1) ? 1 : 3;
                   s.params["j"] = pick(g, 0, 1) ? 1 : 3;
                 } else if (v == 1) {
                   static const int ij[4][2] = {{1, 2}, {2, 1}, {2, 3}, {3, 2}};
                   const int c = pick(g, 0, 3);
                   s.params["i"] = ij[c][0];
                   s.params["j"] = ij[c][1];
                 } else if (v >= 3) {
                   s.omega = random_omega(K + tail_dim(s.tail), g, zeros_full(K));
                 }
                 return s;
               }});

  // ---------------- diagonal and size-2 configurations ----------------

  F.push_back({{"diag_pair", "h-orthonormal eigenvectors e_1..e_s: R^{2l} omega((e_k,e_j)^{2l},e_k,e_i)", 1, 4, 1},
               2,
               [](const OracleSpec&) { return std::vector<BlockSpec>{}; },
               [](const OracleSpec& s, const Bench& b) {
                 const int sd = ipar(s, "s"), k = ipar(s, "k"), j = ipar(s, "j"), i = ipar(s, "i"), l = s.p;
                 need(s, sd >= 2 && sd <= b.n, "2 <= s <= 2n required");
                 for (int q = 0; q < sd; ++q) {
                   const auto* rb = std::get_if<RealBlock>(&s.tail[static_cast<std::size_t>(q)]);
                   need(s, rb != nullptr && rb->size == 1, "first s blocks must be 1x1");
                 }
                 need(s, k >= 1 && k <= sd && j >= 1 && j <= sd && k != j, "k != j in {1..s} required");
                 need(s, i >= 1 && i <= b.n && i != j && i != k, "i != j, k required");
                 const double lk = b.m.S(k - 1, k - 1), lj = b.m.S(j - 1, j - 1);
                 const double ek = b.h(k, k), ej = b.h(j, j);
                 Args a(b.n);
                 a.rep(k, j, 2 * l).e(k).e(i);
                 return Outcome{b.R(2 * l, a), pw(-1, l) * pw(ek * ej * lk * lj, l) * b.w(k, i), a.str()};
               },
               [](int p, Rng& g) {
                 OracleSpec s = base("diag_pair", p);
                 const int n = draw_dim(g, 4);
                 const int sd = pick(g, 2, n);
                 for (int q = 0; q < sd; ++q) s.tail.push_back(RealBlock{1, uni(g, -1.5, 1.5), sign(g)});
                 auto rest = draw_tail(g, n - sd, true);
                 s.tail.insert(s.tail.end(), rest.begin(), rest.end());
                 const int k = pick(g, 1, sd);
                 const int j = pick_if(g, 1, sd, [&](int x) { return x != k; });
                 s.params["s"] = sd;
                 s.params["k"] = k;
                 s.params["j"] = j;
                 s.params["i"] = pick_if(g, 1, n, [&](int x) { return x != k && x != j; });
                 return s;
               }});

  F.push_back({{"x_z1z2_y", "SX = lambda X, SZ1 = SZ2 = 0, h(Z1,Z2) = h(Y,Z2) = 0: R^{2l} omega(X,(Z1,Z2)^{2l},Y)", 1, 4, 1},
               2,
               [](const OracleSpec&) { return std::vector<BlockSpec>{}; },
               [](const OracleSpec& s, const Bench& b) {
                 need(s, s.vectors.size() == 4, "vectors X, Z1, Z2, Y required");
                 for (const auto& v : s.vectors) need(s, v.size() == b.n, "vector has wrong dimension");
                 const VectorXd &X = s.vectors[0], &Z1 = s.vectors[1], &Z2 = s.vectors[2], &Y = s.vectors[3];
                 const double lam = par(s, "lambda");
                 const double sc = 1e-12 * std::max(1.0, b.m.S.cwiseAbs().maxCoeff());
                 need(s, (b.m.S * X - lam * X).cwiseAbs().maxCoeff() <= sc * X.cwiseAbs().maxCoeff(), "SX = lambda X required");
                 need(s, (b.m.S * Z1).cwiseAbs().maxCoeff() <= sc * Z1.cwiseAbs().maxCoeff(), "SZ1 = 0 required");
                 need(s, (b.m.S * Z2).cwiseAbs().maxCoeff() <= sc * Z2.cwiseAbs().maxCoeff(), "SZ2 = 0 required");
                 need(s, std::abs(Z1.dot(b.m.H * Z2)) <= 1e-12, "h(Z1,Z2) = 0 required");
                 need(s, std::abs(Y.dot(b.m.H * Z2)) <= 1e-12, "h(Y,Z2) = 0 required");
                 Args a(b.n);
                 a.vec(X, "X");
                 for (int t = 0; t < 2 * s.p; ++t) a.vec(Z1, "Z1").vec(Z2, "Z2");
                 a.vec(Y, "Y");
                 const double closed = pw(-1, s.p) * pw(lam, 2 * s.p) * pw(Z1.dot(b.m.H * Z1), s.p) *
                                       pw(Z2.dot(b.m.H * Z2), s.p) * b.wv(X, Y);
                 return Outcome{b.R(2 * s.p, a), closed, a.str()};
               },
               [](int p, Rng& g) {
                 OracleSpec s = base("x_z1z2_y", p);
                 const int n = draw_dim(g, 4);
                 const double lam = uni(g, -1.5, 1.5);
                 s.params["lambda"] = lam;
                 s.tail.push_back(RealBlock{1, lam, sign(g)});
                 s.tail.push_back(RealBlock{1, 0.0, sign(g)});
                 s.tail.push_back(RealBlock{1, 0.0, sign(g)});
                 auto rest = draw_tail(g, n - 3, true);
                 s.tail.insert(s.tail.end(), rest.begin(), rest.end());
                 VectorXd X = VectorXd::Zero(n), Z1 = VectorXd::Zero(n), Z2 = VectorXd::Zero(n), Y(n);
                 X(0) = uni(g, 0.5, 1.5) * sign(g);
                 Z1(1) = uni(g, 0.5, 1.5) * sign(g);
                 Z2(2) = uni(g, 0.5, 1.5) * sign(g);
                 for (int c = 0; c < n; ++c) Y(c) = uni(g, -1, 1);
                 Y(2) = 0.0;
                 s.vectors = {X, Z1, Z2, Y};
                 return s;
               }});

  F.push_back({{"blk2_1x1", "2x2 real block (h = eta sip) plus 1x1 (eps): (e1,e2)^{p-1},e1,e3,e1,e3", 1, 4, 1},
               1,
               [](const OracleSpec& s) {
                 return std::vector<BlockSpec>{RealBlock{2, par(s, "alpha"), sgn(s, "eta")},
                                               RealBlock{1, par(s, "lambda"), sgn(s, "eps")}};
               },
               [](const OracleSpec& s, const Bench& b) {
                 const double al = par(s, "alpha"), eta = sgn(s, "eta"), eps = sgn(s, "eps");
                 Args a(b.n);
                 a.rep(1, 2, s.p - 1).e(1).e(3).e(1).e(3);
                 return Outcome{b.R(s.p, a), pw(-1, s.p) * pw(2 * eta * al, s.p - 1) * eps * b.w(1, 2), a.str()};
               },
               [](int p, Rng& g) {
                 OracleSpec s = base("blk2_1x1", p);
                 s.params["alpha"] = uni(g, -2, 2);
                 s.params["eta"] = sign(g);
                 s.params["lambda"] = uni(g, -1.5, 1.5);
                 s.params["eps"] = sign(g);
                 s.tail = draw_tail(g, draw_dim(g, 4) - 3, true);
                 return s;
               }});

  // Nilpotent 2x2 block, all other directions h-orthogonal eigenvectors; lambda_1 belongs to e3.
  auto a0_primary = [](const OracleSpec& s) {
    for (const auto& t : s.tail) {
      const auto* rb = std::get_if<RealBlock>(&t);
      need(s, rb != nullptr && rb->size == 1, "all blocks after the 2x2 block must be 1x1");
    }
    return std::vector<BlockSpec>{RealBlock{2, 0.0, sgn(s, "eta")}};
  };
  auto a0_draw = [](const std::string& id, int p, Rng& g, int variant) {
    OracleSpec s = base(id, p, variant);
    s.params["eta"] = sign(g);
    const int n = draw_dim(g, 4);
    s.tail = draw_tail(g, n - 2, false);
    return s;
  };

  F.push_back({{"blk2_a0", "nilpotent 2x2 block plus eigenvectors: (e3,e1),(e1,e2)^{p-1},(e_i,e2)", 1, 4, 1},
               1,
               a0_primary,
               [](const OracleSpec& s, const Bench& b) {
                 const int i = ipar(s, "i");
                 need(s, i >= 3 && i <= b.n, "i >= 3 required");
                 const double eta = sgn(s, "eta"), l1 = b.m.S(2, 2);
                 Args a(b.n);
                 a.e(3).e(1).rep(1, 2, s.p - 1).e(i).e(2);
                 return Outcome{b.R(s.p, a), -pw(eta * l1, s.p) * b.w(i, 3), a.str()};
               },
               [a0_draw](int p, Rng& g) {
                 OracleSpec s = a0_draw("blk2_a0", p, g, 0);
                 s.params["i"] = pick(g, 3, 2 + tail_dim(s.tail));
                 return s;
               }});

  F.push_back({{"blk2_a0n", "nilpotent 2x2 block plus eigenvectors: (e3,e2),(e1,e2)^p and (e3,e1),(e1,e2)^p", 1, 4, 2},
               1,
               a0_primary,
               [](const OracleSpec& s, const Bench& b) {
                 const double eta = sgn(s, "eta"), l1 = b.m.S(2, 2);
                 const int p = s.p;
                 Args a(b.n);
                 if (s.variant == 0) {
                   a.e(3).e(2).rep(1, 2, p);
                   return Outcome{b.R(p, a), pw(-1, p) * pw(eta * l1, p) * b.w(3, 2), a.str()};
                 }
                 need(s, s.variant == 1, "variant in 0..1");
                 a.e(3).e(1).rep(1, 2, p);
                 const double closed =
                     -pw(eta * l1, p) * b.w(1, 3) + 0.5 * (pw(-1, p) + 1) * pw(eta, p) * pw(l1, p - 1) * b.w(2, 3);
                 return Outcome{b.R(p, a), closed, a.str()};
               },
               [a0_draw](int p, Rng& g) { return a0_draw("blk2_a0n", p, g, pick(g, 0, 1)); }});

  return F;
}

const std::vector<Family>& catalog() {
  static const std::vector<Family> F = build_catalog();
  return F;
}

const Family& family(const std::string& id) {
  for (const auto& f : catalog())
    if (f.info.id == id) return f;
  throw Error(ErrorCode::InvalidArgument, "unknown oracle id '" + id + "'");
}

}  // namespace

const std::vector<OracleInfo>& list_oracles() {
  static const std::vector<OracleInfo> infos = [] {
    std::vector<OracleInfo> v;
    for (const auto& f : catalog()) v.push_back(f.info);
    return v;
  }();
  return infos;
}

const OracleInfo& oracle_info(const std::string& id) { return family(id).info; }

MatrixXd random_omega(int dim, std::mt19937_64& rng, std::span<const std::pair<int, int>> zeros) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    MatrixXd W = MatrixXd::Zero(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = i + 1; j < dim; ++j) {
        W(i, j) = u(rng);
        W(j, i) = -W(i, j);
      }
    for (auto [i, j] : zeros) W(i - 1, j - 1) = W(j - 1, i - 1) = 0.0;
    if (std::abs(W.determinant()) > 1e-6) return W;
  }
  throw Error(ErrorCode::Internal, "could not draw a nondegenerate omega with the requested zero pattern");
}

OracleResult run_oracle(const OracleSpec& spec) {
  const Family& f = family(spec.id);
  if (spec.p < f.info.p_min)
    throw Error(ErrorCode::Hypothesis, spec.id + ": hypothesis violated: p >= " + std::to_string(f.info.p_min) +
                                           " required (p = " + std::to_string(spec.p) + ")");
  if (f.info.p_max == 1 && spec.p != 1)
    throw Error(ErrorCode::Hypothesis, spec.id + ": hypothesis violated: this identity has no power (use p = 1)");
  if (f.power_mult * spec.p > tensor_ops::kAlgebraicPowerCap)
    throw Error(ErrorCode::OrderExceeded, spec.id + ": recursion order " + std::to_string(f.power_mult * spec.p) +
                                              " exceeds the cap " + std::to_string(tensor_ops::kAlgebraicPowerCap));

  std::vector<BlockSpec> blocks = f.primary(spec);
  blocks.insert(blocks.end(), spec.tail.begin(), spec.tail.end());
  const int n = dim_of(spec, f.primary(spec));
  if (n < 4 || n % 2 != 0)
    throw Error(ErrorCode::Hypothesis,
                spec.id + ": hypothesis violated: total dimension must be even and >= 4 (got " + std::to_string(n) + ")");

  Bench b;
  b.m = model::assemble(blocks);
  b.n = n;
  b.W = spec.omega.size() == 0 ? model::default_omega(n) : spec.omega;
  if (b.W.rows() != n || b.W.cols() != n)
    throw Error(ErrorCode::InvalidArgument, spec.id + ": omega must be " + std::to_string(n) + "x" + std::to_string(n));
  if ((b.W + b.W.transpose()).cwiseAbs().maxCoeff() > 0.0)
    throw Error(ErrorCode::Hypothesis, spec.id + ": hypothesis violated: omega must be antisymmetric");
  if (std::abs(b.W.determinant()) <= 1e-12)
    throw Error(ErrorCode::Hypothesis, spec.id + ": hypothesis violated: omega must be nondegenerate");
  b.T = tensor_ops::Tensor::from_matrix(b.W);
  b.C.emplace(b.m);

  const Outcome o = f.eval(spec, b);
  OracleResult r;
  r.id = spec.id;
  r.variant = spec.variant;
  r.p = spec.p;
  r.dim = n;
  r.brute = o.brute;
  r.closed = o.closed;
  r.abs_err = std::abs(o.brute - o.closed);
  r.pass = r.abs_err <= kOracleRelTol * std::max(1.0, std::abs(o.closed));
  r.tuple = o.tuple;
  r.params = spec.params;
  return r;
}

OracleSpec draw_oracle(const std::string& id, int p, std::mt19937_64& rng) {
  const Family& f = family(id);
  OracleSpec s = f.draw(p, rng);
  if (s.omega.size() == 0) s.omega = random_omega(dim_of(s, f.primary(s)), rng);
  return s;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t family_seed(std::uint64_t master, const std::string& id) { return splitmix64(master ^ fnv1a(id)); }

FamilyReport run_family(const std::string& id, int draws, int p_max, std::uint64_t master_seed) {
  const OracleInfo& info = oracle_info(id);
  FamilyReport rep;
  rep.id = id;
  rep.p_lo = info.p_min;
  rep.p_hi = std::max(info.p_min, std::min(p_max, info.p_max));
  const std::uint64_t fs = family_seed(master_seed, id);
  for (int p = rep.p_lo; p <= rep.p_hi; ++p) rep.by_p.push_back(PowerStats{p});
  for (int d = 0; d < draws; ++d) {
    const int p = rep.p_lo + d % (rep.p_hi - rep.p_lo + 1);
    std::mt19937_64 rng(splitmix64(fs + static_cast<std::uint64_t>(d)));
    const OracleResult r = run_oracle(draw_oracle(id, p, rng));
    const double scaled = r.abs_err / std::max(1.0, std::abs(r.closed));
    PowerStats& ps = rep.by_p[static_cast<std::size_t>(p - rep.p_lo)];
    ++rep.draws;
    ++ps.draws;
    rep.max_abs_err = std::max(rep.max_abs_err, r.abs_err);
    rep.max_scaled_err = std::max(rep.max_scaled_err, scaled);
    ps.max_abs_err = std::max(ps.max_abs_err, r.abs_err);
    ps.max_scaled_err = std::max(ps.max_scaled_err, scaled);
    if (!r.pass) {
      ++rep.failures;
      ++ps.failures;
      if (rep.failed.size() < 5) rep.failed.push_back(r);
    }
  }
  return rep;
}

std::vector<FamilyReport> run_catalog(std::span<const std::string> ids, int draws, int p_max,
                                      std::uint64_t master_seed) {
  std::vector<std::future<FamilyReport>> jobs;
  for (const auto& id : ids)
    jobs.push_back(std::async(std::launch::async, [=] { return run_family(id, draws, p_max, master_seed); }));
  std::vector<FamilyReport> out;
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

}  // namespace affsym::verify
