#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "affsym/canonical_pair.hpp"
#include "affsym/error.hpp"
#include "affsym/tensor_ops.hpp"
#include "affsym/verify.hpp"

namespace affsym::verify {

namespace {

using model::BlockSpec;
using model::ComplexBlock;
using model::RealBlock;
using Tuple = std::vector<int>;

// Appends (a,b) `times` times.
void rep(Tuple& t, int a, int b, int times) {
  for (int i = 0; i < times; ++i) {
    t.push_back(a);
    t.push_back(b);
  }
}

Tuple cat(Tuple t, std::initializer_list<int> tail) {
  t.insert(t.end(), tail);
  return t;
}

// Tuples (1-based, length 2p+2) on which the lemmas place nonzero components of
// R^p omega for each inadmissible block configuration.
std::vector<Tuple> lemma_tuples(const model::GaussModel& m, int p) {
  const int n = m.dim;
  std::vector<Tuple> out;
  std::vector<int> size2_offsets;
  std::vector<int> one_by_one;  // 1-based indices of nonzero 1x1 eigenvalues
  for (std::size_t b = 0; b < m.blocks.size(); ++b) {
    const int o = m.offsets[b];
    if (const auto* rb = std::get_if<RealBlock>(&m.blocks[b])) {
      const int k = rb->size;
      if (k == 1 && rb->lambda != 0.0) one_by_one.push_back(o + 1);
      if (k == 2) size2_offsets.push_back(o);
      if (k >= 4) {
        const int e1 = o + 1, e2 = o + 2, ek1 = o + k - 1, ek = o + k;
        Tuple base;
        rep(base, e1, ek1, p);
        out.push_back(cat(base, {e2, ek1}));
        out.push_back(cat(base, {e2, ek}));
        for (int i = 1; i <= n; ++i) out.push_back(cat(base, {i, ek}));
        Tuple t36{ek1, ek};
        rep(t36, e1, ek1, p - 1);
        out.push_back(cat(t36, {e1, e2}));
      }
      if (k == 3) {
        const int e1 = o + 1, e2 = o + 2, e3 = o + 3;
        Tuple base;
        rep(base, e1, e2, p);
        out.push_back(cat(base, {e1, e2}));
        for (int i = 1; i <= n; ++i) out.push_back(cat(base, {e2, i}));
        Tuple b1;
        rep(b1, e1, e2, p - 1);
        out.push_back(cat(b1, {e2, e3, e1, e2}));
        for (int i = 1; i <= n; ++i)
          for (int j = 1; j <= n; ++j)
            if ((i < e1 || i > e3) && (j < e1 || j > e3)) out.push_back(cat(b1, {e2, i, e1, j}));
      }
    } else {
      const auto& cb = std::get<ComplexBlock>(m.blocks[b]);
      const int K = 2 * cb.half_size, e1 = o + 1, e2 = o + 2;
      if (cb.half_size == 1) {
        Tuple base;
        rep(base, e1, e2, p);
        for (int i = 1; i <= n; ++i) {
          out.push_back(cat(base, {e1, i}));
          out.push_back(cat(base, {e2, i}));
        }
        Tuple b1;
        rep(b1, e1, e2, p - 1);
        for (int i = 1; i <= n; ++i)
          for (int j = 1; j <= n; ++j) out.push_back(cat(b1, {e1, i, e2, j}));
      } else {
        const int eK1 = o + K - 1, eK = o + K;
        Tuple b1, b2;
        rep(b1, e1, eK1, p);
        rep(b2, e2, eK, p);
        out.push_back(cat(b1, {e2, eK1}));
        for (int i = 1; i <= n; ++i) {
          out.push_back(cat(b1, {i, eK}));
          out.push_back(cat(b2, {i, eK1}));
        }
      }
    }
  }
  // two 2x2 real blocks
  if (size2_offsets.size() >= 2) {
    const int e1 = size2_offsets[0] + 1, e2 = e1 + 1, e3 = size2_offsets[1] + 1, e4 = e3 + 1;
    Tuple base;
    rep(base, e1, e3, p);
    for (int i = 1; i <= n; ++i) out.push_back(cat(base, {i, e4}));
    Tuple b1;
    rep(b1, e1, e3, p - 1);
    out.push_back(cat(b1, {e1, e2, e1, e2}));
    out.push_back(cat(b1, {e1, e4, e1, e4}));
  }
  // h-orthogonal eigenvectors with nonzero eigenvalues
  for (int k : one_by_one)
    for (int j : one_by_one) {
      if (j == k) continue;
      Tuple base;
      rep(base, k, j, p);
      for (int i = 1; i <= n; ++i) out.push_back(cat(base, {k, i}));
    }
  return out;
}

std::string shape_string(std::span<const BlockSpec> shape) {
  std::string s;
  for (const auto& b : shape) s += (s.empty() ? "" : " + ") + model::describe(b);
  return s;
}

std::string summary_string(const canonical_pair::ShapeSummary& sh) {
  std::ostringstream os;
  bool first = true;
  for (const auto& c : sh.counts) {
    os << (first ? "" : " + ") << c.count << "x" << (c.complex ? "C" : "R") << c.size;
    first = false;
  }
  if (first) os << "empty";
  return os.str();
}

void finish(RankCheck& rc, const MatrixXd& S, const MatrixXd& H, double tol) {
  const bool vanishes = rc.r_max < tol || (rc.nabla_max && *rc.nabla_max < tol);
  rc.rank_s = canonical_pair::rank(S);
  try {
    const canonical_pair::CanonicalPair cp = canonical_pair::decompose(S, H);
    const canonical_pair::ShapeSummary sh = canonical_pair::classify(cp);
    rc.admissible = sh.raw_admissible;
    rc.shape = summary_string(sh);
    if (sh.final_form) rc.note = "final form";
  } catch (const Error& e) {
    rc.admissible = false;
    rc.note = std::string("decomposition failed: ") + e.what();
  }
  if (!vanishes) {
    rc.verdict = Verdict::Vacuous;
  } else {
    rc.verdict = rc.rank_s <= 1 && rc.admissible ? Verdict::Pass : Verdict::Fail;
  }
}

void check_omega(const MatrixXd& W) {
  if (std::abs(W.determinant()) <= 1e-12) throw Error(ErrorCode::Hypothesis, "omega is degenerate at the evaluation point");
}

}  // namespace

std::vector<std::pair<std::string, std::vector<BlockSpec>>> inadmissible_shapes() {
  auto zeros = [](std::vector<BlockSpec> v, int count) {
    for (int i = 0; i < count; ++i) v.push_back(RealBlock{1, 0.0, i % 2 == 0 ? 1 : -1});
    return v;
  };
  return {
      {"real4", zeros({RealBlock{4, 0.7, 1}}, 4)},
      {"real3_alpha0", zeros({RealBlock{3, 0.0, 1}}, 3)},
      {"real3_alpha", zeros({RealBlock{3, 0.8, -1}}, 3)},
      {"two_real2", {RealBlock{2, 0.5, 1}, RealBlock{2, -0.3, 1}}},
      {"complex2", zeros({ComplexBlock{1, 0.5, 1.2}}, 2)},
      {"complex4", {ComplexBlock{2, 0.3, 0.9}}},
      {"diag_rank2", {RealBlock{1, 1.0, 1}, RealBlock{1, -0.7, -1}, RealBlock{1, 0.0, 1}, RealBlock{1, 0.0, -1}}},
  };
}

WitnessReport theorem_witness(std::span<const BlockSpec> shape, int p_max, int trials, std::uint64_t seed) {
  if (p_max < 1 || p_max > tensor_ops::kAlgebraicPowerCap)
    throw Error(ErrorCode::InvalidArgument, "p_max must be in 1.." + std::to_string(tensor_ops::kAlgebraicPowerCap));
  if (trials < 1) throw Error(ErrorCode::InvalidArgument, "trials must be >= 1");
  const model::GaussModel m = model::assemble(shape);
  const tensor_ops::ModelCurvature C(m);
  WitnessReport rep;
  rep.shape = shape_string(shape);
  rep.dim = m.dim;
  const int n = m.dim;

  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng(splitmix64(seed ^ (0x5157ULL + static_cast<std::uint64_t>(t))));
    const MatrixXd W = random_omega(n, rng);
    const tensor_ops::Tensor T = tensor_ops::Tensor::from_matrix(W);
    tensor_ops::RPowerEvaluator ev(C, T);
    std::vector<VectorXd> args;
    auto value = [&](const Tuple& tup, int p) {
      args.clear();
      for (int i : tup) args.push_back(model::basis(n, i));
      return ev(p, args);
    };
    for (int p = 1; p <= p_max; ++p) {
      WitnessHit hit;
      hit.p = p;
      hit.trial = t;
      for (const Tuple& tup : lemma_tuples(m, p)) {
        ++hit.evaluated;
        const double v = value(tup, p);
        if (std::abs(v) > kWitnessThreshold) {
          hit.found = hit.from_lemma = true;
          hit.tuple = tup;
          hit.value = v;
          break;
        }
      }
      std::uniform_int_distribution<int> idx(1, n);
      for (int r = 0; !hit.found && r < kWitnessRandomTuples; ++r) {
        Tuple tup(static_cast<std::size_t>(2 * p + 2));
        for (int& i : tup) i = idx(rng);
        ++hit.evaluated;
        const double v = value(tup, p);
        if (std::abs(v) > kWitnessThreshold) {
          hit.found = true;
          hit.tuple = tup;
          hit.value = v;
        }
      }
      if (!hit.found) ++rep.missing;
      rep.hits.push_back(std::move(hit));
    }
  }
  return rep;
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Pass:
      return "PASS";
    case Verdict::Fail:
      return "FAIL";
    case Verdict::Vacuous:
      return "VACUOUS";
  }
  return "?";
}

RankCheck check_rank_theorem(const model::GaussModel& m, const MatrixXd& omega, int p, double tol) {
  if (p < 1) throw Error(ErrorCode::InvalidArgument, "p must be >= 1");
  check_omega(omega);
  const tensor_ops::ModelCurvature C(m);
  RankCheck rc;
  rc.p = p;
  rc.r_max = tensor_ops::r_power_tensor(C, tensor_ops::Tensor::from_matrix(omega), p).max_abs();
  finish(rc, m.S, m.H, tol);
  return rc;
}

RankCheck check_rank_theorem(const geometry::Scenario& s, std::span<const double> x, int p, double tol) {
  if (p < 1) throw Error(ErrorCode::InvalidArgument, "p must be >= 1");
  const MatrixXd W = geometry::omega_at(s, x);
  check_omega(W);
  const geometry::InducedStructure st = geometry::induced_structure(s, x);
  const tensor_ops::GeometricCurvature C(geometry::curvature(st));
  RankCheck rc;
  rc.p = p;
  rc.r_max = tensor_ops::r_power_tensor(C, tensor_ops::Tensor::from_matrix(W), p).max_abs();
  rc.nabla_max = tensor_ops::nabla_power_tensor(tensor_ops::CovariantField::omega(s), s, p, x).max_abs();
  finish(rc, st.S, st.h, tol);
  return rc;
}

}  // namespace affsym::verify
