#include "affsym/canonical_pair.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <limits>
#include <optional>
#include <random>
#include <sstream>

#include "affsym/error.hpp"

namespace affsym::canonical_pair {

namespace {

using cplx = std::complex<double>;
using MatrixXc = Eigen::MatrixXcd;
using model::BlockSpec;
using model::ComplexBlock;
using model::RealBlock;

template <class Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

struct Staircase {
  int dim = 0;
  std::vector<int> dims;  // dim K_1, dim K_2, ... (strictly increasing)
  bool borderline = false;
};

// K_j = null(P_{j-1}^perp M) where P_{j-1}^perp projects off K_{j-1}; the
// increments of dim K_j form the Weyr characteristic of M on its kernel chain.
template <class Scalar>
Mat<Scalar> staircase(const Mat<Scalar>& M, double rank_tol, Staircase& info) {
  const Eigen::Index n = M.rows();
  Mat<Scalar> V(n, 0);
  info = {};
  for (Eigen::Index step = 0; step < n; ++step) {
    const Mat<Scalar> proj = Mat<Scalar>::Identity(n, n) - V * V.adjoint();
    Eigen::JacobiSVD<Mat<Scalar>> svd(proj * M, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    Eigen::Index nullity = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      if (s(i) <= rank_tol) ++nullity;
      if (s(i) > rank_tol / 10 && s(i) < rank_tol * 10) info.borderline = true;
    }
    if (nullity <= V.cols()) break;
    V = svd.matrixV().rightCols(nullity);
    info.dims.push_back(static_cast<int>(nullity));
  }
  info.dim = static_cast<int>(V.cols());
  return V;
}

std::vector<int> block_sizes(const std::vector<int>& dims) {
  std::vector<int> w;
  int prev = 0;
  for (int d : dims) {
    w.push_back(d - prev);
    prev = d;
  }
  std::vector<int> sizes;
  for (std::size_t s = 1; s <= w.size(); ++s) {
    const int ge = w[s - 1];
    const int gt = s < w.size() ? w[s] : 0;
    for (int c = 0; c < ge - gt; ++c) sizes.push_back(static_cast<int>(s));
  }
  std::sort(sizes.rbegin(), sizes.rend());
  return sizes;
}

template <class Scalar>
Mat<Scalar> orthonormal_range(const Mat<Scalar>& B, Eigen::Index keep) {
  Eigen::JacobiSVD<Mat<Scalar>> svd(B, Eigen::ComputeThinU);
  return svd.matrixU().leftCols(keep);
}

// Picks a vector x in span(B) maximizing |x^T Q x| / |x|^2 (approximately for complex Q).
template <class Scalar>
Vec<Scalar> pick_pivot_vector(const Mat<Scalar>& Q) {
  const Eigen::Index r = Q.rows();
  if constexpr (std::is_same_v<Scalar, double>) {
    Eigen::SelfAdjointEigenSolver<Mat<double>> es(0.5 * (Q + Q.transpose()));
    Eigen::Index best = 0;
    es.eigenvalues().cwiseAbs().maxCoeff(&best);
    return es.eigenvectors().col(best);
  } else {
    Vec<Scalar> best = Vec<Scalar>::Unit(r, 0);
    double best_val = -1.0;
    auto consider = [&](const Vec<Scalar>& x) {
      const double v = std::abs((x.transpose() * Q * x)(0, 0)) / x.squaredNorm();
      if (v > best_val) {
        best_val = v;
        best = x;
      }
    };
    for (Eigen::Index i = 0; i < r; ++i) {
      consider(Vec<Scalar>::Unit(r, i));
      for (Eigen::Index j = i + 1; j < r; ++j) {
        consider(Vec<Scalar>::Unit(r, i) + Vec<Scalar>::Unit(r, j));
        consider(Vec<Scalar>::Unit(r, i) + Scalar(0, 1) * Vec<Scalar>::Unit(r, j));
      }
    }
    return best;
  }
}

// Splits the generalized eigenspace (columns of V, invariant under M = A - mu I)
// into Jordan chains x, Mx, ..., M^{s-1}x normalized so that the bilinear form
// g(u,v) = u^T H v on each chain is the anti-diagonal with entry gamma.
// Real clusters: gamma = +-1 (the sign characteristic). Complex clusters: gamma = 2i.
template <class Scalar>
std::vector<std::pair<Mat<Scalar>, double>> split_chains(const Mat<Scalar>& M, const Mat<Scalar>& H,
                                                         const Mat<Scalar>& V, const std::vector<int>& sizes) {
  const Eigen::Index m = V.cols();
  const Mat<Scalar> Nm = V.adjoint() * M * V;
  const Mat<Scalar> Gm = V.transpose() * H * V;
  std::vector<std::pair<Mat<Scalar>, double>> chains;
  Mat<Scalar> B = Mat<Scalar>::Identity(m, m);
  for (int s : sizes) {
    Mat<Scalar> Np = Mat<Scalar>::Identity(m, m);
    for (int j = 1; j < s; ++j) Np = Nm * Np;
    const Mat<Scalar> Q = B.transpose() * Gm * Np * B;
    Vec<Scalar> x = B * pick_pivot_vector<Scalar>(Q);
    x /= x.norm();

    // x is fixed only modulo Y = span(B) ∩ ker N^{s-1}, which leaves the pivot
    // g(N^{s-1}x, x) unchanged. Within that freedom we keep the chain small
    // (weighted by W = sum_j |N^j y|^2) so T stays well conditioned when
    // several blocks share an eigenvalue.
    const Eigen::Index same = std::count(sizes.begin() + static_cast<std::ptrdiff_t>(chains.size()), sizes.end(), s);
    const Eigen::Index kdim = B.cols() - same;  // known from the Weyr counts
    Mat<Scalar> Y(m, 0), Rw;
    if (s > 1 && kdim > 0) {
      Eigen::JacobiSVD<Mat<Scalar>> ksvd(Np * B, Eigen::ComputeFullV);
      Y = B * ksvd.matrixV().rightCols(kdim);
      Mat<Scalar> L(m * s, kdim);
      Vec<Scalar> r(m * s);
      Mat<Scalar> Pj = Mat<Scalar>::Identity(m, m);
      for (int j = 0; j < s; ++j) {
        L.middleRows(j * m, m) = Pj * Y;
        r.segment(j * m, m) = -(Pj * x);
        Pj = Nm * Pj;
      }
      Eigen::HouseholderQR<Mat<Scalar>> qr(L);
      Rw = qr.matrixQR().topRows(kdim).template triangularView<Eigen::Upper>();
      x += Y * L.colPivHouseholderQr().solve(r);
    }

    auto moments = [&](const Vec<Scalar>& v) {
      std::vector<Scalar> mom(static_cast<std::size_t>(s));
      Vec<Scalar> p = v;
      for (int i = 0; i < s; ++i) {
        mom[static_cast<std::size_t>(i)] = (p.transpose() * Gm * v)(0, 0);
        p = Nm * p;
      }
      return mom;
    };
    std::vector<Scalar> mom = moments(x);
    const Scalar pivot = mom[static_cast<std::size_t>(s - 1)];
    if (std::abs(pivot) < 1e-12) throw Error(ErrorCode::Internal, "canonical pair: vanishing chain pivot");
    Scalar gamma;
    double sign = 0.0;
    if constexpr (std::is_same_v<Scalar, double>) {
      sign = pivot > 0 ? 1.0 : -1.0;
      gamma = sign;
    } else {
      gamma = Scalar(0.0, 2.0);
    }
    x *= std::sqrt(gamma / pivot);
    mom = moments(x);

    // Minimum-W-norm Gauss-Newton on g(N^i x, x) = 0, i < s-1; the Jacobian row
    // is 2 (N^i x)^T G Y by selfadjointness.
    if (Y.cols() > 0) {
      const Mat<Scalar> Rinv = Rw.inverse();
      for (int it = 0; it < 30; ++it) {
        double fmax = 0.0;
        for (int i = 0; i + 1 < s; ++i) fmax = std::max(fmax, std::abs(mom[static_cast<std::size_t>(i)]));
        if (fmax < 1e-14) break;
        Mat<Scalar> Jac(s - 1, Y.cols());
        Vec<Scalar> f(s - 1);
        Vec<Scalar> p = x;
        for (int i = 0; i + 1 < s; ++i) {
          Jac.row(i) = Scalar(2) * (p.transpose() * Gm * Y);
          f(i) = -mom[static_cast<std::size_t>(i)];
          p = Nm * p;
        }
        const Mat<Scalar> JR = Jac * Rinv;
        const Vec<Scalar> b = JR.completeOrthogonalDecomposition().solve(f);
        x += Y * (Rinv * b);
        mom = moments(x);
      }
    }

    // x' = sum_t c_t N^t x with c_0 = 1; solve for c_t so that g(N^i x', x') = 0 for i < s-1.
    std::vector<Scalar> c(static_cast<std::size_t>(s), Scalar(0));
    c[0] = Scalar(1);
    auto mo = [&](int t) { return t < s ? mom[static_cast<std::size_t>(t)] : Scalar(0); };
    for (int t = 1; t < s; ++t) {
      const int i = s - 1 - t;
      Scalar acc(0);
      for (int a = 0; a < t; ++a)
        for (int b = 0; b < t; ++b) {
          if (a + b < t) {
            acc += c[static_cast<std::size_t>(a)] * c[static_cast<std::size_t>(b)] * mo(i + a + b);
          } else if (a + b == t) {
            acc += c[static_cast<std::size_t>(a)] * c[static_cast<std::size_t>(b)] * gamma;
          }
        }
      c[static_cast<std::size_t>(t)] = -acc / (Scalar(2) * gamma);
    }
    Vec<Scalar> xp = Vec<Scalar>::Zero(m);
    Vec<Scalar> p = x;
    for (int t = 0; t < s; ++t) {
      xp += c[static_cast<std::size_t>(t)] * p;
      p = Nm * p;
    }
    Mat<Scalar> E(m, s);
    E.col(0) = xp;
    for (int j = 1; j < s; ++j) E.col(j) = Nm * E.col(j - 1);

    const Mat<Scalar> C = E.transpose() * Gm * E;
    const Eigen::Index remaining = B.cols() - s;
    if (remaining > 0) {
      const Mat<Scalar> Bp = B - E * C.partialPivLu().solve(E.transpose() * Gm * B);
      B = orthonormal_range<Scalar>(Bp, remaining);
    } else {
      B.resize(m, 0);
    }
    chains.emplace_back(V * E, sign);
  }
  return chains;
}

struct Cluster {
  std::vector<int> members;
  cplx mean;
  bool real = false;
};

std::vector<Cluster> cluster_eigenvalues(const std::vector<cplx>& ev, double delta) {
  const int n = static_cast<int>(ev.size());
  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int a) {
    while (parent[static_cast<std::size_t>(a)] != a) a = parent[static_cast<std::size_t>(a)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
    return a;
  };
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (std::abs(ev[static_cast<std::size_t>(a)] - ev[static_cast<std::size_t>(b)]) <= delta)
        parent[static_cast<std::size_t>(find(a))] = find(b);
  std::vector<Cluster> out;
  std::vector<int> slot(static_cast<std::size_t>(n), -1);
  for (int a = 0; a < n; ++a) {
    const int r = find(a);
    if (slot[static_cast<std::size_t>(r)] < 0) {
      slot[static_cast<std::size_t>(r)] = static_cast<int>(out.size());
      out.emplace_back();
    }
    out[static_cast<std::size_t>(slot[static_cast<std::size_t>(r)])].members.push_back(a);
  }
  for (auto& c : out) {
    cplx sum = 0;
    for (int i : c.members) sum += ev[static_cast<std::size_t>(i)];
    c.mean = sum / static_cast<double>(c.members.size());
    c.real = std::abs(c.mean.imag()) <= std::max(delta, 1e-300);
  }
  return out;
}

struct Attempt {
  bool consistent = true;
  bool borderline = false;
  std::vector<std::pair<BlockSpec, MatrixXd>> blocks;  // spec + its n x dim(block) columns of T
};

Attempt try_clustering(const MatrixXd& A, const MatrixXd& H, const std::vector<Cluster>& clusters,
                       double rank_tol) {
  Attempt at;
  const Eigen::Index n = A.rows();
  for (const auto& c : clusters) {
    const int mult = static_cast<int>(c.members.size());
    if (c.real) {
      const double mu = c.mean.real();
      const MatrixXd M = A - mu * MatrixXd::Identity(n, n);
      Staircase info;
      const MatrixXd V = staircase<double>(M, rank_tol, info);
      at.borderline = at.borderline || info.borderline;
      if (info.dim != mult) {
        at.consistent = false;
        return at;
      }
      for (auto& [E, sign] : split_chains<double>(M, H, V, block_sizes(info.dims))) {
        at.blocks.emplace_back(RealBlock{static_cast<int>(E.cols()), mu, sign > 0 ? 1 : -1}, E);
      }
    } else {
      if (c.mean.imag() < 0) continue;  // handled through the conjugate cluster
      const bool mirrored = std::any_of(clusters.begin(), clusters.end(), [&](const Cluster& o) {
        return o.members.size() == c.members.size() && std::abs(o.mean - std::conj(c.mean)) <= 1e-6 * (1 + std::abs(c.mean));
      });
      if (!mirrored) {
        at.consistent = false;
        return at;
      }
      const cplx mu = c.mean;
      const MatrixXc M = A.cast<cplx>() - mu * MatrixXc::Identity(n, n);
      Staircase info;
      const MatrixXc V = staircase<cplx>(M, rank_tol, info);
      at.borderline = at.borderline || info.borderline;
      if (info.dim != mult) {
        at.consistent = false;
        return at;
      }
      for (auto& [Z, sign] : split_chains<cplx>(M, H.cast<cplx>(), V, block_sizes(info.dims))) {
        (void)sign;
        const Eigen::Index k = Z.cols();
        MatrixXd cols(n, 2 * k);
        for (Eigen::Index j = 0; j < k; ++j) {
          cols.col(2 * j) = Z.col(j).real();
          cols.col(2 * j + 1) = Z.col(j).imag();
        }
        at.blocks.emplace_back(ComplexBlock{static_cast<int>(k), mu.real(), mu.imag()}, cols);
      }
    }
  }
  return at;
}

bool block_less(const BlockSpec& a, const BlockSpec& b) {
  const bool ca = model::is_complex(a), cb = model::is_complex(b);
  if (ca != cb) return !ca;
  if (!ca) {
    const auto& ra = std::get<RealBlock>(a);
    const auto& rb = std::get<RealBlock>(b);
    if (ra.size != rb.size) return ra.size > rb.size;
    if (ra.lambda != rb.lambda) return ra.lambda < rb.lambda;
    return ra.sign < rb.sign;
  }
  const auto& xa = std::get<ComplexBlock>(a);
  const auto& xb = std::get<ComplexBlock>(b);
  if (xa.half_size != xb.half_size) return xa.half_size > xb.half_size;
  if (xa.alpha != xb.alpha) return xa.alpha < xb.alpha;
  return xa.beta < xb.beta;
}

std::string shape_string(const std::vector<std::pair<BlockSpec, MatrixXd>>& blocks) {
  std::vector<BlockSpec> specs;
  for (const auto& b : blocks) specs.push_back(b.first);
  std::stable_sort(specs.begin(), specs.end(), block_less);
  std::string s = "[";
  for (std::size_t i = 0; i < specs.size(); ++i) s += (i ? ", " : "") + model::describe(specs[i]);
  return s + "]";
}

}  // namespace

MatrixXd sip(int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "sip size must be >= 1");
  MatrixXd P = MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) P(i, n - 1 - i) = 1.0;
  return P;
}

Signature sip_signature(int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "sip size must be >= 1");
  return {(n + 1) / 2, n / 2};
}

Signature inertia(const MatrixXd& sym, double tol) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(sym);
  const auto& ev = es.eigenvalues();
  const double cut = tol * std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
  Signature s;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) > cut) ++s.pos;
    else if (ev(i) < -cut) ++s.neg;
  }
  return s;
}

double norm_inf(const MatrixXd& M) {
  if (M.size() == 0) return 0.0;
  return M.cwiseAbs().rowwise().sum().maxCoeff();
}

int rank(const MatrixXd& S, double tol) {
  if (S.size() == 0) return 0;
  Eigen::JacobiSVD<MatrixXd> svd(S);
  const auto& s = svd.singularValues();
  if (s(0) == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tol * s(0)) ++r;
  return r;
}

CanonicalPair decompose(const MatrixXd& A, const MatrixXd& H, const DecomposeOptions& opts) {
  const Eigen::Index n = A.rows();
  if (n == 0 || A.cols() != n || H.rows() != n || H.cols() != n)
    throw Error(ErrorCode::InvalidArgument, "decompose: A and H must be square of equal size");
  if (!A.allFinite() || !H.allFinite()) throw Error(ErrorCode::InvalidArgument, "decompose: non-finite input");
  const double nA = norm_inf(A), nH = norm_inf(H);
  if (norm_inf(H - H.transpose()) > 1e-12 * std::max(1.0, nH))
    throw Error(ErrorCode::InvalidArgument, "decompose: H is not symmetric");
  const Eigen::VectorXd hsv = Eigen::JacobiSVD<MatrixXd>(H).singularValues();
  if (!(hsv(n - 1) > 1e-10 * hsv(0))) throw Error(ErrorCode::SingularForm, "decompose: H is singular");
  const double sa = norm_inf(A.transpose() * H - H * A);
  if (sa > opts.tol * nH * nA) {
    std::ostringstream os;
    os << "decompose: A is not H-selfadjoint (||A^T H - H A|| = " << sa << ")";
    throw Error(ErrorCode::NotSelfAdjoint, os.str());
  }

  Eigen::EigenSolver<MatrixXd> es(A, false);
  std::vector<cplx> ev(es.eigenvalues().data(), es.eigenvalues().data() + n);
  const double rank_tol = opts.rank_tol * std::max(1.0, nA);
  const double delta0 = opts.cluster_rel * nA;
  const double delta_max = 0.5 * std::max(nA, 1e-300);

  CanonicalPair out;
  out.scale = nA;
  std::vector<std::vector<int>> tried;
  std::optional<Attempt> chosen;
  std::string chosen_shape;
  for (double delta = delta0;; delta = delta > 0 ? delta * 4 : 1e-300) {
    auto clusters = cluster_eigenvalues(ev, delta);
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (std::size_t c = 0; c < clusters.size(); ++c)
      for (int i : clusters[c].members) labels[static_cast<std::size_t>(i)] = static_cast<int>(c);
    const bool seen = std::find(tried.begin(), tried.end(), labels) != tried.end();
    if (!seen) {
      tried.push_back(labels);
      Attempt at = try_clustering(A, H, clusters, rank_tol);
      if (at.consistent) {
        if (!chosen) {
          chosen_shape = shape_string(at.blocks);
          chosen = std::move(at);
        } else {
          const std::string other = shape_string(at.blocks);
          if (other != chosen_shape)
            out.warnings.push_back("eigenvalue clustering ambiguity: " + chosen_shape + " vs " + other);
          break;
        }
      } else if (chosen) {
        break;
      }
    }
    if (delta >= delta_max || clusters.size() == 1) break;
  }
  if (!chosen) throw Error(ErrorCode::Internal, "decompose: no eigenvalue clustering gives a consistent Jordan structure");
  if (chosen->borderline) out.warnings.push_back("borderline rank decision in Jordan structure");

  auto& blocks = chosen->blocks;
  std::stable_sort(blocks.begin(), blocks.end(),
                   [](const auto& a, const auto& b) { return block_less(a.first, b.first); });
  out.transform = MatrixXd(n, n);
  Eigen::Index col = 0;
  for (const auto& [spec, cols] : blocks) {
    out.blocks.push_back(spec);
    out.transform.middleCols(col, cols.cols()) = cols;
    col += cols.cols();
  }
  const model::GaussModel m = model::assemble(out.blocks, true);
  out.J = m.S;
  out.P = m.H;
  // Newton polish of the form: with D = T^T H T - P, X = -P D / 2 commutes with J
  // (both P and T^T H T are J-selfadjoint, P^2 = I), so T (I + X) keeps the
  // Jordan structure and squares the form error.
  for (int it = 0; it < 3; ++it) {
    const MatrixXd D = out.transform.transpose() * H * out.transform - out.P;
    if (norm_inf(D) == 0.0) break;
    out.transform = out.transform * (MatrixXd::Identity(n, n) - 0.5 * out.P * D);
  }
  out.residual_transform = norm_inf(out.transform.partialPivLu().solve(A * out.transform) - out.J);
  out.residual_form = norm_inf(out.transform.transpose() * H * out.transform - out.P);
  return out;
}

ShapeSummary classify(const CanonicalPair& cp, double zero_tol) {
  ShapeSummary s;
  const double cut = zero_tol * std::max(1.0, cp.scale);
  int size2 = 0, other = 0, nilpotent2 = 0;
  bool all_zero_eig = true;
  for (const auto& b : cp.blocks) {
    const int d = model::block_dim(b);
    const bool cx = model::is_complex(b);
    auto it = std::find_if(s.counts.begin(), s.counts.end(),
                           [&](const ShapeCount& c) { return c.complex == cx && c.size == d; });
    if (it == s.counts.end()) s.counts.push_back({cx, d, 1});
    else ++it->count;
    if (cx) {
      s.has_complex = true;
      s.rank += d;
      all_zero_eig = false;
      ++other;
      continue;
    }
    const auto& r = std::get<RealBlock>(b);
    const bool zero = std::abs(r.lambda) <= cut;
    all_zero_eig = all_zero_eig && zero;
    s.max_real_size = std::max(s.max_real_size, d);
    s.rank += zero ? d - 1 : d;
    if (d == 2) {
      ++size2;
      if (zero) ++nilpotent2;
    } else if (d > 2) {
      ++other;
    }
  }
  std::sort(s.counts.begin(), s.counts.end(), [](const ShapeCount& a, const ShapeCount& b) {
    if (a.complex != b.complex) return !a.complex;
    return a.size > b.size;
  });
  s.s_zero = all_zero_eig && s.max_real_size <= 1 && !s.has_complex;
  s.raw_admissible = !s.has_complex && other == 0 && size2 <= 1;
  s.final_form = s.s_zero || (s.raw_admissible && all_zero_eig && size2 == 1 && nilpotent2 == 1);
  return s;
}

RoundTripCase make_round_trip_case(std::uint64_t seed, const RoundTripOptions& opts) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dim_dist(opts.min_dim, opts.max_dim);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> grid_pt(-4, 4);
  std::uniform_int_distribution<int> beta_pt(1, 4);
  RoundTripCase rc;
  const int n = dim_dist(rng);

  // Eigenvalues live on a grid so that distinct ones are >= grid apart; reuse of
  // an earlier eigenvalue produces derogatory clusters.
  std::vector<double> reals;
  std::vector<std::pair<double, double>> complexes;
  int left = n;
  while (left > 0) {
    const bool cx = left >= 2 && unit(rng) < 0.35;
    if (cx) {
      const int k = 1 + static_cast<int>(unit(rng) * std::min(2, left / 2));
      std::pair<double, double> ab;
      if (!complexes.empty() && unit(rng) < 0.3) {
        ab = complexes[static_cast<std::size_t>(unit(rng) * static_cast<double>(complexes.size()))];
      } else {
        do {
          ab = {opts.grid * grid_pt(rng), opts.grid * beta_pt(rng)};
        } while (std::find(complexes.begin(), complexes.end(), ab) != complexes.end());
        complexes.push_back(ab);
      }
      rc.blocks.push_back(ComplexBlock{k, ab.first, ab.second});
      left -= 2 * k;
    } else {
      const int k = 1 + static_cast<int>(unit(rng) * std::min(4, left));
      double lam;
      if (!reals.empty() && unit(rng) < 0.3) {
        lam = reals[static_cast<std::size_t>(unit(rng) * static_cast<double>(reals.size()))];
      } else {
        do {
          lam = opts.grid * grid_pt(rng);
        } while (std::find(reals.begin(), reals.end(), lam) != reals.end());
        reals.push_back(lam);
      }
      rc.blocks.push_back(RealBlock{k, lam, unit(rng) < 0.5 ? -1 : 1});
      left -= k;
    }
  }
  const model::GaussModel m = model::assemble(rc.blocks, true);

  // Q = U diag(sigma) V^T with log-uniform singular values in [1, max_cond].
  std::normal_distribution<double> gauss;
  auto random_orthogonal = [&] {
    MatrixXd G(n, n);
    for (Eigen::Index i = 0; i < G.size(); ++i) G.data()[i] = gauss(rng);
    return MatrixXd(Eigen::HouseholderQR<MatrixXd>(G).householderQ());
  };
  const MatrixXd U = random_orthogonal(), V = random_orthogonal();
  Eigen::VectorXd sigma(n);
  for (int i = 0; i < n; ++i) sigma(i) = std::exp(unit(rng) * std::log(opts.max_cond));
  sigma(0) = 1.0;
  if (n > 1) sigma(1) = opts.max_cond;
  const MatrixXd Q = U * sigma.asDiagonal() * V.transpose();
  const MatrixXd Qinv = V * sigma.cwiseInverse().asDiagonal() * U.transpose();
  rc.A = Q * m.S * Qinv;
  rc.H = Qinv.transpose() * m.H * Qinv;
  rc.H = 0.5 * (rc.H + rc.H.transpose());
  rc.conjugator_cond = sigma.maxCoeff() / sigma.minCoeff();

  std::vector<cplx> ev;
  for (double r : reals) ev.emplace_back(r, 0.0);
  for (auto [a, b] : complexes) {
    ev.emplace_back(a, b);
    ev.emplace_back(a, -b);
  }
  rc.min_separation = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ev.size(); ++i)
    for (std::size_t j = i + 1; j < ev.size(); ++j)
      rc.min_separation = std::min(rc.min_separation, std::abs(ev[i] - ev[j]));
  return rc;
}

}  // namespace affsym::canonical_pair
