#include "affsym/model.hpp"

#include <cmath>
#include <sstream>

#include "affsym/canonical_pair.hpp"
#include "affsym/error.hpp"

namespace affsym::model {

int block_dim(const BlockSpec& b) {
  if (const auto* r = std::get_if<RealBlock>(&b)) return r->size;
  return 2 * std::get<ComplexBlock>(b).half_size;
}

bool is_complex(const BlockSpec& b) { return std::holds_alternative<ComplexBlock>(b); }

std::string describe(const BlockSpec& b) {
  std::ostringstream os;
  os.precision(17);
  if (const auto* r = std::get_if<RealBlock>(&b)) {
    os << "Real{" << r->size << "," << r->lambda << "," << (r->sign > 0 ? "+1" : "-1") << "}";
  } else {
    const auto& c = std::get<ComplexBlock>(b);
    os << "Complex{" << c.half_size << "," << c.alpha << "," << c.beta << "}";
  }
  return os.str();
}

BlockPair build_block(const BlockSpec& spec) {
  BlockPair out;
  if (const auto* r = std::get_if<RealBlock>(&spec)) {
    if (r->size < 1) throw Error(ErrorCode::InvalidArgument, "real block size must be >= 1");
    if (r->sign != 1 && r->sign != -1) throw Error(ErrorCode::InvalidArgument, "real block sign must be +1 or -1");
    const int k = r->size;
    out.S = r->lambda * MatrixXd::Identity(k, k);
    for (int j = 0; j + 1 < k; ++j) out.S(j + 1, j) = 1.0;
    out.H = static_cast<double>(r->sign) * canonical_pair::sip(k);
    return out;
  }
  const auto& c = std::get<ComplexBlock>(spec);
  if (c.half_size < 1) throw Error(ErrorCode::InvalidArgument, "complex block half-size must be >= 1");
  if (c.beta == 0.0) throw Error(ErrorCode::InvalidArgument, "complex block requires beta != 0");
  const int k = c.half_size;
  out.S = MatrixXd::Zero(2 * k, 2 * k);
  for (int j = 0; j < k; ++j) {
    out.S(2 * j, 2 * j) = c.alpha;
    out.S(2 * j, 2 * j + 1) = c.beta;
    out.S(2 * j + 1, 2 * j) = -c.beta;
    out.S(2 * j + 1, 2 * j + 1) = c.alpha;
    if (j + 1 < k) {
      out.S(2 * j + 2, 2 * j) = 1.0;
      out.S(2 * j + 3, 2 * j + 1) = 1.0;
    }
  }
  out.H = canonical_pair::sip(2 * k);
  return out;
}

GaussModel assemble(std::span<const BlockSpec> blocks, bool allow_any_dim) {
  GaussModel m;
  for (const auto& b : blocks) m.dim += block_dim(b);
  if (!allow_any_dim && (m.dim % 2 != 0 || m.dim < 4))
    throw Error(ErrorCode::InvalidArgument,
                "model dimension must be even and >= 4, got " + std::to_string(m.dim));
  if (m.dim == 0) throw Error(ErrorCode::InvalidArgument, "empty block list");
  m.S = MatrixXd::Zero(m.dim, m.dim);
  m.H = MatrixXd::Zero(m.dim, m.dim);
  int o = 0;
  for (const auto& b : blocks) {
    const BlockPair p = build_block(b);
    const int k = static_cast<int>(p.S.rows());
    m.S.block(o, o, k, k) = p.S;
    m.H.block(o, o, k, k) = p.H;
    m.offsets.push_back(o);
    m.blocks.push_back(b);
    o += k;
  }
  for (int i = 1; i <= m.dim; ++i) m.labels.push_back("e" + std::to_string(i));
  // Block-diagonal with permutation-like blocks: exact checks are valid here.
  if ((m.S.transpose() * m.H - m.H * m.S).cwiseAbs().maxCoeff() > 1e-12)
    throw Error(ErrorCode::Internal, "assembled S is not h-selfadjoint");
  if (std::abs(m.H.determinant()) <= 1e-12) throw Error(ErrorCode::Internal, "assembled h is degenerate");
  return m;
}

std::vector<BlockSpec> complex_first(std::span<const BlockSpec> blocks) {
  std::vector<BlockSpec> out;
  for (const auto& b : blocks)
    if (is_complex(b)) out.push_back(b);
  for (const auto& b : blocks)
    if (!is_complex(b)) out.push_back(b);
  return out;
}

VectorXd model_curvature(const GaussModel& m, const VectorXd& X, const VectorXd& Y, const VectorXd& Z) {
  const VectorXd HZ = m.H * Z;
  return Y.dot(HZ) * (m.S * X) - X.dot(HZ) * (m.S * Y);
}

MatrixXd default_omega(int dim) {
  MatrixXd w = MatrixXd::Zero(dim, dim);
  for (int i = 0; i + 1 < dim; ++i) {
    w(i, i + 1) = 1.0;
    w(i + 1, i) = -1.0;
  }
  return w;
}

VectorXd basis(int dim, int i) {
  if (i < 1 || i > dim) throw Error(ErrorCode::InvalidArgument, "basis index out of range");
  VectorXd v = VectorXd::Zero(dim);
  v(i - 1) = 1.0;
  return v;
}

}  // namespace affsym::model
