#pragma once

// Pointwise algebraic (S, h) pairs built from Jordan/sip blocks, with
// curvature given by the Gauss equation R(X,Y)Z = h(Y,Z)SX - h(X,Z)SY.

#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace affsym::model {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// size x size block: lambda on the diagonal, ones on the subdiagonal, H = sign * sip.
struct RealBlock {
  int size = 1;
  double lambda = 0.0;
  int sign = 1;
};

/// 2k x 2k block: cells [[alpha, beta], [-beta, alpha]] on the diagonal,
/// 2x2 identities on the block subdiagonal, H = sip(2k).
struct ComplexBlock {
  int half_size = 1;
  double alpha = 0.0;
  double beta = 1.0;
};

using BlockSpec = std::variant<RealBlock, ComplexBlock>;

int block_dim(const BlockSpec& b);
bool is_complex(const BlockSpec& b);
std::string describe(const BlockSpec& b);

struct BlockPair {
  MatrixXd S;
  MatrixXd H;
};

/// Throws InvalidArgument on size < 1, sign not +-1, or beta == 0.
BlockPair build_block(const BlockSpec& spec);

struct GaussModel {
  int dim = 0;
  MatrixXd S;
  MatrixXd H;
  std::vector<BlockSpec> blocks;
  std::vector<int> offsets;  // first basis index of each block
  std::vector<std::string> labels;
};

/// Direct sum in the given order. Requires even total dimension >= 4 unless
/// allow_any_dim is set (used for standalone block tests).
GaussModel assemble(std::span<const BlockSpec> blocks, bool allow_any_dim = false);

/// Stable reorder putting complex blocks first (the convention for complex-block lemmas).
std::vector<BlockSpec> complex_first(std::span<const BlockSpec> blocks);

VectorXd model_curvature(const GaussModel& m, const VectorXd& X, const VectorXd& Y, const VectorXd& Z);

/// Antisymmetric tridiagonal matrix with superdiagonal 1 (Pfaffian 1 for even dim).
MatrixXd default_omega(int dim);

/// Unit basis vector e_i, 1-indexed.
VectorXd basis(int dim, int i);

}  // namespace affsym::model
