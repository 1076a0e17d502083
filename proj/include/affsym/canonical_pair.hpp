#pragma once

// Canonical form of an H-selfadjoint matrix A (A^T H = H A): a real basis T with
// T^-1 A T = J (direct sum of real and complex Jordan blocks) and
// T^T H T = P (direct sum of +-sip for real blocks, sip for complex blocks).

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "affsym/model.hpp"

namespace affsym::canonical_pair {

using Eigen::MatrixXd;

/// Standard involutory permutation: ones on the anti-diagonal.
MatrixXd sip(int n);

struct Signature {
  int pos = 0;
  int neg = 0;
  friend bool operator==(const Signature&, const Signature&) = default;
};

Signature sip_signature(int n);

/// Inertia of a symmetric matrix; eigenvalues with |mu| <= tol * max|mu| count as neither.
Signature inertia(const MatrixXd& sym, double tol = 1e-10);

struct DecomposeOptions {
  double tol = 1e-8;          // selfadjointness tolerance (relative)
  double rank_tol = 1e-10;    // staircase null-space threshold, relative to max(1, ||A||)
  double cluster_rel = 1e-6;  // initial eigenvalue clustering threshold, relative to ||A||
};

struct CanonicalPair {
  std::vector<model::BlockSpec> blocks;
  MatrixXd transform;  // T
  MatrixXd J;
  MatrixXd P;
  double residual_transform = 0.0;  // ||T^-1 A T - J||_inf
  double residual_form = 0.0;       // ||T^T H T - P||_inf
  double scale = 0.0;               // ||A||_inf
  std::vector<std::string> warnings;
};

/// Throws NotSelfAdjoint, SingularForm, or Internal (no consistent clustering).
CanonicalPair decompose(const MatrixXd& A, const MatrixXd& H, const DecomposeOptions& opts = {});

struct ShapeCount {
  bool complex = false;
  int size = 0;  // block dimension (2k for complex blocks)
  int count = 0;
};

struct ShapeSummary {
  std::vector<ShapeCount> counts;  // sorted: real before complex, size descending
  int max_real_size = 0;
  bool has_complex = false;
  bool s_zero = false;
  int rank = 0;
  /// No complex blocks, at most one real block of size 2, every other block of size 1.
  bool raw_admissible = false;
  /// S = 0, or exactly one nilpotent size-2 block plus zero 1x1 blocks.
  bool final_form = false;
};

ShapeSummary classify(const CanonicalPair& cp, double zero_tol = 1e-7);

/// Number of singular values above tol * sigma_max (0 for the zero matrix).
int rank(const MatrixXd& S, double tol = 1e-9);

/// A random H-selfadjoint pair with known canonical blocks: A = Q J Q^-1, H = Q^-T P Q^-1.
struct RoundTripCase {
  std::vector<model::BlockSpec> blocks;
  MatrixXd A;
  MatrixXd H;
  double conjugator_cond = 1.0;
  double min_separation = 0.0;
};

struct RoundTripOptions {
  int min_dim = 4;
  int max_dim = 10;
  double max_cond = 999.0;
  double grid = 0.5;  // eigenvalue grid spacing; distinct eigenvalues differ by >= grid
};

RoundTripCase make_round_trip_case(std::uint64_t seed, const RoundTripOptions& opts = {});

/// Matrix infinity norm (max absolute row sum).
double norm_inf(const MatrixXd& M);

}  // namespace affsym::canonical_pair
