#pragma once

// Lemma oracles (closed form vs. brute-force R^p.omega on a Gauss model),
// theorem witnesses for inadmissible shapes, and the rank-theorem check.

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "affsym/geometry.hpp"
#include "affsym/model.hpp"

namespace affsym::verify {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct OracleInfo {
  std::string id;
  std::string description;
  int p_min = 1;
  int p_max = 4;     // largest p the suite draws
  int variants = 1;  // number of distinct formulas in the family
};

/// One lemma instance. Indices in `params` (i, j, s, i0, k, ...) are 1-based as
/// in the lemma statements; signs are +-1. The lemma's own block is built from
/// `params` and placed first; `tail` follows. `omega` empty = default form.
struct OracleSpec {
  std::string id;
  int variant = 0;
  int p = 1;
  std::map<std::string, double> params;
  std::vector<model::BlockSpec> tail;
  MatrixXd omega;
  std::vector<VectorXd> vectors;  // explicit arguments where the lemma quantifies over vectors
};

struct OracleResult {
  std::string id;
  int variant = 0;
  int p = 0;
  int dim = 0;
  double brute = 0.0;
  double closed = 0.0;
  double abs_err = 0.0;
  bool pass = false;  // abs_err <= kOracleRelTol * max(1, |closed|)
  std::string tuple;  // argument tuple as labels
  std::map<std::string, double> params;
};

inline constexpr double kOracleRelTol = 1e-9;

const std::vector<OracleInfo>& list_oracles();
const OracleInfo& oracle_info(const std::string& id);  // InvalidArgument if unknown

/// Throws Error(Hypothesis) naming the violated condition, OrderExceeded above the
/// power cap, InvalidArgument for an unknown id.
OracleResult run_oracle(const OracleSpec& spec);

/// A random instance inside the hypothesis region.
OracleSpec draw_oracle(const std::string& id, int p, std::mt19937_64& rng);

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a(std::string_view s);
std::uint64_t family_seed(std::uint64_t master, const std::string& id);

struct PowerStats {
  int p = 0;
  int draws = 0;
  int failures = 0;
  double max_abs_err = 0.0;
  double max_scaled_err = 0.0;
};

struct FamilyReport {
  std::string id;
  int draws = 0;
  int failures = 0;
  int p_lo = 0;
  int p_hi = 0;
  double max_abs_err = 0.0;
  double max_scaled_err = 0.0;  // abs_err / max(1, |closed|)
  std::vector<OracleResult> failed;  // first few failures
  std::vector<PowerStats> by_p;
};

/// `draws` instances, p cycling through [p_min, min(p_max, info.p_max)];
/// draw d is seeded from (family seed, d), independent of scheduling.
FamilyReport run_family(const std::string& id, int draws, int p_max, std::uint64_t master_seed);

/// All families concurrently; results in catalog order.
std::vector<FamilyReport> run_catalog(std::span<const std::string> ids, int draws, int p_max,
                                      std::uint64_t master_seed);

/// Random antisymmetric matrix, entries in [-1,1] with the listed (1-based) entries
/// zeroed, retried until det > 1e-6.
MatrixXd random_omega(int dim, std::mt19937_64& rng, std::span<const std::pair<int, int>> zeros = {});

// ---- theorem witnesses ----

struct WitnessHit {
  int p = 0;
  int trial = 0;
  bool found = false;
  bool from_lemma = false;  // found among lemma-named tuples
  std::vector<int> tuple;   // 1-based basis indices
  double value = 0.0;
  int evaluated = 0;
};

struct WitnessReport {
  std::string shape;
  int dim = 0;
  std::vector<WitnessHit> hits;  // one per (trial, p)
  int missing = 0;               // (trial, p) with no witness: a finding
};

inline constexpr int kWitnessRandomTuples = 10000;
inline constexpr double kWitnessThreshold = 1e-9;

WitnessReport theorem_witness(std::span<const model::BlockSpec> shape, int p_max, int trials, std::uint64_t seed);

/// The regression set of inadmissible shapes (name, blocks).
std::vector<std::pair<std::string, std::vector<model::BlockSpec>>> inadmissible_shapes();

// ---- rank theorem ----

enum class Verdict { Pass, Fail, Vacuous };
const char* verdict_name(Verdict v);

struct RankCheck {
  Verdict verdict = Verdict::Vacuous;
  int p = 0;
  double r_max = 0.0;                // max |R^p omega| over basis tuples
  std::optional<double> nabla_max;   // max |nabla^p omega| (geometric, p <= 3)
  int rank_s = 0;
  bool admissible = false;
  std::string shape;  // block summary from the canonical pair
  std::string note;
};

/// Throws Error(Hypothesis) if omega is degenerate (|det| <= 1e-12).
RankCheck check_rank_theorem(const model::GaussModel& m, const MatrixXd& omega, int p, double tol);
RankCheck check_rank_theorem(const geometry::Scenario& s, std::span<const double> x, int p, double tol);

}  // namespace affsym::verify
