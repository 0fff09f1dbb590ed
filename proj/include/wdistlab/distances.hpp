#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "wdistlab/distributions.hpp"

namespace wdistlab {

struct MlpNetwork;

/// Largest combined support (n + m) accepted by w1_exact.
inline constexpr std::size_t kMaxTransportSupport = 4096;

/// Coupling between a source measure (rows) and a target measure (columns).
struct TransportPlan {
  Matrix coupling;
  double cost = 0.0;
};

enum class KernelKind { kGaussian };

struct KernelSpec {
  KernelKind kind = KernelKind::kGaussian;
  double bandwidth = 1.0;
};

/// sup_A |p(A) - q(A)|, computed as half the L1 difference.
double tv_discrete(const DiscreteDistribution& p, const DiscreteDistribution& q);

/// sum p_i log(p_i / q_i); +infinity when some q_i = 0 < p_i.
double kl_discrete(const DiscreteDistribution& p, const DiscreteDistribution& q);

/// (KL(p || m) + KL(q || m)) / 2 with m = (p + q) / 2. Bounded by log 2.
double js_discrete(const DiscreteDistribution& p, const DiscreteDistribution& q);

/// 1-D Wasserstein-1 between equal-size uniformly weighted samples:
/// mean absolute difference of the sorted values.
double w1_1d(const EmpiricalMeasure& p, const EmpiricalMeasure& q);

/// Exact Wasserstein-1 with Euclidean ground cost. Equal-size uniform
/// measures are solved as an assignment problem; anything else through the
/// transportation simplex.
TransportPlan w1_exact(const EmpiricalMeasure& p, const EmpiricalMeasure& q);

/// Pairwise Euclidean distances, rows of x against rows of y.
Matrix euclidean_cost(const Matrix& x, const Matrix& y);

/// Minimum-cost perfect matching on a square cost matrix (shortest
/// augmenting path with potentials). Returns column assigned to each row.
std::vector<std::size_t> solve_assignment(const Matrix& cost);

/// Minimum-cost coupling with row marginals `supply` and column marginals
/// `demand` (equal totals). Dense transportation simplex started from the
/// north-west corner rule, Dantzig pricing.
Matrix solve_transportation(const Vector& supply, const Vector& demand, const Matrix& cost);

/// Weighted mean of f over p minus weighted mean of f over q. f must have a
/// single output.
double ipm_estimate(const MlpNetwork& f, const EmpiricalMeasure& p, const EmpiricalMeasure& q);

/// Biased (V-statistic) squared MMD with k(x, y) = exp(-|x - y|^2 / (2 h^2)).
double mmd_squared(const EmpiricalMeasure& p, const EmpiricalMeasure& q, const KernelSpec& k);

struct ParallelLinesDistances {
  double w1 = 0.0;
  double js = 0.0;
  double kl = 0.0;
  double tv = 0.0;
};

/// Distances between the uniform law on {0} x [0,1] and on {theta} x [0,1].
ParallelLinesDistances parallel_lines_closed_form(double theta);

/// Expresses two empirical measures as probability vectors over the union of
/// their (exactly equal) support points, so the discrete divergences apply.
std::pair<DiscreteDistribution, DiscreteDistribution> align_on_union_support(
    const EmpiricalMeasure& p, const EmpiricalMeasure& q);

}  // namespace wdistlab
