#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "wdistlab/autodiff.hpp"
#include "wdistlab/rng.hpp"

namespace wdistlab {

struct MlpNetwork;

/// Weighted point cloud in R^d. Points are stored one per row.
class EmpiricalMeasure {
 public:
  /// Throws std::invalid_argument unless weights are nonnegative, sum to 1
  /// within 1e-12, and all coordinates are finite.
  EmpiricalMeasure(Matrix points, Vector weights);

  /// Equal weights 1/n.
  static EmpiricalMeasure uniform(Matrix points);

  const Matrix& points() const noexcept { return points_; }
  const Vector& weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(points_.rows()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(points_.cols()); }
  bool has_uniform_weights() const;

 private:
  Matrix points_;
  Vector weights_;
};

/// Probability vector over an indexed finite support.
class DiscreteDistribution {
 public:
  explicit DiscreteDistribution(std::vector<double> probs);

  const std::vector<double>& probs() const noexcept { return probs_; }
  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }

 private:
  std::vector<double> probs_;
};

enum class PriorKind { kUniformUnitCube, kStandardNormal };

struct LatentPrior {
  PriorKind kind = PriorKind::kUniformUnitCube;
  std::size_t dim = 1;
};

struct RingMixtureSpec {
  std::size_t n_modes = 8;
  double radius = 2.0;
  double sigma = 0.05;

  void validate() const;
  /// Center of mode k, k = 0..n_modes-1, starting at (radius, 0).
  Eigen::Vector2d center(std::size_t k) const;
};

/// Raw n x dim draw from the prior.
Matrix sample_prior_points(const LatentPrior& prior, std::size_t n, Rng& rng);
EmpiricalMeasure sample_prior(const LatentPrior& prior, std::size_t n, Rng& rng);

/// Point i of the result is gen(point i of z); weights are kept.
EmpiricalMeasure pushforward(const MlpNetwork& gen, const EmpiricalMeasure& z);

/// Uniform law on the segment {theta} x [0, 1], discretized into equally
/// spaced atoms (theta, k / (n_atoms - 1)).
struct LineDistribution {
  DiscreteDistribution probs;
  EmpiricalMeasure measure;
};
LineDistribution make_parallel_line(double theta, std::size_t n_atoms);

Matrix sample_ring_mixture_points(const RingMixtureSpec& spec, std::size_t n, Rng& rng);
EmpiricalMeasure make_ring_mixture(const RingMixtureSpec& spec, std::size_t n, Rng& rng);

/// CSV with header `w,x0,...,x{d-1}` and 17 significant digits.
void write_measure_csv(const EmpiricalMeasure& m, std::ostream& out);
void write_measure_csv(const EmpiricalMeasure& m, const std::string& path);
EmpiricalMeasure read_measure_csv(std::istream& in);
EmpiricalMeasure read_measure_csv(const std::string& path);

}  // namespace wdistlab
