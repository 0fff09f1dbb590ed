#include "wdistlab/distributions.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "wdistlab/mlp.hpp"
#include "wdistlab/numfmt.hpp"

namespace wdistlab {

namespace {

constexpr double kNormalizationTol = 1e-12;

}  // namespace

EmpiricalMeasure::EmpiricalMeasure(Matrix points, Vector weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
  if (points_.rows() == 0) throw std::invalid_argument("empirical measure: no points");
  if (points_.cols() == 0) throw std::invalid_argument("empirical measure: dimension must be >= 1");
  if (weights_.size() != points_.rows()) {
    throw std::invalid_argument("empirical measure: weight count differs from point count");
  }
  if (!points_.allFinite()) throw std::invalid_argument("empirical measure: non-finite coordinate");
  if (!weights_.allFinite() || (weights_.array() < 0.0).any()) {
    throw std::invalid_argument("empirical measure: weights must be finite and nonnegative");
  }
  if (std::abs(weights_.sum() - 1.0) > kNormalizationTol) {
    throw std::invalid_argument("empirical measure: weights do not sum to 1");
  }
}

EmpiricalMeasure EmpiricalMeasure::uniform(Matrix points) {
  const auto n = points.rows();
  if (n == 0) throw std::invalid_argument("empirical measure: no points");
  return {std::move(points), Vector::Constant(n, 1.0 / static_cast<double>(n))};
}

bool EmpiricalMeasure::has_uniform_weights() const {
  const double w0 = 1.0 / static_cast<double>(size());
  return ((weights_.array() - w0).abs() <= 1e-15).all();
}

DiscreteDistribution::DiscreteDistribution(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw std::invalid_argument("discrete distribution: empty support");
  double total = 0.0;
  for (const double p : probs_) {
    if (!std::isfinite(p) || p < 0.0) {
      throw std::invalid_argument("discrete distribution: probabilities must be finite and nonnegative");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > kNormalizationTol) {
    throw std::invalid_argument("discrete distribution: probabilities do not sum to 1");
  }
}

void RingMixtureSpec::validate() const {
  if (n_modes == 0) throw std::invalid_argument("ring mixture: n_modes must be positive");
  if (!(radius > 0.0) || !(sigma > 0.0)) throw std::invalid_argument("ring mixture: radius and sigma must be positive");
  if (!(sigma < radius)) throw std::invalid_argument("ring mixture: sigma must be smaller than radius");
}

Eigen::Vector2d RingMixtureSpec::center(std::size_t k) const {
  const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n_modes);
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

Matrix sample_prior_points(const LatentPrior& prior, std::size_t n, Rng& rng) {
  if (n == 0) throw std::invalid_argument("sample_prior: n must be >= 1");
  if (prior.dim == 0) throw std::invalid_argument("sample_prior: dim must be >= 1");
  Matrix z(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(prior.dim));
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    for (Eigen::Index j = 0; j < z.cols(); ++j) {
      z(i, j) = prior.kind == PriorKind::kUniformUnitCube ? rng.uniform() : rng.normal();
    }
  }
  return z;
}

EmpiricalMeasure sample_prior(const LatentPrior& prior, std::size_t n, Rng& rng) {
  return EmpiricalMeasure::uniform(sample_prior_points(prior, n, rng));
}

EmpiricalMeasure pushforward(const MlpNetwork& gen, const EmpiricalMeasure& z) {
  if (gen.input_dim() != z.dim()) {
    throw std::invalid_argument("pushforward: generator expects dimension " +
                                std::to_string(gen.input_dim()) + ", got " + std::to_string(z.dim()));
  }
  return {evaluate(gen, z.points()), z.weights()};
}

LineDistribution make_parallel_line(double theta, std::size_t n_atoms) {
  if (n_atoms < 2) throw std::invalid_argument("make_parallel_line: need at least 2 atoms");
  if (!std::isfinite(theta)) throw std::invalid_argument("make_parallel_line: theta must be finite");
  const auto n = static_cast<Eigen::Index>(n_atoms);
  Matrix pts(n, 2);
  for (Eigen::Index k = 0; k < n; ++k) {
    pts(k, 0) = theta;
    pts(k, 1) = static_cast<double>(k) / static_cast<double>(n - 1);
  }
  std::vector<double> probs(n_atoms, 1.0 / static_cast<double>(n_atoms));
  return {DiscreteDistribution(std::move(probs)), EmpiricalMeasure::uniform(std::move(pts))};
}

Matrix sample_ring_mixture_points(const RingMixtureSpec& spec, std::size_t n, Rng& rng) {
  spec.validate();
  if (n < spec.n_modes) throw std::invalid_argument("make_ring_mixture: n must be >= n_modes");
  Matrix pts(static_cast<Eigen::Index>(n), 2);
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    const auto mode = static_cast<std::size_t>(rng.below(spec.n_modes));
    const Eigen::Vector2d c = spec.center(mode);
    pts(i, 0) = rng.normal(c.x(), spec.sigma);
    pts(i, 1) = rng.normal(c.y(), spec.sigma);
  }
  return pts;
}

EmpiricalMeasure make_ring_mixture(const RingMixtureSpec& spec, std::size_t n, Rng& rng) {
  return EmpiricalMeasure::uniform(sample_ring_mixture_points(spec, n, rng));
}

void write_measure_csv(const EmpiricalMeasure& m, std::ostream& out) {
  out << 'w';
  for (std::size_t j = 0; j < m.dim(); ++j) out << ",x" << j;
  out << '\n';
  for (Eigen::Index i = 0; i < m.points().rows(); ++i) {
    out << format_double(m.weights()(i));
    for (Eigen::Index j = 0; j < m.points().cols(); ++j) out << ',' << format_double(m.points()(i, j));
    out << '\n';
  }
}

void write_measure_csv(const EmpiricalMeasure& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_measure_csv(m, out);
  if (!out) throw std::runtime_error("write failed: " + path);
}

EmpiricalMeasure read_measure_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("measure csv: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv_line(line);
  if (header.size() < 2 || header[0] != "w") throw std::invalid_argument("measure csv: header must start with w,x0");
  for (std::size_t j = 1; j < header.size(); ++j) {
    if (header[j] != "x" + std::to_string(j - 1)) throw std::invalid_argument("measure csv: bad column " + header[j]);
  }
  const std::size_t d = header.size() - 1;
  std::vector<double> w;
  std::vector<double> coords;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != d + 1) {
      throw std::invalid_argument("measure csv: line " + std::to_string(line_no) + " has wrong column count");
    }
    w.push_back(parse_double(cells[0]));
    for (std::size_t j = 1; j <= d; ++j) coords.push_back(parse_double(cells[j]));
  }
  const auto n = static_cast<Eigen::Index>(w.size());
  Matrix pts(n, static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < pts.cols(); ++j) pts(i, j) = coords[static_cast<std::size_t>(i) * d + static_cast<std::size_t>(j)];
  }
  return {std::move(pts), Eigen::Map<Vector>(w.data(), n)};
}

EmpiricalMeasure read_measure_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_measure_csv(in);
}

}  // namespace wdistlab
