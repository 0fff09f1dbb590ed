#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wdistlab/adversarial.hpp"
#include "wdistlab/report.hpp"

namespace wdistlab {

struct Figure {
  std::string name;  // file stem of the SVG
  ChartLabels labels;
  std::vector<Series> series;
};

struct NamedTable {
  std::string name;
  Table table;
};

/// Output of one experiment driver. `tables.front()` is written as
/// curves.csv, any further tables as <name>.csv.
struct ExperimentReport {
  std::string name;
  nlohmann::json parameters = nlohmann::json::object();
  nlohmann::json config = nlohmann::json::object();
  std::vector<std::uint64_t> seeds;
  std::vector<NamedTable> tables;
  std::vector<Figure> figures;
  nlohmann::json summary = nlohmann::json::object();
  std::vector<std::string> artifacts;
  /// False when a run diverged or an invariant checked during the run broke.
  bool ok = true;

  const Table& table(const std::string& name) const;
};

/// Maximum worker threads: WDISTLAB_THREADS if set and positive, otherwise
/// the hardware concurrency.
std::size_t worker_count();

/// Calls fn(i) for i in [0, n) on up to worker_count() threads. Results are
/// indexed by i, so the output never depends on scheduling. The first
/// exception thrown by any task is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

/// Centered sliding median with reflect padding (x[-1] = x[0], x[-2] = x[1], ...).
std::vector<double> median_filter(const std::vector<double>& series, std::size_t window);
/// ceil(5% of n) rounded up to odd, at least 1.
std::size_t default_median_window(std::size_t n);

/// Spearman rank correlation using average ranks for ties.
double spearman(const std::vector<double>& a, const std::vector<double>& b);

/// Modes with at least `min_fraction` of the samples within 3 sigma of their center.
std::size_t count_covered_modes(const Matrix& samples, const RingMixtureSpec& spec,
                                double min_fraction = 0.02);
/// Per-mode sample counts within 3 sigma.
std::vector<std::size_t> mode_counts(const Matrix& samples, const RingMixtureSpec& spec);

/// Generator {z} -> (theta, z) for the parallel-lines family, and the mask that
/// lets only theta train.
MlpNetwork line_generator(double theta);
ParamSet line_generator_mask();
double line_generator_theta(const MlpNetwork& gen);

// Distances between the two parallel lines, numeric against closed form,
// plus WGAN runs that learn theta starting from theta0.
struct ParallelLinesSettings {
  std::vector<double> theta_grid;
  std::size_t n_atoms = 512;
  std::vector<std::uint64_t> seeds;  // empty: skip training
  double theta0 = 1.0;
  double target_tolerance = 0.05;
  TrainingConfig training;
  std::vector<std::size_t> critic_hidden{64, 64};

  static ParallelLinesSettings defaults();
};
ExperimentReport exp_parallel_lines(const ParallelLinesSettings& s);
ExperimentReport exp_parallel_lines(const std::vector<double>& theta_grid, std::size_t n_atoms);

// GAN discriminator and WGAN critic trained on two frozen 1-D Gaussians.
struct TwoGaussiansSettings {
  double real_mean = 2.0;
  double fake_mean = -2.0;
  double sigma = 0.5;
  std::size_t n_samples = 2048;
  std::size_t train_iters = 2000;
  std::vector<double> grid;
  std::vector<std::uint64_t> seeds{0, 1, 2};
  std::size_t batch_size = 64;
  double disc_learning_rate = 1e-3;
  double critic_learning_rate = 1e-3;
  double clip = 0.01;
  std::vector<std::size_t> hidden{64, 64};
  double vanish_threshold = 1e-3;
  double slope_fraction = 0.1;

  static TwoGaussiansSettings defaults();
};
ExperimentReport exp_two_gaussians(const TwoGaussiansSettings& s);
ExperimentReport exp_two_gaussians(std::size_t train_iters, const std::vector<double>& grid);

enum class CorrelationTarget { kLines, kRing };

// Trainer loss estimates against the exact-W1 quality proxy at checkpoints.
struct LossCorrelationSettings {
  CorrelationTarget target = CorrelationTarget::kLines;
  RingMixtureSpec ring;
  std::size_t checkpoints = 40;
  std::vector<std::uint64_t> seeds{0, 1, 2};
  TrainingConfig wgan;
  TrainingConfig gan;
  std::size_t quality_samples = 256;
  std::size_t data_size = 20000;  // ring only
  bool degenerate_run = true;

  static LossCorrelationSettings defaults(CorrelationTarget target = CorrelationTarget::kLines);
};
ExperimentReport exp_loss_correlation(const LossCorrelationSettings& s);

// Covered ring modes for WGAN and GAN generators per seed.
struct ModeCoverageSettings {
  RingMixtureSpec spec;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  std::size_t data_size = 20000;
  std::size_t eval_samples = 1000;
  TrainingConfig wgan;
  TrainingConfig gan;
  std::vector<std::size_t> hidden{64, 64};
  bool run_gan = true;

  static ModeCoverageSettings defaults();
};
ExperimentReport exp_mode_coverage(const ModeCoverageSettings& s);

// Critic-based generator gradient against a finite difference of exact W1 on
// the 1-D translation family g(z) = z + theta.
struct GradientCheckSettings {
  std::vector<double> thetas{0.3, 1.0};
  std::vector<std::uint64_t> seeds{0, 1, 2};
  std::size_t n_samples = 256;
  double mean = -0.5;
  double sigma = 0.15;
  std::size_t critic_steps = 1000;
  double learning_rate = 1e-3;
  double clip = 0.01;
  double fd_step = 1e-3;
  double tolerance = 0.1;

  static GradientCheckSettings defaults() { return {}; }
};
ExperimentReport exp_gradient_check(const GradientCheckSettings& s);

// Optimal EBGAN discriminator against total variation on random discrete pairs.
struct EbganCheckSettings {
  std::size_t pairs = 100;
  std::vector<double> margins{0.5, 1.0, 2.0};
  std::size_t random_discriminators = 1000;
  std::size_t max_support = 12;
  std::uint64_t seed = 0;
  double tolerance = 1e-12;

  static EbganCheckSettings defaults() { return {}; }
};
ExperimentReport exp_ebgan_check(const EbganCheckSettings& s);

// WGAN trained with Adam (beta1 = 0.5) on the ring; report only.
struct AdamInstabilitySettings {
  RingMixtureSpec spec;
  std::vector<std::uint64_t> seeds{0, 1, 2};
  TrainingConfig training;

  static AdamInstabilitySettings defaults();
};
ExperimentReport exp_adam_instability(const AdamInstabilitySettings& s);

/// Writes report.json, curves.csv (+ other tables) and one SVG per figure
/// under <out_dir>/<report.name>/; fills report.artifacts with full paths.
/// report.json lists file names only.
void write_report(ExperimentReport& report, const std::string& out_dir);

}  // namespace wdistlab
