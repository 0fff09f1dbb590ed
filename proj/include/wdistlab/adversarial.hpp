#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wdistlab/distributions.hpp"
#include "wdistlab/mlp.hpp"
#include "wdistlab/optim.hpp"

namespace wdistlab {

/// Hyperparameters of the WGAN loop. Defaults:
/// alpha = 5e-5, c = 0.01, m = 64, n_critic = 5.
struct TrainingConfig {
  double learning_rate = 5e-5;
  double clip = 0.01;
  std::size_t batch_size = 64;
  std::size_t n_critic = 5;
  std::size_t generator_iters = 0;
  OptimizerKind optimizer = OptimizerKind::kRmsProp;
  std::uint64_t seed = 0;

  /// Learning rate for the generator when it should differ from the critic's.
  std::optional<double> generator_learning_rate;
  double adam_beta1 = 0.5;
  double adam_beta2 = 0.999;
  /// For the first `critic_warmup_iters` generator steps the critic takes
  /// `critic_warmup_steps` updates instead of n_critic.
  std::size_t critic_warmup_iters = 0;
  std::size_t critic_warmup_steps = 100;
  /// Size of the fresh batches used for the logged loss estimate.
  std::size_t eval_batch_size = 256;
  bool record_wallclock = true;

  void validate() const;
  OptimizerSettings critic_optimizer() const;
  OptimizerSettings generator_optimizer() const;
};

struct RunLogEntry {
  std::size_t iter = 0;
  double critic_loss = 0.0;
  double gen_loss = 0.0;
  std::optional<double> quality_w1;
  double wallclock_ms = 0.0;
  std::optional<std::size_t> checkpoint_id;
};

struct RunLog {
  std::vector<RunLogEntry> entries;
  bool diverged = false;
  std::string diverged_reason;

  void append(RunLogEntry e);
  std::size_t size() const noexcept { return entries.size(); }
  std::vector<double> critic_losses() const;
  std::vector<double> quality() const;
};

struct EbganConfig {
  double margin = 1.0;
};

/// A scalar objective with the tape that produced it. Gradients are taken
/// with respect to the critic/discriminator leaves and, when present, the
/// generator leaves.
struct Objective {
  ad::Tape tape;
  ad::Var value;
  NetworkLeaves critic;
  NetworkLeaves generator;
  ad::Var fake_input;  // generator output (or fake batch) node

  double scalar() const { return tape.value(value)(0, 0); }
  /// Runs the reverse sweep (idempotent).
  void differentiate();
  ParamSet critic_gradients();
  ParamSet generator_gradients();

 private:
  bool differentiated_ = false;
};

/// Epsilon applied to sigmoid outputs before taking logs.
inline constexpr double kSigmoidGuard = 1e-7;

/// mean f(real) - mean f(fake). The caller ascends.
Objective critic_objective(const MlpNetwork& critic, const Matrix& real, const Matrix& fake);

/// -mean f(g(z)). The caller descends; gradients flow to the generator.
Objective wgan_generator_objective(const MlpNetwork& critic, const MlpNetwork& gen, const Matrix& z);

/// mean log D(real) + mean log(1 - D(fake)). Requires a sigmoid output layer.
Objective gan_discriminator_objective(const MlpNetwork& disc, const Matrix& real, const Matrix& fake);

/// -mean log D(g(z)), the -log D generator loss.
Objective gan_generator_objective_logd(const MlpNetwork& disc, const MlpNetwork& gen, const Matrix& z);

/// (1/2) L(D, g) + log 2, a lower bound on JS.
double js_estimate_from_discriminator(const MlpNetwork& disc, const Matrix& real, const Matrix& fake);

/// Events reported by the trainers; used by instrumentation and tests.
struct TrainerHooks {
  std::function<void(std::size_t gen_iter, std::size_t critic_step, const MlpNetwork& critic)>
      after_critic_update;
  std::function<void(std::size_t gen_iter, const MlpNetwork& gen)> after_generator_update;
  /// Multiplied entrywise into generator gradients (freezes parameters).
  std::optional<ParamSet> generator_grad_mask;
  /// Quality proxy evaluated after generator step `gen_iter` when `quality_every`
  /// divides gen_iter + 1.
  std::function<double(std::size_t gen_iter, const MlpNetwork& gen)> quality;
  std::size_t quality_every = 1;
};

struct TrainResult {
  MlpNetwork gen;
  MlpNetwork critic;
  RunLog log;
};

/// Draws m points from the measure according to its weights.
Matrix sample_batch(const EmpiricalMeasure& data, std::size_t m, Rng& rng);

/// The WGAN loop: per generator step, n_critic critic ascent steps each
/// followed by clipping to [-c, c], then one generator descent step.
TrainResult train_wgan(const TrainingConfig& config, MlpNetwork gen, MlpNetwork critic,
                       const EmpiricalMeasure& data, const LatentPrior& prior,
                       const TrainerHooks& hooks = {});

/// Standard GAN with the -log D generator loss; n_critic discriminator steps
/// per generator step, no clipping. The logged critic loss is js_estimate.
TrainResult train_gan(const TrainingConfig& config, MlpNetwork gen, MlpNetwork disc,
                      const EmpiricalMeasure& data, const LatentPrior& prior,
                      const TrainerHooks& hooks = {});

struct EbganLosses {
  double discriminator = 0.0;  // L_D
  double generator = 0.0;      // L_G
};

/// L_D = E[D(x)] + E[[m - D(g(z))]^+],  L_G = E[D(g(z))] - E[D(x)] over
/// equally weighted batches.
EbganLosses ebgan_losses(std::span<const double> disc_real, std::span<const double> disc_fake,
                         const EbganConfig& cfg);

/// Same losses for a discriminator given per atom of a shared finite support,
/// with real law p and generated law q.
EbganLosses ebgan_losses(std::span<const double> disc, const DiscreteDistribution& p,
                         const DiscreteDistribution& q, const EbganConfig& cfg);

/// Per-atom optimal discriminator from the Hahn decomposition of p - q:
/// margin where q > p, 0 where p > q, margin / 2 on ties.
std::vector<double> ebgan_optimal_discriminator(const DiscreteDistribution& p,
                                                const DiscreteDistribution& q,
                                                const EbganConfig& cfg);

}  // namespace wdistlab
