#include "wdistlab/adversarial.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace wdistlab {

void TrainingConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw std::invalid_argument("training config: learning rate must be positive");
  }
  if (generator_learning_rate && !(*generator_learning_rate >= 0.0)) {
    throw std::invalid_argument("training config: generator learning rate must be nonnegative");
  }
  if (!(clip > 0.0)) throw std::invalid_argument("training config: clip must be positive");
  if (batch_size < 1) throw std::invalid_argument("training config: batch size must be >= 1");
  if (n_critic < 1) throw std::invalid_argument("training config: n_critic must be >= 1");
  if (eval_batch_size < 1) throw std::invalid_argument("training config: eval batch size must be >= 1");
}

OptimizerSettings TrainingConfig::critic_optimizer() const {
  return optimizer == OptimizerKind::kAdam ? OptimizerSettings::adam(learning_rate, adam_beta1, adam_beta2)
                                           : OptimizerSettings::rmsprop(learning_rate);
}

OptimizerSettings TrainingConfig::generator_optimizer() const {
  OptimizerSettings s = critic_optimizer();
  if (generator_learning_rate) s.learning_rate = *generator_learning_rate;
  return s;
}

void RunLog::append(RunLogEntry e) {
  if (!entries.empty() && e.iter <= entries.back().iter) {
    throw std::logic_error("run log: iteration indices must increase");
  }
  entries.push_back(std::move(e));
}

std::vector<double> RunLog::critic_losses() const {
  std::vector<double> out;
  for (const auto& e : entries) out.push_back(e.critic_loss);
  return out;
}

std::vector<double> RunLog::quality() const {
  std::vector<double> out;
  for (const auto& e : entries) {
    if (e.quality_w1) out.push_back(*e.quality_w1);
  }
  return out;
}

void Objective::differentiate() {
  if (differentiated_) return;
  tape.backward(value);
  differentiated_ = true;
}

ParamSet Objective::critic_gradients() {
  differentiate();
  return collect_gradients(tape, critic);
}

ParamSet Objective::generator_gradients() {
  differentiate();
  return collect_gradients(tape, generator);
}

namespace {

void require_scalar_output(const MlpNetwork& net, const char* who) {
  if (net.output_dim() != 1) throw std::invalid_argument(std::string(who) + ": network must have one output");
}

void require_batch(const Matrix& batch, const MlpNetwork& net, const char* who) {
  if (batch.rows() == 0) throw std::invalid_argument(std::string(who) + ": empty batch");
  if (static_cast<std::size_t>(batch.cols()) != net.input_dim()) {
    throw std::invalid_argument(std::string(who) + ": batch dimension " + std::to_string(batch.cols()) +
                                " does not match network input " + std::to_string(net.input_dim()));
  }
}

void require_sigmoid(const MlpNetwork& disc, const char* who) {
  require_scalar_output(disc, who);
  if (disc.activations.back() != Activation::kSigmoid) {
    throw std::invalid_argument(std::string(who) + ": discriminator must end in a sigmoid");
  }
}

void require_chain(const MlpNetwork& critic, const MlpNetwork& gen, const Matrix& z, const char* who) {
  require_batch(z, gen, who);
  if (gen.output_dim() != critic.input_dim()) {
    throw std::invalid_argument(std::string(who) + ": generator output does not match critic input");
  }
}

// Generator applied to z on the objective's tape; returns the fake batch node.
ad::Var record_generator(Objective& obj, const MlpNetwork& gen, const Matrix& z) {
  const ad::Var zin = obj.tape.leaf(z);
  obj.generator = add_parameters(obj.tape, gen);
  return apply_network(obj.tape, gen, obj.generator, zin);
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

void apply_mask(ParamSet& grads, const std::optional<ParamSet>& mask) {
  if (!mask) return;
  if (mask->size() != grads.size()) throw std::invalid_argument("generator gradient mask: layer count mismatch");
  for (std::size_t k = 0; k < grads.size(); ++k) {
    grads[k].weight = grads[k].weight.cwiseProduct((*mask)[k].weight);
    grads[k].bias = grads[k].bias.cwiseProduct((*mask)[k].bias);
  }
}

void check_training_inputs(const TrainingConfig& config, const MlpNetwork& gen, const MlpNetwork& critic,
                           const EmpiricalMeasure& data, const LatentPrior& prior) {
  config.validate();
  gen.validate();
  critic.validate();
  require_scalar_output(critic, "trainer");
  if (gen.input_dim() != prior.dim) throw std::invalid_argument("trainer: generator input does not match prior");
  if (gen.output_dim() != data.dim()) throw std::invalid_argument("trainer: generator output does not match data");
  if (critic.input_dim() != data.dim()) throw std::invalid_argument("trainer: critic input does not match data");
}

struct Streams {
  Rng data;
  Rng prior;
  Rng eval;
};

Streams make_streams(std::uint64_t seed) {
  const Rng root(seed);
  return {root.split(1), root.split(2), root.split(3)};
}

enum class Mode { kWgan, kGan };

TrainResult train_impl(Mode mode, const TrainingConfig& config, MlpNetwork gen, MlpNetwork critic,
                       const EmpiricalMeasure& data, const LatentPrior& prior, const TrainerHooks& hooks) {
  check_training_inputs(config, gen, critic, data, prior);
  if (mode == Mode::kGan) require_sigmoid(critic, "train_gan");

  Streams rng = make_streams(config.seed);
  OptimizerState critic_opt = OptimizerState::make(config.critic_optimizer(), critic);
  OptimizerState gen_opt = OptimizerState::make(config.generator_optimizer(), gen);
  RunLog log;
  const auto start = std::chrono::steady_clock::now();
  const std::size_t m = config.batch_size;

  for (std::size_t it = 0; it < config.generator_iters; ++it) {
    try {
      const std::size_t inner = it < config.critic_warmup_iters ? config.critic_warmup_steps : config.n_critic;
      for (std::size_t t = 0; t < inner; ++t) {
        const Matrix real = sample_batch(data, m, rng.data);
        const Matrix fake = evaluate(gen, sample_prior_points(prior, m, rng.prior));
        Objective obj = mode == Mode::kWgan ? critic_objective(critic, real, fake)
                                            : gan_discriminator_objective(critic, real, fake);
        if (!std::isfinite(obj.scalar())) throw DivergedError("non-finite critic objective");
        optimizer_step(critic.params, obj.critic_gradients(), critic_opt, StepDirection::kAscent);
        if (mode == Mode::kWgan) clip_weights_in_place(critic, config.clip);
        if (hooks.after_critic_update) hooks.after_critic_update(it, t, critic);
      }

      RunLogEntry entry;
      entry.iter = it;
      {
        const Matrix real = sample_batch(data, config.eval_batch_size, rng.eval);
        const Matrix fake = evaluate(gen, sample_prior_points(prior, config.eval_batch_size, rng.eval));
        entry.critic_loss = mode == Mode::kWgan ? critic_objective(critic, real, fake).scalar()
                                                : js_estimate_from_discriminator(critic, real, fake);
      }

      const Matrix z = sample_prior_points(prior, m, rng.prior);
      Objective gobj = mode == Mode::kWgan ? wgan_generator_objective(critic, gen, z)
                                           : gan_generator_objective_logd(critic, gen, z);
      entry.gen_loss = gobj.scalar();
      if (!std::isfinite(entry.critic_loss) || !std::isfinite(entry.gen_loss)) {
        throw DivergedError("non-finite loss estimate");
      }
      ParamSet ggrads = gobj.generator_gradients();
      apply_mask(ggrads, hooks.generator_grad_mask);
      optimizer_step(gen.params, ggrads, gen_opt, StepDirection::kDescent);
      if (hooks.after_generator_update) hooks.after_generator_update(it, gen);

      if (hooks.quality && hooks.quality_every > 0 && (it + 1) % hooks.quality_every == 0) {
        entry.quality_w1 = hooks.quality(it, gen);
      }
      entry.wallclock_ms = config.record_wallclock ? elapsed_ms(start) : 0.0;
      log.append(std::move(entry));
    } catch (const DivergedError& e) {
      log.diverged = true;
      log.diverged_reason = "iteration " + std::to_string(it) + ": " + e.what();
      break;
    }
  }
  return {std::move(gen), std::move(critic), std::move(log)};
}

}  // namespace

Objective critic_objective(const MlpNetwork& critic, const Matrix& real, const Matrix& fake) {
  require_scalar_output(critic, "critic_objective");
  require_batch(real, critic, "critic_objective");
  require_batch(fake, critic, "critic_objective");
  Objective obj;
  obj.critic = add_parameters(obj.tape, critic);
  const ad::Var xr = obj.tape.leaf(real);
  obj.fake_input = obj.tape.leaf(fake);
  const ad::Var fr = apply_network(obj.tape, critic, obj.critic, xr);
  const ad::Var ff = apply_network(obj.tape, critic, obj.critic, obj.fake_input);
  obj.value = obj.tape.sub(obj.tape.mean(fr), obj.tape.mean(ff));
  return obj;
}

Objective wgan_generator_objective(const MlpNetwork& critic, const MlpNetwork& gen, const Matrix& z) {
  require_scalar_output(critic, "wgan_generator_objective");
  require_chain(critic, gen, z, "wgan_generator_objective");
  Objective obj;
  obj.fake_input = record_generator(obj, gen, z);
  obj.critic = add_parameters(obj.tape, critic);
  const ad::Var ff = apply_network(obj.tape, critic, obj.critic, obj.fake_input);
  obj.value = obj.tape.scale(obj.tape.mean(ff), -1.0);
  return obj;
}

Objective gan_discriminator_objective(const MlpNetwork& disc, const Matrix& real, const Matrix& fake) {
  require_sigmoid(disc, "gan_discriminator_objective");
  require_batch(real, disc, "gan_discriminator_objective");
  require_batch(fake, disc, "gan_discriminator_objective");
  Objective obj;
  obj.critic = add_parameters(obj.tape, disc);
  const ad::Var xr = obj.tape.leaf(real);
  obj.fake_input = obj.tape.leaf(fake);
  ad::Tape& t = obj.tape;
  const ad::Var dr = apply_network(t, disc, obj.critic, xr);
  const ad::Var df = apply_network(t, disc, obj.critic, obj.fake_input);
  const ad::Var log_dr = t.log(dr, kSigmoidGuard);
  const ad::Var log_1m_df = t.log(t.add_scalar(t.scale(df, -1.0), 1.0), kSigmoidGuard);
  obj.value = t.add(t.mean(log_dr), t.mean(log_1m_df));
  return obj;
}

Objective gan_generator_objective_logd(const MlpNetwork& disc, const MlpNetwork& gen, const Matrix& z) {
  require_sigmoid(disc, "gan_generator_objective_logd");
  require_chain(disc, gen, z, "gan_generator_objective_logd");
  Objective obj;
  obj.fake_input = record_generator(obj, gen, z);
  obj.critic = add_parameters(obj.tape, disc);
  ad::Tape& t = obj.tape;
  const ad::Var df = apply_network(t, disc, obj.critic, obj.fake_input);
  obj.value = t.scale(t.mean(t.log(df, kSigmoidGuard)), -1.0);
  return obj;
}

double js_estimate_from_discriminator(const MlpNetwork& disc, const Matrix& real, const Matrix& fake) {
  return 0.5 * gan_discriminator_objective(disc, real, fake).scalar() + std::numbers::ln2;
}

Matrix sample_batch(const EmpiricalMeasure& data, std::size_t m, Rng& rng) {
  Matrix batch(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(data.dim()));
  const auto n = data.size();
  if (data.has_uniform_weights()) {
    for (Eigen::Index i = 0; i < batch.rows(); ++i) {
      batch.row(i) = data.points().row(static_cast<Eigen::Index>(rng.below(n)));
    }
    return batch;
  }
  std::vector<double> cdf(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) cdf[i] = (acc += data.weights()(static_cast<Eigen::Index>(i)));
  for (Eigen::Index i = 0; i < batch.rows(); ++i) {
    const double u = rng.uniform() * acc;
    auto idx = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    if (idx >= n) idx = n - 1;
    batch.row(i) = data.points().row(static_cast<Eigen::Index>(idx));
  }
  return batch;
}

TrainResult train_wgan(const TrainingConfig& config, MlpNetwork gen, MlpNetwork critic,
                       const EmpiricalMeasure& data, const LatentPrior& prior, const TrainerHooks& hooks) {
  return train_impl(Mode::kWgan, config, std::move(gen), std::move(critic), data, prior, hooks);
}

TrainResult train_gan(const TrainingConfig& config, MlpNetwork gen, MlpNetwork disc,
                      const EmpiricalMeasure& data, const LatentPrior& prior, const TrainerHooks& hooks) {
  return train_impl(Mode::kGan, config, std::move(gen), std::move(disc), data, prior, hooks);
}

EbganLosses ebgan_losses(std::span<const double> disc_real, std::span<const double> disc_fake,
                         const EbganConfig& cfg) {
  if (!(cfg.margin > 0.0)) throw std::invalid_argument("ebgan: margin must be positive");
  if (disc_real.empty() || disc_fake.empty()) throw std::invalid_argument("ebgan: empty batch");
  double real_mean = 0.0;
  for (const double d : disc_real) {
    if (!(d >= 0.0)) throw std::invalid_argument("ebgan: discriminator values must be nonnegative");
    real_mean += d;
  }
  real_mean /= static_cast<double>(disc_real.size());
  double fake_mean = 0.0;
  double hinge = 0.0;
  for (const double d : disc_fake) {
    if (!(d >= 0.0)) throw std::invalid_argument("ebgan: discriminator values must be nonnegative");
    fake_mean += d;
    hinge += std::max(0.0, cfg.margin - d);
  }
  fake_mean /= static_cast<double>(disc_fake.size());
  hinge /= static_cast<double>(disc_fake.size());
  return {real_mean + hinge, fake_mean - real_mean};
}

EbganLosses ebgan_losses(std::span<const double> disc, const DiscreteDistribution& p,
                         const DiscreteDistribution& q, const EbganConfig& cfg) {
  if (!(cfg.margin > 0.0)) throw std::invalid_argument("ebgan: margin must be positive");
  if (disc.size() != p.size() || p.size() != q.size()) throw std::invalid_argument("ebgan: support length mismatch");
  double real_mean = 0.0;
  double fake_mean = 0.0;
  double hinge = 0.0;
  for (std::size_t i = 0; i < disc.size(); ++i) {
    if (!(disc[i] >= 0.0)) throw std::invalid_argument("ebgan: discriminator values must be nonnegative");
    real_mean += p[i] * disc[i];
    fake_mean += q[i] * disc[i];
    hinge += q[i] * std::max(0.0, cfg.margin - disc[i]);
  }
  return {real_mean + hinge, fake_mean - real_mean};
}

std::vector<double> ebgan_optimal_discriminator(const DiscreteDistribution& p, const DiscreteDistribution& q,
                                                const EbganConfig& cfg) {
  if (!(cfg.margin > 0.0)) throw std::invalid_argument("ebgan: margin must be positive");
  if (p.size() != q.size()) throw std::invalid_argument("ebgan: support length mismatch");
  std::vector<double> d(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (q[i] > p[i]) {
      d[i] = cfg.margin;
    } else if (p[i] > q[i]) {
      d[i] = 0.0;
    } else {
      d[i] = 0.5 * cfg.margin;
    }
  }
  return d;
}

}  // namespace wdistlab
