#include "wdistlab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <mutex>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string_view>
#include <thread>

#include "wdistlab/distances.hpp"

namespace wdistlab {
namespace {

using nlohmann::json;

constexpr double kLog2 = std::numbers::ln2;

double abs_diff(double a, double b) {
  if (a == b) return 0.0;
  return std::abs(a - b);
}

std::vector<std::size_t> relu_hidden(const std::vector<std::size_t>& hidden, std::size_t in, std::size_t out,
                                     std::vector<Activation>* acts, Activation last) {
  std::vector<std::size_t> widths{in};
  for (std::size_t h : hidden) {
    widths.push_back(h);
    acts->push_back(Activation::kRelu);
  }
  widths.push_back(out);
  acts->push_back(last);
  return widths;
}

MlpNetwork make_mlp(const std::vector<std::size_t>& hidden, std::size_t in, std::size_t out, Activation last,
                    Rng& rng) {
  std::vector<Activation> acts;
  const auto widths = relu_hidden(hidden, in, out, &acts, last);
  return init_network(widths, acts, rng);
}

json seeds_json(const std::vector<std::uint64_t>& seeds) { return json(seeds); }

Cell cell(std::size_t v) { return static_cast<std::int64_t>(v); }
Cell cell_opt(const std::optional<double>& v) { return v ? Cell{*v} : Cell{std::string()}; }

std::vector<double> iota_x(std::size_t n) {
  std::vector<double> x(n);
  std::iota(x.begin(), x.end(), 0.0);
  return x;
}

}  // namespace

const Table& ExperimentReport::table(const std::string& name) const {
  for (const auto& t : tables)
    if (t.name == name) return t.table;
  throw std::out_of_range("no table named " + name);
}

std::size_t worker_count() {
  if (const char* env = std::getenv("WDISTLAB_THREADS"); env && *env) {
    std::size_t v = 0;
    const std::string_view s(env);
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || v == 0)
      throw std::invalid_argument("WDISTLAB_THREADS must be a positive integer, got '" + std::string(s) + "'");
    return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min(worker_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::vector<double> median_filter(const std::vector<double>& series, std::size_t window) {
  if (window == 0 || window % 2 == 0) throw std::invalid_argument("median_filter: window must be odd and positive");
  if (series.empty()) return {};
  if (window > series.size()) throw std::invalid_argument("median_filter: window longer than series");
  const auto n = static_cast<std::ptrdiff_t>(series.size());
  const auto h = static_cast<std::ptrdiff_t>(window / 2);
  std::vector<double> out(series.size()), win(window);
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    for (std::ptrdiff_t k = -h; k <= h; ++k) {
      std::ptrdiff_t j = i + k;
      if (j < 0) j = -j - 1;
      if (j >= n) j = 2 * n - j - 1;
      win[static_cast<std::size_t>(k + h)] = series[static_cast<std::size_t>(j)];
    }
    std::nth_element(win.begin(), win.begin() + h, win.end());
    out[static_cast<std::size_t>(i)] = win[static_cast<std::size_t>(h)];
  }
  return out;
}

std::size_t default_median_window(std::size_t n) {
  std::size_t w = (5 * n + 99) / 100;
  if (w % 2 == 0) ++w;
  return std::max<std::size_t>(w, 1);
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("spearman: length mismatch");
  if (a.size() < 2) throw std::invalid_argument("spearman: need at least two points");
  const auto ra = average_ranks(a), rb = average_ranks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

std::vector<std::size_t> mode_counts(const Matrix& samples, const RingMixtureSpec& spec) {
  spec.validate();
  if (samples.cols() != 2) throw std::invalid_argument("mode_counts: samples must be 2-D");
  std::vector<std::size_t> counts(spec.n_modes, 0);
  const double r = 3.0 * spec.sigma;
  for (std::size_t k = 0; k < spec.n_modes; ++k) {
    const Eigen::Vector2d c = spec.center(k);
    for (Eigen::Index i = 0; i < samples.rows(); ++i)
      if ((samples.row(i).transpose() - c).norm() <= r) ++counts[k];
  }
  return counts;
}

std::size_t count_covered_modes(const Matrix& samples, const RingMixtureSpec& spec, double min_fraction) {
  const auto counts = mode_counts(samples, spec);
  const double need = min_fraction * static_cast<double>(samples.rows());
  return static_cast<std::size_t>(
      std::count_if(counts.begin(), counts.end(), [&](std::size_t c) { return c > 0 && static_cast<double>(c) >= need; }));
}

MlpNetwork line_generator(double theta) {
  MlpNetwork g;
  g.widths = {1, 2};
  g.activations = {Activation::kLinear};
  g.params = {{Matrix{{0.0}, {1.0}}, Vector{{theta, 0.0}}}};
  return g;
}

ParamSet line_generator_mask() { return {{Matrix::Zero(2, 1), Vector{{1.0, 0.0}}}}; }

double line_generator_theta(const MlpNetwork& gen) { return gen.params.at(0).bias(0); }

// ---------------------------------------------------------------- parallel lines

ParallelLinesSettings ParallelLinesSettings::defaults() {
  ParallelLinesSettings s;
  for (int i = -20; i <= 20; ++i) s.theta_grid.push_back(i / 20.0);
  s.seeds = {0, 1, 2, 3, 4};
  s.training.learning_rate = 5e-3;
  s.training.generator_iters = 2000;
  s.training.record_wallclock = false;
  return s;
}

ExperimentReport exp_parallel_lines(const std::vector<double>& theta_grid, std::size_t n_atoms) {
  ParallelLinesSettings s;
  s.theta_grid = theta_grid;
  s.n_atoms = n_atoms;
  return exp_parallel_lines(s);
}

ExperimentReport exp_parallel_lines(const ParallelLinesSettings& s) {
  if (s.theta_grid.empty()) throw std::invalid_argument("exp_parallel_lines: empty theta grid");
  if (s.n_atoms < 2) throw std::invalid_argument("exp_parallel_lines: need at least two atoms");

  ExperimentReport rep;
  rep.name = "parallel-lines";
  rep.parameters = {{"theta_grid", s.theta_grid}, {"n_atoms", s.n_atoms}, {"theta0", s.theta0},
                    {"target_tolerance", s.target_tolerance}, {"critic_hidden", s.critic_hidden}};
  rep.seeds = s.seeds;

  struct Row {
    ParallelLinesDistances num, closed;
  };
  std::vector<Row> rows(s.theta_grid.size());
  const LineDistribution base = make_parallel_line(0.0, s.n_atoms);
  parallel_for(rows.size(), [&](std::size_t i) {
    const LineDistribution other = make_parallel_line(s.theta_grid[i], s.n_atoms);
    const auto [p, q] = align_on_union_support(base.measure, other.measure);
    rows[i].num.w1 = w1_exact(base.measure, other.measure).cost;
    rows[i].num.js = js_discrete(p, q);
    rows[i].num.kl = kl_discrete(p, q);
    rows[i].num.tv = tv_discrete(p, q);
    rows[i].closed = parallel_lines_closed_form(s.theta_grid[i]);
  });

  Table dist;
  dist.header = {"theta", "n_atoms", "w1_numeric", "w1_closed", "w1_abs_diff", "js_numeric", "js_closed",
                 "js_abs_diff", "kl_numeric", "kl_closed", "kl_abs_diff", "tv_numeric", "tv_closed", "tv_abs_diff"};
  double max_w1 = 0, max_js = 0, max_tv = 0;
  bool js_ok = true, kl_ok = true, zero_ok = true;
  Series w1_series{"W1 (EM)", {}, {}}, js_series{"JS", {}, {}};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double th = s.theta_grid[i];
    const auto& [nm, cf] = rows[i];
    dist.add_row({th, cell(s.n_atoms), nm.w1, cf.w1, abs_diff(nm.w1, cf.w1), nm.js, cf.js, abs_diff(nm.js, cf.js), nm.kl,
                  cf.kl, abs_diff(nm.kl, cf.kl), nm.tv, cf.tv, abs_diff(nm.tv, cf.tv)});
    max_w1 = std::max(max_w1, abs_diff(nm.w1, cf.w1));
    max_js = std::max(max_js, abs_diff(nm.js, cf.js));
    max_tv = std::max(max_tv, abs_diff(nm.tv, cf.tv));
    if (std::abs(th) >= 0.05 && !(nm.js >= kLog2 - 1e-6 && nm.js <= kLog2)) js_ok = false;
    if (nm.kl != cf.kl) kl_ok = false;
    if (th == 0.0 && !(nm.w1 <= 1e-9 && nm.js <= 1e-9 && nm.kl <= 1e-9 && nm.tv <= 1e-9)) zero_ok = false;
    w1_series.x.push_back(th);
    w1_series.y.push_back(nm.w1);
    js_series.x.push_back(th);
    js_series.y.push_back(nm.js);
  }
  rep.tables.push_back({"curves", std::move(dist)});
  rep.figures.push_back({"distances", {"Distances between parallel lines", "theta", "distance"}, {w1_series, js_series}});
  rep.summary["max_w1_abs_diff"] = max_w1;
  rep.summary["max_js_abs_diff"] = max_js;
  rep.summary["max_tv_abs_diff"] = max_tv;
  rep.summary["w1_within_1e-3"] = max_w1 <= 1e-3;
  rep.summary["js_saturated_off_zero"] = js_ok;
  rep.summary["kl_matches_closed_form"] = kl_ok;
  rep.summary["zero_row_vanishes"] = zero_ok;
  rep.ok = max_w1 <= 1e-3 && js_ok && kl_ok && zero_ok && max_tv == 0.0;

  if (s.seeds.empty()) return rep;

  // Training the line offset with WGAN.
  TrainingConfig base_cfg = s.training;
  rep.config = training_config_json(base_cfg);
  struct Run {
    std::vector<double> theta, loss;
    std::int64_t first_hit = -1;
    std::size_t critic_steps = 0;
    bool steps_ok = true;
    bool clip_ok = true;
    double max_weight = 0;
    bool diverged = false;
  };
  std::vector<Run> runs(s.seeds.size());
  const EmpiricalMeasure data = make_parallel_line(0.0, s.n_atoms).measure;
  const LatentPrior prior{PriorKind::kUniformUnitCube, 1};
  parallel_for(runs.size(), [&](std::size_t r) {
    Run& run = runs[r];
    TrainingConfig cfg = base_cfg;
    cfg.seed = s.seeds[r];
    Rng init = Rng(cfg.seed).split(5);
    MlpNetwork critic = make_mlp(s.critic_hidden, 2, 1, Activation::kLinear, init);
    std::size_t steps_this_iter = 0;
    TrainerHooks hooks;
    hooks.generator_grad_mask = line_generator_mask();
    hooks.after_critic_update = [&](std::size_t, std::size_t, const MlpNetwork& c) {
      ++steps_this_iter;
      ++run.critic_steps;
      const double w = max_abs_parameter(c);
      run.max_weight = std::max(run.max_weight, w);
      if (w > cfg.clip) run.clip_ok = false;
    };
    hooks.after_generator_update = [&](std::size_t it, const MlpNetwork& g) {
      const std::size_t expect = it < cfg.critic_warmup_iters ? cfg.critic_warmup_steps : cfg.n_critic;
      if (steps_this_iter != expect) run.steps_ok = false;
      steps_this_iter = 0;
      const double th = line_generator_theta(g);
      run.theta.push_back(th);
      if (run.first_hit < 0 && std::abs(th) <= s.target_tolerance) run.first_hit = static_cast<std::int64_t>(it);
    };
    const TrainResult res = train_wgan(cfg, line_generator(s.theta0), critic, data, prior, hooks);
    run.loss = res.log.critic_losses();
    run.diverged = res.log.diverged;
  });

  Table train;
  train.header = {"seed", "theta0", "learning_rate", "clip", "n_critic", "iters", "theta_final", "first_hit_iter",
                  "critic_steps", "max_abs_critic_weight", "steps_ok", "clip_ok", "diverged"};
  Table curve;
  curve.header = {"seed", "iter", "theta", "critic_loss"};
  std::size_t reached = 0;
  std::vector<Series> theta_series;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const Run& run = runs[r];
    const auto seed = static_cast<std::int64_t>(s.seeds[r]);
    train.add_row({seed, s.theta0, base_cfg.learning_rate, base_cfg.clip, cell(base_cfg.n_critic),
                   cell(base_cfg.generator_iters), run.theta.empty() ? s.theta0 : run.theta.back(), run.first_hit,
                   cell(run.critic_steps), run.max_weight, std::int64_t{run.steps_ok}, std::int64_t{run.clip_ok},
                   std::int64_t{run.diverged}});
    for (std::size_t i = 0; i < run.theta.size(); ++i)
      curve.add_row({seed, cell(i), run.theta[i], i < run.loss.size() ? run.loss[i] : 0.0});
    if (run.first_hit >= 0) ++reached;
    if (!run.steps_ok || !run.clip_ok || run.diverged) rep.ok = false;
    theta_series.push_back({"seed " + std::to_string(seed), iota_x(run.theta.size()), run.theta});
  }
  rep.tables.push_back({"training", std::move(train)});
  rep.tables.push_back({"training_curves", std::move(curve)});
  rep.figures.push_back({"theta_trajectories", {"WGAN on parallel lines", "generator iteration", "theta"},
                         std::move(theta_series)});
  rep.summary["seeds_reaching_target"] = reached;
  rep.summary["seeds"] = runs.size();
  return rep;
}

// ---------------------------------------------------------------- two Gaussians

TwoGaussiansSettings TwoGaussiansSettings::defaults() {
  TwoGaussiansSettings s;
  for (int i = 0; i <= 80; ++i) s.grid.push_back(-4.0 + 0.1 * i);
  return s;
}

ExperimentReport exp_two_gaussians(std::size_t train_iters, const std::vector<double>& grid) {
  TwoGaussiansSettings s = TwoGaussiansSettings::defaults();
  s.train_iters = train_iters;
  s.grid = grid;
  return exp_two_gaussians(s);
}

ExperimentReport exp_two_gaussians(const TwoGaussiansSettings& s) {
  if (s.grid.size() < 2) throw std::invalid_argument("exp_two_gaussians: grid needs at least two points");
  if (s.seeds.empty()) throw std::invalid_argument("exp_two_gaussians: no seeds");
  if (!(s.sigma > 0.0)) throw std::invalid_argument("exp_two_gaussians: sigma must be positive");
  ExperimentReport rep;
  rep.name = "two-gaussians";
  rep.seeds = s.seeds;
  rep.parameters = {{"real_mean", s.real_mean}, {"fake_mean", s.fake_mean}, {"sigma", s.sigma},
                    {"n_samples", s.n_samples}, {"train_iters", s.train_iters}, {"grid", s.grid},
                    {"batch_size", s.batch_size}, {"hidden", s.hidden}, {"vanish_threshold", s.vanish_threshold},
                    {"slope_fraction", s.slope_fraction}};
  rep.config = {{"disc_learning_rate", s.disc_learning_rate}, {"critic_learning_rate", s.critic_learning_rate},
                {"clip", s.clip}, {"optimizer", "rmsprop"}};

  const std::size_t G = s.grid.size();
  struct Run {
    Matrix disc, disc_grad, critic, critic_grad;
    double d_real = 0, d_fake = 0, dgrad_fake = 0, min_slope = 0, threshold = 0;
    bool diverged = false;
  };
  std::vector<Run> runs(s.seeds.size());
  const double lo = std::min(s.real_mean, s.fake_mean), hi = std::max(s.real_mean, s.fake_mean);

  parallel_for(runs.size(), [&](std::size_t r) {
    Run& run = runs[r];
    const Rng root(s.seeds[r]);
    Rng rr = root.split(1), rf = root.split(2), ri = root.split(3), rb = root.split(4);
    Matrix real(s.n_samples, 1), fake(s.n_samples, 1);
    for (std::size_t i = 0; i < s.n_samples; ++i) {
      real(i, 0) = rr.normal(s.real_mean, s.sigma);
      fake(i, 0) = rf.normal(s.fake_mean, s.sigma);
    }
    const auto R = EmpiricalMeasure::uniform(real), F = EmpiricalMeasure::uniform(fake);
    MlpNetwork disc = make_mlp(s.hidden, 1, 1, Activation::kSigmoid, ri);
    MlpNetwork critic = make_mlp(s.hidden, 1, 1, Activation::kLinear, ri);
    auto ds = OptimizerState::make(OptimizerSettings::rmsprop(s.disc_learning_rate), disc);
    auto cs = OptimizerState::make(OptimizerSettings::rmsprop(s.critic_learning_rate), critic);
    try {
      for (std::size_t t = 0; t < s.train_iters; ++t) {
        const Matrix rb1 = sample_batch(R, s.batch_size, rb), fb1 = sample_batch(F, s.batch_size, rb);
        Objective d = gan_discriminator_objective(disc, rb1, fb1);
        optimizer_step(disc.params, d.critic_gradients(), ds, StepDirection::kAscent);
        Objective c = critic_objective(critic, rb1, fb1);
        optimizer_step(critic.params, c.critic_gradients(), cs, StepDirection::kAscent);
        clip_weights_in_place(critic, s.clip);
      }
    } catch (const DivergedError&) {
      run.diverged = true;
    }
    Matrix grid(G + 2, 1);
    for (std::size_t i = 0; i < G; ++i) grid(i, 0) = s.grid[i];
    grid(G, 0) = s.real_mean;
    grid(G + 1, 0) = s.fake_mean;
    ForwardPass dp = forward(disc, grid);
    backward(dp, Matrix::Ones(G + 2, 1));
    ForwardPass cp = forward(critic, grid);
    backward(cp, Matrix::Ones(G + 2, 1));
    run.disc = dp.output();
    run.disc_grad = dp.tape.grad(dp.input).cwiseAbs();
    run.critic = cp.output();
    run.critic_grad = cp.tape.grad(cp.input).cwiseAbs();
    run.d_real = run.disc(G, 0);
    run.d_fake = run.disc(G + 1, 0);
    run.dgrad_fake = run.disc_grad(G + 1, 0);
    const double span = s.grid.back() - s.grid.front();
    const double frange = run.critic.topRows(G).maxCoeff() - run.critic.topRows(G).minCoeff();
    run.threshold = s.slope_fraction * frange / std::abs(span);
    run.min_slope = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < G; ++i)
      if (s.grid[i] >= lo - 1e-12 && s.grid[i] <= hi + 1e-12) run.min_slope = std::min(run.min_slope, run.critic_grad(i, 0));
  });

  Table curves;
  curves.header = {"seed", "x", "disc", "disc_grad_abs", "critic", "critic_grad_abs"};
  Table seeds;
  seeds.header = {"seed", "train_iters", "disc_at_real_mean", "disc_at_fake_mean", "disc_grad_at_fake_mean",
                  "critic_min_slope_between_means", "critic_slope_threshold", "disc_vanishes", "critic_clean", "diverged"};
  std::size_t vanish = 0, clean = 0, real_high = 0;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const Run& run = runs[r];
    const auto seed = static_cast<std::int64_t>(s.seeds[r]);
    for (std::size_t i = 0; i < G; ++i)
      curves.add_row({seed, s.grid[i], run.disc(i, 0), run.disc_grad(i, 0), run.critic(i, 0), run.critic_grad(i, 0)});
    const bool v = run.dgrad_fake <= s.vanish_threshold;
    const bool c = run.min_slope >= run.threshold;
    vanish += v;
    clean += c;
    real_high += run.d_real >= 0.95;
    if (run.diverged) rep.ok = false;
    seeds.add_row({seed, cell(s.train_iters), run.d_real, run.d_fake, run.dgrad_fake, run.min_slope, run.threshold,
                   std::int64_t{v}, std::int64_t{c}, std::int64_t{run.diverged}});
  }
  {
    const Run& run = runs.front();
    const double fmin = run.critic.topRows(G).minCoeff(), fmax = run.critic.topRows(G).maxCoeff();
    Series d{"GAN discriminator", s.grid, {}}, f{"WGAN critic (rescaled to [0,1])", s.grid, {}};
    for (std::size_t i = 0; i < G; ++i) {
      d.y.push_back(run.disc(i, 0));
      f.y.push_back(fmax > fmin ? (run.critic(i, 0) - fmin) / (fmax - fmin) : 0.0);
    }
    rep.figures.push_back({"discriminator_vs_critic", {"Discriminator and critic, two Gaussians", "x", "value"}, {d, f}});
  }
  rep.tables.push_back({"curves", std::move(curves)});
  rep.tables.push_back({"seeds", std::move(seeds)});
  rep.summary["seeds_disc_vanishing"] = vanish;
  rep.summary["seeds_critic_clean"] = clean;
  rep.summary["seeds_disc_real_high"] = real_high;
  rep.summary["seeds"] = runs.size();
  return rep;
}

// ---------------------------------------------------------------- loss / quality correlation

LossCorrelationSettings LossCorrelationSettings::defaults(CorrelationTarget target) {
  LossCorrelationSettings s;
  s.target = target;
  for (TrainingConfig* c : {&s.wgan, &s.gan}) c->record_wallclock = false;
  if (target == CorrelationTarget::kLines) {
    s.wgan.learning_rate = 1e-3;
    s.wgan.generator_iters = 1000;
    s.gan = s.wgan;
  } else {
    s.wgan.learning_rate = 5e-4;
    s.wgan.clip = 0.1;
    s.wgan.generator_iters = 4000;
    s.gan = s.wgan;
    s.gan.n_critic = 1;
  }
  return s;
}

namespace {

struct CorrelationRun {
  std::vector<double> estimate, filtered;
  std::vector<std::optional<double>> quality;
  double spearman = 0.0;
  bool diverged = false;
};

CorrelationRun run_correlation(const LossCorrelationSettings& s, const TrainingConfig& cfg, bool gan,
                               std::uint64_t seed) {
  if (cfg.generator_iters < s.checkpoints)
    throw std::invalid_argument("exp_loss_correlation: fewer iterations than checkpoints");
  const Rng root(seed);
  Rng init = root.split(5), held_rng = root.split(6), data_rng = root.split(8);
  const std::uint64_t quality_seed = root.split(7).seed();
  const bool lines = s.target == CorrelationTarget::kLines;

  MlpNetwork gen;
  EmpiricalMeasure data = make_parallel_line(0.0, 512).measure;
  Matrix held(s.quality_samples, 2);
  LatentPrior prior{PriorKind::kUniformUnitCube, 1};
  if (lines) {
    gen = line_generator(1.0);
    for (std::size_t i = 0; i < s.quality_samples; ++i) {
      held(i, 0) = 0.0;
      held(i, 1) = held_rng.uniform();
    }
  } else {
    prior = {PriorKind::kStandardNormal, 2};
    gen = make_mlp({64, 64}, 2, 2, Activation::kLinear, init);
    data = make_ring_mixture(s.ring, s.data_size, data_rng);
    held = sample_ring_mixture_points(s.ring, s.quality_samples, held_rng);
  }
  MlpNetwork critic = make_mlp({64, 64}, 2, 1, gan ? Activation::kSigmoid : Activation::kLinear, init);
  const EmpiricalMeasure held_measure = EmpiricalMeasure::uniform(held);

  TrainingConfig c = cfg;
  c.seed = seed;
  TrainerHooks hooks;
  if (lines) hooks.generator_grad_mask = line_generator_mask();
  hooks.quality_every = c.generator_iters / s.checkpoints;
  hooks.quality = [&](std::size_t, const MlpNetwork& g) {
    Rng q(quality_seed);
    const Matrix samples = evaluate(g, sample_prior_points(prior, s.quality_samples, q));
    return w1_exact(EmpiricalMeasure::uniform(samples), held_measure).cost;
  };
  const TrainResult res = gan ? train_gan(c, gen, critic, data, prior, hooks) : train_wgan(c, gen, critic, data, prior, hooks);

  CorrelationRun out;
  out.diverged = res.log.diverged;
  out.estimate = res.log.critic_losses();
  for (const auto& e : res.log.entries) out.quality.push_back(e.quality_w1);
  if (out.estimate.empty()) return out;
  out.filtered = median_filter(out.estimate, default_median_window(out.estimate.size()));
  std::vector<double> fe, q;
  for (std::size_t i = 0; i < out.quality.size(); ++i)
    if (out.quality[i]) {
      fe.push_back(out.filtered[i]);
      q.push_back(*out.quality[i]);
    }
  if (q.size() >= 2) out.spearman = spearman(fe, q);
  return out;
}

}  // namespace

ExperimentReport exp_loss_correlation(const LossCorrelationSettings& s) {
  if (s.checkpoints < 10) throw std::invalid_argument("exp_loss_correlation: need at least 10 checkpoints");
  if (s.seeds.empty()) throw std::invalid_argument("exp_loss_correlation: no seeds");
  ExperimentReport rep;
  rep.name = "loss-correlation";
  rep.seeds = s.seeds;
  const bool lines = s.target == CorrelationTarget::kLines;
  rep.parameters = {{"target", lines ? "lines" : "ring"}, {"checkpoints", s.checkpoints},
                    {"quality_samples", s.quality_samples}, {"degenerate_run", s.degenerate_run}};
  if (!lines)
    rep.parameters["ring"] = {{"n_modes", s.ring.n_modes}, {"radius", s.ring.radius}, {"sigma", s.ring.sigma},
                              {"data_size", s.data_size}};
  TrainingConfig degenerate = s.wgan;
  degenerate.generator_learning_rate = 0.0;
  rep.config = {{"wgan", training_config_json(s.wgan)}, {"gan", training_config_json(s.gan)}};
  if (s.degenerate_run) rep.config["degenerate"] = training_config_json(degenerate);

  const std::vector<std::string> kinds = s.degenerate_run ? std::vector<std::string>{"wgan", "gan", "degenerate"}
                                                          : std::vector<std::string>{"wgan", "gan"};
  const std::size_t K = kinds.size();
  std::vector<CorrelationRun> runs(K * s.seeds.size());
  parallel_for(runs.size(), [&](std::size_t i) {
    const std::size_t r = i / K, k = i % K;
    const TrainingConfig& cfg = k == 0 ? s.wgan : k == 1 ? s.gan : degenerate;
    runs[i] = run_correlation(s, cfg, k == 1, s.seeds[r]);
  });

  Table curves;
  curves.header = {"run", "seed", "iter", "estimate", "estimate_filtered", "quality_w1"};
  Table seeds;
  seeds.header = {"run", "seed", "iters", "checkpoints", "spearman", "estimate_final", "quality_first", "quality_last",
                  "estimate_range_second_half", "diverged"};
  std::vector<double> wgan_rho, gan_final, gan_quality_change, degenerate_range;
  std::vector<Series> fig_wgan, fig_gan;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const std::size_t r = i / K, k = i % K;
    const CorrelationRun& run = runs[i];
    const auto seed = static_cast<std::int64_t>(s.seeds[r]);
    for (std::size_t t = 0; t < run.estimate.size(); ++t)
      curves.add_row({kinds[k], seed, cell(t), run.estimate[t], run.filtered[t], cell_opt(run.quality[t])});
    std::optional<double> q_first, q_last;
    std::vector<double> qx, qy;
    for (std::size_t t = 0; t < run.quality.size(); ++t)
      if (run.quality[t]) {
        if (!q_first) q_first = run.quality[t];
        q_last = run.quality[t];
        qx.push_back(static_cast<double>(t));
        qy.push_back(*run.quality[t]);
      }
    double range = 0.0;
    if (!run.filtered.empty()) {
      const auto half = run.filtered.begin() + static_cast<std::ptrdiff_t>(run.filtered.size() / 2);
      const auto [mn, mx] = std::minmax_element(half, run.filtered.end());
      range = *mx - *mn;
    }
    const double final_est = run.estimate.empty() ? std::nan("") : run.estimate.back();
    seeds.add_row({kinds[k], seed, cell(run.estimate.size()), cell(qx.size()), run.spearman, final_est,
                   cell_opt(q_first), cell_opt(q_last), range, std::int64_t{run.diverged}});
    if (run.diverged) rep.ok = false;
    if (k == 0) wgan_rho.push_back(run.spearman);
    if (k == 1) {
      gan_final.push_back(final_est);
      gan_quality_change.push_back(q_first && q_last ? std::abs(*q_last - *q_first) : 0.0);
    }
    if (k == 2) degenerate_range.push_back(range);
    if (r == 0 && k < 2) {
      auto& fig = k == 0 ? fig_wgan : fig_gan;
      fig.push_back({k == 0 ? "critic estimate (median filtered)" : "JS estimate (median filtered)",
                     iota_x(run.filtered.size()), run.filtered});
      fig.push_back({"quality proxy (exact W1)", qx, qy});
    }
  }
  rep.tables.push_back({"curves", std::move(curves)});
  rep.tables.push_back({"seeds", std::move(seeds)});
  rep.figures.push_back({"wgan_curves", {"WGAN estimate and sample quality", "generator iteration", "value"}, fig_wgan});
  rep.figures.push_back({"gan_curves", {"GAN JS estimate and sample quality", "generator iteration", "value"}, fig_gan});
  rep.summary["wgan_spearman"] = wgan_rho;
  rep.summary["gan_final_js_estimate"] = gan_final;
  rep.summary["gan_quality_change"] = gan_quality_change;
  rep.summary["degenerate_estimate_range"] = degenerate_range;
  rep.summary["log2"] = kLog2;
  return rep;
}

// ---------------------------------------------------------------- mode coverage

ModeCoverageSettings ModeCoverageSettings::defaults() {
  ModeCoverageSettings s;
  s.wgan.learning_rate = 5e-4;
  s.wgan.clip = 0.1;
  s.wgan.generator_iters = 4000;
  s.wgan.record_wallclock = false;
  s.gan = s.wgan;
  s.gan.n_critic = 1;
  return s;
}

ExperimentReport exp_mode_coverage(const ModeCoverageSettings& s) {
  s.spec.validate();
  if (s.seeds.size() < 3) throw std::invalid_argument("exp_mode_coverage: need at least 3 seeds");
  ExperimentReport rep;
  rep.name = "mode-coverage";
  rep.seeds = s.seeds;
  rep.parameters = {{"n_modes", s.spec.n_modes}, {"radius", s.spec.radius}, {"sigma", s.spec.sigma},
                    {"data_size", s.data_size}, {"eval_samples", s.eval_samples}, {"hidden", s.hidden},
                    {"min_fraction", 0.02}, {"radius_sigmas", 3}};
  rep.config = {{"wgan", training_config_json(s.wgan)}};
  if (s.run_gan) rep.config["gan"] = training_config_json(s.gan);

  struct Run {
    std::vector<std::size_t> counts;
    std::size_t covered = 0;
    bool diverged = false;
    Matrix samples;
  };
  const std::size_t K = s.run_gan ? 2 : 1;
  std::vector<Run> runs(K * s.seeds.size());
  parallel_for(runs.size(), [&](std::size_t i) {
    const std::size_t r = i / K;
    const bool gan = i % K == 1;
    const Rng root(s.seeds[r]);
    Rng rd = root.split(1), ri = root.split(2), re = root.split(3);
    const EmpiricalMeasure data = make_ring_mixture(s.spec, s.data_size, rd);
    const LatentPrior prior{PriorKind::kStandardNormal, 2};
    MlpNetwork gen = make_mlp(s.hidden, 2, 2, Activation::kLinear, ri);
    MlpNetwork critic = make_mlp(s.hidden, 2, 1, gan ? Activation::kSigmoid : Activation::kLinear, ri);
    TrainingConfig cfg = gan ? s.gan : s.wgan;
    cfg.seed = s.seeds[r];
    const TrainResult res = gan ? train_gan(cfg, gen, critic, data, prior) : train_wgan(cfg, gen, critic, data, prior);
    Run& run = runs[i];
    run.diverged = res.log.diverged;
    run.samples = evaluate(res.gen, sample_prior_points(prior, s.eval_samples, re));
    if (!run.samples.allFinite()) {
      run.diverged = true;
      run.counts.assign(s.spec.n_modes, 0);
      return;
    }
    run.counts = mode_counts(run.samples, s.spec);
    run.covered = count_covered_modes(run.samples, s.spec);
  });

  Table curves;
  curves.header = {"model", "seed", "mode", "center_x", "center_y", "count", "fraction", "covered"};
  Table seeds;
  seeds.header = {"model", "seed", "iters", "covered_modes", "n_modes", "diverged"};
  std::vector<std::size_t> wgan_cov, gan_cov;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const std::size_t r = i / K;
    const bool gan = i % K == 1;
    const Run& run = runs[i];
    const std::string model = gan ? "gan" : "wgan";
    const auto seed = static_cast<std::int64_t>(s.seeds[r]);
    for (std::size_t k = 0; k < s.spec.n_modes; ++k) {
      const auto c = s.spec.center(k);
      const double frac = static_cast<double>(run.counts[k]) / static_cast<double>(s.eval_samples);
      curves.add_row({model, seed, cell(k), c.x(), c.y(), cell(run.counts[k]), frac,
                      std::int64_t{run.counts[k] > 0 && frac >= 0.02}});
    }
    seeds.add_row({model, seed, cell((gan ? s.gan : s.wgan).generator_iters), cell(run.covered),
                   cell(s.spec.n_modes), std::int64_t{run.diverged}});
    (gan ? gan_cov : wgan_cov).push_back(run.covered);
    if (run.diverged && !gan) rep.ok = false;
  }
  Series ws{"WGAN", {}, {}}, gs{"GAN", {}, {}};
  for (std::size_t r = 0; r < s.seeds.size(); ++r) {
    ws.x.push_back(static_cast<double>(s.seeds[r]));
    ws.y.push_back(static_cast<double>(wgan_cov[r]));
    if (s.run_gan) {
      gs.x.push_back(static_cast<double>(s.seeds[r]));
      gs.y.push_back(static_cast<double>(gan_cov[r]));
    }
  }
  std::vector<Series> fig{ws};
  if (s.run_gan) fig.push_back(gs);
  rep.figures.push_back({"covered_modes", {"Covered ring modes per seed", "seed", "covered modes"}, fig});
  rep.tables.push_back({"curves", std::move(curves)});
  rep.tables.push_back({"seeds", std::move(seeds)});
  const std::size_t need = s.spec.n_modes >= 1 ? s.spec.n_modes - 1 : 0;
  rep.summary["wgan_covered"] = wgan_cov;
  rep.summary["gan_covered"] = gan_cov;
  rep.summary["wgan_seeds_with_at_least_n_minus_1"] =
      std::count_if(wgan_cov.begin(), wgan_cov.end(), [&](std::size_t c) { return c >= need; });
  return rep;
}

// ---------------------------------------------------------------- gradient check

ExperimentReport exp_gradient_check(const GradientCheckSettings& s) {
  if (s.thetas.empty() || s.seeds.empty()) throw std::invalid_argument("exp_gradient_check: empty grid");
  ExperimentReport rep;
  rep.name = "gradient-check";
  rep.seeds = s.seeds;
  rep.parameters = {{"thetas", s.thetas}, {"n_samples", s.n_samples}, {"mean", s.mean}, {"sigma", s.sigma},
                    {"fd_step", s.fd_step}, {"tolerance", s.tolerance}};
  rep.config = {{"learning_rate", s.learning_rate}, {"clip", s.clip}, {"critic_steps", s.critic_steps},
                {"optimizer", "rmsprop"}, {"critic_hidden", {64, 64}}};

  struct Point {
    double w1 = 0, dual = 0, scale = 0, critic_grad = 0, fd_grad = 0, rel_err = 0;
  };
  const std::size_t S = s.seeds.size();
  std::vector<Point> pts(s.thetas.size() * S);
  parallel_for(pts.size(), [&](std::size_t i) {
    const double theta = s.thetas[i / S];
    const Rng root(s.seeds[i % S]);
    Rng rd = root.split(10), rz = root.split(11), ri = root.split(12);
    const LatentPrior normal{PriorKind::kStandardNormal, 1};
    const Matrix data = (sample_prior_points(normal, s.n_samples, rd).array() * s.sigma + s.mean).matrix();
    const Matrix z = (sample_prior_points(normal, s.n_samples, rz).array() * s.sigma + s.mean).matrix();
    MlpNetwork critic = make_mlp({64, 64}, 1, 1, Activation::kLinear, ri);
    auto st = OptimizerState::make(OptimizerSettings::rmsprop(s.learning_rate), critic);
    const Matrix fake = z.array() + theta;
    for (std::size_t t = 0; t < s.critic_steps; ++t) {
      Objective obj = critic_objective(critic, data, fake);
      optimizer_step(critic.params, obj.critic_gradients(), st, StepDirection::kAscent);
      clip_weights_in_place(critic, s.clip);
    }
    Point& p = pts[i];
    p.dual = critic_objective(critic, data, fake).scalar();
    // d/dtheta of -mean f(z + theta) is -mean f'(z + theta).
    ForwardPass fp = forward(critic, fake);
    backward(fp, Matrix::Ones(fake.rows(), 1));
    const double raw = -fp.tape.grad(fp.input).mean();
    const auto data_m = EmpiricalMeasure::uniform(data);
    auto W = [&](double t) { return w1_exact(data_m, EmpiricalMeasure::uniform((z.array() + t).matrix())).cost; };
    p.w1 = W(theta);
    p.scale = p.dual / p.w1;
    p.critic_grad = raw / p.scale;
    p.fd_grad = (W(theta + s.fd_step) - W(theta - s.fd_step)) / (2.0 * s.fd_step);
    p.rel_err = std::abs(p.critic_grad - p.fd_grad) / std::abs(p.fd_grad);
  });

  Table t;
  t.header = {"theta", "seed", "n_samples", "w1_exact", "critic_dual", "scale_k", "critic_grad", "fd_grad",
              "abs_diff", "rel_err", "within_tolerance"};
  std::size_t passed = 0;
  double worst = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Point& p = pts[i];
    const bool ok = p.rel_err <= s.tolerance;
    passed += ok;
    worst = std::max(worst, p.rel_err);
    t.add_row({s.thetas[i / S], static_cast<std::int64_t>(s.seeds[i % S]), cell(s.n_samples), p.w1, p.dual, p.scale,
               p.critic_grad, p.fd_grad, std::abs(p.critic_grad - p.fd_grad), p.rel_err, std::int64_t{ok}});
  }
  Series rel{"relative error", {}, {}};
  for (std::size_t i = 0; i < pts.size(); ++i) {
    rel.x.push_back(static_cast<double>(i));
    rel.y.push_back(pts[i].rel_err);
  }
  rep.figures.push_back({"relative_error", {"Critic gradient vs finite difference of W1", "case", "relative error"}, {rel}});
  rep.tables.push_back({"curves", std::move(t)});
  rep.summary["cases"] = pts.size();
  rep.summary["cases_within_tolerance"] = passed;
  rep.summary["max_rel_err"] = worst;
  rep.ok = passed == pts.size();
  return rep;
}

// ---------------------------------------------------------------- EBGAN

ExperimentReport exp_ebgan_check(const EbganCheckSettings& s) {
  if (s.pairs == 0 || s.margins.empty()) throw std::invalid_argument("exp_ebgan_check: empty grid");
  if (s.max_support < 2) throw std::invalid_argument("exp_ebgan_check: max_support must be at least 2");
  ExperimentReport rep;
  rep.name = "ebgan-check";
  rep.seeds = {s.seed};
  rep.parameters = {{"pairs", s.pairs}, {"margins", s.margins}, {"random_discriminators", s.random_discriminators},
                    {"max_support", s.max_support}, {"tolerance", s.tolerance}};

  Rng rng(s.seed);
  auto random_prob = [&](std::size_t n) {
    std::vector<double> v(n);
    double sum = 0;
    for (auto& x : v) {
      x = rng.uniform() < 0.2 ? 0.0 : rng.uniform();
      sum += x;
    }
    if (sum == 0.0) {
      v[0] = 1.0;
      sum = 1.0;
    }
    for (auto& x : v) x /= sum;
    return DiscreteDistribution(v);
  };

  Table t;
  t.header = {"pair", "margin", "support", "tv", "lg_optimal", "lg_half_margin_tv", "abs_diff_half_margin_tv",
              "abs_diff_margin_tv", "ld_optimal", "ld_min_random", "ld_expected", "optimal"};
  std::size_t half_ok = 0, full_ok = 0, opt_ok = 0, total = 0;
  double worst_half = 0, worst_full = 0, worst_violation = 0;
  for (std::size_t pi = 0; pi < s.pairs; ++pi) {
    const std::size_t n = 2 + rng.below(s.max_support - 1);
    const DiscreteDistribution p = random_prob(n), q = random_prob(n);
    const double tv = tv_discrete(p, q);
    for (double margin : s.margins) {
      const EbganConfig cfg{margin};
      const auto dstar = ebgan_optimal_discriminator(p, q, cfg);
      const EbganLosses opt = ebgan_losses(dstar, p, q, cfg);
      double min_ld = std::numeric_limits<double>::infinity();
      std::vector<double> d(n);
      for (std::size_t k = 0; k < s.random_discriminators; ++k) {
        for (auto& x : d) x = rng.uniform(0.0, 2.0 * margin);
        min_ld = std::min(min_ld, ebgan_losses(d, p, q, cfg).discriminator);
      }
      const double dh = std::abs(opt.generator - 0.5 * margin * tv);
      const double df = std::abs(opt.generator - margin * tv);
      const bool optimal = opt.discriminator <= min_ld + s.tolerance;
      half_ok += dh <= s.tolerance;
      full_ok += df <= s.tolerance;
      opt_ok += optimal;
      ++total;
      worst_half = std::max(worst_half, dh);
      worst_full = std::max(worst_full, df);
      worst_violation = std::max(worst_violation, opt.discriminator - min_ld);
      t.add_row({cell(pi), margin, cell(n), tv, opt.generator, 0.5 * margin * tv, dh, df, opt.discriminator, min_ld,
                 margin - margin * tv, std::int64_t{optimal}});
    }
  }
  rep.tables.push_back({"curves", std::move(t)});

  // The two-atom example p = (1, 0), q = (0, 1), margin 2.
  const DiscreteDistribution p1({1.0, 0.0}), q1({0.0, 1.0});
  const auto d1 = ebgan_optimal_discriminator(p1, q1, {2.0});
  const auto l1 = ebgan_losses(d1, p1, q1, {2.0});
  rep.summary["two_atom_example"] = {{"d_star", d1}, {"lg", l1.generator}, {"ld", l1.discriminator}};
  rep.summary["cases"] = total;
  rep.summary["cases_lg_equals_half_margin_tv"] = half_ok;
  rep.summary["cases_lg_equals_margin_tv"] = full_ok;
  rep.summary["cases_ld_optimal"] = opt_ok;
  rep.summary["max_abs_diff_half_margin_tv"] = worst_half;
  rep.summary["max_abs_diff_margin_tv"] = worst_full;
  rep.summary["max_ld_excess_over_random"] = worst_violation;
  rep.ok = half_ok == total && opt_ok == total;
  return rep;
}

// ---------------------------------------------------------------- Adam

AdamInstabilitySettings AdamInstabilitySettings::defaults() {
  AdamInstabilitySettings s;
  s.training.optimizer = OptimizerKind::kAdam;
  s.training.adam_beta1 = 0.5;
  s.training.learning_rate = 1e-4;
  s.training.generator_iters = 1000;
  s.training.record_wallclock = false;
  return s;
}

ExperimentReport exp_adam_instability(const AdamInstabilitySettings& s) {
  if (s.seeds.empty()) throw std::invalid_argument("exp_adam_instability: no seeds");
  ExperimentReport rep;
  rep.name = "adam-instability";
  rep.seeds = s.seeds;
  rep.parameters = {{"n_modes", s.spec.n_modes}, {"radius", s.spec.radius}, {"sigma", s.spec.sigma}};
  rep.config = training_config_json(s.training);
  std::vector<RunLog> logs(s.seeds.size());
  parallel_for(logs.size(), [&](std::size_t r) {
    const Rng root(s.seeds[r]);
    Rng rd = root.split(1), ri = root.split(2);
    const EmpiricalMeasure data = make_ring_mixture(s.spec, 20000, rd);
    MlpNetwork gen = make_mlp({64, 64}, 2, 2, Activation::kLinear, ri);
    MlpNetwork critic = make_mlp({64, 64}, 2, 1, Activation::kLinear, ri);
    TrainingConfig cfg = s.training;
    cfg.seed = s.seeds[r];
    logs[r] = train_wgan(cfg, gen, critic, data, {PriorKind::kStandardNormal, 2}).log;
  });
  Table curves;
  curves.header = {"seed", "iter", "critic_loss", "gen_loss"};
  Table seeds;
  seeds.header = {"seed", "iters_completed", "diverged", "estimate_step_std"};
  std::size_t diverged = 0;
  std::vector<Series> fig;
  for (std::size_t r = 0; r < logs.size(); ++r) {
    const auto seed = static_cast<std::int64_t>(s.seeds[r]);
    const auto est = logs[r].critic_losses();
    for (const auto& e : logs[r].entries) curves.add_row({seed, cell(e.iter), e.critic_loss, e.gen_loss});
    double m = 0, v = 0;
    for (std::size_t i = 1; i < est.size(); ++i) m += est[i] - est[i - 1];
    if (est.size() > 1) m /= static_cast<double>(est.size() - 1);
    for (std::size_t i = 1; i < est.size(); ++i) v += std::pow(est[i] - est[i - 1] - m, 2);
    if (est.size() > 2) v /= static_cast<double>(est.size() - 2);
    seeds.add_row({seed, cell(est.size()), std::int64_t{logs[r].diverged}, std::sqrt(v)});
    diverged += logs[r].diverged;
    fig.push_back({"seed " + std::to_string(seed), iota_x(est.size()), est});
  }
  rep.tables.push_back({"curves", std::move(curves)});
  rep.tables.push_back({"seeds", std::move(seeds)});
  rep.figures.push_back({"critic_estimate", {"WGAN with Adam", "generator iteration", "critic estimate"}, fig});
  rep.summary["diverged_fraction"] = static_cast<double>(diverged) / static_cast<double>(logs.size());
  return rep;
}

// ---------------------------------------------------------------- output

void write_report(ExperimentReport& report, const std::string& out_dir) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::path(out_dir) / report.name;
  fs::create_directories(dir);
  report.artifacts.clear();
  for (std::size_t i = 0; i < report.tables.size(); ++i) {
    const fs::path p = dir / (i == 0 ? std::string("curves.csv") : report.tables[i].name + ".csv");
    write_csv(report.tables[i].table, p.string());
    report.artifacts.push_back(p.string());
  }
  for (const auto& f : report.figures) {
    const fs::path p = dir / (f.name + ".svg");
    render_line_chart(f.series, f.labels, p.string());
    report.artifacts.push_back(p.string());
  }
  const fs::path rp = dir / "report.json";
  report.artifacts.push_back(rp.string());

  json j;
  j["schema_version"] = 1;
  j["name"] = report.name;
  j["parameters"] = report.parameters;
  j["config"] = report.config;
  j["seeds"] = seeds_json(report.seeds);
  j["summary"] = report.summary;
  j["ok"] = report.ok;
  json names = json::array();
  for (const auto& a : report.artifacts) names.push_back(fs::path(a).filename().string());
  j["artifacts"] = names;
  write_text_file(rp.string(), j.dump(2) + "\n");
}

}  // namespace wdistlab
