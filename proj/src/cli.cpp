#include "wdistlab/cli.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <system_error>

#include "CLI11.hpp"
#include "wdistlab/distances.hpp"
#include "wdistlab/experiments.hpp"
#include "wdistlab/numfmt.hpp"

namespace wdistlab {
namespace {

double to_real(const std::string& flag, const std::string& text) {
  double v = 0;
  try {
    v = parse_double(text);
  } catch (const std::invalid_argument&) {
    throw CliError("malformed number for " + flag + ": '" + text + "'", kExitBadNumber);
  }
  return v;
}

std::uint64_t to_count(const std::string& flag, const std::string& text) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec == std::errc() && p == text.data() + text.size()) return v;
  // Well-formed but not a nonnegative integer (e.g. -1, 2.5) is a value error.
  to_real(flag, text);
  throw CliError("invalid value for " + flag + ": expected a nonnegative integer, got '" + text + "'", kExitBadValue);
}

double positive_real(const std::string& flag, const std::string& text) {
  const double v = to_real(flag, text);
  if (!(v > 0.0) || !std::isfinite(v))
    throw CliError("invalid value for " + flag + ": must be > 0, got '" + text + "'", kExitBadValue);
  return v;
}

std::size_t at_least(const std::string& flag, const std::string& text, std::uint64_t lo) {
  const std::uint64_t v = to_count(flag, text);
  if (v < lo)
    throw CliError("invalid value for " + flag + ": must be >= " + std::to_string(lo) + ", got '" + text + "'",
                   kExitBadValue);
  return static_cast<std::size_t>(v);
}

void check_out_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw CliError("out-dir not writable: " + dir, kExitOutDir);
  const fs::path probe = fs::path(dir) / ".wdistlab-write-probe";
  {
    std::ofstream f(probe);
    if (!f) throw CliError("out-dir not writable: " + dir, kExitOutDir);
  }
  fs::remove(probe, ec);
}

struct RawFlags {
  std::string out_dir = "out";
  std::string seed, lr, clip, batch, n_critic, iters, optimizer, warmup;
  std::string n_seeds, checkpoints, pairs, n_atoms, bandwidth;
  bool no_plots = false;
};

void add_common(CLI::App* sub, RawFlags& f, bool training) {
  sub->add_option("--out-dir", f.out_dir, "Output directory");
  sub->add_option("--seed", f.seed, "Base seed (64-bit unsigned)");
  sub->add_flag("--no-plots", f.no_plots, "Skip SVG output");
  if (!training) return;
  sub->add_option("--lr", f.lr, "Learning rate");
  sub->add_option("--clip", f.clip, "Weight clipping bound c");
  sub->add_option("--batch-size", f.batch, "Batch size m");
  sub->add_option("--n-critic", f.n_critic, "Critic steps per generator step");
  sub->add_option("--iters", f.iters, "Generator iterations (training steps)");
  sub->add_option("--optimizer", f.optimizer, "rmsprop or adam");
  sub->add_option("--critic-warmup", f.warmup, "Generator steps with extended critic training");
  sub->add_option("--seeds", f.n_seeds, "Number of seeds, starting at --seed");
}

std::vector<std::uint64_t> seed_range(std::uint64_t base, std::size_t n) {
  std::vector<std::uint64_t> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = base + i;
  return s;
}

void warn_unused(const CliConfig& c, std::ostream& err, bool n_critic, bool optimizer, bool warmup, bool batch) {
  const auto& o = c.overrides;
  auto note = [&](const char* flag) { err << "note: " << flag << " has no effect for " << c.subcommand << "\n"; };
  if (!n_critic && o.n_critic) note("--n-critic");
  if (!optimizer && o.optimizer) note("--optimizer");
  if (!warmup && o.critic_warmup) note("--critic-warmup");
  if (!batch && o.batch_size) note("--batch-size");
}

int run_distances(const CliConfig& c, std::ostream& out) {
  const EmpiricalMeasure p = read_measure_csv(c.p_path);
  const EmpiricalMeasure q = read_measure_csv(c.q_path);
  double value = 0;
  if (c.metric == "w1") {
    const TransportPlan plan = w1_exact(p, q);
    value = plan.cost;
    if (!c.plan_path.empty()) write_csv(transport_plan_table(plan), c.plan_path);
  } else if (c.metric == "mmd") {
    value = mmd_squared(p, q, {KernelKind::kGaussian, c.bandwidth});
  } else {
    const auto [a, b] = align_on_union_support(p, q);
    value = c.metric == "tv" ? tv_discrete(a, b) : c.metric == "kl" ? kl_discrete(a, b) : js_discrete(a, b);
  }
  out << format_double(value) << "\n";
  return kExitOk;
}

}  // namespace

bool TrainingOverrides::empty() const {
  return !learning_rate && !clip && !batch_size && !n_critic && !iters && !optimizer && !critic_warmup;
}

void TrainingOverrides::apply(TrainingConfig& cfg) const {
  if (learning_rate) cfg.learning_rate = *learning_rate;
  if (clip) cfg.clip = *clip;
  if (batch_size) cfg.batch_size = *batch_size;
  if (n_critic) cfg.n_critic = *n_critic;
  if (iters) cfg.generator_iters = *iters;
  if (optimizer) cfg.optimizer = *optimizer;
  if (critic_warmup) cfg.critic_warmup_iters = *critic_warmup;
}

TrainingConfig CliConfig::training() const {
  TrainingConfig cfg;
  overrides.apply(cfg);
  cfg.seed = seed;
  return cfg;
}

CliConfig parse_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"wdistlab"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return parse_cli(static_cast<int>(argv.size()), argv.data());
}

CliConfig parse_cli(int argc, const char* const* argv) {
  CLI::App app{"Wasserstein GAN laboratory: exact distances and toy-scale experiments", "wdistlab"};
  app.require_subcommand(1, 1);
  RawFlags f;
  CliConfig cfg;

  auto* dist = app.add_subcommand("distances", "Distance between two measures given as CSV");
  add_common(dist, f, false);
  dist->add_option("--p", cfg.p_path, "First measure (CSV w,x0,...)")->required();
  dist->add_option("--q", cfg.q_path, "Second measure")->required();
  dist->add_option("--metric", cfg.metric, "tv, kl, js, w1 or mmd")
      ->required()
      ->check(CLI::IsMember({"tv", "kl", "js", "w1", "mmd"}));
  dist->add_option("--bandwidth", f.bandwidth, "Gaussian kernel bandwidth for mmd");
  dist->add_option("--plan", cfg.plan_path, "Write the optimal coupling (w1) as CSV i,j,mass");

  auto* lines = app.add_subcommand("parallel-lines", "Distances between parallel lines and WGAN on them");
  add_common(lines, f, true);
  lines->add_option("--n-atoms", f.n_atoms, "Atoms per line");

  auto* tg = app.add_subcommand("two-gaussians", "Discriminator vs critic on two fixed Gaussians");
  add_common(tg, f, true);

  auto* lc = app.add_subcommand("loss-correlation", "Loss estimates against sample quality");
  add_common(lc, f, true);
  lc->add_option("--target", cfg.target, "lines or ring")->check(CLI::IsMember({"lines", "ring"}));
  lc->add_option("--checkpoints", f.checkpoints, "Quality checkpoints per run");

  auto* mc = app.add_subcommand("mode-coverage", "Ring mixture mode coverage, WGAN vs GAN");
  add_common(mc, f, true);

  auto* gc = app.add_subcommand("gradient-check", "Critic gradient against finite differences of W1");
  add_common(gc, f, true);

  auto* eb = app.add_subcommand("ebgan-check", "Optimal EBGAN discriminator against total variation");
  add_common(eb, f, false);
  eb->add_option("--pairs", f.pairs, "Random discrete pairs");

  auto* ad = app.add_subcommand("adam-instability", "WGAN trained with Adam (report only)");
  add_common(ad, f, true);

  if (argc > 1 && argv[1][0] != '-' && !app.get_subcommand_no_throw(argv[1]))
    throw CliError(std::string("unknown subcommand: ") + argv[1], kExitUnknownFlag);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    throw CliError(app.help(), kExitOk);
  } catch (const CLI::ExtrasError& e) {
    throw CliError(std::string("unknown flag: ") + e.what(), kExitUnknownFlag);
  } catch (const CLI::ParseError& e) {
    throw CliError(std::string("invalid arguments: ") + e.what(), kExitBadValue);
  }
  cfg.subcommand = app.get_subcommands().front()->get_name();

  cfg.out_dir = f.out_dir;
  cfg.plots = !f.no_plots;
  if (!f.seed.empty()) cfg.seed = to_count("--seed", f.seed);
  auto& o = cfg.overrides;
  if (!f.lr.empty()) o.learning_rate = positive_real("--lr", f.lr);
  if (!f.clip.empty()) o.clip = positive_real("--clip", f.clip);
  if (!f.batch.empty()) o.batch_size = at_least("--batch-size", f.batch, 1);
  if (!f.n_critic.empty()) o.n_critic = at_least("--n-critic", f.n_critic, 1);
  if (!f.iters.empty()) o.iters = at_least("--iters", f.iters, 1);
  if (!f.warmup.empty()) o.critic_warmup = at_least("--critic-warmup", f.warmup, 0);
  if (!f.optimizer.empty()) {
    if (f.optimizer != "rmsprop" && f.optimizer != "adam")
      throw CliError("invalid value for --optimizer: expected rmsprop or adam, got '" + f.optimizer + "'",
                     kExitBadValue);
    o.optimizer = parse_optimizer(f.optimizer);
  }
  if (!f.n_seeds.empty()) cfg.n_seeds = at_least("--seeds", f.n_seeds, 1);
  if (!f.checkpoints.empty()) cfg.checkpoints = at_least("--checkpoints", f.checkpoints, 10);
  if (!f.pairs.empty()) cfg.pairs = at_least("--pairs", f.pairs, 1);
  if (!f.n_atoms.empty()) cfg.n_atoms = at_least("--n-atoms", f.n_atoms, 2);
  if (!f.bandwidth.empty()) cfg.bandwidth = positive_real("--bandwidth", f.bandwidth);

  if (cfg.subcommand != "distances") check_out_dir(cfg.out_dir);
  return cfg;
}

int run_cli(const CliConfig& c, std::ostream& out, std::ostream& err) {
  try {
    if (c.subcommand == "distances") return run_distances(c, out);

    const auto& o = c.overrides;
    ExperimentReport rep;
    if (c.subcommand == "parallel-lines") {
      auto s = ParallelLinesSettings::defaults();
      s.n_atoms = c.n_atoms;
      s.seeds = seed_range(c.seed, c.n_seeds.value_or(5));
      o.apply(s.training);
      rep = exp_parallel_lines(s);
    } else if (c.subcommand == "two-gaussians") {
      warn_unused(c, err, false, false, false, true);
      auto s = TwoGaussiansSettings::defaults();
      s.seeds = seed_range(c.seed, c.n_seeds.value_or(3));
      if (o.learning_rate) s.disc_learning_rate = s.critic_learning_rate = *o.learning_rate;
      if (o.clip) s.clip = *o.clip;
      if (o.batch_size) s.batch_size = *o.batch_size;
      if (o.iters) s.train_iters = *o.iters;
      rep = exp_two_gaussians(s);
    } else if (c.subcommand == "loss-correlation") {
      auto s = LossCorrelationSettings::defaults(c.target == "ring" ? CorrelationTarget::kRing
                                                                    : CorrelationTarget::kLines);
      s.seeds = seed_range(c.seed, c.n_seeds.value_or(3));
      s.checkpoints = c.checkpoints;
      o.apply(s.wgan);
      TrainingOverrides go = o;
      go.n_critic.reset();
      go.apply(s.gan);
      rep = exp_loss_correlation(s);
    } else if (c.subcommand == "mode-coverage") {
      auto s = ModeCoverageSettings::defaults();
      s.seeds = seed_range(c.seed, c.n_seeds.value_or(5));
      o.apply(s.wgan);
      TrainingOverrides go = o;
      go.n_critic.reset();
      go.apply(s.gan);
      rep = exp_mode_coverage(s);
    } else if (c.subcommand == "gradient-check") {
      warn_unused(c, err, false, false, false, false);
      auto s = GradientCheckSettings::defaults();
      s.seeds = seed_range(c.seed, c.n_seeds.value_or(3));
      if (o.learning_rate) s.learning_rate = *o.learning_rate;
      if (o.clip) s.clip = *o.clip;
      if (o.iters) s.critic_steps = *o.iters;
      rep = exp_gradient_check(s);
    } else if (c.subcommand == "ebgan-check") {
      auto s = EbganCheckSettings::defaults();
      s.seed = c.seed;
      s.pairs = c.pairs;
      rep = exp_ebgan_check(s);
    } else if (c.subcommand == "adam-instability") {
      auto s = AdamInstabilitySettings::defaults();
      s.seeds = seed_range(c.seed, c.n_seeds.value_or(3));
      o.apply(s.training);
      rep = exp_adam_instability(s);
    } else {
      err << "error: unknown subcommand " << c.subcommand << "\n";
      return kExitBadValue;
    }
    if (!c.plots) rep.figures.clear();
    write_report(rep, c.out_dir);
    out << rep.name << ": " << rep.summary.dump() << "\n";
    out << "wrote " << (std::filesystem::path(c.out_dir) / rep.name).string() << "\n";
    if (!rep.ok) {
      err << rep.name << ": run finished but a checked invariant did not hold\n";
      return kExitFailed;
    }
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CliConfig cfg;
  try {
    cfg = parse_cli(argc, argv);
  } catch (const CliError& e) {
    (e.exit_code() == kExitOk ? out : err) << e.what() << (e.exit_code() == kExitOk ? "" : "\n");
    return e.exit_code();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return run_cli(cfg, out, err);
}

}  // namespace wdistlab
