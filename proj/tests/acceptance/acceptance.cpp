// Acceptance run: one PASS/FAIL line per criterion, also written to
// acceptance_report.txt in the working directory. The exit status is 0 once
// every criterion has been evaluated; a FAIL line is a result, not a crash.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gddim/error.hpp"
#include "gddim/experiment.hpp"
#include "gddim/io.hpp"
#include "gddim/oracle.hpp"
#include "gddim/sampler.hpp"
#include "gddim/trainer.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using gddim::FamilyKind;
using gddim::NoiseFamily;
using gddim::Points;
using gddim::SampleMode;
using gddim::Schedule;
using gddim::ScheduleKind;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::vector<FamilyKind> all_families() {
  return {FamilyKind::gaussian(), FamilyKind::laplace(), FamilyKind::student_t(3.0),
          FamilyKind::generalized_gaussian(1.5), FamilyKind::generalized_gaussian(2.5), FamilyKind::uniform()};
}

std::string fmt(double v) {
  std::ostringstream out;
  out << std::setprecision(4) << v;
  return out.str();
}

Points two_atoms() {
  Points a(2, 1);
  a << -1.0, 1.0;
  return a;
}

Outcome reverse_step_identity() {
  std::mt19937_64 eng(101);
  std::normal_distribution<double> n01;
  double worst = 0.0;
  for (auto kind : {ScheduleKind::Linear, ScheduleKind::Cosine}) {
    const auto sched = Schedule::build(kind, 1000);
    const NoiseFamily fam(FamilyKind::gaussian());
    gddim::Rng rng(0);
    for (int rep = 0; rep < 500; ++rep) {
      const int t = std::uniform_int_distribution<int>(1, 1000)(eng);
      const int s = std::uniform_int_distribution<int>(0, t - 1)(eng);
      const std::vector<double> x0{n01(eng), n01(eng)};
      const std::vector<double> z{n01(eng), n01(eng)};
      std::vector<double> xt(2);
      for (int j = 0; j < 2; ++j) xt[j] = sched.f(t) * x0[j] + sched.g(t) * z[j];
      const std::vector<double> zero(2, 0.0);
      const auto xs = gddim::reverse_step(xt, t, s, sched, fam, z, zero, SampleMode::MeanAndVariance, rng);
      for (int j = 0; j < 2; ++j) {
        const double expect = sched.f(s) * x0[j] + sched.g(s) * z[j];
        worst = std::max(worst, std::abs(xs[j] - expect) / std::max(1.0, std::abs(expect)));
      }
    }
  }
  return {worst <= 1e-10, "1000 tuples, max relative error " + fmt(worst) + " (tol 1e-10)"};
}

Outcome ddim_equivalence() {
  std::mt19937_64 eng(202);
  std::normal_distribution<double> n01;
  const NoiseFamily fam(FamilyKind::gaussian());
  const auto sched = Schedule::build(ScheduleKind::Linear, 1000);
  const auto& ab = sched.alpha_bar();
  gddim::Rng rng(0);
  double worst = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    const int t = std::uniform_int_distribution<int>(1, 1000)(eng);
    const int s = std::uniform_int_distribution<int>(0, t - 1)(eng);
    const std::vector<double> x{n01(eng), n01(eng)};
    const std::vector<double> eps{n01(eng), n01(eng)};
    const auto got = gddim::reverse_step(x, t, s, sched, fam, eps, {}, SampleMode::MeanOnly, rng);
    for (int j = 0; j < 2; ++j) worst = std::max(worst, std::abs(got[j] - oracle::ddim_update(x[j], eps[j], ab[t], ab[s])));
  }
  return {worst <= 1e-10, "20 step pairs, max abs error " + fmt(worst) + " (tol 1e-10)"};
}

Outcome standardization() {
  bool ok = true;
  std::ostringstream d;
  std::uint64_t seed = 3000;
  for (const auto& kind : all_families()) {
    gddim::Rng rng(seed++);
    const auto z = gddim::sample_standard(kind, rng, 1'000'000);
    double m = 0.0;
    for (double v : z) m += v;
    m /= static_cast<double>(z.size());
    double var = 0.0;
    for (double v : z) var += (v - m) * (v - m);
    var /= static_cast<double>(z.size());

    auto ks_draws = gddim::sample_standard(kind, rng, 100'000);
    std::sort(ks_draws.begin(), ks_draws.end());
    const NoiseFamily fam(kind);
    auto density = [&fam](double v) { return std::exp(fam.log_pdf(v)); };
    const double lower =
        kind.tag == FamilyKind::Tag::Uniform ? -std::sqrt(3.0) : -std::numeric_limits<double>::infinity();
    const auto ks = oracle::ks_one_sample(oracle::quadrature_cdf(density, ks_draws, lower));
    const bool fam_ok = std::abs(m) < 0.01 && std::abs(var - 1.0) < 0.02 && ks.p_value > 0.01;
    ok = ok && fam_ok;
    d << kind.name() << "[m=" << fmt(m) << " v=" << fmt(var) << " ks_p=" << fmt(ks.p_value) << "] ";
  }
  return {ok, d.str()};
}

Outcome round_trips() {
  std::mt19937_64 eng(404);
  std::uniform_real_distribution<double> loc(-20.0, 20.0);
  std::uniform_real_distribution<double> log_scale(-6.0, 4.0);
  double worst = 0.0;
  for (const auto& kind : all_families()) {
    const NoiseFamily fam(kind);
    for (int i = 0; i < 1000; ++i) {
      const gddim::LocScale p{loc(eng), std::exp(log_scale(eng))};
      const auto m = fam.locscale_to_moments(p);
      const auto q = fam.moments_to_locscale(m.mean, m.variance);
      worst = std::max({worst, std::abs(q.loc - p.loc) / std::max(std::abs(p.loc), 1e-300),
                        std::abs(q.scale - p.scale) / p.scale});
    }
  }
  return {worst <= 1e-12, "6000 parameters, max relative error " + fmt(worst) + " (tol 1e-12)"};
}

Outcome gradients() {
  gddim::Architecture arch;
  auto net = gddim::Approximator::initialized(arch, 505);
  const auto sched = Schedule::build(ScheduleKind::Linear, 1000);
  const NoiseFamily fam(FamilyKind::gaussian());
  std::mt19937_64 eng(5);
  std::normal_distribution<double> n01;
  Points x0(16, 2);
  for (Eigen::Index i = 0; i < x0.size(); ++i) x0.data()[i] = n01(eng);

  auto loss_at = [&](std::span<double> grad) {
    gddim::Rng rng(77);
    return gddim::mom_loss(net, x0, sched, fam, rng, false, grad).total();
  };
  std::vector<double> grad(net.parameter_count());
  loss_at(grad);
  std::uniform_int_distribution<std::size_t> pick(0, net.parameter_count() - 1);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const std::size_t i = pick(eng);
    auto p = net.parameters();
    const double saved = p[i];
    p[i] = saved + 1e-5;
    const double up = loss_at({});
    p[i] = saved - 1e-5;
    const double down = loss_at({});
    p[i] = saved;
    const double fd = (up - down) / 2e-5;
    worst = std::max(worst, std::abs(fd - grad[i]) / std::max({std::abs(fd), std::abs(grad[i]), 1e-6}));
  }

  // Stop-gradient: loss_var alone must send nothing into the mean head.
  gddim::Approximator::Tape tape;
  std::vector<int> ts(16);
  for (int i = 0; i < 16; ++i) ts[i] = 1 + 61 * i;
  Points z(16, 2);
  for (Eigen::Index i = 0; i < z.size(); ++i) z.data()[i] = n01(eng);
  net.forward(x0, ts, 1000, tape);
  const Points mean = tape.mean.transpose();
  const Points var = tape.variance.transpose();
  Eigen::MatrixXd dm_total, dv;
  gddim::mom_loss_from_predictions(z, mean, var, true, &dm_total, &dv);
  Eigen::MatrixXd dm_mu(2, 16);
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 2; ++j) dm_mu(j, i) = -2.0 * (z(i, j) - mean(i, j)) / 32.0;
  std::vector<double> gvar(net.parameter_count());
  net.backward(tape, dm_total - dm_mu, dv, gvar);
  std::size_t off = 0;
  int in = arch.input_dim();
  for (int w : arch.hidden) {
    off += static_cast<std::size_t>(w) * in + w;
    in = w;
  }
  double leak = 0.0;
  for (std::size_t k = off; k < off + static_cast<std::size_t>(in) * 2 + 2; ++k) leak = std::max(leak, std::abs(gvar[k]));

  return {worst < 1e-4 && leak == 0.0,
          "100 coordinates, max relative error " + fmt(worst) + " (tol 1e-4); mean-head gradient from loss_var " +
              fmt(leak)};
}

Outcome oracle_recovery() {
  const auto sched = Schedule::build(ScheduleKind::Linear, 1000);
  const gddim::AtomicDistribution dist(two_atoms());
  bool ok = true;
  std::ostringstream d;
  for (const auto& kind : {FamilyKind::gaussian(), FamilyKind::laplace()}) {
    const NoiseFamily fam(kind);
    const gddim::OracleMomentSource src(dist, sched, fam);
    const auto b = gddim::sample(10'000, sched, fam, src, SampleMode::MeanAndVariance, 100, 606);
    int near_plus = 0;
    double dist_sum = 0.0;
    for (Eigen::Index i = 0; i < b.points.rows(); ++i) {
      const double x = b.points(i, 0);
      near_plus += std::abs(x - 1.0) <= 0.1;
      dist_sum += std::min(std::abs(x - 1.0), std::abs(x + 1.0));
    }
    const double w = near_plus / 10'000.0;
    const double md = dist_sum / 10'000.0;
    ok = ok && std::abs(w - 0.5) <= 0.02 && md < 0.05;
    d << kind.name() << "[weight(+1)=" << fmt(w) << " mean_dist=" << fmt(md) << "] ";
  }
  return {ok, d.str() + "(tol 0.5+-0.02, < 0.05)"};
}

Outcome learned_vs_oracle() {
  gddim::TrainConfig cfg;
  cfg.family = FamilyKind::gaussian();
  cfg.schedule = ScheduleKind::Linear;
  cfg.iterations = 5000;
  cfg.seed = 707;
  const auto trained = gddim::train(cfg, two_atoms());
  const auto& net = trained.checkpoint.net;
  const auto sched = Schedule::build(cfg.schedule, cfg.T);
  const NoiseFamily fam(cfg.family);
  const gddim::AtomicDistribution dist(two_atoms());
  double se = 0.0;
  int n = 0;
  for (int t = 50; t <= 1000; t += 50) {
    const gddim::HeadScaling hs{sched.f(t), sched.g(t)};
    for (double a : {-1.0, 1.0}) {
      for (int k = 0; k <= 20; ++k) {
        const double z = -2.0 + 0.2 * k;
        const std::vector<double> x{sched.f(t) * a + sched.g(t) * z};
        const double pred = hs.mean(x[0], net.forward(x, t, cfg.T).mean[0]);
        const double exact = gddim::oracle_moments(dist, x, t, sched, fam).mean[0];
        se += (pred - exact) * (pred - exact);
        ++n;
      }
    }
  }
  const double mse = se / n;
  return {mse < 0.01, "grid MSE " + fmt(mse) + " over " + std::to_string(n) + " points (tol 0.01)"};
}

Outcome table_ordering(const fs::path& dir) {
  fs::remove_all(dir);
  gddim::ExperimentSpec spec;
  spec.cells = gddim::default_grid();
  spec.output_dir = dir;
  const auto res = gddim::run_experiment(spec);
  std::map<std::pair<std::string, std::string>, double> sw;
  for (const auto& c : res.cells) {
    if (c.report) sw[{c.cell.family.name(), gddim::to_string(c.cell.schedule)}] = c.report->sliced_wasserstein;
  }
  bool ok = res.all_succeeded();
  std::ostringstream d;
  for (const char* s : {"linear", "cosine"}) {
    auto get = [&](const char* f) {
      const auto it = sw.find({f, s});
      return it == sw.end() ? std::numeric_limits<double>::infinity() : it->second;
    };
    const double g = get("gaussian");
    const bool vs_u = g < get("uniform");
    const bool vs_t = g < get("student_t:3");
    ok = ok && vs_u && vs_t;
    d << s << "[gaussian=" << fmt(g) << " uniform=" << fmt(get("uniform")) << (vs_u ? " ok" : " VIOLATED")
      << " student_t:3=" << fmt(get("student_t:3")) << (vs_t ? " ok" : " VIOLATED") << " | laplace=" << fmt(get("laplace"))
      << " gg:1.5=" << fmt(get("gg:1.5")) << " gg:2.5=" << fmt(get("gg:2.5")) << "] ";
  }
  return {ok, d.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_tool(const std::string& args) {
  const std::string cmd = std::string("\"") + GDDIM_TOOL_PATH + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome determinism(const fs::path& dir) {
  fs::remove_all(dir);
  fs::create_directories(dir);
  int compared = 0;
  std::vector<std::string> mismatched;
  auto same = [&](const fs::path& a, const fs::path& b) {
    ++compared;
    if (!fs::exists(a) || slurp(a) != slurp(b)) mismatched.push_back(a.filename().string());
  };

  // Library grid run twice from the same manifest.
  gddim::ExperimentSpec spec;
  spec.cells = gddim::default_grid();
  spec.iterations = 200;
  spec.n_samples = 2000;
  spec.n_reference = 2000;
  int failed_cells = 0;
  for (const char* run : {"grid_a", "grid_b"}) {
    spec.output_dir = dir / run;
    for (const auto& c : gddim::run_experiment(spec).cells) failed_cells += !c.report;
  }
  for (const auto& entry : fs::recursive_directory_iterator(dir / "grid_a")) {
    if (!entry.is_regular_file()) continue;
    same(entry.path(), dir / "grid_b" / fs::relative(entry.path(), dir / "grid_a"));
  }

  // Every command run twice.
  const auto q = [](const fs::path& p) { return "\"" + p.string() + "\""; };
  {
    std::ofstream cfg(dir / "train.cfg");
    cfg << "family = gg:1.5\nschedule = cosine\niterations = 300\nseed = 9\n";
    std::ofstream atoms(dir / "atoms.csv");
    atoms << "x0,x1,weight\n-1,0,0.3\n1,1,0.7\n";
  }
  int bad_status = 0;
  for (const char* r : {"a", "b"}) {
    const std::string s(r);
    bad_status += run_tool("train --quiet --config " + q(dir / "train.cfg") + " --out " + q(dir / (s + ".gddm")) +
                           " --loss-log " + q(dir / (s + "_loss.csv"))) != 0;
    bad_status += run_tool("sample --checkpoint " + q(dir / "a.gddm") + " --n 2000 --seed 4 --out " +
                           q(dir / (s + "_samples.csv"))) != 0;
    bad_status += run_tool("eval --generated " + q(dir / "a_samples.csv") + " --reference " +
                           q(dir / "grid_a" / "reference.csv") + " --out " + q(dir / (s + "_metrics.json"))) != 0;
    bad_status += run_tool("oracle --atoms " + q(dir / "atoms.csv") + " --family laplace --n-samples 500 --out " +
                           q(dir / (s + "_oracle.csv"))) != 0;
  }
  for (const char* f : {".gddm", "_loss.csv", "_samples.csv", "_metrics.json", "_oracle.csv"}) {
    same(dir / (std::string("a") + f), dir / (std::string("b") + f));
  }
  // manifest, reference and results, four files per cell, five command outputs
  const int expected = 3 + 4 * static_cast<int>(spec.cells.size()) + 5;
  std::ostringstream d;
  d << compared << " artifacts compared (expected " << expected << "), " << mismatched.size() << " differ, "
    << failed_cells << " failed cells, " << bad_status << " failed commands";
  for (const auto& m : mismatched) d << " [" << m << "]";
  return {mismatched.empty() && failed_cells == 0 && bad_status == 0 && compared == expected, d.str()};
}

}  // namespace

int main() {
  const fs::path work = fs::current_path() / "acceptance_work";
  fs::create_directories(work);
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "reverse-step identity", 1, reverse_step_identity},
      {2, "DDIM equivalence", 1, ddim_equivalence},
      {3, "standardization and sampler KS", 30, standardization},
      {4, "moment-map round trips", 60, round_trips},
      {5, "gradient correctness", 60, gradients},
      {6, "oracle recovery", 120, oracle_recovery},
      {7, "learned vs oracle", 300, learned_vs_oracle},
      {8, "family ordering on ring8", 1800, [&] { return table_ordering(work / "grid"); }},
      {9, "determinism", 600, [&] { return determinism(work / "determinism"); }},
  };

  std::ofstream report(fs::current_path() / "acceptance_report.txt");
  int passed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= c.budget_s;
    const bool pass = o.pass && in_time;
    passed += pass;
    std::ostringstream line;
    line << "criterion " << c.id << " " << (pass ? "PASS" : "FAIL") << " " << c.name << ": " << o.detail << "; "
         << fmt(secs) << " s (budget " << c.budget_s << " s" << (in_time ? "" : ", EXCEEDED") << ")";
    std::cout << line.str() << std::endl;
    report << line.str() << '\n';
  }
  std::cout << passed << "/" << criteria.size() << " criteria passed" << std::endl;
  report << passed << "/" << criteria.size() << " criteria passed\n";
  return 0;
}
