// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. `acceptance --update-golden` rewrites the pipeline golden
// hashes from a fresh run (use only after checking that run by hand).

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bannerforge/compositor.hpp"
#include "bannerforge/ctr_ranker.hpp"
#include "bannerforge/ga_optimizer.hpp"
#include "bannerforge/hash.hpp"
#include "bannerforge/layout_energy.hpp"
#include "bannerforge/metrics.hpp"
#include "bannerforge/raster.hpp"
#include "bannerforge/synthetic.hpp"
#include "bannerforge/weight_calibration.hpp"
#include "json.hpp"
#include "oracles.hpp"
#include "problems.hpp"

using namespace bannerforge;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

/// Collects failed checks; the criterion passes when none failed.
struct Checks {
  std::vector<std::string> failures;
  std::ostringstream notes;
  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  void near(double got, double want, double tol, const std::string& what) {
    if (!(std::fabs(got - want) <= tol)) {
      std::ostringstream s;
      s.precision(12);
      s << what << ": got " << got << ", want " << want << " +- " << tol;
      failures.push_back(s.str());
    }
  }
};

std::string fmt(double v, int prec = 4) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(prec);
  s << v;
  return s.str();
}

ElementBox mov(ElementKind k, BBox b) { return {k, b, true, std::nullopt}; }
ElementBox fix(ElementKind k, BBox b, std::optional<BBox> f = std::nullopt) { return {k, b, false, f}; }

// ------------------------------------------------------------------ AC1

void ac1(Checks& c) {
  const auto t0 = Clock::now();
  constexpr double tol = 1e-9;
  SizeBounds loose;
  loose.logo = {1, 1000, 1, 1000};
  loose.text = {1, 1000, 1, 1000};

  c.near(overlap_fraction({0, 0, 1, 1}, {2, 2, 3, 3}), 0.0, tol, "overlap disjoint");
  c.near(overlap_fraction({5, 5, 9, 8}, {5, 5, 9, 8}), 1.0, tol, "overlap identical");
  c.near(overlap_fraction({0, 0, 2, 2}, {1, 0, 3, 2}), oracle::pixel_iou({0, 0, 2, 2}, {1, 0, 3, 2}), tol, "overlap 2/6");

  c.near(overlap_energy({400, 200, {mov(ElementKind::logo, {0, 0, 10, 10}), mov(ElementKind::text, {20, 20, 40, 40})}}), 0,
         tol, "overlap_energy disjoint");
  c.near(overlap_energy({400, 200, {mov(ElementKind::logo, {0, 0, 10, 10}), mov(ElementKind::text, {0, 0, 10, 10})}}), 1,
         tol, "overlap_energy stacked");
  c.near(overlap_energy({400, 200, {fix(ElementKind::person, {200, 100, 300, 200}), mov(ElementKind::logo, {0, 0, 20, 10}),
                                    mov(ElementKind::text, {0, 0, 10, 10})}}),
         0.5 / 3, tol, "overlap_energy three elements");

  c.near(center_distance({0, 0, 4, 4}, {0, 0, 4, 4}), 0, tol, "distance identical");
  c.near(center_distance({-1, -1, 1, 1}, {2, 3, 4, 5}), 5, tol, "distance 3-4-5");
  c.near(center_distance({0, 0, 2, 2}, {0, 8, 2, 10}), 8, tol, "distance axis");

  const double dref = 0.25 * std::hypot(400.0, 200.0);
  c.near(distance_energy({400, 200, {mov(ElementKind::logo, {10, 10, 30, 30}), mov(ElementKind::text, {0, 0, 40, 40})}}), 1,
         tol, "distance_energy coincident");
  c.near(distance_energy({400, 200, {mov(ElementKind::logo, {0, 0, 10, 10}), mov(ElementKind::text, {390, 190, 400, 200})}}),
         0, tol, "distance_energy far");
  c.near(distance_energy({400, 200, {mov(ElementKind::logo, {0, 0, 10, 10}), mov(ElementKind::text, {dref / 2, 0, dref / 2 + 10, 10})}}),
         0.5, tol, "distance_energy half");

  c.near(horizontal_asymmetry({100, 0, 300, 1}, 400), 0, tol, "asymmetry centered");
  c.near(horizontal_asymmetry({0, 0, 100, 1}, 400), 300, tol, "asymmetry left");
  c.near(horizontal_asymmetry({300, 0, 400, 1}, 400), 300, tol, "asymmetry right");

  c.near(symmetry_energy({400, 200, {mov(ElementKind::logo, {150, 0, 250, 40}), mov(ElementKind::text, {100, 50, 300, 90})}}), 0,
         tol, "symmetry centered");
  c.near(symmetry_energy({400, 200, {mov(ElementKind::text, {0, 0, 100, 40})}}), 0.75, tol, "symmetry flush left");

  c.near(misalignment_energy({100, 100, {mov(ElementKind::text, {10, 0, 40, 10}), mov(ElementKind::text, {10, 20, 80, 30})}}), 0,
         tol, "misalignment shared left");
  c.near(misalignment_energy({100, 100, {mov(ElementKind::text, {40, 0, 60, 10}), mov(ElementKind::logo, {30, 20, 70, 30})}}), 0,
         tol, "misalignment shared center");
  c.near(misalignment_energy({100, 100, {mov(ElementKind::logo, {0, 0, 20, 10}), mov(ElementKind::text, {10, 20, 70, 30})}}), 0.05,
         tol, "misalignment 10/30/50");

  SizeBounds fb;
  fb.logo = {50, 120, 25, 60};
  fb.text = {50, 300, 20, 100};
  c.expect(feasible({400, 200, {mov(ElementKind::logo, {10, 10, 90, 50})}}, fb), "feasible logo");
  c.expect(!feasible({400, 200, {mov(ElementKind::text, {300, 10, 410, 50})}}, fb), "infeasible off-canvas");
  c.expect(!feasible({400, 200, {mov(ElementKind::logo, {10, 10, 50, 50})}}, fb), "infeasible narrow logo");

  const Layout two{400, 200, {mov(ElementKind::logo, {0, 0, 100, 50}), mov(ElementKind::text, {50, 25, 250, 75})}};
  c.near(total_energy({400, 200, {mov(ElementKind::logo, {0, 0, 10, 10}), mov(ElementKind::text, {20, 20, 40, 40})}}, {0, 1, 0, 0},
                      loose).total,
         0, tol, "total overlap-only disjoint");
  const auto e1 = total_energy(two, {1, 1, 1, 1}, loose);
  const auto e2 = total_energy(two, {2, 2, 2, 2}, loose);
  c.near(e2.total, 2 * e1.total, tol, "total doubles with weights");
  const double hand = 1250.0 / 13750.0 + (1 - std::hypot(100.0, 25.0) / dref) + 0.5 + 0.0625;
  c.near(e1.total, hand, tol, "total hand sum");

  std::mt19937 g(2024);
  std::uniform_int_distribution<int> coord(0, 64);
  int pairs = 0;
  while (pairs < 500) {
    oracle::IntBox a{coord(g), coord(g), coord(g), coord(g)}, b{coord(g), coord(g), coord(g), coord(g)};
    if (a.l == a.r || a.t == a.b || b.l == b.r || b.t == b.b) continue;
    for (auto* x : {&a, &b}) {
      if (x->l > x->r) std::swap(x->l, x->r);
      if (x->t > x->b) std::swap(x->t, x->b);
    }
    const double f = overlap_fraction({double(a.l), double(a.t), double(a.r), double(a.b)},
                                      {double(b.l), double(b.t), double(b.r), double(b.b)});
    c.near(f, oracle::pixel_iou(a, b), tol, "pixel oracle pair " + std::to_string(pairs));
    ++pairs;
  }
  const double secs = seconds_since(t0);
  c.expect(secs < 5.0, "runtime " + fmt(secs) + " s >= 5 s");
  c.notes << "all examples at 1e-9, 500 pixel-oracle pairs, " << fmt(secs, 3) << " s";
}

// ------------------------------------------------------------------ AC2

void ac2(Checks& c) {
  double worst = 0.0, worst_cont = 0.0, slowest = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto p = fixtures::seeded_problem(seed);
    const auto oracle = brute_force_layout(p, 16);
    GAConfig cfg;
    cfg.rng_seed = seed;
    cfg.lattice_steps = 16;
    auto t0 = Clock::now();
    const auto lattice = evolve(p, cfg);
    slowest = std::max(slowest, seconds_since(t0));
    cfg.lattice_steps = 0;
    t0 = Clock::now();
    const auto cont = evolve(p, cfg);
    slowest = std::max(slowest, seconds_since(t0));
    const double rel = std::fabs(lattice.best_energy - oracle.energy) / oracle.energy;
    const double rel_cont = (cont.best_energy - oracle.energy) / oracle.energy;
    worst = std::max(worst, rel);
    worst_cont = std::max(worst_cont, rel_cont);
    c.expect(rel <= 0.02, "seed " + std::to_string(seed) + ": lattice GA " + fmt(lattice.best_energy, 6) + " vs oracle " +
                              fmt(oracle.energy, 6));
    c.expect(rel_cont <= 0.02, "seed " + std::to_string(seed) + ": continuous GA " + fmt(cont.best_energy, 6) +
                                   " vs oracle " + fmt(oracle.energy, 6));
  }
  c.expect(slowest < 10.0, "slowest GA run " + fmt(slowest) + " s");
  c.notes << "worst gap lattice " << fmt(100 * worst, 3) << "%, continuous " << fmt(100 * worst_cont, 3)
          << "% (negative = below lattice optimum), slowest run " << fmt(slowest, 3) << " s";
}

// ------------------------------------------------------------------ AC3

void ac3(Checks& c) {
  auto p = fixtures::reference_problem();
  p.bounds.logo = {50, 120, 25, 60};
  p.bounds.text = {100, 240, 30, 80};
  int monotone = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    GAConfig cfg;
    cfg.rng_seed = seed;
    const auto a = evolve(p, cfg);
    bool ok = true;
    for (std::size_t g = 1; g < a.history.size(); ++g) ok = ok && a.history[g].best_energy <= a.history[g - 1].best_energy;
    monotone += ok;
    c.expect(ok, "history increases for seed " + std::to_string(seed));
    const auto b = evolve(p, cfg);
    const bool same = a.history == b.history && a.best_layout == b.best_layout && a.best_energy == b.best_energy &&
                      a.final_population == b.final_population && a.evaluations == b.evaluations &&
                      serialize_run(a, p) == serialize_run(b, p);
    c.expect(same, "rerun differs for seed " + std::to_string(seed));
  }
  c.notes << monotone << "/20 monotone, 20/20 reruns compared bit-for-bit";
}

// ------------------------------------------------------------------ AC4

void ac4(Checks& c) {
  const auto p = fixtures::reference_problem();
  int wins = 0;
  for (std::uint64_t trial = 1; trial <= 20; ++trial) {
    GAConfig cfg;
    cfg.rng_seed = trial;
    const double ga = evolve(p, cfg).best_energy;
    Rng rng(derive_seed(trial, 0xAC4));
    double best_random = INFINITY;
    int drawn = 0;
    while (drawn < 1000) {
      const auto ind = random_individual(cfg, p, rng);
      const auto e = evaluate(p, ind);
      if (!e) continue;
      best_random = std::min(best_random, *e);
      ++drawn;
    }
    wins += ga <= best_random;
  }
  c.expect(wins >= 19, "GA won only " + std::to_string(wins) + "/20");
  c.notes << "GA <= best of 1000 random feasible layouts in " << wins << "/20 trials";
}

// ------------------------------------------------------------------ AC5

void ac5(Checks& c) {
  std::mt19937 g(5);
  double worst = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + g() % 199;
    std::vector<double> s(n);
    std::vector<int> y(n);
    const unsigned levels = 1 + g() % 30;
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = (trial % 2) ? static_cast<double>(g() % levels) : std::ldexp(static_cast<double>(g()), -32);
      y[i] = static_cast<int>(g() % 2);
    }
    y[0] = 1;
    y[1] = 0;
    const double d = std::fabs(auc(s, y) - oracle::pairwise_auc(s, y));
    worst = std::max(worst, d);
    c.expect(d <= 1e-12, "auc instance " + std::to_string(trial));
  }
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> rel(1 + g() % 200);
    for (auto& r : rel) r = u(g) * 0.1;
    c.expect(ndcg(rel, rel) == 1.0, "ideal ndcg != 1 on instance " + std::to_string(trial));
  }
  const double hand = (1.0 / std::log2(3.0)) / 1.0;
  const double got = ndcg(std::vector<double>{0.1, 0.9}, std::vector<double>{1.0, 0.0});
  c.near(got, hand, 1e-9, "two-item ndcg");
  c.notes << "max |auc - oracle| = " << worst << " over 100 instances; ideal ndcg exactly 1 on 100; 2-item ndcg "
          << fmt(got, 6);
}

// ------------------------------------------------------------------ AC6

ModelSpec model(ModelKind k) {
  ModelSpec s;
  s.kind = k;
  s.seed = 42;
  return s;
}

double test_auc(const Dataset& train, const Dataset& test, ModelKind k) {
  return evaluate(bannerforge::train(train, model(k)), test).auc;
}

void ac6(Checks& c) {
  SyntheticSpec strong;
  strong.seed = 1;
  const auto data = generate_synthetic(strong);
  const auto [tr, te] = split(data.dataset, 0.75, 1);
  const double rf = test_auc(tr, te, ModelKind::random_forest);
  const double lr = test_auc(tr, te, ModelKind::logistic_regression);
  c.expect(rf >= 0.90, "strong-signal RF AUC " + fmt(rf));
  c.expect(rf >= lr - 0.02, "RF AUC " + fmt(rf) + " more than 0.02 below LR " + fmt(lr));

  SyntheticSpec zero = strong;
  zero.strength = 0.0;
  const auto null_data = generate_synthetic(zero);
  const auto [ztr, zte] = split(null_data.dataset, 0.75, 1);
  std::map<std::string, double> null_auc;
  for (auto k : {ModelKind::logistic_regression, ModelKind::decision_tree, ModelKind::random_forest}) {
    const double a = test_auc(ztr, zte, k);
    null_auc[std::string(to_string(k))] = a;
    c.expect(a >= 0.45 && a <= 0.55, "zero-signal " + std::string(to_string(k)) + " AUC " + fmt(a));
  }

  int first = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    SyntheticSpec s = strong;
    s.seed = seed;
    const auto d = generate_synthetic(s);
    const auto [a, b] = split(d.dataset, 0.75, seed);
    auto spec = model(ModelKind::random_forest);
    spec.seed = seed;
    const auto imp = feature_importance(train(a, spec));
    first += imp.front().first == d.planted_feature;
  }
  c.expect(first >= 18, "planted feature first in only " + std::to_string(first) + "/20 seeds");
  c.notes << "strong: RF " << fmt(rf) << ", LR " << fmt(lr) << " (Bayes " << fmt(data.bayes_auc) << "); zero: LR "
          << fmt(null_auc["logistic_regression"]) << ", tree " << fmt(null_auc["decision_tree"]) << ", RF "
          << fmt(null_auc["random_forest"]) << "; planted feature first " << first << "/20";
}

// ------------------------------------------------------------------ AC7

void ac7(Checks& c) {
  const RecordSpec spec;  // n = 500, sigma = 0.001
  const auto recs = generate_records(spec);
  std::array<double, 4> truth{};
  for (std::size_t j = 0; j < 4; ++j) {
    double m = 0, v = 0;
    for (const auto& r : recs) m += r.terms()[j];
    m /= static_cast<double>(recs.size());
    for (const auto& r : recs) v += (r.terms()[j] - m) * (r.terms()[j] - m);
    truth[j] = spec.coefficients[j] * std::sqrt(v / static_cast<double>(recs.size()));
  }
  const double mean = (truth[0] + truth[1] + truth[2] + truth[3]) / 4;
  for (auto& t : truth) t /= mean;
  const std::size_t dom = static_cast<std::size_t>(std::max_element(truth.begin(), truth.end()) - truth.begin());
  const auto fit = fit_weights(recs);
  const std::array<double, 4> w{fit.weights.w_align, fit.weights.w_overlap, fit.weights.w_dist, fit.weights.w_sym};
  const double rel = std::fabs(w[dom] - truth[dom]) / truth[dom];
  c.expect(rel <= 0.10, "dominant weight relative error " + fmt(rel));
  c.notes << "dominant w_overlap " << fmt(w[dom]) << " vs true " << fmt(truth[dom]) << " (" << fmt(100 * rel, 3)
          << "% error), R^2 " << fmt(fit.r_squared, 6);
}

// ------------------------------------------------------------------ AC8

Raster noise(int w, int h, std::mt19937& g, bool alpha) {
  Raster r(w, h);
  for (auto& b : r.bytes()) b = static_cast<std::uint8_t>(g());
  if (!alpha)
    for (std::size_t i = 3; i < r.bytes().size(); i += 4) r.bytes()[i] = 255;
  return r;
}

void ac8(Checks& c) {
  std::mt19937 g(8);
  std::uniform_real_distribution<double> u(0, 1);
  int aspect_ok = 0;
  for (int i = 0; i < 200; ++i) {
    const int W = 40 + static_cast<int>(g() % 400), H = 40 + static_cast<int>(g() % 400);
    const double aspect = 0.3 + 3.2 * u(g);
    ImageAnnotation a;
    a.image_id = "x";
    a.width = W;
    a.height = H;
    if (g() % 4) {
      const double x = u(g) * (W - 2), y = u(g) * (H - 2);
      a.persons = {{x, y, x + 1 + u(g) * (W - x - 1), y + 1 + u(g) * (H - y - 1)}};
    }
    const auto cr = crop_roi(Raster(W, H), a, aspect);
    const bool ok = std::fabs(cr.rect.width() - aspect * cr.rect.height()) <= 1.0 && cr.rect.x0 >= 0 && cr.rect.y0 >= 0 &&
                    cr.rect.x1 <= W && cr.rect.y1 <= H;
    aspect_ok += ok;
    c.expect(ok, "crop " + std::to_string(i));
  }

  int local_ok = 0;
  for (int i = 0; i < 50; ++i) {
    const Raster img = noise(200 + static_cast<int>(g() % 200), 150 + static_cast<int>(g() % 150), g, false);
    ImageAnnotation a;
    a.image_id = "x";
    a.width = img.width();
    a.height = img.height();
    const double px = u(g) * (img.width() - 60);
    a.persons = {{px, 20, px + 50, static_cast<double>(img.height())}};
    const double aspect = 1.0 + u(g);
    const auto crop = crop_roi(img, a, aspect);
    const int W = crop.rect.width(), H = crop.rect.height();
    const double lw = 0.2 * W, lh = 0.2 * H, tw = 0.5 * W, th = 0.3 * H;
    const double lx = u(g) * (W - lw), ly = u(g) * (H - lh), tx = u(g) * (W - tw), ty = u(g) * (H - th);
    const Layout L{W, H, {mov(ElementKind::logo, {lx, ly, lx + lw, ly + lh}), mov(ElementKind::text, {tx, ty, tx + tw, ty + th})}};
    ComposeOptions o;
    o.target_aspect = aspect;
    const Raster logo = noise(24, 12, g, true);
    Raster out;
    try {
      out = compose(img, a, L, logo, {"New Season Sale"}, o);
    } catch (const TextOverflowError&) {
      out = compose(img, a, L, logo, {"Sale"}, o);
    }
    const PixelRect r1 = to_pixel_rect(L.elements[0].box), r2 = to_pixel_rect(L.elements[1].box);
    auto in = [](const PixelRect& r, int x, int y) { return x >= r.x0 && x < r.x1 && y >= r.y0 && y < r.y1; };
    bool ok = out.width() == W && out.height() == H;
    for (int y = 0; ok && y < H; ++y)
      for (int x = 0; x < W; ++x)
        if (!(out.at(x, y) == crop.raster.at(x, y)) && !in(r1, x, y) && !in(r2, x, y)) {
          ok = false;
          break;
        }
    local_ok += ok;
    c.expect(ok, "compose locality run " + std::to_string(i));
  }

  int png_ok = 0;
  for (int i = 0; i < 20; ++i) {
    const Raster r = noise(1 + static_cast<int>(g() % 120), 1 + static_cast<int>(g() % 120), g, true);
    const bool ok = decode_png(encode_png(r)) == r;
    png_ok += ok;
    c.expect(ok, "png round trip " + std::to_string(i));
  }

  int grad_ok = 0;
  for (int i = 0; i < 20; ++i) {
    const Raster r = noise(10 + static_cast<int>(g() % 100), 10 + static_cast<int>(g() % 100), g, true);
    const int x0 = static_cast<int>(g() % static_cast<unsigned>(r.width()));
    const int y0 = static_cast<int>(g() % static_cast<unsigned>(r.height()));
    const PixelRect region{x0, y0, r.width(), r.height()};
    const Raster out = apply_gradient(r, region, 0.0);
    const bool ok = std::equal(out.bytes().begin(), out.bytes().end(), r.bytes().begin(), r.bytes().end());
    grad_ok += ok;
    c.expect(ok, "zero gradient changed bytes " + std::to_string(i));
  }
  c.notes << "aspect " << aspect_ok << "/200, locality " << local_ok << "/50, png " << png_ok << "/20, zero gradient "
          << grad_ok << "/20";
}

// ------------------------------------------------------------------ AC9

/// Hash of every pipeline artifact: JSON/CSV bytes, decoded PNG pixels.
std::map<std::string, std::string> output_hashes(const fs::path& out) {
  std::map<std::string, std::string> h;
  for (const auto& entry : fs::recursive_directory_iterator(out)) {
    if (!entry.is_regular_file()) continue;
    const auto rel = fs::relative(entry.path(), out).generic_string();
    if (entry.path().extension() == ".png") {
      const Raster r = read_png(entry.path());
      std::uint64_t v = fnv1a64(r.bytes());
      const std::uint8_t dims[8] = {std::uint8_t(r.width()), std::uint8_t(r.width() >> 8), std::uint8_t(r.width() >> 16),
                                    std::uint8_t(r.width() >> 24), std::uint8_t(r.height()), std::uint8_t(r.height() >> 8),
                                    std::uint8_t(r.height() >> 16), std::uint8_t(r.height() >> 24)};
      v = fnv1a64(std::span<const std::uint8_t>(dims), v);
      h[rel] = hex64(v);
    } else {
      h[rel] = hex64(fnv1a64(read_text_file(entry.path())));
    }
  }
  return h;
}

int run_command(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

bool g_update_golden = false;

void ac9(Checks& c) {
  const fs::path demo = BF_DEMO_DIR;
  const fs::path out = fs::temp_directory_path() / "bf_acceptance_pipeline";
  fs::remove_all(out);
  const auto t0 = Clock::now();
  const int code = run_command(std::string(BF_CLI) + " pipeline --config " + (demo / "pipeline.json").string() + " --out " +
                               out.string() + " > " + (out.string() + ".log") + " 2>&1");
  const double secs = seconds_since(t0);
  c.expect(code == 0, "pipeline exit code " + std::to_string(code));
  c.expect(secs < 60.0, "pipeline took " + fmt(secs) + " s");
  if (code != 0) return;

  const auto manifest = nlohmann::json::parse(read_text_file(out / "manifest.json"));
  const auto& banners = manifest.at("banners");
  c.expect(!banners.empty(), "manifest lists no banners");
  std::set<std::string> ids;
  for (const auto& b : banners) {
    const auto id = b.at("id").get<std::string>();
    c.expect(ids.insert(id).second, "duplicate id " + id);
    c.expect(fs::exists(out / b.at("image").get<std::string>()), "missing image for " + id);
  }
  c.expect(manifest.at("failures").is_array(), "manifest has no failures array");

  const auto hashes = output_hashes(out);
  const fs::path golden = fs::path(BF_GOLDEN_DIR) / "demo_pipeline.txt";
  if (g_update_golden) {
    fs::create_directories(golden.parent_path());
    std::ofstream f(golden);
    for (const auto& [file, hash] : hashes) f << hash << "  " << file << "\n";
    c.notes << "golden hashes rewritten; ";
  }
  std::map<std::string, std::string> want;
  std::ifstream in(golden);
  std::string hash, file;
  while (in >> hash >> file) want[file] = hash;
  c.expect(!want.empty(), "no golden hashes at " + golden.string());
  int matched = 0;
  for (const auto& [f, h] : want) {
    const auto it = hashes.find(f);
    if (it == hashes.end()) {
      c.expect(false, "missing output " + f);
    } else if (it->second != h) {
      c.expect(false, "hash mismatch " + f);
    } else {
      ++matched;
    }
  }
  for (const auto& [f, h] : hashes) c.expect(want.count(f) == 1, "unexpected output " + f);
  c.notes << banners.size() << " banners in " << fmt(secs, 2) << " s, " << matched << "/" << want.size()
          << " golden hashes match";
}

// ------------------------------------------------------------------ AC10

void ac10(Checks& c) {
  // Reference values only: the proprietary click logs behind them are not
  // available, so the check is that the README records them as such.
  const std::string readme = read_text_file(fs::path(BF_SOURCE_DIR) / "README.md");
  for (const char* v : {"0.71", "0.22", "0.56"}) c.expect(readme.find(v) != std::string::npos, std::string("README lacks ") + v);
  c.expect(readme.find("not reproducible") != std::string::npos, "README does not mark the values as not reproducible");
  c.notes << "reference RF AUC 0.71 / NDCG 0.22, Layout+NIMA NDCG 0.56: documented, not asserted";
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 1; i < argc; ++i)
    if (std::string(argv[i]) == "--update-golden") g_update_golden = true;

  const std::vector<std::pair<std::string, std::function<void(Checks&)>>> criteria{
      {"AC1 energy analytics", ac1},       {"AC2 GA optimality vs lattice oracle", ac2},
      {"AC3 GA monotonicity & determinism", ac3}, {"AC4 GA beats random search", ac4},
      {"AC5 metric oracles", ac5},         {"AC6 planted-signal ranking", ac6},
      {"AC7 weight calibration", ac7},     {"AC8 compositor contracts", ac8},
      {"AC9 end-to-end demo pipeline", ac9}, {"AC10 reference-only values", ac10},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Checks c;
    const auto t0 = Clock::now();
    try {
      fn(c);
    } catch (const std::exception& e) {
      c.failures.push_back(std::string("exception: ") + e.what());
    }
    const bool pass = c.failures.empty();
    failed += !pass;
    std::cout << (pass ? "PASS " : "FAIL ") << name << " [" << fmt(seconds_since(t0), 2) << " s] " << c.notes.str() << "\n";
    for (std::size_t i = 0; i < c.failures.size() && i < 10; ++i) std::cout << "     - " << c.failures[i] << "\n";
    if (c.failures.size() > 10) std::cout << "     - ... " << c.failures.size() - 10 << " more\n";
    std::cout.flush();
  }
  std::cout << (failed == 0 ? "ALL CRITERIA PASS" : std::to_string(failed) + " CRITERIA FAIL") << "\n";
  return failed == 0 ? 0 : 1;
}
