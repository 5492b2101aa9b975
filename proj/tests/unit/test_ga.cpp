#include <gtest/gtest.h>

#include <algorithm>
#include <map>

#include "bannerforge/error.hpp"
#include "bannerforge/ga_optimizer.hpp"
#include "problems.hpp"

using namespace bannerforge;

namespace {

LayoutProblem flexible_problem() {
  LayoutProblem p = fixtures::reference_problem();
  p.bounds.logo = {40, 120, 20, 60};
  p.bounds.text = {100, 240, 30, 80};
  return p;
}

GAConfig small_config(std::uint64_t seed = 42) {
  GAConfig c;
  c.population_size = 30;
  c.generations = 25;
  c.rng_seed = seed;
  return c;
}

Population evaluated(const LayoutProblem& p, const GAConfig& cfg, Rng& rng) {
  Population pop = init_population(cfg, p, rng);
  for (auto& ind : pop) ind.energy = evaluate(p, ind);
  return pop;
}

}  // namespace

TEST(InitPopulation, SeedDeterminism) {
  const auto p = flexible_problem();
  GAConfig c = small_config();
  Rng a(42), b(42);
  EXPECT_EQ(init_population(c, p, a), init_population(c, p, b));
}

TEST(InitPopulation, FixedBoundsFixSizes) {
  const auto p = fixtures::reference_problem();
  Rng rng(1);
  for (const auto& ind : init_population(small_config(), p, rng)) {
    EXPECT_EQ(ind.genes[2], 80.0);
    EXPECT_EQ(ind.genes[3], 40.0);
    EXPECT_EQ(ind.genes[6], 160.0);
    EXPECT_EQ(ind.genes[7], 50.0);
  }
}

TEST(InitPopulation, SizeAndFeasibility) {
  const auto p = flexible_problem();
  GAConfig c = small_config();
  c.population_size = 10;
  Rng rng(3);
  const auto pop = init_population(c, p, rng);
  ASSERT_EQ(pop.size(), 10u);
  for (const auto& ind : pop) EXPECT_TRUE(feasible(p.to_layout(ind.genes), p.bounds));
}

TEST(InitPopulation, UnplaceableBoundsRejected) {
  auto p = flexible_problem();
  p.bounds.text = {500, 600, 30, 80};
  Rng rng(1);
  EXPECT_THROW((void)init_population(small_config(), p, rng), ConfigError);
}

TEST(Select, FullTournamentReturnsGlobalBest) {
  const auto p = flexible_problem();
  GAConfig c = small_config();
  Rng rng(5);
  const auto pop = evaluated(p, c, rng);
  const double best = std::min_element(pop.begin(), pop.end(), [](auto& a, auto& b) { return *a.energy < *b.energy; })
                          ->energy.value();
  c.tournament_size = pop.size();
  for (const auto& w : select(pop, 50, c, rng)) EXPECT_EQ(*w.energy, best);
}

TEST(Select, SizeOneIsUniform) {
  Population pop;
  for (int i = 0; i < 4; ++i) pop.push_back({{double(i)}, double(10 - i)});
  GAConfig c;
  c.tournament_size = 1;
  Rng rng(7);
  std::map<double, int> counts;
  for (const auto& w : select(pop, 8000, c, rng)) ++counts[w.genes[0]];
  ASSERT_EQ(counts.size(), 4u);
  for (const auto& [g, n] : counts) EXPECT_NEAR(n, 2000, 200) << "gene " << g;
}

TEST(Select, PairTournamentPicksBetter) {
  const Population pop{{{0.0}, 1.0}, {{1.0}, 9.0}};
  GAConfig c;
  c.tournament_size = 2;
  Rng rng(9);
  for (const auto& w : select(pop, 100, c, rng)) EXPECT_EQ(*w.energy, 1.0);
}

TEST(Crossover, IdenticalParents) {
  const Individual a{{1, 2, 3, 4, 5, 6, 7, 8}, 0.5};
  Rng rng(1);
  for (int i = 0; i < 20; ++i) {
    auto [c1, c2] = crossover(a, a, rng);
    EXPECT_EQ(c1.genes, a.genes);
    EXPECT_EQ(c2.genes, a.genes);
  }
}

TEST(Crossover, ConservesElementQuadruples) {
  const Individual a{{1, 2, 3, 4, 5, 6, 7, 8}, std::nullopt}, b{{11, 12, 13, 14, 15, 16, 17, 18}, std::nullopt};
  const Individual a_copy = a, b_copy = b;
  Rng rng(2);
  for (int i = 0; i < 50; ++i) {
    auto [c1, c2] = crossover(a, b, rng);
    for (std::size_t e = 0; e < 2; ++e) {
      auto quad = [&](const Individual& x) { return std::vector<double>(x.genes.begin() + 4 * e, x.genes.begin() + 4 * e + 4); };
      std::multiset<std::vector<double>> parents{quad(a), quad(b)}, children{quad(c1), quad(c2)};
      EXPECT_EQ(parents, children);
    }
  }
  EXPECT_EQ(a, a_copy);
  EXPECT_EQ(b, b_copy);
}

TEST(Crossover, SingleElementCopiesOrSwaps) {
  const Individual a{{1, 2, 3, 4}, std::nullopt}, b{{5, 6, 7, 8}, std::nullopt};
  Rng rng(3);
  int swaps = 0;
  for (int i = 0; i < 100; ++i) {
    auto [c1, c2] = crossover(a, b, rng);
    const bool copy = c1.genes == a.genes && c2.genes == b.genes;
    const bool swap = c1.genes == b.genes && c2.genes == a.genes;
    EXPECT_TRUE(copy || swap);
    swaps += swap;
  }
  EXPECT_GT(swaps, 20);
  EXPECT_LT(swaps, 80);
}

TEST(Mutate, ZeroRateIsIdentity) {
  const auto p = flexible_problem();
  GAConfig c = small_config();
  c.per_gene_mutation_prob = 0;
  Rng rng(4);
  const auto pop = evaluated(p, c, rng);
  for (const auto& ind : pop) EXPECT_EQ(mutate(ind, p, c, rng), ind);
}

TEST(Mutate, AlwaysFeasibleAndInvalidatesEnergy) {
  const auto p = flexible_problem();
  GAConfig c = small_config();
  c.per_gene_mutation_prob = 1.0;
  c.mutation_sigma = 0.8;
  Rng rng(6);
  const auto pop = evaluated(p, c, rng);
  for (int round = 0; round < 20; ++round) {
    for (const auto& ind : pop) {
      const auto m = mutate(ind, p, c, rng);
      EXPECT_TRUE(feasible(p.to_layout(m.genes), p.bounds));
      EXPECT_FALSE(m.energy.has_value());
    }
  }
}

TEST(Mutate, Reproducible) {
  const auto p = flexible_problem();
  GAConfig c = small_config();
  Rng r0(8);
  const auto pop = evaluated(p, c, r0);
  Rng a(99), b(99);
  for (const auto& ind : pop) EXPECT_EQ(mutate(ind, p, c, a), mutate(ind, p, c, b));
}

TEST(Evolve, HistoryMonotoneAndPopulationConstant) {
  const auto p = flexible_problem();
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto run = evolve(p, small_config(seed));
    ASSERT_EQ(run.history.size(), 26u);
    for (std::size_t g = 1; g < run.history.size(); ++g) EXPECT_LE(run.history[g].best_energy, run.history[g - 1].best_energy);
    EXPECT_EQ(run.final_population.size(), 30u);
    EXPECT_EQ(run.best_energy, run.history.back().best_energy);
    const auto recomputed = total_energy(run.best_layout, p.weights, p.bounds);
    EXPECT_TRUE(recomputed.feasible);
    EXPECT_NEAR(recomputed.total, run.best_energy, 1e-12);
  }
}

TEST(Evolve, Deterministic) {
  const auto p = flexible_problem();
  const auto a = evolve(p, small_config(11)), b = evolve(p, small_config(11));
  EXPECT_EQ(a.best_layout, b.best_layout);
  EXPECT_EQ(a.best_energy, b.best_energy);
  EXPECT_EQ(a.history, b.history);
  EXPECT_EQ(a.final_population, b.final_population);
  EXPECT_EQ(serialize_run(a, p), serialize_run(b, p));
}

TEST(Evolve, LatticeModeNeverBeatsOracle) {
  const auto p = fixtures::reference_problem();
  GAConfig c = small_config(3);
  c.lattice_steps = 8;
  const auto oracle = brute_force_layout(p, 8);
  EXPECT_GE(evolve(p, c).best_energy, oracle.energy - 1e-12);
}

TEST(Evolve, TopLayoutsDistinctAndSorted) {
  const auto p = flexible_problem();
  const auto run = evolve(p, small_config(4));
  const auto top = run.top_layouts(p, 3);
  ASSERT_EQ(top.size(), 3u);
  EXPECT_EQ(top[0].energy.total, run.best_energy);
  for (std::size_t i = 1; i < top.size(); ++i) {
    EXPECT_LE(top[i - 1].energy.total, top[i].energy.total);
    EXPECT_NE(top[i - 1].layout, top[i].layout);
  }
}

TEST(BruteForce, SymmetryOnlyCentersElement) {
  LayoutProblem p;
  p.canvas_width = 400;
  p.canvas_height = 200;
  p.movable = {{ElementKind::logo, 80, 40}};
  p.bounds.logo = {80, 80, 40, 40};
  p.bounds.text = {10, 400, 10, 200};
  p.weights = {0, 0, 0, 1};
  // 17 steps put a lattice point at x = 160, the centered position.
  const auto r = brute_force_layout(p, 17);
  EXPECT_NEAR(r.layout.elements[0].box.center_x(), 200.0, 1e-9);
  EXPECT_NEAR(r.energy, 0.0, 1e-12);
}

TEST(BruteForce, OverlapOnlyAvoidsFixedHalf) {
  LayoutProblem p;
  p.canvas_width = 400;
  p.canvas_height = 200;
  p.fixed.push_back({ElementKind::object, {0, 0, 200, 200}, false, std::nullopt});
  p.movable = {{ElementKind::logo, 80, 40}};
  p.bounds.logo = {80, 80, 40, 40};
  p.bounds.text = {10, 400, 10, 200};
  p.weights = {0, 1, 0, 0};
  const auto r = brute_force_layout(p, 16);
  EXPECT_EQ(r.energy, 0.0);
  EXPECT_GE(r.layout.elements.back().box.x_left, 200.0);
}

TEST(BruteForce, SelfConsistentAndGuarded) {
  const auto p = fixtures::reference_problem();
  const auto r = brute_force_layout(p, 16);
  EXPECT_NEAR(total_energy(r.layout, p.weights, p.bounds).total, r.energy, 1e-12);
  EXPECT_THROW((void)brute_force_layout(p, 25), ConfigError);
  auto three = p;
  three.movable.push_back({ElementKind::text, 50, 20});
  EXPECT_THROW((void)brute_force_layout(three, 8), ConfigError);
}

TEST(GaFiles, RoundTrips) {
  GAConfig c = small_config(77);
  c.lattice_steps = 12;
  const auto c2 = parse_ga_config(serialize_ga_config(c));
  EXPECT_EQ(serialize_ga_config(c2), serialize_ga_config(c));
  const auto p = fixtures::reference_problem();
  EXPECT_EQ(serialize_layout_problem(parse_layout_problem(serialize_layout_problem(p))), serialize_layout_problem(p));
  const auto run = evolve(p, small_config());
  EXPECT_EQ(parse_layout(serialize_layout(run.best_layout)), run.best_layout);
  EXPECT_EQ(parse_layout(serialize_run(run, p)), run.best_layout);
}

TEST(GaConfig, ValidationRejectsBadValues) {
  GAConfig c;
  c.population_size = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.elitism = c.population_size + 1;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.crossover_prob = 1.5;
  EXPECT_THROW(c.validate(), ConfigError);
}
