#pragma once

/// @file ga_optimizer.hpp
/// Genetic search over logo/text placements, and an exhaustive lattice
/// search used as its oracle on small problems.
///
/// Genes are (x_left, y_top, width, height) per movable element so position
/// and size clamp independently. Selection minimizes total energy.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bannerforge/layout_energy.hpp"
#include "bannerforge/random.hpp"

namespace bannerforge {

struct GAConfig {
  std::size_t population_size = 100;
  std::size_t generations = 150;
  double crossover_prob = 0.7;
  double mutation_prob = 0.2;
  double per_gene_mutation_prob = 0.25;
  std::size_t tournament_size = 3;
  std::size_t elitism = 2;
  double mutation_sigma = 0.05;  ///< fraction of the matching canvas dimension
  std::uint64_t rng_seed = 42;
  /// When > 0, top-left positions snap to the same lattice brute_force_layout
  /// enumerates with this many steps per axis.
  std::size_t lattice_steps = 0;

  /// Throws ConfigError describing the first violated invariant.
  void validate() const;
};

struct MovableSpec {
  ElementKind kind = ElementKind::logo;
  double init_width = 1.0;
  double init_height = 1.0;
};

struct LayoutProblem {
  int canvas_width = 0;
  int canvas_height = 0;
  std::vector<ElementBox> fixed;  ///< persons/objects from the photo
  std::vector<MovableSpec> movable;
  SizeBounds bounds;
  EnergyWeights weights;

  void validate() const;
  /// Layout with `genes` applied to the movable specs, fixed elements first.
  [[nodiscard]] Layout to_layout(std::span<const double> genes) const;
};

struct Individual {
  std::vector<double> genes;
  std::optional<double> energy;  ///< cached total energy, cleared on change

  friend bool operator==(const Individual&, const Individual&) = default;
};

struct GenerationStats {
  double best_energy = 0.0;
  double mean_energy = 0.0;
  friend bool operator==(const GenerationStats&, const GenerationStats&) = default;
};

struct RankedLayout {
  Layout layout;
  EnergyBreakdown energy;
};

struct GARun {
  Layout best_layout;
  double best_energy = 0.0;
  std::vector<GenerationStats> history;  ///< generations + 1 entries
  std::size_t evaluations = 0;
  std::vector<Individual> final_population;  ///< sorted by energy

  /// Up to k distinct layouts, best first: the best ever seen followed by the
  /// final population in energy order.
  [[nodiscard]] std::vector<RankedLayout> top_layouts(const LayoutProblem& prob, std::size_t k) const;
  /// "generation,best_energy,mean_energy" rows.
  [[nodiscard]] std::string history_csv() const;
};

using Population = std::vector<Individual>;

/// Energy of an individual, or nullopt when it is infeasible.
[[nodiscard]] std::optional<double> evaluate(const LayoutProblem& prob, const Individual& ind);

[[nodiscard]] Individual random_individual(const GAConfig& cfg, const LayoutProblem& prob, Rng& rng);
[[nodiscard]] Population init_population(const GAConfig& cfg, const LayoutProblem& prob, Rng& rng);

/// k tournament winners (draws with replacement; a tournament at least as
/// large as the population takes its best). Every individual must carry an energy.
[[nodiscard]] Population select(const Population& population, std::size_t k, const GAConfig& cfg, Rng& rng);

[[nodiscard]] std::pair<Individual, Individual> crossover(const Individual& a, const Individual& b, Rng& rng);

[[nodiscard]] Individual mutate(const Individual& ind, const LayoutProblem& prob, const GAConfig& cfg, Rng& rng);

[[nodiscard]] GARun evolve(const LayoutProblem& prob, const GAConfig& cfg);

struct BruteForceResult {
  Layout layout;
  double energy = 0.0;
};

/// Exhaustive search over a grid_steps x grid_steps lattice of top-left
/// positions per movable element at the specs' initial sizes. At most two
/// movable elements and 24 steps.
[[nodiscard]] BruteForceResult brute_force_layout(const LayoutProblem& prob, std::size_t grid_steps);

/// Position of lattice point `i` of `steps` for an element of `size` on an
/// axis of `extent`.
[[nodiscard]] double lattice_position(std::size_t i, std::size_t steps, double extent, double size);

// File formats.
[[nodiscard]] GAConfig parse_ga_config(std::string_view json_text);
[[nodiscard]] std::string serialize_ga_config(const GAConfig& cfg);
[[nodiscard]] LayoutProblem parse_layout_problem(std::string_view json_text);
[[nodiscard]] std::string serialize_layout_problem(const LayoutProblem& prob);
[[nodiscard]] std::string serialize_layout(const Layout& layout);
/// Accepts a bare layout or a document holding one under "best_layout"
/// (a GA run) or "layout" (a banner sidecar).
[[nodiscard]] Layout parse_layout(std::string_view json_text);
[[nodiscard]] std::string serialize_run(const GARun& run, const LayoutProblem& prob);

}  // namespace bannerforge
