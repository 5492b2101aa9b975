#include "bannerforge/ga_optimizer.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "bannerforge/error.hpp"
#include "layout_json.hpp"

namespace bannerforge {

namespace {

constexpr std::size_t kGenesPerElement = 4;

struct Axis {
  double extent;
  double min_size;
  double max_size;
};

Axis x_axis(const LayoutProblem& prob, const MovableSpec& spec) {
  const auto& b = prob.bounds.for_kind(spec.kind);
  return {static_cast<double>(prob.canvas_width), b.min_w, std::min(b.max_w, static_cast<double>(prob.canvas_width))};
}

Axis y_axis(const LayoutProblem& prob, const MovableSpec& spec) {
  const auto& b = prob.bounds.for_kind(spec.kind);
  return {static_cast<double>(prob.canvas_height), b.min_h,
          std::min(b.max_h, static_cast<double>(prob.canvas_height))};
}

double snap(double pos, double extent, double size, std::size_t steps) {
  if (steps <= 1) return lattice_position(0, steps, extent, size);
  const double room = extent - size;
  if (room <= 0.0) return 0.0;
  const double idx = std::round(pos / room * static_cast<double>(steps - 1));
  return lattice_position(static_cast<std::size_t>(std::clamp(idx, 0.0, static_cast<double>(steps - 1))), steps,
                          extent, size);
}

/// Clamp sizes into bounds, then positions onto the canvas (and lattice).
void repair(std::span<double> quad, const Axis& ax, const Axis& ay, std::size_t lattice_steps) {
  quad[2] = std::clamp(quad[2], ax.min_size, ax.max_size);
  quad[3] = std::clamp(quad[3], ay.min_size, ay.max_size);
  quad[0] = std::clamp(quad[0], 0.0, ax.extent - quad[2]);
  quad[1] = std::clamp(quad[1], 0.0, ay.extent - quad[3]);
  if (lattice_steps > 0) {
    quad[0] = snap(quad[0], ax.extent, quad[2], lattice_steps);
    quad[1] = snap(quad[1], ay.extent, quad[3], lattice_steps);
  }
}

GenerationStats stats_of(const Population& pop) {
  GenerationStats s{pop.front().energy.value(), 0.0};
  for (const auto& ind : pop) {
    s.best_energy = std::min(s.best_energy, *ind.energy);
    s.mean_energy += *ind.energy;
  }
  s.mean_energy /= static_cast<double>(pop.size());
  return s;
}

}  // namespace

void GAConfig::validate() const {
  if (population_size < 2) throw ConfigError("population_size must be >= 2");
  if (elitism >= population_size) throw ConfigError("elitism must be < population_size");
  if (tournament_size < 1) throw ConfigError("tournament_size must be >= 1");
  for (double p : {crossover_prob, mutation_prob, per_gene_mutation_prob}) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("probabilities must lie in [0,1]");
  }
  if (!(mutation_sigma >= 0.0) || !std::isfinite(mutation_sigma)) {
    throw ConfigError("mutation_sigma must be finite and >= 0");
  }
}

void LayoutProblem::validate() const {
  if (canvas_width <= 0 || canvas_height <= 0) throw ConfigError("canvas dimensions must be positive");
  if (movable.empty()) throw ConfigError("layout problem needs at least one movable element");
  if (!weights.valid()) throw ConfigError("energy weights must be non-negative with one positive");
  for (const auto& spec : movable) {
    if (!is_movable_kind(spec.kind)) throw ConfigError("movable elements must be logo or text");
    const auto& b = bounds.for_kind(spec.kind);
    if (!(b.min_w > 0 && b.min_w <= b.max_w && b.min_h > 0 && b.min_h <= b.max_h)) {
      throw ConfigError(std::string("size bounds for ") + std::string(to_string(spec.kind)) + " are invalid");
    }
    if (b.min_w > canvas_width || b.min_h > canvas_height) {
      throw ConfigError(std::string("size bounds for ") + std::string(to_string(spec.kind)) +
                        " admit no on-canvas placement");
    }
  }
}

Layout LayoutProblem::to_layout(std::span<const double> genes) const {
  Layout layout{canvas_width, canvas_height, fixed};
  for (auto& e : layout.elements) e.movable = false;
  for (std::size_t i = 0; i < movable.size(); ++i) {
    const double* q = &genes[i * kGenesPerElement];
    layout.elements.push_back({movable[i].kind, BBox{q[0], q[1], q[0] + q[2], q[1] + q[3]}, true, std::nullopt});
  }
  return layout;
}

double lattice_position(std::size_t i, std::size_t steps, double extent, double size) {
  const double room = std::max(0.0, extent - size);
  if (steps <= 1) return 0.0;
  return room * static_cast<double>(i) / static_cast<double>(steps - 1);
}

std::optional<double> evaluate(const LayoutProblem& prob, const Individual& ind) {
  const auto e = total_energy(prob.to_layout(ind.genes), prob.weights, prob.bounds);
  if (!e.feasible) return std::nullopt;
  return e.total;
}

Individual random_individual(const GAConfig& cfg, const LayoutProblem& prob, Rng& rng) {
  Individual ind;
  ind.genes.resize(prob.movable.size() * kGenesPerElement);
  for (std::size_t i = 0; i < prob.movable.size(); ++i) {
    const Axis ax = x_axis(prob, prob.movable[i]);
    const Axis ay = y_axis(prob, prob.movable[i]);
    std::span<double> q(&ind.genes[i * kGenesPerElement], kGenesPerElement);
    q[2] = ax.min_size == ax.max_size ? ax.min_size : rng.uniform(ax.min_size, ax.max_size);
    q[3] = ay.min_size == ay.max_size ? ay.min_size : rng.uniform(ay.min_size, ay.max_size);
    q[0] = rng.uniform(0.0, ax.extent - q[2]);
    q[1] = rng.uniform(0.0, ay.extent - q[3]);
    repair(q, ax, ay, cfg.lattice_steps);
  }
  return ind;
}

Population init_population(const GAConfig& cfg, const LayoutProblem& prob, Rng& rng) {
  cfg.validate();
  prob.validate();
  Population pop;
  pop.reserve(cfg.population_size);
  for (std::size_t i = 0; i < cfg.population_size; ++i) pop.push_back(random_individual(cfg, prob, rng));
  return pop;
}

Population select(const Population& population, std::size_t k, const GAConfig& cfg, Rng& rng) {
  Population parents;
  parents.reserve(k);
  const std::size_t tsize = std::max<std::size_t>(1, cfg.tournament_size);
  if (tsize >= population.size()) {
    // A tournament as large as the population is the whole population.
    const auto best = std::min_element(population.begin(), population.end(),
                                       [](const auto& a, const auto& b) { return a.energy.value() < b.energy.value(); });
    parents.assign(k, *best);
    return parents;
  }
  for (std::size_t pick = 0; pick < k; ++pick) {
    std::size_t best = static_cast<std::size_t>(rng.below(population.size()));
    for (std::size_t t = 1; t < tsize; ++t) {
      const auto cand = static_cast<std::size_t>(rng.below(population.size()));
      if (population[cand].energy.value() < population[best].energy.value()) best = cand;
    }
    parents.push_back(population[best]);
  }
  return parents;
}

std::pair<Individual, Individual> crossover(const Individual& a, const Individual& b, Rng& rng) {
  std::pair<Individual, Individual> children{a, b};
  auto& [c1, c2] = children;
  bool swapped = false;
  const std::size_t n = a.genes.size() / kGenesPerElement;
  for (std::size_t i = 0; i < n; ++i) {
    if (!rng.bernoulli(0.5)) continue;
    for (std::size_t g = i * kGenesPerElement; g < (i + 1) * kGenesPerElement; ++g) {
      std::swap(c1.genes[g], c2.genes[g]);
    }
    swapped = true;
  }
  if (swapped) {
    c1.energy.reset();
    c2.energy.reset();
  }
  return children;
}

Individual mutate(const Individual& ind, const LayoutProblem& prob, const GAConfig& cfg, Rng& rng) {
  Individual out = ind;
  bool changed = false;
  for (std::size_t i = 0; i < prob.movable.size(); ++i) {
    const Axis ax = x_axis(prob, prob.movable[i]);
    const Axis ay = y_axis(prob, prob.movable[i]);
    std::span<double> q(&out.genes[i * kGenesPerElement], kGenesPerElement);
    const double scale[kGenesPerElement] = {ax.extent, ay.extent, ax.extent, ay.extent};
    bool touched = false;
    for (std::size_t g = 0; g < kGenesPerElement; ++g) {
      if (rng.bernoulli(cfg.per_gene_mutation_prob)) {
        q[g] += rng.normal(0.0, cfg.mutation_sigma * scale[g]);
        touched = true;
      }
    }
    if (touched) {
      repair(q, ax, ay, cfg.lattice_steps);
      changed = true;
    }
  }
  if (changed) out.energy.reset();
  return out;
}

GARun evolve(const LayoutProblem& prob, const GAConfig& cfg) {
  Rng rng(cfg.rng_seed);
  GARun run;
  Population pop = init_population(cfg, prob, rng);

  // Fills in the energy, re-sampling until feasible.
  auto settle = [&](Individual& ind) {
    while (!ind.energy) {
      ind.energy = evaluate(prob, ind);
      ++run.evaluations;
      if (!ind.energy) ind = random_individual(cfg, prob, rng);
    }
  };
  for (auto& ind : pop) settle(ind);

  Individual best = *std::min_element(pop.begin(), pop.end(),
                                      [](const auto& a, const auto& b) { return *a.energy < *b.energy; });
  run.history.push_back(stats_of(pop));

  std::vector<std::size_t> order(pop.size());
  for (std::size_t gen = 1; gen <= cfg.generations; ++gen) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return *pop[a].energy < *pop[b].energy; });

    Population next;
    next.reserve(pop.size());
    for (std::size_t e = 0; e < cfg.elitism; ++e) next.push_back(pop[order[e]]);

    while (next.size() < pop.size()) {
      Population parents = select(pop, 2, cfg, rng);
      auto [c1, c2] = rng.bernoulli(cfg.crossover_prob) ? crossover(parents[0], parents[1], rng)
                                                         : std::pair{parents[0], parents[1]};
      for (Individual* child : {&c1, &c2}) {
        if (next.size() >= pop.size()) break;
        if (rng.bernoulli(cfg.mutation_prob)) *child = mutate(*child, prob, cfg, rng);
        settle(*child);
        next.push_back(std::move(*child));
      }
    }
    pop = std::move(next);

    const GenerationStats s = stats_of(pop);
    run.history.push_back(s);
    for (const auto& ind : pop) {
      if (*ind.energy < *best.energy) best = ind;
    }
  }

  run.best_energy = *best.energy;
  run.best_layout = prob.to_layout(best.genes);
  std::stable_sort(pop.begin(), pop.end(), [](const auto& a, const auto& b) { return *a.energy < *b.energy; });
  run.final_population = std::move(pop);
  return run;
}

std::vector<RankedLayout> GARun::top_layouts(const LayoutProblem& prob, std::size_t k) const {
  std::vector<RankedLayout> out;
  std::vector<std::vector<double>> seen;

  auto consider = [&](const Layout& layout, std::vector<double> key) {
    if (out.size() >= k) return;
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) return;
    seen.push_back(std::move(key));
    out.push_back({layout, total_energy(layout, prob.weights, prob.bounds)});
  };

  std::vector<double> best_key;
  for (const auto& e : best_layout.elements) {
    if (!e.movable) continue;
    best_key.insert(best_key.end(), {e.box.x_left, e.box.y_top, e.box.width(), e.box.height()});
  }
  consider(best_layout, best_key);
  for (const auto& ind : final_population) {
    // Recompute the key through the layout so float round-off matches best_key.
    const Layout layout = prob.to_layout(ind.genes);
    std::vector<double> key;
    for (const auto& e : layout.elements) {
      if (!e.movable) continue;
      key.insert(key.end(), {e.box.x_left, e.box.y_top, e.box.width(), e.box.height()});
    }
    consider(layout, std::move(key));
  }
  return out;
}

std::string GARun::history_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "generation,best_energy,mean_energy\n";
  for (std::size_t g = 0; g < history.size(); ++g) {
    os << g << ',' << history[g].best_energy << ',' << history[g].mean_energy << '\n';
  }
  return os.str();
}

BruteForceResult brute_force_layout(const LayoutProblem& prob, std::size_t grid_steps) {
  prob.validate();
  if (prob.movable.size() > 2) throw ConfigError("brute_force_layout supports at most 2 movable elements");
  if (grid_steps < 1 || grid_steps > 24) throw ConfigError("grid_steps must lie in [1, 24]");

  const std::size_t m = prob.movable.size();
  const std::size_t per_element = grid_steps * grid_steps;
  std::size_t combos = 1;
  for (std::size_t i = 0; i < m; ++i) combos *= per_element;

  std::vector<double> genes(m * kGenesPerElement);
  std::optional<double> best_energy;
  std::vector<double> best_genes;
  for (std::size_t c = 0; c < combos; ++c) {
    // Scan order: element 0 slowest; within an element, x index slower than y.
    std::size_t rest = c;
    for (std::size_t i = m; i-- > 0;) {
      const std::size_t cell = rest % per_element;
      rest /= per_element;
      const auto& spec = prob.movable[i];
      double* q = &genes[i * kGenesPerElement];
      q[2] = spec.init_width;
      q[3] = spec.init_height;
      q[0] = lattice_position(cell / grid_steps, grid_steps, prob.canvas_width, spec.init_width);
      q[1] = lattice_position(cell % grid_steps, grid_steps, prob.canvas_height, spec.init_height);
    }
    const auto e = total_energy(prob.to_layout(genes), prob.weights, prob.bounds);
    if (!e.feasible) continue;
    if (!best_energy || e.total < *best_energy) {
      best_energy = e.total;
      best_genes = genes;
    }
  }
  if (!best_energy) throw ConfigError("no feasible placement on the lattice");
  return {prob.to_layout(best_genes), *best_energy};
}

GAConfig parse_ga_config(std::string_view json_text) {
  return detail::ga_config_from_json(detail::parse_json(json_text, "ga"), "");
}

std::string serialize_ga_config(const GAConfig& cfg) { return detail::ga_config_to_json(cfg).dump(2); }

LayoutProblem parse_layout_problem(std::string_view json_text) {
  using namespace detail;
  const json doc = parse_json(json_text, "problem");
  LayoutProblem prob;
  prob.canvas_width = static_cast<int>(as_integer(require(doc, "canvas_width", ""), "canvas_width"));
  prob.canvas_height = static_cast<int>(as_integer(require(doc, "canvas_height", ""), "canvas_height"));
  if (const json* fixed = optional_field(doc, "fixed")) {
    const auto& arr = as_array(*fixed, "fixed");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string p = index_path("fixed", i);
      ElementBox e;
      const std::string kind = as_string(require(arr[i], "kind", p), p + ".kind");
      const auto k = parse_element_kind(kind);
      if (!k || is_movable_kind(*k)) throw DataError(p + ".kind", "fixed elements must be person or object");
      e.kind = *k;
      e.box = as_box(require(arr[i], "box", p), p + ".box");
      e.movable = false;
      if (const json* f = optional_field(arr[i], "focus")) e.focus = as_box(*f, p + ".focus");
      prob.fixed.push_back(e);
    }
  }
  const auto& mov = as_array(require(doc, "movable", ""), "movable");
  for (std::size_t i = 0; i < mov.size(); ++i) {
    const std::string p = index_path("movable", i);
    const std::string kind = as_string(require(mov[i], "kind", p), p + ".kind");
    const auto k = parse_element_kind(kind);
    if (!k || !is_movable_kind(*k)) throw DataError(p + ".kind", "movable elements must be logo or text");
    prob.movable.push_back({*k, as_number(require(mov[i], "width", p), p + ".width"),
                            as_number(require(mov[i], "height", p), p + ".height")});
  }
  prob.bounds = bounds_from_json(require(doc, "bounds", ""), "bounds");
  if (const json* w = optional_field(doc, "weights")) prob.weights = weights_from_json(*w, "weights");
  return prob;
}

std::string serialize_layout_problem(const LayoutProblem& prob) {
  using namespace detail;
  json fixed = json::array();
  for (const auto& e : prob.fixed) {
    json el = {{"kind", to_string(e.kind)}, {"box", box_json(e.box)}};
    if (e.focus) el["focus"] = box_json(*e.focus);
    fixed.push_back(std::move(el));
  }
  json mov = json::array();
  for (const auto& m : prob.movable) {
    mov.push_back({{"kind", to_string(m.kind)}, {"width", m.init_width}, {"height", m.init_height}});
  }
  const json doc = {{"canvas_width", prob.canvas_width}, {"canvas_height", prob.canvas_height},
                    {"fixed", fixed},                    {"movable", mov},
                    {"bounds", bounds_to_json(prob.bounds)}, {"weights", weights_to_json(prob.weights)}};
  return doc.dump(2);
}

std::string serialize_layout(const Layout& layout) { return detail::layout_to_json(layout).dump(2); }

Layout parse_layout(std::string_view json_text) {
  const auto doc = detail::parse_json(json_text, "layout");
  for (const char* key : {"best_layout", "layout"}) {
    if (doc.is_object() && doc.contains(key)) return detail::layout_from_json(doc[key], key);
  }
  return detail::layout_from_json(doc, "");
}

std::string serialize_run(const GARun& run, const LayoutProblem& prob) {
  using namespace detail;
  json history = json::array();
  for (std::size_t g = 0; g < run.history.size(); ++g) {
    history.push_back({g, run.history[g].best_energy, run.history[g].mean_energy});
  }
  const json doc = {{"best_energy", run.best_energy},
                    {"evaluations", run.evaluations},
                    {"best_layout", layout_to_json(run.best_layout)},
                    {"energy", energy_to_json(total_energy(run.best_layout, prob.weights, prob.bounds))},
                    {"history", history}};
  return doc.dump(2);
}

}  // namespace bannerforge
