#include "layout_json.hpp"

namespace bannerforge::detail {

json layout_to_json(const Layout& layout) {
  json els = json::array();
  for (const auto& e : layout.elements) {
    json el = {{"kind", to_string(e.kind)}, {"box", box_json(e.box)}, {"movable", e.movable}};
    if (e.focus) el["focus"] = box_json(*e.focus);
    els.push_back(std::move(el));
  }
  return {{"canvas_width", layout.canvas_width}, {"canvas_height", layout.canvas_height}, {"elements", els}};
}

Layout layout_from_json(const json& v, const std::string& path) {
  Layout layout;
  layout.canvas_width = static_cast<int>(as_integer(require(v, "canvas_width", path), join_path(path, "canvas_width")));
  layout.canvas_height =
      static_cast<int>(as_integer(require(v, "canvas_height", path), join_path(path, "canvas_height")));
  const std::string els_path = join_path(path, "elements");
  const auto& els = as_array(require(v, "elements", path), els_path);
  for (std::size_t i = 0; i < els.size(); ++i) {
    const std::string p = index_path(els_path, i);
    ElementBox e;
    const std::string kind = as_string(require(els[i], "kind", p), join_path(p, "kind"));
    const auto k = parse_element_kind(kind);
    if (!k) throw DataError(join_path(p, "kind"), "unknown element kind '" + kind + "'");
    e.kind = *k;
    e.box = as_box(require(els[i], "box", p), join_path(p, "box"));
    const json* movable = optional_field(els[i], "movable");
    e.movable = movable ? as_bool(*movable, join_path(p, "movable")) : is_movable_kind(e.kind);
    if (const json* focus = optional_field(els[i], "focus")) e.focus = as_box(*focus, join_path(p, "focus"));
    layout.elements.push_back(e);
  }
  return layout;
}

json energy_to_json(const EnergyBreakdown& e) {
  return {{"e_align", e.e_align}, {"e_overlap", e.e_overlap}, {"e_dist", e.e_dist},
          {"e_sym", e.e_sym},     {"total", e.total},         {"feasible", e.feasible}};
}

json weights_to_json(const EnergyWeights& w) {
  return {{"w_align", w.w_align}, {"w_overlap", w.w_overlap}, {"w_dist", w.w_dist}, {"w_sym", w.w_sym}};
}

EnergyWeights weights_from_json(const json& v, const std::string& path) {
  EnergyWeights w;
  w.w_align = number_or(v, "w_align", w.w_align, path);
  w.w_overlap = number_or(v, "w_overlap", w.w_overlap, path);
  w.w_dist = number_or(v, "w_dist", w.w_dist, path);
  w.w_sym = number_or(v, "w_sym", w.w_sym, path);
  if (!w.valid()) throw DataError(path, "weights must be finite, non-negative, and not all zero");
  return w;
}

namespace {

json kind_bounds_json(const KindBounds& b) {
  return {{"min_w", b.min_w}, {"max_w", b.max_w}, {"min_h", b.min_h}, {"max_h", b.max_h}};
}

KindBounds kind_bounds_from_json(const json& v, const std::string& path) {
  return {as_number(require(v, "min_w", path), join_path(path, "min_w")),
          as_number(require(v, "max_w", path), join_path(path, "max_w")),
          as_number(require(v, "min_h", path), join_path(path, "min_h")),
          as_number(require(v, "max_h", path), join_path(path, "max_h"))};
}

}  // namespace

json bounds_to_json(const SizeBounds& b) {
  return {{"logo", kind_bounds_json(b.logo)}, {"text", kind_bounds_json(b.text)}};
}

SizeBounds bounds_from_json(const json& v, const std::string& path) {
  return {kind_bounds_from_json(require(v, "logo", path), join_path(path, "logo")),
          kind_bounds_from_json(require(v, "text", path), join_path(path, "text"))};
}

json ga_config_to_json(const GAConfig& cfg) {
  return {{"population_size", cfg.population_size},
          {"generations", cfg.generations},
          {"crossover_prob", cfg.crossover_prob},
          {"mutation_prob", cfg.mutation_prob},
          {"per_gene_mutation_prob", cfg.per_gene_mutation_prob},
          {"tournament_size", cfg.tournament_size},
          {"elitism", cfg.elitism},
          {"mutation_sigma", cfg.mutation_sigma},
          {"rng_seed", cfg.rng_seed},
          {"lattice_steps", cfg.lattice_steps}};
}

GAConfig ga_config_from_json(const json& v, const std::string& path, GAConfig cfg) {
  if (!v.is_object()) throw DataError(path, "expected an object");
  auto count = [&](std::string_view key, std::size_t& field) {
    if (const json* x = optional_field(v, key)) {
      const auto n = as_integer(*x, join_path(path, key));
      if (n < 0) throw DataError(join_path(path, key), "must be non-negative");
      field = static_cast<std::size_t>(n);
    }
  };
  count("population_size", cfg.population_size);
  count("generations", cfg.generations);
  count("tournament_size", cfg.tournament_size);
  count("elitism", cfg.elitism);
  count("lattice_steps", cfg.lattice_steps);
  cfg.crossover_prob = number_or(v, "crossover_prob", cfg.crossover_prob, path);
  cfg.mutation_prob = number_or(v, "mutation_prob", cfg.mutation_prob, path);
  cfg.per_gene_mutation_prob = number_or(v, "per_gene_mutation_prob", cfg.per_gene_mutation_prob, path);
  cfg.mutation_sigma = number_or(v, "mutation_sigma", cfg.mutation_sigma, path);
  if (const json* s = optional_field(v, "rng_seed")) {
    cfg.rng_seed = static_cast<std::uint64_t>(as_integer(*s, join_path(path, "rng_seed")));
  }
  return cfg;
}

}  // namespace bannerforge::detail
