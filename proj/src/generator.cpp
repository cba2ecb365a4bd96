#include "mil/generator.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mil/rng.hpp"

namespace mil {

namespace {

void check_params(const ConceptParams& p) {
  if (p.n_pos < 0 || p.n_neg < 0) throw std::invalid_argument("bag counts must be >= 0");
  if (p.bag_size < 1) throw std::invalid_argument("bag_size must be >= 1");
  if (p.square_side <= 0.0) throw std::invalid_argument("square_side must be > 0");
  if (p.radius <= 0.0) throw std::invalid_argument("concept radius must be > 0");
  const bool inside = p.center_x - p.radius >= 0.0 && p.center_x + p.radius <= p.square_side &&
                      p.center_y - p.radius >= 0.0 && p.center_y + p.radius <= p.square_side;
  if (!inside) throw std::invalid_argument("concept region outside square");
}

Bag make_bag(const ConceptParams& p, Rng& rng, bool positive, const std::string& id) {
  Bag bag;
  bag.id = id;
  bag.label = positive ? Label::positive : Label::negative;
  bag.instances.resize(p.bag_size, 2);
  for (int i = 0; i < p.bag_size; ++i) {
    bag.instances(i, 0) = rng.uniform() * p.square_side;
    bag.instances(i, 1) = rng.uniform() * p.square_side;
  }
  if (positive) {
    // uniform point in the concept disc via the polar transform
    const double r = p.radius * std::sqrt(rng.uniform());
    const double theta = 2.0 * std::numbers::pi * rng.uniform();
    bag.instances(0, 0) = p.center_x + r * std::cos(theta);
    bag.instances(0, 1) = p.center_y + r * std::sin(theta);
  }
  return bag;
}

}  // namespace

Dataset generate_concept_dataset(const ConceptParams& params, std::uint64_t seed) {
  check_params(params);
  Rng rng(stream_seed(seed, "concept-generator"));

  Dataset ds;
  ds.name = "concept";
  ds.dim = 2;
  ds.bags.reserve(static_cast<std::size_t>(params.n_pos + params.n_neg));
  for (int i = 0; i < params.n_pos; ++i)
    ds.bags.push_back(make_bag(params, rng, true, "pos" + std::to_string(i + 1)));
  for (int i = 0; i < params.n_neg; ++i)
    ds.bags.push_back(make_bag(params, rng, false, "neg" + std::to_string(i + 1)));
  return ds;
}

}  // namespace mil
