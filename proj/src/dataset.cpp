#include "mil/dataset.hpp"

#include <stdexcept>
#include <unordered_set>

namespace mil {

Eigen::Index Dataset::total_instances() const {
  Eigen::Index n = 0;
  for (const Bag& b : bags) n += b.size();
  return n;
}

std::vector<int> Dataset::labels() const {
  std::vector<int> out;
  out.reserve(bags.size());
  for (const Bag& b : bags) out.push_back(label_value(b.label));
  return out;
}

std::size_t Dataset::count(Label l) const {
  std::size_t n = 0;
  for (const Bag& b : bags)
    if (b.label == l) ++n;
  return n;
}

void Dataset::validate() const {
  std::unordered_set<std::string> seen;
  for (const Bag& b : bags) {
    if (b.size() < 1) throw std::invalid_argument("empty bag: " + b.id);
    if (b.instances.cols() != dim)
      throw std::invalid_argument("bag " + b.id + " has dimensionality " +
                                  std::to_string(b.instances.cols()) + ", dataset has " +
                                  std::to_string(dim));
    if (!seen.insert(b.id).second) throw std::invalid_argument("duplicate bag id: " + b.id);
  }
}

Dataset select_bags(const Dataset& ds, const std::vector<std::size_t>& indices) {
  Dataset out;
  out.name = ds.name;
  out.dim = ds.dim;
  out.bags.reserve(indices.size());
  for (std::size_t i : indices) {
    if (i >= ds.bags.size()) throw std::out_of_range("bag index out of range");
    out.bags.push_back(ds.bags[i]);
  }
  return out;
}

}  // namespace mil
