#pragma once

#include <cstdint>

#include "mil/dataset.hpp"

namespace mil {

/// Parameters of the synthetic 2-D concept problem: instances uniform in the
/// square [0,side]^2, positive bags guaranteed to contain at least one
/// instance inside the concept disc. Defaults keep the disc under 1% of the
/// square's area.
struct ConceptParams {
  int n_pos = 50;
  int n_neg = 50;
  int bag_size = 50;
  double square_side = 10.0;
  double center_x = 5.0;
  double center_y = 5.0;
  double radius = 0.5;
};

/// Deterministic under `seed`: the same seed yields a bit-identical dataset.
/// Positive bags have their first instance resampled uniformly inside the
/// concept disc. Throws std::invalid_argument when the disc is not fully
/// inside the square or counts are negative.
Dataset generate_concept_dataset(const ConceptParams& params, std::uint64_t seed);

}  // namespace mil
