#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "mil/dataset_io.hpp"
#include "mil/generator.hpp"
#include "mil/pipeline.hpp"

namespace mil {

/// A configuration problem the caller can fix; the message names the field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Settings shared by the experiment commands. Each command validates the
/// subset it uses.
struct ExperimentConfig {
  // Data source: a file, or the synthetic concept generator.
  std::string data_path;
  FileFormat format = FileFormat::dense_csv;
  bool use_generator = false;
  ConceptParams gen;

  Pipeline pipeline;
  int folds = 10;
  std::uint64_t seed = 0;
  std::string out_dir;
  bool emit_matrix = false;

  // Ensemble-size sweep (random subspaces only).
  std::vector<int> L_grid;
  std::vector<int> s_grid;  // 0 entries mean the default size rule

  // Learning curve.
  std::vector<int> sizes;
  int repeats = 10;
  double test_fraction = 0.3;
  std::vector<PipelineKind> curve_pipelines = {PipelineKind::dbag, PipelineKind::dinst,
                                               PipelineKind::dbs, PipelineKind::drs};
};

/// Reads the configured file or synthesizes the concept dataset.
Dataset load_or_generate(const ExperimentConfig& cfg);

/// Each command writes its artifacts under cfg.out_dir and returns the paths
/// written, in order.
std::vector<std::string> run_generate(const ExperimentConfig& cfg);
std::vector<std::string> run_evaluate(const ExperimentConfig& cfg);
std::vector<std::string> run_sweep(const ExperimentConfig& cfg);
std::vector<std::string> run_learning_curve(const ExperimentConfig& cfg);
std::vector<std::string> run_analyze(const ExperimentConfig& cfg);

}  // namespace mil
