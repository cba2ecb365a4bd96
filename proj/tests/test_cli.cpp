#include <unistd.h>

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "mil/commands.hpp"

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;

  TempDir() {
    static std::atomic<int> counter{0};
    path = fs::temp_directory_path() /
           ("mil_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string dir(const std::string& name) const { return (path / name).string(); }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

int count_lines(const std::string& text) {
  int n = 0;
  for (char c : text)
    if (c == '\n') ++n;
  return n;
}

/// Small synthetic problem shared by the command tests: 20 bags of 5
/// instances, modest ensembles, so every command runs in well under a second.
mil::ExperimentConfig small_config() {
  mil::ExperimentConfig cfg;
  cfg.use_generator = true;
  cfg.gen.n_pos = 10;
  cfg.gen.n_neg = 10;
  cfg.gen.bag_size = 5;
  cfg.folds = 3;
  cfg.seed = 7;
  cfg.pipeline.ensemble.L = 10;
  return cfg;
}

std::vector<std::string> artifact_names(const std::vector<std::string>& paths) {
  std::vector<std::string> names;
  for (const std::string& p : paths) names.push_back(fs::path(p).filename().string());
  return names;
}

void check_rerun_identical(const mil::ExperimentConfig& base,
                           std::vector<std::string> (*command)(const mil::ExperimentConfig&)) {
  TempDir tmp;
  mil::ExperimentConfig first = base;
  first.out_dir = tmp.dir("a");
  mil::ExperimentConfig second = base;
  second.out_dir = tmp.dir("b");
  const auto paths_a = command(first);
  const auto paths_b = command(second);
  REQUIRE(paths_a.size() == paths_b.size());
  for (std::size_t i = 0; i < paths_a.size(); ++i)
    CHECK(read_file(paths_a[i]) == read_file(paths_b[i]));
}

}  // namespace

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

TEST_CASE("generate: writes the synthetic dataset and is reproducible") {
  TempDir tmp;
  mil::ExperimentConfig cfg = small_config();
  cfg.use_generator = false;  // generate ignores the source switch entirely
  cfg.out_dir = tmp.dir("out");

  const auto paths = mil::run_generate(cfg);
  REQUIRE(paths.size() == 1);
  CHECK(artifact_names(paths) == std::vector<std::string>{"dataset.csv"});

  // The artifact must byte-match saving the same generated dataset directly.
  const mil::Dataset ds = mil::generate_concept_dataset(cfg.gen, cfg.seed);
  const std::string reference = tmp.dir("ref.csv");
  mil::save_dataset(ds, reference, mil::FileFormat::dense_csv);
  CHECK(read_file(paths[0]) == read_file(reference));

  check_rerun_identical(cfg, &mil::run_generate);
}

TEST_CASE("generate: the sparse format gets the triplet file name") {
  TempDir tmp;
  mil::ExperimentConfig cfg = small_config();
  cfg.format = mil::FileFormat::sparse_triplet;
  cfg.out_dir = tmp.dir("out");
  const auto paths = mil::run_generate(cfg);
  REQUIRE(paths.size() == 1);
  CHECK(artifact_names(paths) == std::vector<std::string>{"dataset.triplet"});
  const mil::Dataset back = mil::load_dataset(paths[0], mil::FileFormat::sparse_triplet);
  CHECK(back.bags.size() == 20);
}

TEST_CASE("generate: a missing output directory is a configuration error") {
  mil::ExperimentConfig cfg = small_config();
  CHECK_THROWS_WITH_AS(mil::run_generate(cfg), "out_dir is required", mil::ConfigError);
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

TEST_CASE("evaluate: writes per-fold results and a summary") {
  TempDir tmp;
  mil::ExperimentConfig cfg = small_config();
  cfg.pipeline.kind = mil::PipelineKind::dbag;
  cfg.out_dir = tmp.dir("out");

  const auto paths = mil::run_evaluate(cfg);
  CHECK(artifact_names(paths) == std::vector<std::string>{"results.csv", "summary.json"});

  const std::string results = read_file(paths[0]);
  CHECK(results.rfind("dataset,pipeline,fold,auc\n", 0) == 0);
  CHECK(count_lines(results) == 1 + cfg.folds);
  CHECK(results.find(",Dbag,") != std::string::npos);

  const auto summary = nlohmann::json::parse(read_file(paths[1]));
  CHECK(summary.at("pipeline") == "Dbag");
  CHECK(summary.at("folds") == 3);
  CHECK(summary.at("seed") == 7);
  CHECK(summary.at("result").at("per_fold_auc").size() == 3);

  check_rerun_identical(cfg, &mil::run_evaluate);
}

TEST_CASE("evaluate: emit_matrix adds the dissimilarity matrix artifact") {
  TempDir tmp;
  mil::ExperimentConfig cfg = small_config();
  cfg.pipeline.kind = mil::PipelineKind::dbag;
  cfg.emit_matrix = true;
  cfg.out_dir = tmp.dir("out");

  const auto paths = mil::run_evaluate(cfg);
  CHECK(artifact_names(paths) ==
        std::vector<std::string>{"results.csv", "summary.json", "matrix.csv"});
  const std::string matrix = read_file(paths[2]);
  // Two descriptive '#' lines plus one per column (20 bags), then one value
  // line per object.
  int provenance_lines = 0, value_lines = 0;
  std::size_t start = 0;
  while (start < matrix.size()) {
    const std::size_t end = matrix.find('\n', start);
    if (end == std::string::npos) break;
    (matrix[start] == '#' ? provenance_lines : value_lines) += 1;
    start = end + 1;
  }
  CHECK(provenance_lines == 22);
  CHECK(value_lines == 20);
}

TEST_CASE("evaluate: configuration errors name the offending field") {
  mil::ExperimentConfig cfg = small_config();
  cfg.out_dir = "unused";

  SUBCASE("matrix emission needs a dissimilarity representation") {
    cfg.pipeline.kind = mil::PipelineKind::minimax;
    cfg.emit_matrix = true;
    CHECK_THROWS_WITH_AS(mil::run_evaluate(cfg), "emit_matrix requires a dissimilarity pipeline",
                         mil::ConfigError);
  }
  SUBCASE("no data source") {
    cfg.use_generator = false;
    CHECK_THROWS_WITH_AS(mil::run_evaluate(cfg),
                         "data source required: set data_path or use_generator",
                         mil::ConfigError);
  }
  SUBCASE("two data sources") {
    cfg.data_path = "somewhere.csv";
    CHECK_THROWS_WITH_AS(mil::run_evaluate(cfg),
                         "data_path and use_generator are mutually exclusive", mil::ConfigError);
  }
  SUBCASE("too few folds") {
    cfg.folds = 1;
    CHECK_THROWS_WITH_AS(mil::run_evaluate(cfg), "folds must be at least 2 (got 1)",
                         mil::ConfigError);
  }
  SUBCASE("empty ensemble") {
    cfg.pipeline.ensemble.L = 0;
    CHECK_THROWS_WITH_AS(mil::run_evaluate(cfg), "ensemble.L must be at least 1 (got 0)",
                         mil::ConfigError);
  }
  SUBCASE("non-positive trade-off") {
    cfg.pipeline.ensemble.base.lambda = 0.0;
    CHECK_THROWS_WITH_AS(mil::run_evaluate(cfg), "lambda must be positive", mil::ConfigError);
  }
}

TEST_CASE("evaluate: reads a dataset back from disk") {
  TempDir tmp;
  mil::ExperimentConfig gen = small_config();
  gen.out_dir = tmp.dir("data");
  const auto data_paths = mil::run_generate(gen);

  mil::ExperimentConfig cfg = small_config();
  cfg.use_generator = false;
  cfg.data_path = data_paths[0];
  cfg.pipeline.kind = mil::PipelineKind::minimax;
  cfg.out_dir = tmp.dir("out");
  const auto paths = mil::run_evaluate(cfg);
  const auto summary = nlohmann::json::parse(read_file(paths[1]));
  CHECK(summary.at("dataset") == "dataset");  // named after the file stem
  CHECK(summary.at("data_path") == data_paths[0]);
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

TEST_CASE("sweep: one row per (L, s, fold) and deterministic output") {
  mil::ExperimentConfig cfg = small_config();
  cfg.pipeline.kind = mil::PipelineKind::drs;
  cfg.folds = 2;
  cfg.L_grid = {1, 5};
  cfg.s_grid = {0, 10};

  TempDir tmp;
  cfg.out_dir = tmp.dir("out");
  const auto paths = mil::run_sweep(cfg);
  REQUIRE(paths.size() == 1);
  CHECK(artifact_names(paths) == std::vector<std::string>{"sweep.csv"});
  const std::string csv = read_file(paths[0]);
  CHECK(csv.rfind("L,s,fold,auc\n", 0) == 0);
  CHECK(count_lines(csv) == 1 + 2 * 2 * 2);

  check_rerun_identical(cfg, &mil::run_sweep);
}

TEST_CASE("sweep: a small ensemble is a prefix of a large one, so results agree") {
  mil::ExperimentConfig base = small_config();
  base.pipeline.kind = mil::PipelineKind::drs;
  base.folds = 2;
  base.s_grid = {10};

  TempDir tmp;
  mil::ExperimentConfig only_large = base;
  only_large.L_grid = {3};
  only_large.out_dir = tmp.dir("large");
  const std::string large_csv = read_file(mil::run_sweep(only_large)[0]);

  mil::ExperimentConfig both = base;
  both.L_grid = {1, 3};
  both.out_dir = tmp.dir("both");
  const std::string both_csv = read_file(mil::run_sweep(both)[0]);

  // Every L=3 row of the combined sweep matches the standalone L=3 sweep.
  std::size_t pos = both_csv.find('\n') + 1;
  std::string l3_rows;
  while (pos < both_csv.size()) {
    const std::size_t end = both_csv.find('\n', pos);
    const std::string line = both_csv.substr(pos, end - pos);
    if (line.rfind("3,", 0) == 0) l3_rows += line + "\n";
    pos = end + 1;
  }
  CHECK(l3_rows == large_csv.substr(large_csv.find('\n') + 1));
}

TEST_CASE("sweep: needs the random-subspace pipeline and both grids") {
  mil::ExperimentConfig cfg = small_config();
  cfg.out_dir = "unused";
  cfg.L_grid = {1};
  cfg.s_grid = {0};

  SUBCASE("wrong pipeline") {
    cfg.pipeline.kind = mil::PipelineKind::dbag;
    CHECK_THROWS_WITH_AS(mil::run_sweep(cfg), "sweep requires the DRS pipeline (got Dbag)",
                         mil::ConfigError);
  }
  cfg.pipeline.kind = mil::PipelineKind::drs;
  SUBCASE("missing L grid") {
    cfg.L_grid.clear();
    CHECK_THROWS_WITH_AS(mil::run_sweep(cfg), "L_grid is required for sweep", mil::ConfigError);
  }
  SUBCASE("missing s grid") {
    cfg.s_grid.clear();
    CHECK_THROWS_WITH_AS(mil::run_sweep(cfg), "s_grid is required for sweep", mil::ConfigError);
  }
  SUBCASE("bad grid entries") {
    cfg.L_grid = {0};
    CHECK_THROWS_WITH_AS(mil::run_sweep(cfg), "L_grid entries must be at least 1",
                         mil::ConfigError);
  }
}

// ---------------------------------------------------------------------------
// learning-curve
// ---------------------------------------------------------------------------

TEST_CASE("learning-curve: one row per pipeline and size") {
  mil::ExperimentConfig cfg = small_config();
  cfg.sizes = {4, 6};
  cfg.repeats = 2;
  cfg.curve_pipelines = {mil::PipelineKind::dbag, mil::PipelineKind::minimax};

  TempDir tmp;
  cfg.out_dir = tmp.dir("out");
  const auto paths = mil::run_learning_curve(cfg);
  REQUIRE(paths.size() == 1);
  CHECK(artifact_names(paths) == std::vector<std::string>{"curve.csv"});
  const std::string csv = read_file(paths[0]);
  CHECK(csv.rfind("pipeline,size,mean_auc,stderr\n", 0) == 0);
  CHECK(count_lines(csv) == 1 + 2 * 2);
  CHECK(csv.find("Dbag,4,") != std::string::npos);
  CHECK(csv.find("minimax,6,") != std::string::npos);

  check_rerun_identical(cfg, &mil::run_learning_curve);
}

TEST_CASE("learning-curve: validates its own fields") {
  mil::ExperimentConfig cfg = small_config();
  cfg.out_dir = "unused";
  SUBCASE("sizes") {
    CHECK_THROWS_WITH_AS(mil::run_learning_curve(cfg), "sizes is required for learning-curve",
                         mil::ConfigError);
  }
  SUBCASE("repeats") {
    cfg.sizes = {4};
    cfg.repeats = 0;
    CHECK_THROWS_WITH_AS(mil::run_learning_curve(cfg), "repeats must be at least 1",
                         mil::ConfigError);
  }
  SUBCASE("test fraction") {
    cfg.sizes = {4};
    cfg.test_fraction = 1.0;
    CHECK_THROWS_WITH_AS(mil::run_learning_curve(cfg),
                         "test_fraction must lie strictly between 0 and 1", mil::ConfigError);
  }
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

TEST_CASE("analyze: ensemble pipelines produce the full instrument set") {
  mil::ExperimentConfig cfg = small_config();
  cfg.pipeline.kind = mil::PipelineKind::dbs;

  TempDir tmp;
  cfg.out_dir = tmp.dir("out");
  const auto paths = mil::run_analyze(cfg);
  // Equal bag sizes make the size/AUC correlation undefined, so no
  // correlation.csv appears and the summary records null.
  CHECK(artifact_names(paths) ==
        std::vector<std::string>{"ranking.csv", "per_subspace.csv", "disagreement.csv", "mds.csv",
                                 "analysis.json"});

  const std::string ranking = read_file(paths[0]);
  CHECK(ranking.rfind("rank,column,provenance,mean_abs_weight,count\n", 0) == 0);

  // 3 of 10 bags per class held out: 14 training bags, one member each.
  const std::string per_subspace = read_file(paths[1]);
  CHECK(per_subspace.rfind("member,origin,size,positive_fraction,auc\n", 0) == 0);
  CHECK(count_lines(per_subspace) == 1 + 14);

  const std::string disagreement = read_file(paths[2]);
  CHECK(count_lines(disagreement) == 1 + 14);

  const std::string mds = read_file(paths[3]);
  CHECK(mds.rfind("bag_id,label,x,y\n", 0) == 0);
  CHECK(count_lines(mds) == 1 + 20);

  const auto info = nlohmann::json::parse(read_file(paths[4]));
  CHECK(info.at("members") == 14);
  CHECK(info.at("n_train") == 14);
  CHECK(info.at("n_test") == 6);
  CHECK(info.at("size_auc_correlation").is_null());
  CHECK(info.at("test_auc").is_number());
  CHECK(info.contains("never_selected"));

  check_rerun_identical(cfg, &mil::run_analyze);
}

TEST_CASE("analyze: single-classifier pipelines rank weights directly") {
  mil::ExperimentConfig cfg = small_config();
  cfg.pipeline.kind = mil::PipelineKind::dbag;

  TempDir tmp;
  cfg.out_dir = tmp.dir("out");
  const auto paths = mil::run_analyze(cfg);
  CHECK(artifact_names(paths) ==
        std::vector<std::string>{"ranking.csv", "mds.csv", "analysis.json"});
  // One ranked entry per training prototype bag.
  CHECK(count_lines(read_file(paths[0])) == 1 + 14);
  const auto info = nlohmann::json::parse(read_file(paths[2]));
  CHECK(!info.contains("members"));
  CHECK(!info.contains("size_auc_correlation"));
}

TEST_CASE("analyze: summary-representation provenance names features and sides") {
  mil::ExperimentConfig cfg = small_config();
  cfg.pipeline.kind = mil::PipelineKind::minimax;

  TempDir tmp;
  cfg.out_dir = tmp.dir("out");
  const auto paths = mil::run_analyze(cfg);
  const std::string ranking = read_file(paths[0]);
  CHECK(ranking.find("min:f0") != std::string::npos);
  CHECK(ranking.find("max:f1") != std::string::npos);
  CHECK(count_lines(ranking) == 1 + 4);  // 2 features -> min and max columns
}

TEST_CASE("analyze: random-subspace ensembles skip the size correlation entirely") {
  mil::ExperimentConfig cfg = small_config();
  cfg.pipeline.kind = mil::PipelineKind::drs;
  cfg.pipeline.ensemble.L = 5;

  TempDir tmp;
  cfg.out_dir = tmp.dir("out");
  const auto paths = mil::run_analyze(cfg);
  CHECK(artifact_names(paths) ==
        std::vector<std::string>{"ranking.csv", "per_subspace.csv", "disagreement.csv", "mds.csv",
                                 "analysis.json"});
  const auto info = nlohmann::json::parse(read_file(paths[4]));
  CHECK(info.at("members") == 5);
  CHECK(!info.contains("size_auc_correlation"));
}

TEST_CASE("analyze: rejects a degenerate holdout fraction") {
  mil::ExperimentConfig cfg = small_config();
  cfg.out_dir = "unused";
  cfg.test_fraction = 0.0;
  CHECK_THROWS_WITH_AS(mil::run_analyze(cfg), "test_fraction must lie strictly between 0 and 1",
                       mil::ConfigError);
}
