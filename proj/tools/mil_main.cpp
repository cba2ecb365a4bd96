#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mil/commands.hpp"

namespace {

struct CliOptions {
  mil::ExperimentConfig cfg;
  std::string format = "dense-csv";
  std::string pipeline = "DRS";
  std::string combiner = "mean";
  std::string loss = "hinge";
  std::string reg = "l2";
  std::vector<std::string> curve_pipelines = {"Dbag", "Dinst", "DBS", "DRS"};
};

void add_data_options(CLI::App* cmd, CliOptions& o) {
  cmd->add_option("--data", o.cfg.data_path, "Dataset file to load");
  cmd->add_option("--format", o.format, "Dataset file format")
      ->check(CLI::IsMember({"dense-csv", "sparse-triplet"}))
      ->capture_default_str();
  cmd->add_flag("--generate", o.cfg.use_generator,
                "Use the synthetic concept dataset instead of a file");
  cmd->add_option("--gen-pos", o.cfg.gen.n_pos, "Generator: positive bags")
      ->capture_default_str();
  cmd->add_option("--gen-neg", o.cfg.gen.n_neg, "Generator: negative bags")
      ->capture_default_str();
  cmd->add_option("--gen-bag-size", o.cfg.gen.bag_size, "Generator: instances per bag")
      ->capture_default_str();
  cmd->add_option("--gen-square-side", o.cfg.gen.square_side, "Generator: square side length")
      ->capture_default_str();
  cmd->add_option("--gen-center-x", o.cfg.gen.center_x, "Generator: concept center x")
      ->capture_default_str();
  cmd->add_option("--gen-center-y", o.cfg.gen.center_y, "Generator: concept center y")
      ->capture_default_str();
  cmd->add_option("--gen-radius", o.cfg.gen.radius, "Generator: concept radius")
      ->capture_default_str();
}

void add_pipeline_options(CLI::App* cmd, CliOptions& o) {
  cmd->add_option("--pipeline", o.pipeline, "Representation and learner")
      ->check(CLI::IsMember({"Dbag", "Dinst", "DBS", "DRS", "minimax"}))
      ->capture_default_str();
  cmd->add_option("--L", o.cfg.pipeline.ensemble.L, "Random subspaces in the ensemble")
      ->capture_default_str();
  cmd->add_option("--s", o.cfg.pipeline.ensemble.s,
                  "Columns per random subspace (0 = one fifth of the columns)")
      ->capture_default_str();
  cmd->add_flag("--replacement,!--no-replacement", o.cfg.pipeline.ensemble.replacement,
                "Draw subspace columns with replacement");
  cmd->add_option("--combiner", o.combiner, "Ensemble fusion rule")
      ->check(CLI::IsMember({"mean", "vote", "product", "max"}))
      ->capture_default_str();
  cmd->add_option("--loss", o.loss, "Base classifier loss")
      ->check(CLI::IsMember({"hinge", "logistic"}))
      ->capture_default_str();
  cmd->add_option("--reg", o.reg, "Base classifier regularizer")
      ->check(CLI::IsMember({"l2", "l1"}))
      ->capture_default_str();
  cmd->add_option("--lambda", o.cfg.pipeline.ensemble.base.lambda, "Regularization strength")
      ->capture_default_str();
  cmd->add_option("--max-iters", o.cfg.pipeline.ensemble.base.max_iters,
                  "Optimizer iteration cap")
      ->capture_default_str();
  cmd->add_option("--tol", o.cfg.pipeline.ensemble.base.tol, "Optimizer gradient tolerance")
      ->capture_default_str();
}

void add_run_options(CLI::App* cmd, CliOptions& o) {
  cmd->add_option("--seed", o.cfg.seed, "Global random seed")->capture_default_str();
  cmd->add_option("--out", o.cfg.out_dir, "Output directory")->required();
  cmd->set_config("--config", "", "Read options from a key=value file");
}

void finalize(CliOptions& o) {
  o.cfg.format = mil::parse_format(o.format);
  o.cfg.pipeline.kind = mil::parse_pipeline(o.pipeline);
  mil::EnsembleConfig& e = o.cfg.pipeline.ensemble;
  e.scheme = o.cfg.pipeline.kind == mil::PipelineKind::dbs ? mil::SubspaceScheme::BS
                                                           : mil::SubspaceScheme::RS;
  e.combiner = mil::parse_combiner(o.combiner);
  e.loss = mil::parse_loss(o.loss);
  e.base.reg = mil::parse_reg(o.reg);
  e.seed = o.cfg.seed;
  o.cfg.curve_pipelines.clear();
  for (const std::string& name : o.curve_pipelines)
    o.cfg.curve_pipelines.push_back(mil::parse_pipeline(name));
}

void report(const std::vector<std::string>& written) {
  for (const std::string& path : written) std::cout << "wrote " << path << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dissimilarity-space multiple-instance learning toolkit"};
  app.require_subcommand(1);

  CliOptions generate_opts;
  CLI::App* generate = app.add_subcommand("generate", "Write a synthetic concept dataset");
  generate->add_option("--format", generate_opts.format, "Dataset file format")
      ->check(CLI::IsMember({"dense-csv", "sparse-triplet"}))
      ->capture_default_str();
  generate->add_option("--gen-pos", generate_opts.cfg.gen.n_pos, "Positive bags")
      ->capture_default_str();
  generate->add_option("--gen-neg", generate_opts.cfg.gen.n_neg, "Negative bags")
      ->capture_default_str();
  generate->add_option("--gen-bag-size", generate_opts.cfg.gen.bag_size, "Instances per bag")
      ->capture_default_str();
  generate->add_option("--gen-square-side", generate_opts.cfg.gen.square_side,
                       "Square side length")
      ->capture_default_str();
  generate->add_option("--gen-center-x", generate_opts.cfg.gen.center_x, "Concept center x")
      ->capture_default_str();
  generate->add_option("--gen-center-y", generate_opts.cfg.gen.center_y, "Concept center y")
      ->capture_default_str();
  generate->add_option("--gen-radius", generate_opts.cfg.gen.radius, "Concept radius")
      ->capture_default_str();
  add_run_options(generate, generate_opts);
  generate->callback([&generate_opts] {
    finalize(generate_opts);
    report(mil::run_generate(generate_opts.cfg));
  });

  CliOptions evaluate_opts;
  CLI::App* evaluate = app.add_subcommand("evaluate", "Cross-validated AUC for one pipeline");
  add_data_options(evaluate, evaluate_opts);
  add_pipeline_options(evaluate, evaluate_opts);
  evaluate->add_option("--folds", evaluate_opts.cfg.folds, "Cross-validation folds")
      ->capture_default_str();
  evaluate->add_flag("--emit-matrix", evaluate_opts.cfg.emit_matrix,
                     "Also write the full-dataset dissimilarity matrix");
  add_run_options(evaluate, evaluate_opts);
  evaluate->callback([&evaluate_opts] {
    finalize(evaluate_opts);
    report(mil::run_evaluate(evaluate_opts.cfg));
  });

  CliOptions sweep_opts;
  CLI::App* sweep = app.add_subcommand("sweep", "Grid over ensemble size and subspace size");
  add_data_options(sweep, sweep_opts);
  add_pipeline_options(sweep, sweep_opts);
  sweep->add_option("--folds", sweep_opts.cfg.folds, "Cross-validation folds")
      ->capture_default_str();
  sweep->add_option("--L-grid", sweep_opts.cfg.L_grid, "Ensemble sizes to evaluate")
      ->delimiter(',')
      ->required();
  sweep->add_option("--s-grid", sweep_opts.cfg.s_grid,
                    "Subspace sizes to evaluate (0 = default rule)")
      ->delimiter(',')
      ->required();
  add_run_options(sweep, sweep_opts);
  sweep->callback([&sweep_opts] {
    finalize(sweep_opts);
    report(mil::run_sweep(sweep_opts.cfg));
  });

  CliOptions curve_opts;
  CLI::App* curve = app.add_subcommand("learning-curve", "AUC versus training-set size");
  add_data_options(curve, curve_opts);
  add_pipeline_options(curve, curve_opts);
  curve->add_option("--sizes", curve_opts.cfg.sizes, "Training-set sizes (bags)")
      ->delimiter(',')
      ->required();
  curve->add_option("--repeats", curve_opts.cfg.repeats, "Repeats per size")
      ->capture_default_str();
  curve->add_option("--test-fraction", curve_opts.cfg.test_fraction, "Holdout fraction")
      ->capture_default_str();
  curve->add_option("--pipelines", curve_opts.curve_pipelines, "Pipelines to trace")
      ->delimiter(',')
      ->check(CLI::IsMember({"Dbag", "Dinst", "DBS", "DRS", "minimax"}))
      ->capture_default_str();
  add_run_options(curve, curve_opts);
  curve->callback([&curve_opts] {
    finalize(curve_opts);
    report(mil::run_learning_curve(curve_opts.cfg));
  });

  CliOptions analyze_opts;
  CLI::App* analyze = app.add_subcommand("analyze", "Inspect a fitted pipeline on a holdout");
  add_data_options(analyze, analyze_opts);
  add_pipeline_options(analyze, analyze_opts);
  analyze->add_option("--test-fraction", analyze_opts.cfg.test_fraction, "Holdout fraction")
      ->capture_default_str();
  add_run_options(analyze, analyze_opts);
  analyze->callback([&analyze_opts] {
    finalize(analyze_opts);
    report(mil::run_analyze(analyze_opts.cfg));
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const mil::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
