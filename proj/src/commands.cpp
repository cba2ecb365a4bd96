#include "mil/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>

#include "mil/analysis.hpp"
#include "mil/csvio.hpp"
#include "mil/rng.hpp"
#include "mil/serialize.hpp"

namespace mil {

namespace {

namespace fs = std::filesystem;

std::string prepare_out_dir(const ExperimentConfig& cfg) {
  if (cfg.out_dir.empty()) throw ConfigError("out_dir is required");
  fs::create_directories(cfg.out_dir);
  return cfg.out_dir;
}

std::string artifact_path(const std::string& out_dir, const std::string& name) {
  return (fs::path(out_dir) / name).string();
}

void check_data_source(const ExperimentConfig& cfg) {
  if (cfg.data_path.empty() && !cfg.use_generator)
    throw ConfigError("data source required: set data_path or use_generator");
  if (!cfg.data_path.empty() && cfg.use_generator)
    throw ConfigError("data_path and use_generator are mutually exclusive");
}

void check_pipeline(const ExperimentConfig& cfg) {
  const EnsembleConfig& e = cfg.pipeline.ensemble;
  if (e.L < 1) throw ConfigError("ensemble.L must be at least 1 (got " + std::to_string(e.L) + ")");
  if (e.s < 0)
    throw ConfigError("ensemble.s must be 0 (default rule) or positive (got " +
                      std::to_string(e.s) + ")");
  if (!(e.base.lambda > 0.0)) throw ConfigError("lambda must be positive");
  if (e.base.max_iters < 1) throw ConfigError("max_iters must be at least 1");
  if (!(e.base.tol > 0.0)) throw ConfigError("tol must be positive");
}

void check_folds(const ExperimentConfig& cfg) {
  if (cfg.folds < 2)
    throw ConfigError("folds must be at least 2 (got " + std::to_string(cfg.folds) + ")");
}

std::string dataset_file_name(FileFormat format) {
  return format == FileFormat::dense_csv ? "dataset.csv" : "dataset.triplet";
}

Json config_echo(const ExperimentConfig& cfg, const Dataset& ds) {
  Json j;
  j["dataset"] = ds.name;
  if (cfg.use_generator) {
    Json g;
    g["positive_bags"] = cfg.gen.n_pos;
    g["negative_bags"] = cfg.gen.n_neg;
    g["bag_size"] = cfg.gen.bag_size;
    g["square_side"] = cfg.gen.square_side;
    g["center_x"] = cfg.gen.center_x;
    g["center_y"] = cfg.gen.center_y;
    g["radius"] = cfg.gen.radius;
    j["generator"] = std::move(g);
  } else {
    j["data_path"] = cfg.data_path;
    j["format"] = to_string(cfg.format);
  }
  j["pipeline"] = to_string(cfg.pipeline.kind);
  j["ensemble"] = to_json(cfg.pipeline.ensemble);
  j["seed"] = cfg.seed;
  return j;
}

void write_json_artifact(const std::string& path, const Json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

/// Inspection matrix over the whole dataset (scaled on the whole dataset);
/// evaluation never reads this.
DissimMatrix inspection_matrix(const ExperimentConfig& cfg, const Dataset& ds) {
  const Scaler scaler = fit_scaler(ds);
  const Dataset scaled = apply_scaler(scaler, ds);
  if (cfg.pipeline.kind == PipelineKind::dbag) return build_bag_matrix(scaled, scaled.bags);
  return build_inst_matrix(scaled, scaled.bags);
}

struct StratifiedSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

StratifiedSplit stratified_holdout(const std::vector<int>& labels, double test_fraction,
                                   std::uint64_t seed) {
  std::vector<std::size_t> pos;
  std::vector<std::size_t> neg;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == 1) {
      pos.push_back(i);
    } else if (labels[i] == -1) {
      neg.push_back(i);
    } else {
      throw std::invalid_argument("holdout split requires labeled objects (+1 or -1)");
    }
  }
  if (pos.empty() || neg.empty())
    throw std::invalid_argument("holdout split needs both classes");

  Rng rng(seed);
  rng.shuffle(pos);
  rng.shuffle(neg);
  const auto take = [test_fraction](std::size_t n) {
    const auto t = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::lround(test_fraction * static_cast<double>(n))));
    if (t >= n)
      throw std::invalid_argument("test fraction leaves no training objects in some class");
    return t;
  };
  const std::size_t tp = take(pos.size());
  const std::size_t tn = take(neg.size());

  StratifiedSplit split;
  split.test.assign(pos.begin(), pos.begin() + static_cast<long>(tp));
  split.test.insert(split.test.end(), neg.begin(), neg.begin() + static_cast<long>(tn));
  split.train.assign(pos.begin() + static_cast<long>(tp), pos.end());
  split.train.insert(split.train.end(), neg.begin() + static_cast<long>(tn), neg.end());
  return split;
}

std::string ranking_csv(const WeightRanking& ranking) {
  std::string out = "rank,column,provenance,mean_abs_weight,count\n";
  int rank = 1;
  for (const RankedColumn& rc : ranking.ranked) {
    out += std::to_string(rank) + "," + std::to_string(rc.column) + "," + rc.provenance + "," +
           format_double(rc.mean_abs_weight) + "," + std::to_string(rc.count) + "\n";
    ++rank;
  }
  return out;
}

/// Single-classifier fallback for the weight ranking: every column is
/// "selected once" with its own absolute weight.
WeightRanking ranking_from_weights(const Eigen::VectorXd& w,
                                   const std::vector<std::string>& provenance) {
  WeightRanking ranking;
  for (Eigen::Index c = 0; c < w.size(); ++c) {
    RankedColumn rc;
    rc.column = c;
    rc.provenance = provenance[static_cast<std::size_t>(c)];
    rc.mean_abs_weight = std::abs(w[c]);
    rc.count = 1;
    ranking.ranked.push_back(std::move(rc));
  }
  std::sort(ranking.ranked.begin(), ranking.ranked.end(),
            [](const RankedColumn& a, const RankedColumn& b) {
              if (a.mean_abs_weight != b.mean_abs_weight)
                return a.mean_abs_weight > b.mean_abs_weight;
              return a.column < b.column;
            });
  return ranking;
}

}  // namespace

Dataset load_or_generate(const ExperimentConfig& cfg) {
  check_data_source(cfg);
  if (cfg.use_generator) return generate_concept_dataset(cfg.gen, cfg.seed);
  return load_dataset(cfg.data_path, cfg.format);
}

std::vector<std::string> run_generate(const ExperimentConfig& cfg) {
  const std::string out_dir = prepare_out_dir(cfg);
  const Dataset ds = generate_concept_dataset(cfg.gen, cfg.seed);
  const std::string path = artifact_path(out_dir, dataset_file_name(cfg.format));
  save_dataset(ds, path, cfg.format);
  return {path};
}

std::vector<std::string> run_evaluate(const ExperimentConfig& cfg) {
  check_data_source(cfg);
  check_pipeline(cfg);
  check_folds(cfg);
  const std::string out_dir = prepare_out_dir(cfg);
  if (cfg.emit_matrix && cfg.pipeline.kind == PipelineKind::minimax)
    throw ConfigError("emit_matrix requires a dissimilarity pipeline");

  const Dataset ds = load_or_generate(cfg);
  const EvalResult result = cross_validate(ds, pipeline_fitter(cfg.pipeline), cfg.folds, cfg.seed);

  std::vector<std::string> written;

  std::string csv = "dataset,pipeline,fold,auc\n";
  for (std::size_t f = 0; f < result.per_fold_auc.size(); ++f)
    csv += ds.name + "," + to_string(cfg.pipeline.kind) + "," + std::to_string(f) + "," +
           format_double(result.per_fold_auc[f]) + "\n";
  const std::string results_path = artifact_path(out_dir, "results.csv");
  write_text_file(results_path, csv);
  written.push_back(results_path);

  Json summary = config_echo(cfg, ds);
  summary["folds"] = cfg.folds;
  summary["result"] = to_json(result);
  const std::string summary_path = artifact_path(out_dir, "summary.json");
  write_json_artifact(summary_path, summary);
  written.push_back(summary_path);

  if (cfg.emit_matrix) {
    const std::string matrix_path = artifact_path(out_dir, "matrix.csv");
    write_matrix_csv(inspection_matrix(cfg, ds), matrix_path);
    written.push_back(matrix_path);
  }
  return written;
}

std::vector<std::string> run_sweep(const ExperimentConfig& cfg) {
  check_data_source(cfg);
  check_pipeline(cfg);
  check_folds(cfg);
  if (cfg.pipeline.kind != PipelineKind::drs)
    throw ConfigError("sweep requires the DRS pipeline (got " + to_string(cfg.pipeline.kind) +
                      ")");
  if (cfg.L_grid.empty()) throw ConfigError("L_grid is required for sweep");
  if (cfg.s_grid.empty()) throw ConfigError("s_grid is required for sweep");
  for (int L : cfg.L_grid)
    if (L < 1) throw ConfigError("L_grid entries must be at least 1");
  for (int s : cfg.s_grid)
    if (s < 0) throw ConfigError("s_grid entries must be 0 (default rule) or positive");
  const std::string out_dir = prepare_out_dir(cfg);

  const Dataset ds = load_or_generate(cfg);
  const FoldPlan plan = stratified_kfold(ds.labels(), cfg.folds, cfg.seed);
  const int L_max = *std::max_element(cfg.L_grid.begin(), cfg.L_grid.end());

  // aucs[L_index][s_index][fold]
  std::vector<std::vector<std::vector<double>>> aucs(
      cfg.L_grid.size(),
      std::vector<std::vector<double>>(cfg.s_grid.size(),
                                       std::vector<double>(static_cast<std::size_t>(plan.k))));

  for (int fold = 0; fold < plan.k; ++fold) {
    std::vector<std::size_t> train_idx;
    std::vector<std::size_t> test_idx;
    for (std::size_t i = 0; i < plan.assignments.size(); ++i)
      (plan.assignments[i] == fold ? test_idx : train_idx).push_back(i);
    const Dataset train = select_bags(ds, train_idx);
    const Dataset test = select_bags(ds, test_idx);
    const std::vector<int> test_labels = test.labels();

    for (std::size_t si = 0; si < cfg.s_grid.size(); ++si) {
      // Train the largest ensemble once; every smaller L is a prefix of it,
      // so one fit covers the whole L grid.
      Pipeline p = cfg.pipeline;
      p.ensemble.L = L_max;
      p.ensemble.s = cfg.s_grid[si];
      const std::uint64_t fit_seed =
          stream_seed(cfg.seed, "sweep-fit",
                      (static_cast<std::uint64_t>(fold) << 32) | static_cast<std::uint64_t>(si));
      const PipelineModel model = fit_pipeline(p, train, fit_seed);
      const Eigen::MatrixXd posteriors =
          member_posteriors(model.ensemble(), model.features(test));

      for (std::size_t li = 0; li < cfg.L_grid.size(); ++li) {
        const Eigen::MatrixXd prefix = posteriors.topRows(cfg.L_grid[li]);
        aucs[li][si][static_cast<std::size_t>(fold)] =
            auc(combine(prefix, p.ensemble.combiner), test_labels);
      }
    }
  }

  std::string csv = "L,s,fold,auc\n";
  for (std::size_t li = 0; li < cfg.L_grid.size(); ++li)
    for (std::size_t si = 0; si < cfg.s_grid.size(); ++si)
      for (int fold = 0; fold < plan.k; ++fold)
        csv += std::to_string(cfg.L_grid[li]) + "," + std::to_string(cfg.s_grid[si]) + "," +
               std::to_string(fold) + "," +
               format_double(aucs[li][si][static_cast<std::size_t>(fold)]) + "\n";
  const std::string path = artifact_path(out_dir, "sweep.csv");
  write_text_file(path, csv);
  return {path};
}

std::vector<std::string> run_learning_curve(const ExperimentConfig& cfg) {
  check_data_source(cfg);
  check_pipeline(cfg);
  if (cfg.sizes.empty()) throw ConfigError("sizes is required for learning-curve");
  if (cfg.repeats < 1) throw ConfigError("repeats must be at least 1");
  if (!(cfg.test_fraction > 0.0 && cfg.test_fraction < 1.0))
    throw ConfigError("test_fraction must lie strictly between 0 and 1");
  if (cfg.curve_pipelines.empty()) throw ConfigError("learning-curve needs at least one pipeline");
  const std::string out_dir = prepare_out_dir(cfg);

  const Dataset ds = load_or_generate(cfg);

  std::string csv = "pipeline,size,mean_auc,stderr\n";
  for (PipelineKind kind : cfg.curve_pipelines) {
    Pipeline p = cfg.pipeline;
    p.kind = kind;
    // Same seed for every pipeline: identical splits, so curves are paired.
    const auto curve = learning_curve(ds, pipeline_fitter(p), cfg.sizes, cfg.repeats, cfg.seed,
                                      cfg.test_fraction);
    for (const CurvePoint& pt : curve)
      csv += to_string(kind) + "," + std::to_string(pt.size) + "," + format_double(pt.mean_auc) +
             "," + format_double(pt.stderr_) + "\n";
  }
  const std::string path = artifact_path(out_dir, "curve.csv");
  write_text_file(path, csv);
  return {path};
}

std::vector<std::string> run_analyze(const ExperimentConfig& cfg) {
  check_data_source(cfg);
  check_pipeline(cfg);
  if (!(cfg.test_fraction > 0.0 && cfg.test_fraction < 1.0))
    throw ConfigError("test_fraction must lie strictly between 0 and 1");
  const std::string out_dir = prepare_out_dir(cfg);

  const Dataset ds = load_or_generate(cfg);
  const StratifiedSplit split = stratified_holdout(ds.labels(), cfg.test_fraction,
                                                   stream_seed(cfg.seed, "analyze-split"));
  const Dataset train = select_bags(ds, split.train);
  const Dataset test = select_bags(ds, split.test);
  const PipelineModel model =
      fit_pipeline(cfg.pipeline, train, stream_seed(cfg.seed, "analyze-fit"));
  const double test_auc = auc(model.score(test), test.labels());

  std::vector<std::string> written;
  Json info = config_echo(cfg, ds);
  info["n_train"] = train.bags.size();
  info["n_test"] = test.bags.size();
  info["test_auc"] = test_auc;

  const bool is_ensemble = std::holds_alternative<SubspaceEnsemble>(model.predictor);

  // Weight ranking over the training representation's columns.
  if (is_ensemble) {
    const Dataset scaled_train = apply_scaler(model.scaler, train);
    const DissimMatrix train_matrix = build_inst_matrix(scaled_train, model.prototypes);
    const WeightRanking ranking =
        rank_dissimilarities(model.ensemble(), train_matrix.cols(), train_matrix.columns);
    const std::string ranking_path = artifact_path(out_dir, "ranking.csv");
    write_text_file(ranking_path, ranking_csv(ranking));
    written.push_back(ranking_path);

    Json never = Json::array();
    for (Eigen::Index c : ranking.never_selected) never.push_back(static_cast<long long>(c));
    info["never_selected"] = std::move(never);
  } else {
    std::vector<std::string> provenance;
    if (cfg.pipeline.kind == PipelineKind::minimax) {
      for (Eigen::Index j = 0; j < ds.dim; ++j)
        provenance.push_back("min:f" + std::to_string(j));
      for (Eigen::Index j = 0; j < ds.dim; ++j)
        provenance.push_back("max:f" + std::to_string(j));
    } else {
      const Dataset scaled_train = apply_scaler(model.scaler, train);
      const DissimMatrix train_matrix = cfg.pipeline.kind == PipelineKind::dbag
                                            ? build_bag_matrix(scaled_train, model.prototypes)
                                            : build_inst_matrix(scaled_train, model.prototypes);
      for (const ColumnRef& ref : train_matrix.columns)
        provenance.push_back(ref.whole_bag() ? ref.bag_id
                                             : ref.bag_id + ":" + std::to_string(ref.instance));
    }
    const WeightRanking ranking = ranking_from_weights(model.linear().w, provenance);
    const std::string ranking_path = artifact_path(out_dir, "ranking.csv");
    write_text_file(ranking_path, ranking_csv(ranking));
    written.push_back(ranking_path);
  }

  // Ensemble instruments on the holdout.
  if (is_ensemble) {
    const SubspaceEnsemble& ensemble = model.ensemble();
    const Eigen::MatrixXd X_test = model.features(test);
    const std::vector<double> member_auc = per_subspace_auc(ensemble, X_test, test.labels());

    std::map<std::string, int> train_label_by_bag;
    for (const Bag& b : train.bags) train_label_by_bag[b.id] = label_value(b.label);
    const Dataset scaled_train = apply_scaler(model.scaler, train);
    const DissimMatrix train_matrix = build_inst_matrix(scaled_train, model.prototypes);

    std::string sub_csv = "member,origin,size,positive_fraction,auc\n";
    for (std::size_t l = 0; l < ensemble.members.size(); ++l) {
      const SubspaceSpec& spec = ensemble.members[l].spec;
      int n_pos_cols = 0;
      for (Eigen::Index c : spec.indices) {
        const ColumnRef& ref = train_matrix.columns[static_cast<std::size_t>(c)];
        if (train_label_by_bag.at(ref.bag_id) == 1) ++n_pos_cols;
      }
      sub_csv += std::to_string(l) + "," + origin_label(spec.origin) + "," +
                 std::to_string(spec.indices.size()) + "," +
                 format_double(static_cast<double>(n_pos_cols) /
                               static_cast<double>(spec.indices.size())) +
                 "," + format_double(member_auc[l]) + "\n";
    }
    const std::string sub_path = artifact_path(out_dir, "per_subspace.csv");
    write_text_file(sub_path, sub_csv);
    written.push_back(sub_path);

    const DisagreementMatrix dis = disagreement(harden(member_posteriors(ensemble, X_test)));
    const Eigen::MatrixXd fractions = dis.fractions();
    std::string dis_csv = "member";
    for (Eigen::Index c = 0; c < fractions.cols(); ++c) dis_csv += ",m" + std::to_string(c);
    dis_csv += "\n";
    for (Eigen::Index r = 0; r < fractions.rows(); ++r) {
      dis_csv += std::to_string(r);
      for (Eigen::Index c = 0; c < fractions.cols(); ++c)
        dis_csv += "," + format_double(fractions(r, c));
      dis_csv += "\n";
    }
    const std::string dis_path = artifact_path(out_dir, "disagreement.csv");
    write_text_file(dis_path, dis_csv);
    written.push_back(dis_path);

    double auc_sum = 0.0;
    for (double a : member_auc) auc_sum += a;
    Json sub_info;
    sub_info["mean"] = auc_sum / static_cast<double>(member_auc.size());
    sub_info["min"] = *std::min_element(member_auc.begin(), member_auc.end());
    sub_info["max"] = *std::max_element(member_auc.begin(), member_auc.end());
    info["members"] = ensemble.members.size();
    info["subspace_auc"] = std::move(sub_info);

    if (cfg.pipeline.kind == PipelineKind::dbs) {
      std::vector<double> sizes;
      sizes.reserve(ensemble.members.size());
      for (const EnsembleMember& m : ensemble.members)
        sizes.push_back(static_cast<double>(m.spec.indices.size()));
      try {
        const Correlation corr = correlation(sizes, member_auc);
        std::string corr_csv = "statistic,value\n";
        corr_csv += "pearson," + format_double(corr.pearson) + "\n";
        corr_csv += "spearman," + format_double(corr.spearman) + "\n";
        const std::string corr_path = artifact_path(out_dir, "correlation.csv");
        write_text_file(corr_path, corr_csv);
        written.push_back(corr_path);
        Json corr_info;
        corr_info["pearson"] = corr.pearson;
        corr_info["spearman"] = corr.spearman;
        info["size_auc_correlation"] = std::move(corr_info);
      } catch (const std::invalid_argument&) {
        // Constant bag sizes (or constant member AUCs) leave the
        // correlation undefined; record that instead of failing.
        info["size_auc_correlation"] = nullptr;
      }
    }
  }

  // A 2-D map of all bags from the symmetrized bag dissimilarities
  // (inspection only; not part of any evaluation).
  {
    const Scaler full_scaler = fit_scaler(ds);
    const Dataset scaled = apply_scaler(full_scaler, ds);
    const Eigen::MatrixXd D = build_bag_matrix(scaled, scaled.bags).values;
    const Eigen::MatrixXd sym = 0.5 * (D + D.transpose());
    const Eigen::MatrixXd coords = classical_mds(sym, 2);
    std::string mds_csv = "bag_id,label,x,y\n";
    for (std::size_t i = 0; i < ds.bags.size(); ++i) {
      const auto r = static_cast<Eigen::Index>(i);
      mds_csv += ds.bags[i].id + "," + std::to_string(label_value(ds.bags[i].label)) + "," +
                 format_double(coords(r, 0)) + "," + format_double(coords(r, 1)) + "\n";
    }
    const std::string mds_path = artifact_path(out_dir, "mds.csv");
    write_text_file(mds_path, mds_csv);
    written.push_back(mds_path);
  }

  const std::string info_path = artifact_path(out_dir, "analysis.json");
  write_json_artifact(info_path, info);
  written.push_back(info_path);
  return written;
}

}  // namespace mil
