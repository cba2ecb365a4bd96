#include "mil/dissimilarity.hpp"

#include <stdexcept>

#include "mil/csvio.hpp"

namespace mil {

namespace {

void check_dims(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b)
    throw std::invalid_argument(std::string(what) + ": dimensionality mismatch (" +
                                std::to_string(a) + " vs " + std::to_string(b) + ")");
}

// Minimum squared distance from point x to any row of m. Differences are
// computed directly so that identical points give an exact zero.
double min_sqdist_to_rows(const Eigen::MatrixXd& m, const Eigen::RowVectorXd& x) {
  return (m.rowwise() - x).rowwise().squaredNorm().minCoeff();
}

}  // namespace

bool DissimMatrix::instance_level() const {
  for (const ColumnRef& c : columns)
    if (c.whole_bag()) return false;
  return !columns.empty();
}

double instance_dist(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  check_dims(x.size(), y.size(), "instance_dist");
  return (x - y).squaredNorm();
}

double bag_dissim(const Bag& b_i, const Bag& b_j) {
  check_dims(b_i.instances.cols(), b_j.instances.cols(), "bag_dissim");
  double sum = 0.0;
  for (Eigen::Index k = 0; k < b_i.size(); ++k)
    sum += min_sqdist_to_rows(b_j.instances, b_i.instances.row(k));
  return sum / static_cast<double>(b_i.size());
}

Eigen::VectorXd instance_rep_row(const Bag& bag, std::span<const Bag> prototypes) {
  if (prototypes.empty()) throw std::invalid_argument("instance_rep_row: empty prototype list");
  Eigen::Index total = 0;
  for (const Bag& p : prototypes) total += p.size();

  Eigen::VectorXd row(total);
  Eigen::Index col = 0;
  for (const Bag& p : prototypes) {
    check_dims(bag.instances.cols(), p.instances.cols(), "instance_rep_row");
    for (Eigen::Index l = 0; l < p.size(); ++l)
      row[col++] = min_sqdist_to_rows(bag.instances, p.instances.row(l));
  }
  return row;
}

DissimMatrix build_bag_matrix(const Dataset& objects, std::span<const Bag> repr_set) {
  if (repr_set.empty()) throw std::invalid_argument("build_bag_matrix: empty representation set");

  DissimMatrix m;
  m.values.resize(static_cast<Eigen::Index>(objects.bags.size()),
                  static_cast<Eigen::Index>(repr_set.size()));
  m.row_ids.reserve(objects.bags.size());
  for (const Bag& p : repr_set) m.columns.push_back({p.id, -1});

  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const Bag& obj = objects.bags[static_cast<std::size_t>(i)];
    m.row_ids.push_back(obj.id);
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      m.values(i, j) = bag_dissim(obj, repr_set[static_cast<std::size_t>(j)]);
  }
  return m;
}

DissimMatrix build_inst_matrix(const Dataset& objects, std::span<const Bag> repr_set) {
  if (repr_set.empty()) throw std::invalid_argument("build_inst_matrix: empty representation set");

  DissimMatrix m;
  Eigen::Index total = 0;
  for (const Bag& p : repr_set) {
    for (Eigen::Index l = 0; l < p.size(); ++l) m.columns.push_back({p.id, l});
    total += p.size();
  }
  m.values.resize(static_cast<Eigen::Index>(objects.bags.size()), total);
  m.row_ids.reserve(objects.bags.size());

  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const Bag& obj = objects.bags[static_cast<std::size_t>(i)];
    m.row_ids.push_back(obj.id);
    m.values.row(i) = instance_rep_row(obj, repr_set).transpose();
  }
  return m;
}

Eigen::VectorXd minimax_rep(const Bag& bag) {
  const Eigen::Index d = bag.instances.cols();
  Eigen::VectorXd out(2 * d);
  out.head(d) = bag.instances.colwise().minCoeff().transpose();
  out.tail(d) = bag.instances.colwise().maxCoeff().transpose();
  return out;
}

std::string matrix_to_csv(const DissimMatrix& matrix) {
  std::string out;
  out += "# dissimilarity matrix " + std::to_string(matrix.rows()) + "x" +
         std::to_string(matrix.cols()) + "\n";
  out += "# column,prototype_bag,instance_index (instance_index=-1 means whole bag)\n";
  for (std::size_t c = 0; c < matrix.columns.size(); ++c)
    out += "# " + std::to_string(c) + "," + matrix.columns[c].bag_id + "," +
           std::to_string(matrix.columns[c].instance) + "\n";
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    out += matrix.row_ids[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < matrix.cols(); ++j)
      out += "," + format_double(matrix.values(i, j));
    out += '\n';
  }
  return out;
}

void write_matrix_csv(const DissimMatrix& matrix, const std::string& path) {
  write_text_file(path, matrix_to_csv(matrix));
}

}  // namespace mil
