#include "mil/dataset_io.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_set>

#include "mil/csvio.hpp"

namespace mil {

namespace {

std::string_view trim_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

Label parse_label(std::string_view field, const std::string& path, long line_no) {
  if (field == "+1" || field == "1") return Label::positive;
  if (field == "-1") return Label::negative;
  if (field == "0") return Label::unlabeled;
  throw ParseError(path, line_no, "malformed row: label must be +1, -1 or 0, got '" +
                                      std::string(field) + "'");
}

void finish_bag(Bag&& bag, Dataset& ds) { ds.bags.push_back(std::move(bag)); }

Dataset load_dense(const std::string& path, std::istream& in) {
  Dataset ds;
  ds.name = std::filesystem::path(path).stem().string();

  std::unordered_set<std::string> closed_ids;
  std::string current_id;
  Label current_label = Label::unlabeled;
  std::vector<Eigen::VectorXd> current_rows;
  long current_first_line = 0;
  bool have_current = false;

  auto close_current = [&] {
    if (!have_current) return;
    Bag bag;
    bag.id = current_id;
    bag.label = current_label;
    bag.instances.resize(static_cast<Eigen::Index>(current_rows.size()), ds.dim);
    for (std::size_t r = 0; r < current_rows.size(); ++r)
      bag.instances.row(static_cast<Eigen::Index>(r)) = current_rows[r];
    finish_bag(std::move(bag), ds);
    closed_ids.insert(current_id);
    current_rows.clear();
    have_current = false;
  };

  std::string raw;
  long line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim_cr(raw);
    if (line.empty()) continue;

    const auto fields = split_fields(line);
    if (fields.size() < 3)
      throw ParseError(path, line_no, "malformed row: expected bag_id,label,f1,... got " +
                                          std::to_string(fields.size()) + " column(s)");

    const std::string id(fields[0]);
    const Label label = parse_label(fields[1], path, line_no);
    const Eigen::Index d = static_cast<Eigen::Index>(fields.size()) - 2;

    if (ds.dim == 0 && ds.bags.empty() && !have_current) {
      ds.dim = d;
    } else if (d != ds.dim) {
      throw ParseError(path, line_no, "inconsistent dimensionality: row has " +
                                          std::to_string(d) + " feature(s), expected " +
                                          std::to_string(ds.dim));
    }

    if (!have_current || id != current_id) {
      close_current();
      if (closed_ids.count(id))
        throw ParseError(path, line_no, "duplicate bag id '" + id + "'");
      current_id = id;
      current_label = label;
      current_first_line = line_no;
      have_current = true;
    } else if (label != current_label) {
      throw ParseError(path, line_no, "malformed row: label of bag '" + id +
                                          "' conflicts with line " +
                                          std::to_string(current_first_line));
    }

    Eigen::VectorXd row(d);
    for (Eigen::Index j = 0; j < d; ++j) {
      const auto v = parse_double(fields[static_cast<std::size_t>(j) + 2]);
      if (!v)
        throw ParseError(path, line_no, "malformed row: feature " + std::to_string(j + 1) +
                                            " is not a number: '" +
                                            std::string(fields[static_cast<std::size_t>(j) + 2]) +
                                            "'");
      row[j] = *v;
    }
    current_rows.push_back(std::move(row));
  }
  close_current();

  if (ds.bags.empty()) throw ParseError(path, line_no ? line_no : 1, "empty file");
  return ds;
}

Dataset load_sparse(const std::string& path, std::istream& in) {
  Dataset ds;
  ds.name = std::filesystem::path(path).stem().string();

  std::unordered_set<std::string> closed_ids;
  bool have_dim = false;

  std::string current_id;
  Label current_label = Label::unlabeled;
  long current_header_line = 0;
  bool have_current = false;
  // (instance,feature) -> value for the open bag
  std::map<std::pair<long long, long long>, double> current_entries;
  long long current_max_instance = -1;

  auto close_current = [&] {
    if (!have_current) return;
    if (current_max_instance < 0)
      throw ParseError(path, current_header_line, "empty bag '" + current_id + "'");
    Bag bag;
    bag.id = current_id;
    bag.label = current_label;
    bag.instances = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(current_max_instance + 1),
                                          ds.dim);
    for (const auto& [key, value] : current_entries)
      bag.instances(static_cast<Eigen::Index>(key.first),
                    static_cast<Eigen::Index>(key.second)) = value;
    finish_bag(std::move(bag), ds);
    closed_ids.insert(current_id);
    current_entries.clear();
    current_max_instance = -1;
    have_current = false;
  };

  std::string raw;
  long line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim_cr(raw);
    if (line.empty()) continue;

    const auto fields = split_fields(line);
    if (!have_dim) {
      if (fields.size() != 1)
        throw ParseError(path, line_no, "malformed row: first line must be the dimensionality");
      const auto d = parse_int(fields[0]);
      if (!d || *d < 1)
        throw ParseError(path, line_no, "malformed row: dimensionality must be a positive "
                                        "integer, got '" + std::string(fields[0]) + "'");
      ds.dim = static_cast<Eigen::Index>(*d);
      have_dim = true;
      continue;
    }

    if (fields.size() == 2) {  // bag header
      close_current();
      const std::string id(fields[0]);
      if (closed_ids.count(id)) throw ParseError(path, line_no, "duplicate bag id '" + id + "'");
      current_id = id;
      current_label = parse_label(fields[1], path, line_no);
      current_header_line = line_no;
      have_current = true;
      continue;
    }

    if (fields.size() == 3) {  // triplet
      if (!have_current)
        throw ParseError(path, line_no, "malformed row: triplet before any bag header");
      const auto inst = parse_int(fields[0]);
      const auto feat = parse_int(fields[1]);
      const auto value = parse_double(fields[2]);
      if (!inst || *inst < 0)
        throw ParseError(path, line_no, "malformed row: bad instance index '" +
                                            std::string(fields[0]) + "'");
      if (!feat || *feat < 0)
        throw ParseError(path, line_no, "malformed row: bad feature index '" +
                                            std::string(fields[1]) + "'");
      if (!value)
        throw ParseError(path, line_no, "malformed row: bad value '" + std::string(fields[2]) +
                                            "'");
      if (*feat >= ds.dim)
        throw ParseError(path, line_no, "inconsistent dimensionality: feature index " +
                                            std::to_string(*feat) + " exceeds declared " +
                                            std::to_string(ds.dim));
      if (!current_entries.emplace(std::make_pair(*inst, *feat), *value).second)
        throw ParseError(path, line_no, "malformed row: duplicate triplet for instance " +
                                            std::to_string(*inst) + ", feature " +
                                            std::to_string(*feat));
      if (*inst > current_max_instance) current_max_instance = *inst;
      continue;
    }

    throw ParseError(path, line_no, "malformed row: expected 1, 2 or 3 columns, got " +
                                        std::to_string(fields.size()));
  }
  close_current();

  if (ds.bags.empty()) throw ParseError(path, line_no ? line_no : 1, "empty file");
  return ds;
}

std::string label_field(Label l) {
  switch (l) {
    case Label::positive: return "1";
    case Label::negative: return "-1";
    case Label::unlabeled: return "0";
  }
  return "0";
}

std::string save_dense(const Dataset& ds) {
  std::string out;
  for (const Bag& bag : ds.bags) {
    for (Eigen::Index i = 0; i < bag.size(); ++i) {
      out += bag.id;
      out += ',';
      out += label_field(bag.label);
      for (Eigen::Index j = 0; j < ds.dim; ++j) {
        out += ',';
        out += format_double(bag.instances(i, j));
      }
      out += '\n';
    }
  }
  return out;
}

std::string save_sparse(const Dataset& ds) {
  std::string out = std::to_string(ds.dim) + "\n";
  for (const Bag& bag : ds.bags) {
    out += bag.id;
    out += ',';
    out += label_field(bag.label);
    out += '\n';
    for (Eigen::Index i = 0; i < bag.size(); ++i) {
      bool any = false;
      for (Eigen::Index j = 0; j < ds.dim; ++j) {
        if (bag.instances(i, j) == 0.0) continue;
        out += std::to_string(i) + "," + std::to_string(j) + "," +
               format_double(bag.instances(i, j)) + "\n";
        any = true;
      }
      if (!any)  // keep the instance's existence recoverable
        out += std::to_string(i) + ",0,0\n";
    }
  }
  return out;
}

}  // namespace

FileFormat parse_format(std::string_view name) {
  if (name == "dense-csv") return FileFormat::dense_csv;
  if (name == "sparse-triplet") return FileFormat::sparse_triplet;
  throw std::invalid_argument("unknown format '" + std::string(name) +
                              "' (expected dense-csv or sparse-triplet)");
}

std::string to_string(FileFormat f) {
  return f == FileFormat::dense_csv ? "dense-csv" : "sparse-triplet";
}

Dataset load_dataset(const std::string& path, FileFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path);
  Dataset ds = format == FileFormat::dense_csv ? load_dense(path, in) : load_sparse(path, in);
  ds.validate();
  return ds;
}

void save_dataset(const Dataset& dataset, const std::string& path, FileFormat format) {
  write_text_file(path,
                  format == FileFormat::dense_csv ? save_dense(dataset) : save_sparse(dataset));
}

}  // namespace mil
