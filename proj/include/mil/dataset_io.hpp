#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "mil/dataset.hpp"

namespace mil {

/// On-disk dataset layouts. Both are UTF-8, ','-separated, '.' decimal point,
/// LF line endings.
///
/// dense-csv: one instance per line, `bag_id,label,f1,...,fd`. Lines of one
/// bag are contiguous; label is +1, -1 or 0 (unlabeled) and must agree across
/// the bag's lines. No header line.
///
/// sparse-triplet: first line is the feature dimensionality d on its own.
/// Each bag starts with a `bag_id,label` line followed by
/// `instance_index,feature_index,value` triplets (0-based, within-bag
/// instance indices); unlisted features are zero. An instance with no nonzero
/// features is kept alive by an explicit zero triplet when saving.
enum class FileFormat { dense_csv, sparse_triplet };

FileFormat parse_format(std::string_view name);
std::string to_string(FileFormat f);

/// Parse failure; the message names the file and 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& path, long line, const std::string& what)
      : std::runtime_error(path + ":" + std::to_string(line) + ": " + what), line_(line) {}

  long line() const { return line_; }

 private:
  long line_;
};

Dataset load_dataset(const std::string& path, FileFormat format);
void save_dataset(const Dataset& dataset, const std::string& path, FileFormat format);

}  // namespace mil
