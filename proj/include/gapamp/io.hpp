#pragma once

#include "gapamp/amplify.hpp"
#include "gapamp/ffham.hpp"
#include "gapamp/operator.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace gapamp {

/// Coordinate text: header "%%dim N", then "row col value" per nonzero, 0-indexed.
std::string to_triplet_text(const SparseMatrix& m);
/// Throws std::invalid_argument on a missing header, bad line or out-of-range index.
SparseMatrix from_triplet_text(const std::string& text);

std::string read_text(const std::filesystem::path& path);
/// Writes to a sibling temporary file and renames it over `path`.
void write_text_atomic(const std::filesystem::path& path, const std::string& content);

/// JSON manifest {"dim", "terms": [{"file", "coefficient"}]} next to one triplet file per term.
void save_ffhamiltonian(const std::filesystem::path& manifest, const FFHamiltonian& ham);
FFHamiltonian load_ffhamiltonian(const std::filesystem::path& manifest);

/// Triplet file plus a JSON header (flavor, δ, L_eff, d, spin convention, layout).
void save_amplified(const std::filesystem::path& stem, const AmplifiedOperator& op);

/// Fixed-format number rendering shared by every CSV writer.
std::string fmt(double v);

/// CSV with '#' comment lines, comma separators and LF line endings.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void comment(const std::string& line) { comments_.push_back(line); }
  /// Throws std::invalid_argument when the row width differs from the header.
  void add_row(std::vector<std::string> row);

  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }
  std::string render() const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::string> comments_;
  std::vector<std::vector<std::string>> rows_;
};

/// Parsed CSV: comment lines (without '#'), header and rows.
struct CsvData {
  std::vector<std::string> comments;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  /// Index of a column, or −1.
  int column(const std::string& name) const;
};

/// Throws std::invalid_argument on ragged rows or a missing header.
CsvData parse_csv(const std::string& text);

}  // namespace gapamp
