#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace gufic {

inline constexpr const char* kLogVersionLine = "# gufic-log v1";

/// Row-major numeric table with named columns; the in-memory form of a run log.
class LogTable {
 public:
  LogTable() = default;
  explicit LogTable(std::vector<std::string> columns);

  const std::vector<std::string>& columns() const { return columns_; }
  std::size_t cols() const { return columns_.size(); }
  std::size_t rows() const { return cols() == 0 ? 0 : values_.size() / cols(); }
  bool empty() const { return values_.empty(); }

  std::optional<std::size_t> find(const std::string& name) const;
  bool has(const std::string& name) const { return find(name).has_value(); }

  /// Throws MissingChannel when the column does not exist.
  std::size_t index(const std::string& name) const;
  std::vector<double> column(const std::string& name) const;

  double at(std::size_t row, std::size_t col) const { return values_[row * cols() + col]; }
  double& at(std::size_t row, std::size_t col) { return values_[row * cols() + col]; }

  /// Appends a row; it must have exactly cols() entries.
  void append(const std::vector<double>& row);

 private:
  std::vector<std::string> columns_;
  std::vector<double> values_;
};

/// Version line, header, then one row per line with 17 significant digits.
void write_log_csv(const std::filesystem::path& path, const LogTable& table);

/// Throws MissingChannel for a missing or unknown version line and Error for
/// unreadable files or malformed rows.
LogTable read_log_csv(const std::filesystem::path& path);

}  // namespace gufic
