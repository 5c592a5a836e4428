#include "gufic/log_table.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "gufic/errors.hpp"

namespace gufic {

LogTable::LogTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

std::optional<std::size_t> LogTable::find(const std::string& name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i] == name) return i;
  }
  return std::nullopt;
}

std::size_t LogTable::index(const std::string& name) const {
  const auto i = find(name);
  if (!i) throw MissingChannel("log has no column '" + name + "'");
  return *i;
}

std::vector<double> LogTable::column(const std::string& name) const {
  const std::size_t c = index(name);
  std::vector<double> out(rows());
  for (std::size_t r = 0; r < rows(); ++r) out[r] = at(r, c);
  return out;
}

void LogTable::append(const std::vector<double>& row) {
  if (row.size() != cols()) throw Error("log row width does not match the header");
  values_.insert(values_.end(), row.begin(), row.end());
}

void write_log_csv(const std::filesystem::path& path, const LogTable& table) {
  std::FILE* f = std::fopen(path.string().c_str(), "wb");
  if (f == nullptr) throw Error("cannot write " + path.string());
  std::fprintf(f, "%s\n", kLogVersionLine);
  for (std::size_t c = 0; c < table.cols(); ++c) {
    std::fprintf(f, c == 0 ? "%s" : ",%s", table.columns()[c].c_str());
  }
  std::fputc('\n', f);
  for (std::size_t r = 0; r < table.rows(); ++r) {
    for (std::size_t c = 0; c < table.cols(); ++c) {
      std::fprintf(f, c == 0 ? "%.17g" : ",%.17g", table.at(r, c));
    }
    std::fputc('\n', f);
  }
  if (std::fclose(f) != 0) throw Error("error while writing " + path.string());
}

LogTable read_log_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open log " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw MissingChannel(path.string() + ": empty log");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kLogVersionLine) {
    throw MissingChannel(path.string() + ": unknown log schema (expected '" +
                         std::string(kLogVersionLine) + "')");
  }
  if (!std::getline(in, line)) throw MissingChannel(path.string() + ": missing header row");
  std::vector<std::string> cols;
  {
    std::stringstream ss(line);
    std::string name;
    while (std::getline(ss, name, ',')) {
      if (!name.empty() && name.back() == '\r') name.pop_back();
      cols.push_back(name);
    }
  }
  LogTable table(cols);
  std::vector<double> row(cols.size());
  std::size_t lineno = 2;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const char* p = line.c_str();
    for (std::size_t c = 0; c < cols.size(); ++c) {
      char* end = nullptr;
      row[c] = std::strtod(p, &end);
      if (end == p) {
        throw Error(path.string() + ":" + std::to_string(lineno) + ": malformed number");
      }
      p = end;
      if (c + 1 < cols.size()) {
        if (*p != ',') {
          throw Error(path.string() + ":" + std::to_string(lineno) + ": too few fields");
        }
        ++p;
      }
    }
    table.append(row);
  }
  return table;
}

}  // namespace gufic
