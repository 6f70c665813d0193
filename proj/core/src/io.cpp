#include "gcnet/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace gcnet {

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& line, char delimiter) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, delimiter)) out.push_back(cell);
  if (!line.empty() && line.back() == delimiter) out.emplace_back();
  return out;
}

double parse_double(const std::string& cell, int row, int col) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(cell, &pos);
    while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
    if (pos != cell.size()) throw std::invalid_argument(cell);
    return v;
  } catch (const std::exception&) {
    throw InvalidArgument("csv: non-numeric cell '" + cell + "' at row " + std::to_string(row) +
                          ", column " + std::to_string(col));
  }
}

template <typename T>
std::string join(const std::vector<T>& values, const char* sep,
                 const std::function<std::string(const T&)>& fmt) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += sep;
    out += fmt(values[i]);
  }
  return out;
}

}  // namespace

std::vector<std::string> default_series_names(int n) {
  std::vector<std::string> names;
  names.reserve(n);
  for (int i = 1; i <= n; ++i) names.push_back("y" + std::to_string(i));
  return names;
}

Eigen::MatrixXd read_table_csv(const std::string& path, const CsvOptions& options,
                               std::vector<std::string>* names_out) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("csv: cannot open '" + path + "'");

  std::string line;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> names;
  int line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++line_no;
    if (line.empty()) continue;
    auto cells = split(line, options.delimiter);
    if (line_no == 1 && options.header) {
      names = cells;
      width = cells.size();
      continue;
    }
    if (width == 0) width = cells.size();
    if (cells.size() != width)
      throw InvalidArgument("csv: ragged row " + std::to_string(line_no) + " (" +
                            std::to_string(cells.size()) + " cells, expected " +
                            std::to_string(width) + ")");
    std::vector<double> row(width);
    for (std::size_t c = 0; c < width; ++c)
      row[c] = parse_double(cells[c], line_no, static_cast<int>(c + 1));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InvalidArgument("csv: no data rows in '" + path + "'");

  Eigen::MatrixXd table(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < width; ++c) table(r, c) = rows[r][c];
  if (names_out) {
    if (names.empty()) names = default_series_names(static_cast<int>(width));
    *names_out = names;
  }
  return table;
}

PanelData panel_from_table(const Eigen::MatrixXd& table, int lag_order) {
  const int t_raw = static_cast<int>(table.rows());
  const int n = static_cast<int>(table.cols());
  if (lag_order < 1) throw InvalidArgument("panel_from_table: lag_order must be >= 1");
  if (t_raw <= 2 * lag_order)
    throw InvalidArgument("panel_from_table: need more than 2K rows (got " +
                          std::to_string(t_raw) + ", K = " + std::to_string(lag_order) + ")");
  const int t = t_raw - lag_order;

  PanelData out;
  out.dims = VarDims{n, lag_order, t};
  out.observations = table.bottomRows(t).transpose();
  out.design.resize(lag_order * n, t);
  for (int col = 0; col < t; ++col) {
    const int time = lag_order + col;  // row index in the raw table
    for (int lag = 1; lag <= lag_order; ++lag)
      out.design.block((lag - 1) * n, col, n, 1) = table.row(time - lag).transpose();
  }
  return out;
}

IngestResult ingest_csv(const std::string& path, int lag_order, const CsvOptions& options) {
  IngestResult out;
  Eigen::MatrixXd table = read_table_csv(path, options, &out.names);
  if (options.demean || options.standardize) {
    const Eigen::RowVectorXd means = table.colwise().mean();
    table.rowwise() -= means;
  }
  if (options.standardize) {
    for (Eigen::Index c = 0; c < table.cols(); ++c) {
      const double sd =
          std::sqrt(table.col(c).squaredNorm() / static_cast<double>(table.rows() - 1));
      if (!(sd > 0.0))
        throw InvalidArgument("ingest_csv: constant column '" + out.names[c] +
                              "' cannot be standardized");
      table.col(c) /= sd;
    }
  }
  out.data = panel_from_table(table, lag_order);
  return out;
}

void write_table_csv(const std::string& path, const Eigen::MatrixXd& table_by_time,
                     const std::vector<std::string>& names) {
  std::ofstream outf(path);
  if (!outf) throw InvalidArgument("csv: cannot write '" + path + "'");
  for (std::size_t i = 0; i < names.size(); ++i)
    outf << (i ? "," : "") << names[i];
  if (!names.empty()) outf << "\n";
  for (Eigen::Index r = 0; r < table_by_time.rows(); ++r) {
    for (Eigen::Index c = 0; c < table_by_time.cols(); ++c)
      outf << (c ? "," : "") << format_double(table_by_time(r, c));
    outf << "\n";
  }
}

std::string edge_csv(const std::vector<EdgeRecord>& edges, const std::vector<std::string>& names,
                     double threshold, const std::string& procedure_tag) {
  std::string out =
      "source_id,target_id,source_name,target_name,lags,t_values,signs,coefficients,"
      "threshold,procedure\n";
  const std::function<std::string(const int&)> fmt_int = [](const int& v) {
    return std::to_string(v);
  };
  const std::function<std::string(const double&)> fmt_dbl = [](const double& v) {
    return format_double(v);
  };
  for (const EdgeRecord& e : edges) {
    out += std::to_string(e.source + 1) + "," + std::to_string(e.target + 1) + ",";
    out += names[e.source] + "," + names[e.target] + ",";
    out += join(e.lags, ";", fmt_int) + ",";
    out += join(e.t_values, ";", fmt_dbl) + ",";
    out += join(e.signs, ";", fmt_int) + ",";
    out += join(e.coefficients, ";", fmt_dbl) + ",";
    out += format_double(threshold) + "," + procedure_tag + "\n";
  }
  return out;
}

void write_edge_csv(const std::string& path, const std::vector<EdgeRecord>& edges,
                    const std::vector<std::string>& names, double threshold,
                    const std::string& procedure_tag) {
  write_text_file(path, edge_csv(edges, names, threshold, procedure_tag));
}

std::vector<EdgeRecord> read_edge_csv(const std::string& path,
                                      std::vector<std::string>* names_out) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("edge csv: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("edge csv: empty file '" + path + "'");

  std::vector<EdgeRecord> edges;
  std::vector<std::string> names;
  auto remember_name = [&](int id, const std::string& name) {
    if (static_cast<int>(names.size()) < id) names.resize(id);
    names[id - 1] = name;
  };
  int line_no = 1;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++line_no;
    if (line.empty()) continue;
    auto cells = split(line, ',');
    if (cells.size() != 10)
      throw InvalidArgument("edge csv: row " + std::to_string(line_no) + " has " +
                            std::to_string(cells.size()) + " cells, expected 10");
    EdgeRecord e;
    e.source = static_cast<int>(parse_double(cells[0], line_no, 1)) - 1;
    e.target = static_cast<int>(parse_double(cells[1], line_no, 2)) - 1;
    remember_name(e.source + 1, cells[2]);
    remember_name(e.target + 1, cells[3]);
    for (const std::string& v : split(cells[4], ';'))
      e.lags.push_back(static_cast<int>(parse_double(v, line_no, 5)));
    for (const std::string& v : split(cells[5], ';'))
      e.t_values.push_back(parse_double(v, line_no, 6));
    for (const std::string& v : split(cells[6], ';'))
      e.signs.push_back(static_cast<int>(parse_double(v, line_no, 7)));
    for (const std::string& v : split(cells[7], ';'))
      e.coefficients.push_back(parse_double(v, line_no, 8));
    edges.push_back(std::move(e));
  }
  if (names_out) {
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i].empty()) names[i] = "y" + std::to_string(i + 1);
    *names_out = names;
  }
  return edges;
}

std::string export_dot(const std::vector<EdgeRecord>& edges, const std::vector<std::string>& names,
                       const std::vector<int>& groups) {
  static const char* kPalette[] = {"lightsteelblue", "salmon",      "palegreen", "khaki",
                                   "plum",           "lightsalmon", "lightcyan", "wheat"};
  const int n = static_cast<int>(names.size());
  std::vector<int> out_degree(n, 0);
  for (const EdgeRecord& e : edges)
    if (e.source >= 0 && e.source < n) ++out_degree[e.source];

  std::string dot = "digraph granger {\n";
  dot += "  node [shape=circle, fixedsize=true];\n";
  for (int i = 0; i < n; ++i) {
    const double size = 0.5 + 0.12 * out_degree[i];
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", size);
    dot += "  \"" + names[i] + "\" [width=" + buf + ", height=" + buf;
    if (!groups.empty()) {
      const int g = groups[i];
      dot += std::string(", style=filled, fillcolor=") + kPalette[((g % 8) + 8) % 8];
    }
    dot += "];\n";
  }
  for (const EdgeRecord& e : edges)
    dot += "  \"" + names[e.source] + "\" -> \"" + names[e.target] + "\";\n";
  dot += "}\n";
  return dot;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write '" + path + "'");
  out << content;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace gcnet
