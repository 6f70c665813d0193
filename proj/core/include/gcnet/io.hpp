#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "gcnet/multiple_testing.hpp"
#include "gcnet/types.hpp"

namespace gcnet {

struct CsvOptions {
  bool header = true;
  char delimiter = ',';
  bool demean = false;
  bool standardize = false;  // implies demean
};

struct IngestResult {
  PanelData data;
  std::vector<std::string> names;
};

// Reads a rectangular numeric table (rows = time, columns = series), applies
// the requested preprocessing, and builds the panel: the first K rows become
// initial conditions for the lag design.
IngestResult ingest_csv(const std::string& path, int lag_order, const CsvOptions& options = {});

// Table -> panel without file IO; same construction as ingest_csv.
PanelData panel_from_table(const Eigen::MatrixXd& table, int lag_order);

// Raw table readers/writers. Values are written with 17 significant digits so
// a write-read round trip reproduces every double exactly.
Eigen::MatrixXd read_table_csv(const std::string& path, const CsvOptions& options,
                               std::vector<std::string>* names_out = nullptr);
void write_table_csv(const std::string& path, const Eigen::MatrixXd& table_by_time,
                     const std::vector<std::string>& names);

std::vector<std::string> default_series_names(int n);

// Edge list serialization. Columns:
// source_id,target_id,source_name,target_name,lags,t_values,signs,
// coefficients,threshold,procedure -- ids are 1-based, per-lag fields are
// ';'-joined.
std::string edge_csv(const std::vector<EdgeRecord>& edges, const std::vector<std::string>& names,
                     double threshold, const std::string& procedure_tag);
void write_edge_csv(const std::string& path, const std::vector<EdgeRecord>& edges,
                    const std::vector<std::string>& names, double threshold,
                    const std::string& procedure_tag);
std::vector<EdgeRecord> read_edge_csv(const std::string& path,
                                      std::vector<std::string>* names_out = nullptr);

// DOT digraph with all n nodes declared, node size scaled by out-degree and
// optional group coloring.
std::string export_dot(const std::vector<EdgeRecord>& edges, const std::vector<std::string>& names,
                       const std::vector<int>& groups = {});

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace gcnet
