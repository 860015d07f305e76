#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "gompsnr/metrics.hpp"

namespace gompsnr {

enum class ReportFormat { json, csv };

// Building blocks shared with the CLI: one report object with fixed key
// order (id, snr_time_db, snr_tf_db, ompsnr_db, gompsnr_db, settings);
// +infinity becomes the string "inf".
nlohmann::ordered_json report_to_json(const MetricReport& r);
nlohmann::ordered_json stft_config_to_json(const StftConfig& cfg);
nlohmann::ordered_json score_to_json(double v);

// JSON: array of objects with fixed key order
//   id, snr_time_db, snr_tf_db, ompsnr_db, gompsnr_db, settings.
// CSV mirrors the same columns, with `settings` carried as a compact JSON
// string. +infinity is serialized as the string "inf" in both formats.
void write_report(const std::vector<MetricReport>& reports, ReportFormat format,
                  std::ostream& out);
void write_report(const std::vector<MetricReport>& reports, ReportFormat format,
                  const std::string& path);

// Wide score table: an `id` column plus one column per metric. Cells hold
// finite numbers, the sentinel "inf", or stay empty; missing cells are
// surfaced as NaN.
struct ScoreTable {
  std::vector<std::string> metric_names;
  struct Row {
    std::string id;
    std::vector<double> values;  // parallel to metric_names
  };
  std::vector<Row> rows;
};

ScoreTable read_score_table(const std::string& path);

}  // namespace gompsnr
