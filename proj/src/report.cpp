#include "gompsnr/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>

#include <json.hpp>

#include "gompsnr/csv.hpp"
#include "gompsnr/error.hpp"

namespace gompsnr {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string score_csv(double v) {
  if (std::isinf(v)) return "inf";
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace

ordered_json stft_config_to_json(const StftConfig& cfg) {
  ordered_json j;
  j["window_size"] = cfg.window_size;
  j["hop_size"] = cfg.hop_size;
  j["fft_size"] = cfg.fft_size;
  j["window"] = "hann";
  j["center"] = cfg.center;
  return j;
}

ordered_json score_to_json(double v) {
  if (std::isinf(v)) return "inf";
  return v;
}

ordered_json report_to_json(const MetricReport& r) {
  ordered_json j;
  j["id"] = r.id;
  j["snr_time_db"] = score_to_json(r.snr_time_db);
  j["snr_tf_db"] = score_to_json(r.snr_tf_db);
  j["ompsnr_db"] = score_to_json(r.ompsnr_db);
  j["gompsnr_db"] = score_to_json(r.gompsnr_db);
  j["settings"] = stft_config_to_json(r.settings);
  return j;
}

void write_report(const std::vector<MetricReport>& reports, ReportFormat format,
                  std::ostream& out) {
  if (reports.empty()) {
    raise(Errc::invalid_input, "report list is empty");
  }
  if (format == ReportFormat::json) {
    ordered_json arr = ordered_json::array();
    for (const auto& r : reports) arr.push_back(report_to_json(r));
    out << arr.dump(2) << '\n';
  } else {
    out << "id,snr_time_db,snr_tf_db,ompsnr_db,gompsnr_db,settings\n";
    for (const auto& r : reports) {
      out << csv_escape(r.id) << ',' << score_csv(r.snr_time_db) << ','
          << score_csv(r.snr_tf_db) << ',' << score_csv(r.ompsnr_db) << ','
          << score_csv(r.gompsnr_db) << ','
          << csv_escape(stft_config_to_json(r.settings).dump()) << '\n';
    }
  }
  if (!out) raise(Errc::io_failure, "report write failed");
}

void write_report(const std::vector<MetricReport>& reports, ReportFormat format,
                  const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(Errc::io_failure, "cannot open " + path + " for writing");
  write_report(reports, format, out);
  out.flush();
  if (!out) raise(Errc::io_failure, "write failed for " + path);
}

ScoreTable read_score_table(const std::string& path) {
  auto rows = read_csv_file(path);
  if (rows.empty()) raise(Errc::empty_manifest, path + ": empty score table");
  const auto& header = rows.front();
  if (header.empty() || header.front() != "id") {
    raise(Errc::missing_column, path + ": first column must be 'id'");
  }
  ScoreTable table;
  table.metric_names.assign(header.begin() + 1, header.end());
  if (table.metric_names.empty()) {
    raise(Errc::missing_column, path + ": no metric columns");
  }
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != header.size()) {
      raise(Errc::invalid_input, path + ": row " + std::to_string(r + 1) +
                                     " has " + std::to_string(row.size()) +
                                     " fields, expected " +
                                     std::to_string(header.size()));
    }
    ScoreTable::Row out;
    out.id = row[0];
    out.values.reserve(table.metric_names.size());
    for (std::size_t c = 1; c < row.size(); ++c) {
      const std::string& cell = row[c];
      if (cell.empty()) {
        out.values.push_back(std::numeric_limits<double>::quiet_NaN());
      } else if (cell == "inf" || cell == "+inf") {
        out.values.push_back(std::numeric_limits<double>::infinity());
      } else if (cell == "-inf") {
        out.values.push_back(-std::numeric_limits<double>::infinity());
      } else {
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
        if (ec != std::errc() || ptr != cell.data() + cell.size()) {
          raise(Errc::invalid_input,
                path + ": cannot parse value '" + cell + "'");
        }
        out.values.push_back(v);
      }
    }
    table.rows.push_back(std::move(out));
  }
  return table;
}

}  // namespace gompsnr
