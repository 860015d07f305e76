#include "gompsnr/manifest.hpp"

#include <algorithm>
#include <filesystem>
#include <unordered_set>

#include "gompsnr/csv.hpp"
#include "gompsnr/error.hpp"

namespace gompsnr {

namespace fs = std::filesystem;

std::vector<PairManifestEntry> read_manifest(const std::string& path) {
  auto rows = read_csv_file(path);
  if (rows.empty()) raise(Errc::empty_manifest, path + ": empty manifest");

  const auto& header = rows.front();
  auto column = [&](const std::string& name) -> std::size_t {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      raise(Errc::missing_column, path + ": missing column '" + name + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
  };
  std::size_t id_col = column("id");
  std::size_t ref_col = column("ref_path");
  std::size_t est_col = column("est_path");

  if (rows.size() < 2) raise(Errc::empty_manifest, path + ": no data rows");

  fs::path base = fs::path(path).parent_path();
  auto resolve = [&](const std::string& p) {
    fs::path fp(p);
    return fp.is_absolute() ? fp.string() : (base / fp).string();
  };

  std::vector<PairManifestEntry> entries;
  std::unordered_set<std::string> seen;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    std::size_t need = std::max({id_col, ref_col, est_col}) + 1;
    if (row.size() < need) {
      raise(Errc::missing_column,
            path + ": row " + std::to_string(r + 1) + " has too few fields");
    }
    PairManifestEntry e;
    e.id = row[id_col];
    if (row[ref_col].empty() || row[est_col].empty()) {
      raise(Errc::invalid_input,
            path + ": row " + std::to_string(r + 1) + " has an empty path");
    }
    if (!seen.insert(e.id).second) {
      raise(Errc::duplicate_id, path + ": duplicate id '" + e.id + "'");
    }
    e.ref_path = resolve(row[ref_col]);
    e.est_path = resolve(row[est_col]);
    entries.push_back(std::move(e));
  }
  return entries;
}

}  // namespace gompsnr
