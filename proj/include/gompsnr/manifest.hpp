#pragma once

#include <string>
#include <vector>

namespace gompsnr {

struct PairManifestEntry {
  std::string id;
  std::string ref_path;  // resolved relative to the manifest's directory
  std::string est_path;
};

// Reads a CSV manifest with header `id,ref_path,est_path`. Ids must be
// unique; row order is preserved.
std::vector<PairManifestEntry> read_manifest(const std::string& path);

}  // namespace gompsnr
