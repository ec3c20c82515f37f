#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace thetac {

struct FetchConfig {
  std::string base_url = "https://wid.world/bz2";
  std::filesystem::path cache_dir;
  bool refresh = false;  // bypass cache hits and re-download
};

struct ManifestEntry {
  std::string url;
  std::string sha256;
  std::string timestamp;  // UTC, manifest only; result files carry none
  std::string rel_path;   // relative to the cache directory
};

struct FetchedFile {
  std::string url;
  std::string sha256;
  std::filesystem::path path;
  bool from_cache = false;
};

// Plain-text cache manifest: one tab-separated (url, sha256, timestamp, path)
// line per cached object.
std::vector<ManifestEntry> read_cache_manifest(
    const std::filesystem::path& cache_dir);

// Per-country bulk file URL under the configured base.
std::string wid_country_url(const std::string& base_url,
                            const std::string& country_code);

// Downloads the per-country WID bulk files over HTTP(S), stores them
// content-addressed under <cache>/objects/<sha256>.csv, and keeps the
// manifest current. A warm, checksum-valid cache entry costs no network
// call. Corrupted cache files are re-fetched. Network failures raise
// NetworkError naming the cached fallback when one exists.
std::vector<FetchedFile> fetch_wid_bulk(const FetchConfig& config,
                                        const std::vector<std::string>& countries);

}  // namespace thetac
