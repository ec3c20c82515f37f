#include "thetac/fetch.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <mutex>
#include <sstream>

#include <httplib.h>

#include "thetac/errors.hpp"
#include "thetac/sha256.hpp"
#include "thetac/text.hpp"

namespace fs = std::filesystem;

namespace thetac {

namespace {

std::mutex manifest_mutex;

fs::path manifest_path(const fs::path& cache_dir) {
  return cache_dir / "manifest.txt";
}

std::string utc_timestamp() {
  auto now = std::chrono::system_clock::to_time_t(
      std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_manifest(const fs::path& cache_dir,
                    const std::vector<ManifestEntry>& entries) {
  std::ofstream out(manifest_path(cache_dir), std::ios::binary);
  if (!out)
    throw InputError("cannot write cache manifest in " + cache_dir.string());
  for (const ManifestEntry& e : entries)
    out << e.url << '\t' << e.sha256 << '\t' << e.timestamp << '\t'
        << e.rel_path << '\n';
}

void upsert_manifest(const fs::path& cache_dir, const ManifestEntry& entry) {
  std::lock_guard<std::mutex> lock(manifest_mutex);
  auto entries = read_cache_manifest(cache_dir);
  bool replaced = false;
  for (ManifestEntry& e : entries) {
    if (e.url == entry.url) {
      e = entry;
      replaced = true;
      break;
    }
  }
  if (!replaced) entries.push_back(entry);
  write_manifest(cache_dir, entries);
}

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

SplitUrl split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos)
    throw InputError("malformed URL: " + url);
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

std::string http_get(const std::string& url) {
  SplitUrl parts = split_url(url);
  httplib::Client client(parts.origin);
  client.set_follow_location(true);
  client.set_connection_timeout(30);
  client.set_read_timeout(120);
  auto res = client.Get(parts.path);
  if (!res)
    throw NetworkError("request failed for " + url + ": " +
                       httplib::to_string(res.error()));
  if (res->status != 200)
    throw NetworkError("HTTP " + std::to_string(res->status) + " for " + url);
  return res->body;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

std::vector<ManifestEntry> read_cache_manifest(const fs::path& cache_dir) {
  std::vector<ManifestEntry> entries;
  std::ifstream in(manifest_path(cache_dir));
  if (!in) return entries;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto fields = split(line, '\t');
    if (fields.size() != 4) continue;  // tolerate foreign lines
    entries.push_back({std::string(fields[0]), std::string(fields[1]),
                       std::string(fields[2]), std::string(fields[3])});
  }
  return entries;
}

std::string wid_country_url(const std::string& base_url,
                            const std::string& country_code) {
  std::string base = base_url;
  if (!base.empty() && base.back() == '/') base.pop_back();
  return base + "/WID_data_" + country_code + ".csv";
}

std::vector<FetchedFile> fetch_wid_bulk(const FetchConfig& config,
                                        const std::vector<std::string>& countries) {
  if (config.cache_dir.empty())
    throw InputError("fetch: cache directory not set");
  fs::create_directories(config.cache_dir / "objects");

  std::vector<FetchedFile> fetched;
  for (const std::string& country : countries) {
    const std::string url = wid_country_url(config.base_url, country);

    const ManifestEntry* cached = nullptr;
    auto entries = read_cache_manifest(config.cache_dir);
    for (const ManifestEntry& e : entries)
      if (e.url == url) cached = &e;

    if (cached && !config.refresh) {
      fs::path path = config.cache_dir / cached->rel_path;
      // A checksum mismatch means the cached object is corrupt: re-download.
      if (fs::exists(path) && sha256_hex(read_file(path)) == cached->sha256) {
        fetched.push_back({url, cached->sha256, path, true});
        continue;
      }
    }

    std::string body;
    try {
      body = http_get(url);
    } catch (const NetworkError& err) {
      if (cached) {
        fs::path fallback = config.cache_dir / cached->rel_path;
        throw NetworkError(std::string(err.what()) +
                           "; cached fallback available at " +
                           fallback.string());
      }
      throw;
    }

    const std::string digest = sha256_hex(body);
    const std::string rel_path = "objects/" + digest + ".csv";
    const fs::path path = config.cache_dir / rel_path;
    {
      std::ofstream out(path, std::ios::binary);
      if (!out) throw InputError("cannot write cache object " + path.string());
      out << body;
    }
    upsert_manifest(config.cache_dir, {url, digest, utc_timestamp(), rel_path});
    fetched.push_back({url, digest, path, false});
  }
  return fetched;
}

}  // namespace thetac
