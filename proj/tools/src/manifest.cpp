#include "manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#include "split_io.hpp"
#include "tcan/error.hpp"

#ifndef TCAN_VERSION_STRING
#define TCAN_VERSION_STRING "v0.0.0"
#endif

namespace tcan::cli {

namespace {

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new(), EVP_MD_CTX_free) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) throw IoError("SHA-256 init failed");
  }
  void update(const char* data, std::size_t n) {
    if (EVP_DigestUpdate(ctx_.get(), data, n) != 1) throw IoError("SHA-256 update failed");
  }
  std::string hex() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx_.get(), md.data(), &len) != 1) throw IoError("SHA-256 final failed");
    std::ostringstream out;
    for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return out.str();
  }

 private:
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

std::string iso_utc(std::chrono::system_clock::time_point tp) {
  const std::time_t t = std::chrono::system_clock::to_time_t(tp);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

}  // namespace

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path + " for hashing");
  Sha256 h;
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    h.update(buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  return h.hex();
}

std::string sha256_bytes(const std::string& bytes) {
  Sha256 h;
  h.update(bytes.data(), bytes.size());
  return h.hex();
}

const char* version_string() { return "tcan " TCAN_VERSION_STRING; }

RunManifest::RunManifest(std::string command)
    : command_(std::move(command)), started_(std::chrono::system_clock::now()), t0_(std::chrono::steady_clock::now()) {}

void RunManifest::add_input(const std::string& path) { inputs_.push_back(path); }
void RunManifest::add_output(const std::string& path) { outputs_.push_back(path); }

nlohmann::json RunManifest::to_json() const {
  using nlohmann::json;
  json files_in = json::array(), files_out = json::array();
  for (const auto& p : inputs_) files_in.push_back({{"path", p}, {"sha256", sha256_file(p)}});
  for (const auto& p : outputs_) files_out.push_back({{"path", p}, {"sha256", sha256_file(p)}});
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  json j{{"command", command_},   {"version", version_string()}, {"config", config_},
         {"seed", seed_},         {"inputs", files_in},          {"outputs", files_out},
         {"started_at", iso_utc(started_)}, {"wall_clock_seconds", wall}};
  if (!extra_.empty()) j["extra"] = extra_;
  return j;
}

void RunManifest::write(const std::string& path) const { write_text_file(path, to_json().dump(2) + "\n"); }

}  // namespace tcan::cli
