#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <stdexcept>

#include "sigmalab/cli.hpp"

namespace sigmalab::cli {

namespace {

json payload(const SuiteReport& rep) {
  json checks = json::array();
  for (const auto& c : rep.checks) {
    json files = json::array();
    for (const auto& [stem, _] : c.csv)
      files.push_back(stem + ".csv");
    checks.push_back({{"suite", c.suite},
                      {"name", c.name},
                      {"statement", c.statement},
                      {"pass", c.pass},
                      {"informational", c.informational},
                      {"metrics", c.metrics},
                      {"artifacts", files}});
  }
  return {{"tool", "sigmalab"},
          {"version", SIGMALAB_VERSION},
          {"suite", rep.config.value("suite", "")},
          {"config", rep.config},
          {"pass", rep.pass},
          {"checks", checks}};
}

void write_file(const std::filesystem::path& p, const std::string& contents) {
  std::ofstream os(p, std::ios::binary);
  if (!os)
    throw std::runtime_error("cannot open " + p.string());
  os << contents;
  if (!os)
    throw std::runtime_error("write failed: " + p.string());
}

} // namespace

json report_json(const SuiteReport& rep) {
  json j = payload(rep);
  j["hash"] = rep.hash;
  json per = json::object();
  for (const auto& c : rep.checks)
    per[c.name] = c.seconds;
  j["timing"] = {{"wall_seconds", rep.wall_seconds}, {"checks", per}};
  return j;
}

std::string content_hash(const SuiteReport& rep) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 init failed");
  auto feed = [&](const std::string& s) {
    if (EVP_DigestUpdate(ctx.get(), s.data(), s.size() + 1) != 1)  // includes the terminator
      throw std::runtime_error("sha256 update failed");
  };
  feed(payload(rep).dump());
  for (const auto& c : rep.checks)
    for (const auto& [stem, body] : c.csv) {
      feed(stem);
      feed(body);
    }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_DigestFinal_ex(ctx.get(), md.data(), &len) != 1)
    throw std::runtime_error("sha256 final failed");
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) {
    char buf[3];
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

void write_outputs(const SuiteReport& rep, const std::string& dir) {
  const std::filesystem::path root(dir);
  std::filesystem::create_directories(root);
  write_file(root / "report.json", report_json(rep).dump(2) + "\n");
  for (const auto& c : rep.checks)
    for (const auto& [stem, body] : c.csv)
      write_file(root / (stem + ".csv"), body);
  write_file(root / "hash.txt", rep.hash + "\n");
}

} // namespace sigmalab::cli
