#include "ktop/experiment/output.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "ktop/version.hpp"

namespace ktop::experiment {

namespace {

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::string manifest_header(const ManifestInfo& info, std::string_view status) {
  std::string out;
  out += "command=" + info.command + "\n";
  out += "status=" + std::string(status) + "\n";
  out += "library_version=" + std::string(kVersion) + "\n";
  for (const auto& [key, value] : info.config) out += "config." + key + "=" + value + "\n";
  return out;
}

}  // namespace

std::string format_number(double value) {
  std::array<char, 40> buf{};
  std::snprintf(buf.data(), buf.size(), "%.16e", value);
  return buf.data();
}

std::string format_short(double value) {
  std::array<char, 40> buf{};
  std::snprintf(buf.data(), buf.size(), "%g", value);
  return buf.data();
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size()) throw std::logic_error("CSV row width does not match header");
  rows_.push_back(std::move(cells));
}

std::string CsvTable::str() const {
  std::string out;
  auto append = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  append(header_);
  for (const auto& row : rows_) append(row);
  return out;
}

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &length, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

void commit_outputs(const std::filesystem::path& out_dir, const ManifestInfo& info,
                    const CommandOutput& output) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> staged;
  try {
    for (const auto& [name, contents] : output.files) {
      const auto tmp = out_dir / ("." + name + ".tmp");
      staged.push_back(tmp);
      write_file(tmp, contents);
    }
  } catch (...) {
    for (const auto& tmp : staged) std::filesystem::remove(tmp);
    throw;
  }
  std::string manifest = manifest_header(info, "ok");
  for (std::size_t i = 0; i < output.files.size(); ++i) {
    const auto& [name, contents] = output.files[i];
    std::filesystem::rename(staged[i], out_dir / name);
    manifest += "file." + name + ".sha256=" + sha256_hex(contents) + "\n";
  }
  for (const auto& [key, value] : output.metrics) manifest += "metric." + key + "=" + value + "\n";
  manifest += "timing.wall_seconds=" + format_number(info.wall_seconds) + "\n";
  write_file(out_dir / (info.command + ".manifest"), manifest);
}

void write_failure_manifest(const std::filesystem::path& out_dir, const ManifestInfo& info,
                            std::string_view error_kind, std::string_view message) {
  std::filesystem::create_directories(out_dir);
  std::string manifest = manifest_header(info, "failed");
  manifest += "error.kind=" + std::string(error_kind) + "\n";
  std::string flat(message);
  for (char& ch : flat)
    if (ch == '\n') ch = ' ';
  manifest += "error.message=" + flat + "\n";
  manifest += "timing.wall_seconds=" + format_number(info.wall_seconds) + "\n";
  write_file(out_dir / (info.command + ".manifest"), manifest);
}

}  // namespace ktop::experiment
