#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ktop::experiment {

/// 17 significant digits in scientific notation ("%.16e").
std::string format_number(double value);

/// Shortest round-trip-ish form for file names ("%g").
std::string format_short(double value);

/// In-memory CSV with a one-line header.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  /// Cells are preformatted; the row width must match the header.
  void add_row(std::vector<std::string> cells);
  std::string str() const;
  std::size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

std::string sha256_hex(std::string_view data);

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Files and summary values produced by one command.
struct CommandOutput {
  std::vector<std::pair<std::string, std::string>> files;  // name, contents
  KeyValues metrics;
};

struct ManifestInfo {
  std::string command;
  KeyValues config;
  double wall_seconds = 0.0;
};

/// Writes every file, then `<command>.manifest` listing each with its SHA-256.
/// Files go to temporaries first and are renamed once all writes succeed.
void commit_outputs(const std::filesystem::path& out_dir, const ManifestInfo& info,
                    const CommandOutput& output);

/// Writes only the manifest, recording the failure.
void write_failure_manifest(const std::filesystem::path& out_dir, const ManifestInfo& info,
                            std::string_view error_kind, std::string_view message);

}  // namespace ktop::experiment
