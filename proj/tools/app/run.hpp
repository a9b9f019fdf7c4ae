#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "app/config.hpp"
#include "jacobi/kernels.hpp"

namespace jacobi::app {

struct Table {
  std::vector<std::string> headers;  // first is always "t"
  std::vector<std::vector<double>> rows;
};

struct RunResult {
  std::string command;
  Json scalars = Json::object();
  std::vector<std::string> diagnostics;
  Table series;
  std::string config_hash;
  double wall_time = 0.0;  // seconds
};

// Throws jacobi::Error; the kind decides the exit code.
RunResult run(const RunConfig& config, const std::string& command, Exec exec = Exec::Serial);

std::string fnv1a_hex(const std::string& bytes);
std::string config_hash(const RunConfig& c);

// Doubles with 17 significant digits; non-finite as inf / -inf / nan.
std::string format_double(double v);
std::string csv_text(const Table& t);
std::string result_json_text(const RunResult& r);
std::string provenance_json_text(const RunResult& r);

// Writes <command>.csv, <command>.json and provenance.json, each through a
// temporary file and a rename.
void write_outputs(const RunResult& r, const std::filesystem::path& dir);

// Process-level entry: 0 success, 2 validation, 3 numerical. Errors go to
// `err` as one JSON record.
int run_cli(const std::string& command, const std::filesystem::path& config_path,
            const std::filesystem::path& out_dir, std::optional<std::uint64_t> seed,
            bool parallel, std::ostream& err);

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

}  // namespace jacobi::app
