#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace osgood::cli {

enum class Format { Json, Csv };

struct RunConfig {
  std::string command;  // mu, weight, lp, mollify, pliss, all
  std::string action;   // empty for `all`
  std::filesystem::path out_dir = ".";
  Format format = Format::Csv;  // grid and table exports; reports are always JSON
  std::uint64_t seed = 1;
  double quad_tol = 1e-12;

  // mu
  std::string mu;  // empty: sqrt, or linear for weight
  double s = 0.5;
  double floor = 1e-12;
  int samples = 1000;

  // weight
  std::optional<std::string> t_max;  // number or "e^<x>"; default depends on action
  double gamma = 4.0;
  double T = 1.0;
  double t = 0.0;
  std::string family = "sine-cos";  // Carleman test family
  std::size_t grid = 64;

  // lp
  std::size_t resolution = 256;
  int dim = 1;
  int fields = 50;

  // mollify
  std::string mollify_family = "sawtooth";
  std::string eps_min = "2^-14";
  std::string eps_max = "2^-4";

  // pliss
  std::string k0 = "auto";
  std::optional<int> segments;
  double x1 = 0.0;
  double x2 = 0.0;
  bool reflected = false;
  int pairs = 20000;
  int points = 100000;
  // Default: 21 times from a_1 - 0.01 to a_N, 16 x 16 points on [-pi, pi]^2.
  std::optional<std::string> export_grid;
};

// Thrown for malformed configurations; maps to exit code 1.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parses arguments (without the program name). Returns nullopt after
// printing help to `out`. Throws UsageError.
std::optional<RunConfig> parse(const std::vector<std::string>& args, std::ostream& out);

// Canonical text of everything that influences results (the output
// directory excluded); hashed into each report's provenance.
std::string canonical(const RunConfig& cfg);

// Exit 0 when every row passes, 2 when some check fails, 1 on usage or
// runtime errors. Outputs are staged under temporary names and only renamed
// into place on success.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

// parse + run; OSGOOD_OUT_DIR overrides the default output directory.
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// "2^-14", "0.25" or "1e-3".
double parse_scale(const std::string& text);

}  // namespace osgood::cli
