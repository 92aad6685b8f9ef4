#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "eclab/errors.hpp"
#include "json.hpp"

namespace eclab::harness {

/// Unknown scenario, unknown key or malformed config; the CLI exits with 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Flat key = value text with [section] headers. Keys are addressed as
/// "section.key"; '#' starts a comment. Values are kept as text.
class Config {
 public:
  static Config parse(std::string_view text, const std::string& origin = "<config>");
  static Config load(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  const std::map<std::string, std::string>& entries() const { return values_; }

  /// Typed access; UsageError when the key is missing or does not convert.
  const std::string& str(const std::string& key) const;
  double num(const std::string& key) const;
  long integer(const std::string& key) const;
  bool flag(const std::string& key) const;
  /// Comma-separated lists.
  std::vector<double> nums(const std::string& key) const;
  std::vector<std::string> list(const std::string& key) const;

  /// Copies every entry of `over`; each key must already exist here.
  void merge(const Config& over);
  /// Sections in order of first appearance, keys sorted within a section.
  std::string dump() const;

 private:
  std::map<std::string, std::string> values_;
  std::vector<std::string> sections_;
};

struct Assertion {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double bound = 0.0;
};

/// One CSV artifact. Cells are stored already formatted (%.17g for reals) so
/// repeated runs write identical bytes.
class Table {
 public:
  struct Cell {
    std::string text;
    Cell(double v);              // NOLINT(google-explicit-constructor)
    Cell(int v);                 // NOLINT(google-explicit-constructor)
    Cell(long v);                // NOLINT(google-explicit-constructor)
    Cell(unsigned long v);       // NOLINT(google-explicit-constructor)
    Cell(unsigned long long v);  // NOLINT(google-explicit-constructor)
    Cell(bool v);                // NOLINT(google-explicit-constructor)
    Cell(std::string v);         // NOLINT(google-explicit-constructor)
    Cell(const char* v);         // NOLINT(google-explicit-constructor)
  };

  Table() = default;
  Table(std::string name, std::vector<std::string> header);

  const std::string& name() const { return name_; }
  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }
  void add(std::vector<Cell> row);
  /// RFC 4180 text with a leading seed column.
  std::string csv(std::uint64_t seed) const;

 private:
  std::string name_;
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

struct Result {
  std::string scenario;
  std::uint64_t seed = 0;
  int threads = 1;
  double seconds = 0.0;
  std::map<std::string, std::string> config;  // effective config after overrides
  std::vector<Assertion> assertions;
  std::vector<Table> tables;
  nlohmann::json details = nlohmann::json::object();
  std::vector<std::string> notes;  // human-readable lines for the summary

  bool passed() const;
  Table& table(const std::string& name, std::vector<std::string> header);
  void check(const std::string& name, bool pass, double value, double bound);
  void check_le(const std::string& name, double value, double bound) { check(name, value <= bound, value, bound); }
  void check_lt(const std::string& name, double value, double bound) { check(name, value < bound, value, bound); }
  void check_ge(const std::string& name, double value, double bound) { check(name, value >= bound, value, bound); }
  void check_gt(const std::string& name, double value, double bound) { check(name, value > bound, value, bound); }
  void check_true(const std::string& name, bool pass) { check(name, pass, pass ? 1.0 : 0.0, 1.0); }

  /// {scenario, seed, threads, seconds, assertions: [{name, pass, value, bound}], details}
  nlohmann::json summary() const;
  std::string summary_text() const;
};

struct Scenario {
  std::string name;
  std::string description;
  std::string defaults;  // config text; every accepted key appears here
  std::function<void(const Config&, Result&)> run;
};

/// Registered scenarios in a fixed order.
const std::vector<Scenario>& registry();
std::vector<std::string> scenario_names();
/// UsageError for unknown names.
const Scenario& find_scenario(const std::string& name);
Config default_config(const std::string& name);

/// Runs a scenario on its defaults merged with `overrides`. run.seed and
/// run.threads are part of every config.
Result run_scenario(const std::string& name, const Config& overrides = {});

/// Writes <out>/<scenario>[-<table>].csv and <out>/<scenario>.json; returns
/// the paths written.
std::vector<std::string> write_artifacts(const Result& r, const std::string& out_dir);

/// Calls f(i) for i in [0, n) on up to `threads` threads with static
/// chunking; results must be stored per index.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& f);

}  // namespace eclab::harness
