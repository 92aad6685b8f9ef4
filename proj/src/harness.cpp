#include "eclab/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

namespace eclab::harness {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, ',')) {
    auto t = trim(cur);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  std::string t = v;
  if (t == "inf" || t == "+inf") return INFINITY;
  if (t == "-inf") return -INFINITY;
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
  if (ec != std::errc() || p != t.data() + t.size()) throw UsageError("config key " + key + ": not a number: " + v);
  return x;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

// ------------------------------------------------------------------ config

Config Config::parse(std::string_view text, const std::string& origin) {
  Config c;
  std::string section;
  std::istringstream is{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    auto t = trim(line);
    if (t.empty()) continue;
    auto where = [&] { return origin + ":" + std::to_string(lineno) + ": "; };
    if (t.front() == '[') {
      if (t.back() != ']') throw UsageError(where() + "unterminated section header");
      section = trim(std::string_view(t).substr(1, t.size() - 2));
      if (section.empty()) throw UsageError(where() + "empty section name");
      if (std::find(c.sections_.begin(), c.sections_.end(), section) == c.sections_.end())
        c.sections_.push_back(section);
      continue;
    }
    auto eq = t.find('=');
    if (eq == std::string::npos) throw UsageError(where() + "expected key = value");
    auto key = trim(std::string_view(t).substr(0, eq));
    auto value = trim(std::string_view(t).substr(eq + 1));
    if (key.empty()) throw UsageError(where() + "empty key");
    c.values_[section.empty() ? key : section + "." + key] = value;
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

const std::string& Config::str(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw UsageError("missing config key " + key);
  return it->second;
}

double Config::num(const std::string& key) const { return to_double(key, str(key)); }

long Config::integer(const std::string& key) const {
  const auto& v = str(key);
  long x = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size()) throw UsageError("config key " + key + ": not an integer: " + v);
  return x;
}

bool Config::flag(const std::string& key) const {
  const auto& v = str(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw UsageError("config key " + key + ": not a boolean: " + v);
}

std::vector<double> Config::nums(const std::string& key) const {
  std::vector<double> out;
  for (const auto& s : split_commas(str(key))) out.push_back(to_double(key, s));
  return out;
}

std::vector<std::string> Config::list(const std::string& key) const { return split_commas(str(key)); }

void Config::merge(const Config& over) {
  for (const auto& [k, v] : over.values_) {
    if (!has(k)) throw UsageError("unknown config key " + k);
    values_[k] = v;
  }
}

std::string Config::dump() const {
  std::ostringstream os;
  // Unsectioned keys must come before any header.
  std::vector<std::string> sections{""};
  sections.insert(sections.end(), sections_.begin(), sections_.end());
  for (const auto& [k, v] : values_) {
    auto dot = k.find('.');
    std::string s = dot == std::string::npos ? "" : k.substr(0, dot);
    if (std::find(sections.begin(), sections.end(), s) == sections.end()) sections.push_back(s);
  }
  bool first = true;
  for (const auto& s : sections) {
    std::ostringstream block;
    for (const auto& [k, v] : values_) {
      auto dot = k.find('.');
      std::string ks = dot == std::string::npos ? "" : k.substr(0, dot);
      if (ks != s) continue;
      block << (dot == std::string::npos ? k : k.substr(dot + 1)) << " = " << v << "\n";
    }
    if (block.str().empty()) continue;
    if (!first) os << "\n";
    first = false;
    if (!s.empty()) os << "[" << s << "]\n";
    os << block.str();
  }
  return os.str();
}

// ------------------------------------------------------------------- table

Table::Cell::Cell(double v) : text(format_double(v)) {}
Table::Cell::Cell(int v) : text(std::to_string(v)) {}
Table::Cell::Cell(long v) : text(std::to_string(v)) {}
Table::Cell::Cell(unsigned long v) : text(std::to_string(v)) {}
Table::Cell::Cell(unsigned long long v) : text(std::to_string(v)) {}
Table::Cell::Cell(bool v) : text(v ? "true" : "false") {}
Table::Cell::Cell(std::string v) : text(std::move(v)) {}
Table::Cell::Cell(const char* v) : text(v) {}

Table::Table(std::string name, std::vector<std::string> header) : name_(std::move(name)), header_(std::move(header)) {}

void Table::add(std::vector<Cell> row) {
  if (row.size() != header_.size()) throw InvalidInputError("table " + name_ + ": row width differs from header");
  std::vector<std::string> r;
  r.reserve(row.size());
  for (auto& c : row) r.push_back(std::move(c.text));
  rows_.push_back(std::move(r));
}

std::string Table::csv(std::uint64_t seed) const {
  std::ostringstream os;
  os << "seed";
  for (const auto& h : header_) os << "," << csv_escape(h);
  os << "\r\n";
  for (const auto& r : rows_) {
    os << seed;
    for (const auto& c : r) os << "," << csv_escape(c);
    os << "\r\n";
  }
  return os.str();
}

// ------------------------------------------------------------------ result

bool Result::passed() const {
  return std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.pass; });
}

Table& Result::table(const std::string& name, std::vector<std::string> header) {
  tables.emplace_back(name, std::move(header));
  return tables.back();
}

void Result::check(const std::string& name, bool pass, double value, double bound) {
  assertions.push_back({name, pass, value, bound});
}

nlohmann::json Result::summary() const {
  nlohmann::json j;
  j["scenario"] = scenario;
  j["seed"] = seed;
  j["threads"] = threads;
  j["seconds"] = seconds;
  j["pass"] = passed();
  j["config"] = config;
  j["assertions"] = nlohmann::json::array();
  for (const auto& a : assertions) {
    nlohmann::json e;
    e["name"] = a.name;
    e["pass"] = a.pass;
    // JSON has no infinities; they are written as strings.
    auto num = [](double v) -> nlohmann::json {
      if (std::isfinite(v)) return v;
      return format_double(v);
    };
    e["value"] = num(a.value);
    e["bound"] = num(a.bound);
    j["assertions"].push_back(e);
  }
  j["details"] = details;
  return j;
}

std::string Result::summary_text() const {
  std::ostringstream os;
  os << scenario << " (seed " << seed << ", " << threads << " thread" << (threads == 1 ? "" : "s") << ", ";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", seconds);
  os << buf << " s)\n";
  for (const auto& n : notes) os << "  " << n << "\n";
  for (const auto& a : assertions)
    os << "  " << (a.pass ? "PASS" : "FAIL") << "  " << a.name << "  value=" << format_double(a.value)
       << " bound=" << format_double(a.bound) << "\n";
  os << (passed() ? "all assertions pass" : "some assertions fail") << "\n";
  return os.str();
}

// --------------------------------------------------------------- registry

std::vector<std::string> scenario_names() {
  std::vector<std::string> out;
  for (const auto& s : registry()) out.push_back(s.name);
  return out;
}

const Scenario& find_scenario(const std::string& name) {
  for (const auto& s : registry())
    if (s.name == name) return s;
  throw UsageError("unknown scenario: " + name);
}

Config default_config(const std::string& name) {
  const auto& s = find_scenario(name);
  return Config::parse(s.defaults, name + " defaults");
}

Result run_scenario(const std::string& name, const Config& overrides) {
  const auto& s = find_scenario(name);
  Config cfg = Config::parse(s.defaults, name + " defaults");
  cfg.merge(overrides);
  Result r;
  r.scenario = name;
  const long seed = cfg.integer("run.seed");
  const long threads = cfg.integer("run.threads");
  if (seed < 0) throw UsageError("seed must be nonnegative");
  if (threads < 1) throw UsageError("threads must be at least 1");
  r.seed = static_cast<std::uint64_t>(seed);
  r.threads = static_cast<int>(threads);
  r.config = cfg.entries();
  const auto t0 = std::chrono::steady_clock::now();
  s.run(cfg, r);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

std::vector<std::string> write_artifacts(const Result& r, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  std::vector<std::string> paths;
  for (const auto& t : r.tables) {
    fs::path p = fs::path(out_dir) / (r.scenario + (t.name().empty() ? "" : "-" + t.name()) + ".csv");
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("cannot write " + p.string());
    out << t.csv(r.seed);
    paths.push_back(p.string());
  }
  fs::path js = fs::path(out_dir) / (r.scenario + ".json");
  std::ofstream out(js, std::ios::binary);
  if (!out) throw Error("cannot write " + js.string());
  auto j = r.summary();
  j["artifacts"] = paths;
  out << j.dump(2) << "\n";
  paths.push_back(js.string());
  return paths;
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& f) {
  const std::size_t T = std::max<std::size_t>(1, std::min<std::size_t>(threads, n));
  if (T <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(T);
  for (std::size_t t = 0; t < T; ++t)
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t * n / T; i < (t + 1) * n / T; ++i) f(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace eclab::harness
