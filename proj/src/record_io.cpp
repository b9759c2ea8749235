// Copyright 2026 The mmgate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mmgate/record_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace mmgate {

namespace {

constexpr const char* kHeader = "mmgate-record";

std::string num(double v) {
  std::array<char, 32> buf{};
  const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), r.ptr);
}

std::string num(int v) { return std::to_string(v); }

template <class T>
T parse_as(const std::string& key, const std::string& text) {
  T v{};
  const char* end = text.data() + text.size();
  const auto r = std::from_chars(text.data(), end, v);
  if (r.ec != std::errc() || r.ptr != end) throw RecordFormatError("record: malformed value for " + key + ": '" + text + "'");
  return v;
}

std::vector<std::string> split(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::string out;
  for (std::size_t k = 0; k < v.size(); ++k) out += (k ? " " : "") + num(v[k]);
  return out;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  return s.substr(a, s.find_last_not_of(" \t\r") - a + 1);
}

class Fields {
 public:
  explicit Fields(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || trim(line) != kHeader) throw RecordFormatError("record: missing header line");
    while (std::getline(in, line)) {
      line = trim(line);
      if (line.empty() || line[0] == '#') continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw RecordFormatError("record: line without '=': " + line);
      values_[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
  }
  const std::string& get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw RecordFormatError("record: missing key " + key);
    return it->second;
  }
  template <class T>
  T as(const std::string& key) const {
    return parse_as<T>(key, get(key));
  }
  bool flag(const std::string& key) const {
    const auto& v = get(key);
    if (v == "true") return true;
    if (v == "false") return false;
    throw RecordFormatError("record: " + key + " must be true or false");
  }
  template <class T>
  std::vector<T> list(const std::string& key) const {
    std::vector<T> out;
    for (const auto& w : split(get(key))) out.push_back(parse_as<T>(key, w));
    return out;
  }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace

void write_record(std::ostream& out, const OptimizationRecord& r) {
  out << kHeader << '\n';
  out << "schema_version = " << r.schema_version << '\n';
  out << "kappa = " << num(r.kappa) << '\n';
  out << "ansatz.family = " << to_string(r.ansatz.family) << '\n';
  out << "ansatz.m = " << r.ansatz.m << '\n';
  out << "ansatz.n = " << r.ansatz.n << '\n';
  out << "ansatz.gaussian = " << to_string(r.ansatz.layers) << '\n';
  out << "ansatz.real_up_to_phase = " << (r.ansatz.real_up_to_phase ? "true" : "false") << '\n';
  out << "ansatz.exchange_symmetric = " << (r.ansatz.exchange_symmetric ? "true" : "false") << '\n';
  out << "gaussian.theta1 = " << num(r.gaussian.theta1) << '\n';
  out << "gaussian.lambda1 = " << num(r.gaussian.lambda1) << '\n';
  out << "gaussian.lambda2 = " << num(r.gaussian.lambda2) << '\n';
  out << "gaussian.theta2 = " << num(r.gaussian.theta2) << '\n';
  out << "core =";
  for (const auto& c : r.core) out << ' ' << num(c.real()) << ' ' << num(c.imag());
  out << '\n';
  out << "v_ng = " << num(r.v_ng) << '\n';
  out << "v_g = " << num(r.v_g) << '\n';
  out << "r_v = " << num(r.r_v) << '\n';
  out << "i1 = " << num(r.i1) << '\n';
  out << "i2 = " << num(r.i2) << '\n';
  out << "per_mode = " << join(r.per_mode) << '\n';
  out << "means = " << join(r.means) << '\n';
  out << "seed = " << r.seed << '\n';
  out << "starts = " << r.starts << '\n';
  out << "converged_starts = " << r.converged_starts << '\n';
  out << "dims = " << join(r.dims) << '\n';
  out << "bound_hit = " << (r.bound_hit ? "true" : "false") << '\n';
  out << "wall_seconds = " << num(r.wall_seconds) << '\n';
}

OptimizationRecord read_record(std::istream& in) {
  const Fields f(in);
  OptimizationRecord r;
  r.schema_version = f.as<int>("schema_version");
  if (r.schema_version != OptimizationRecord::kSchemaVersion) {
    throw RecordFormatError("record: unsupported schema version " + std::to_string(r.schema_version));
  }
  r.kappa = f.as<double>("kappa");
  try {
    r.ansatz.family = parse_family(f.get("ansatz.family"));
    r.ansatz.layers = parse_layers(f.get("ansatz.gaussian"));
  } catch (const std::invalid_argument& e) {
    throw RecordFormatError(std::string("record: ") + e.what());
  }
  r.ansatz.m = f.as<int>("ansatz.m");
  r.ansatz.n = f.as<int>("ansatz.n");
  r.ansatz.real_up_to_phase = f.flag("ansatz.real_up_to_phase");
  r.ansatz.exchange_symmetric = f.flag("ansatz.exchange_symmetric");
  r.gaussian = {f.as<double>("gaussian.theta1"), f.as<double>("gaussian.lambda1"), f.as<double>("gaussian.lambda2"),
                f.as<double>("gaussian.theta2")};
  const auto core = f.list<double>("core");
  if (core.size() % 2 != 0) throw RecordFormatError("record: core needs real and imaginary parts");
  const auto expected = static_cast<std::size_t>((r.ansatz.m + 1) * (r.ansatz.n + 1));
  if (core.size() / 2 != expected) throw RecordFormatError("record: core length does not match the ansatz dimensions");
  for (std::size_t k = 0; k < core.size(); k += 2) r.core.emplace_back(core[k], core[k + 1]);
  r.v_ng = f.as<double>("v_ng");
  r.v_g = f.as<double>("v_g");
  r.r_v = f.as<double>("r_v");
  r.i1 = f.as<double>("i1");
  r.i2 = f.as<double>("i2");
  r.per_mode = f.list<double>("per_mode");
  r.means = f.list<double>("means");
  r.seed = f.as<std::uint64_t>("seed");
  r.starts = f.as<int>("starts");
  r.converged_starts = f.as<int>("converged_starts");
  r.dims = f.list<int>("dims");
  r.bound_hit = f.flag("bound_hit");
  r.wall_seconds = f.as<double>("wall_seconds");
  return r;
}

namespace {

std::string config_key(const OptimizerConfig& c) {
  std::ostringstream k;
  k << "seed=" << c.seed << ";max_iters=" << c.max_iters << ";fd_step=" << num(c.fd_step)
    << ";tolerance=" << num(c.tolerance) << ";lambda=" << num(c.lambda_min) << ',' << num(c.lambda_max)
    << ";benchmark_starts=" << c.benchmark_starts;
  return k.str();
}

}  // namespace

std::string run_key(const AnsatzSpec& a, double kappa, const OptimizerConfig& config) {
  std::ostringstream k;
  k << "record/v" << OptimizationRecord::kSchemaVersion << ";ansatz=" << to_string(a.family) << ',' << a.m << ','
    << a.n << ',' << to_string(a.layers) << ',' << a.real_up_to_phase << ',' << a.exchange_symmetric
    << ";kappa=" << num(kappa) << ";starts=" << config.starts << ';' << config_key(config);
  return k.str();
}

std::string benchmark_key(double kappa, const OptimizerConfig& config) {
  return "benchmark;kappa=" + num(kappa) + ';' + config_key(config);
}

std::string content_hash(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

ResultStore::ResultStore(std::filesystem::path directory) : dir_(std::move(directory)) {
  std::filesystem::create_directories(dir_);
}

std::filesystem::path ResultStore::record_path(const AnsatzSpec& ansatz, double kappa, const OptimizerConfig& config) const {
  return dir_ / ("record-" + content_hash(run_key(ansatz, kappa, config)) + ".txt");
}

std::optional<OptimizationRecord> ResultStore::find(const AnsatzSpec& ansatz, double kappa,
                                                    const OptimizerConfig& config) const {
  std::ifstream in(record_path(ansatz, kappa, config));
  if (!in) return std::nullopt;
  return read_record(in);
}

std::filesystem::path ResultStore::save(const OptimizationRecord& record, const OptimizerConfig& config) {
  const auto path = record_path(record.ansatz, record.kappa, config);
  if (std::filesystem::exists(path)) return path;
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    write_record(out, record);
    if (!out) throw std::runtime_error("ResultStore: cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
  return path;
}

std::optional<double> ResultStore::cached_benchmark(double kappa, const OptimizerConfig& config) const {
  const auto key = benchmark_key(kappa, config);
  std::ifstream in(dir_ / ("benchmark-" + content_hash(key) + ".txt"));
  if (!in) return std::nullopt;
  std::string stored, value;
  if (!std::getline(in, stored) || !std::getline(in, value) || stored != key) return std::nullopt;
  return parse_as<double>("v_g", value);
}

void ResultStore::cache_benchmark(double kappa, const OptimizerConfig& config, double v_g) {
  const auto key = benchmark_key(kappa, config);
  std::ofstream out(dir_ / ("benchmark-" + content_hash(key) + ".txt"));
  out << key << '\n' << num(v_g) << '\n';
}

std::vector<IndexEntry> ResultStore::rebuild_index() const {
  std::vector<IndexEntry> entries;
  for (const auto& e : std::filesystem::directory_iterator(dir_)) {
    const auto name = e.path().filename().string();
    if (!name.starts_with("record-") || e.path().extension() != ".txt") continue;
    std::ifstream in(e.path());
    const auto r = read_record(in);
    entries.push_back({name, r.ansatz.label(), r.kappa, r.r_v});
  }
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.file < b.file; });
  std::ofstream out(dir_ / "index.csv");
  out << "file,ansatz,kappa,r_v\n";
  for (const auto& e : entries) out << e.file << ',' << e.ansatz << ',' << num(e.kappa) << ',' << num(e.r_v) << '\n';
  return entries;
}

std::vector<IndexEntry> ResultStore::read_index() const {
  std::ifstream in(dir_ / "index.csv");
  if (!in) return rebuild_index();
  std::vector<IndexEntry> entries;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    if (cells.size() != 4) throw RecordFormatError("index.csv: malformed row: " + line);
    entries.push_back({cells[0], cells[1], parse_as<double>("kappa", cells[2]), parse_as<double>("r_v", cells[3])});
  }
  return entries;
}

}  // namespace mmgate
