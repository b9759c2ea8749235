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

#ifndef MMGATE_RECORD_IO_HPP
#define MMGATE_RECORD_IO_HPP

// Records are "key = value" text, one key per line, doubles in shortest
// round-trip form so that reading back gives the identical record.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mmgate/bfgs.hpp"
#include "mmgate/optimizer.hpp"

namespace mmgate {

class RecordFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_record(std::ostream& out, const OptimizationRecord& record);
/// Throws RecordFormatError for a missing header, unknown schema version,
/// missing or malformed keys.
OptimizationRecord read_record(std::istream& in);

/// Canonical text of everything that determines a run's result; its hash
/// names the record file.
std::string run_key(const AnsatzSpec& ansatz, double kappa, const OptimizerConfig& config);
std::string benchmark_key(double kappa, const OptimizerConfig& config);
/// 64-bit FNV-1a as 16 hex digits.
std::string content_hash(const std::string& text);

struct IndexEntry {
  std::string file;
  std::string ansatz;
  double kappa = 0.0;
  double r_v = 0.0;
};

/// One immutable file per record under a directory, plus a rebuildable index
/// and a cache of benchmark variances.
class ResultStore {
 public:
  explicit ResultStore(std::filesystem::path directory);

  const std::filesystem::path& directory() const { return dir_; }

  std::filesystem::path record_path(const AnsatzSpec& ansatz, double kappa, const OptimizerConfig& config) const;
  std::optional<OptimizationRecord> find(const AnsatzSpec& ansatz, double kappa, const OptimizerConfig& config) const;
  /// Writes the record unless its file already exists (records are never
  /// overwritten). Returns the path.
  std::filesystem::path save(const OptimizationRecord& record, const OptimizerConfig& config);

  std::optional<double> cached_benchmark(double kappa, const OptimizerConfig& config) const;
  void cache_benchmark(double kappa, const OptimizerConfig& config, double v_g);

  /// Rescans the record files and rewrites index.csv.
  std::vector<IndexEntry> rebuild_index() const;
  std::vector<IndexEntry> read_index() const;

 private:
  std::filesystem::path dir_;
};

}  // namespace mmgate

#endif  // MMGATE_RECORD_IO_HPP
