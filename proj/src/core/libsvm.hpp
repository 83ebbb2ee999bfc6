#ifndef SMAGDA_CORE_LIBSVM_HPP
#define SMAGDA_CORE_LIBSVM_HPP

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace smagda {

// One sample in compressed index/value form. Indices are 0-based internally.
struct SparseRow {
  std::vector<std::int32_t> idx;
  std::vector<double> val;

  double dot(const double* x) const {
    double s = 0.0;
    for (std::size_t k = 0; k < idx.size(); ++k) s += val[k] * x[idx[k]];
    return s;
  }
};

struct Dataset {
  std::int32_t dim_features = 0;          // d1
  std::vector<SparseRow> rows;            // d2 samples
  std::vector<std::int8_t> labels;        // in {-1, +1}

  std::int64_t num_samples() const { return static_cast<std::int64_t>(rows.size()); }
  std::int64_t nnz() const;
};

struct IngestReport {
  std::string path;
  std::int32_t d1 = 0;
  std::int64_t d2 = 0;
  std::string label_mapping;  // "identity" or "0->-1,1->+1"
  std::int64_t nnz = 0;

  nlohmann::json to_json() const;
};

// Parses the LIBSVM sparse text format: "label idx:val idx:val ..." with
// 1-based, strictly ascending indices per line. Labels must be {-1,+1} or
// {0,1}; a {0,1} file is mapped 0 -> -1 and the mapping is declared in the
// report. Malformed lines raise ConfigError with the line number.
Dataset parse_libsvm(const std::string& path, IngestReport* report = nullptr);

void write_libsvm(const Dataset& data, const std::string& path);

// Seeded surrogate dataset: binary sparse features (nnz_per_row per sample)
// and labels drawn from a planted logistic model. Shaped like the LIBSVM
// benchmark sets for desk-scale experiments when the real files are absent.
Dataset make_synthetic_dataset(std::int32_t d1, std::int64_t d2, int nnz_per_row,
                               std::uint64_t seed);

}  // namespace smagda

#endif  // SMAGDA_CORE_LIBSVM_HPP
