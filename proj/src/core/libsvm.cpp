#include "core/libsvm.hpp"

#include "core/common.hpp"
#include "core/rng.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace smagda {

std::int64_t Dataset::nnz() const {
  std::int64_t n = 0;
  for (const auto& r : rows) n += static_cast<std::int64_t>(r.idx.size());
  return n;
}

nlohmann::json IngestReport::to_json() const {
  return {{"path", path}, {"d1", d1}, {"d2", d2}, {"label_mapping", label_mapping}, {"nnz", nnz}};
}

namespace {

[[noreturn]] void parse_fail(std::int64_t line_no, const std::string& why) {
  std::ostringstream os;
  os << "libsvm parse error at line " << line_no << ": " << why;
  throw ConfigError(os.str());
}

}  // namespace

Dataset parse_libsvm(const std::string& path, IngestReport* report) {
  std::ifstream in(path);
  if (!in) throw ConfigError("libsvm: cannot open file: " + path);

  Dataset data;
  std::vector<double> raw_labels;
  bool saw_zero = false, saw_pm = false;
  std::int32_t max_index = 0;
  std::string line;
  std::int64_t line_no = 0;

  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;  // blank line

    double label;
    const char* b = tok.data();
    auto [p, ec] = std::from_chars(b, b + tok.size(), label);
    if (tok[0] == '+') {  // from_chars rejects a leading '+'
      auto [p2, ec2] = std::from_chars(b + 1, b + tok.size(), label);
      p = p2; ec = ec2;
    }
    if (ec != std::errc() || p != tok.data() + tok.size())
      parse_fail(line_no, "bad label token '" + tok + "'");
    if (label == 0.0) saw_zero = true;
    else if (label == 1.0 || label == -1.0) { if (label == -1.0) saw_pm = true; }
    else parse_fail(line_no, "label must be in {-1,+1} or {0,1}");
    raw_labels.push_back(label);

    SparseRow row;
    std::int32_t prev_index = 0;
    while (ls >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos || colon == 0 || colon + 1 >= tok.size())
        parse_fail(line_no, "bad feature token '" + tok + "'");
      std::int32_t index = 0;
      auto [ip, iec] = std::from_chars(tok.data(), tok.data() + colon, index);
      if (iec != std::errc() || ip != tok.data() + colon || index < 1)
        parse_fail(line_no, "bad feature index in '" + tok + "'");
      double v = 0.0;
      auto [vp, vec_] = std::from_chars(tok.data() + colon + 1, tok.data() + tok.size(), v);
      if (vec_ != std::errc() || vp != tok.data() + tok.size() || !std::isfinite(v))
        parse_fail(line_no, "bad feature value in '" + tok + "'");
      if (index <= prev_index)
        parse_fail(line_no, "feature indices must be strictly ascending");
      prev_index = index;
      max_index = std::max(max_index, index);
      row.idx.push_back(index - 1);  // to 0-based
      row.val.push_back(v);
    }
    data.rows.push_back(std::move(row));
  }

  if (saw_zero && saw_pm)
    throw ConfigError("libsvm: file mixes {0,1} and {-1,+1} label conventions: " + path);

  data.dim_features = max_index;
  data.labels.reserve(raw_labels.size());
  for (double l : raw_labels)
    data.labels.push_back(static_cast<std::int8_t>(l > 0.0 ? 1 : -1));

  if (report) {
    report->path = path;
    report->d1 = data.dim_features;
    report->d2 = data.num_samples();
    report->label_mapping = saw_zero ? "0->-1,1->+1" : "identity";
    report->nnz = data.nnz();
  }
  return data;
}

void write_libsvm(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("libsvm: cannot write file: " + path);
  out.precision(17);
  for (std::size_t j = 0; j < data.rows.size(); ++j) {
    out << (data.labels[j] > 0 ? "+1" : "-1");
    const auto& r = data.rows[j];
    for (std::size_t k = 0; k < r.idx.size(); ++k)
      out << ' ' << (r.idx[k] + 1) << ':' << r.val[k];
    out << '\n';
  }
}

Dataset make_synthetic_dataset(std::int32_t d1, std::int64_t d2, int nnz_per_row,
                               std::uint64_t seed) {
  if (d1 < 1 || d2 < 1 || nnz_per_row < 1 || nnz_per_row > d1)
    throw ConfigError("synthetic dataset: bad shape");
  rng::Stream stream(seed);

  std::vector<double> w(static_cast<std::size_t>(d1));
  stream.fill_gaussian(rng::Tag::kInit, 0, w);

  Dataset data;
  data.dim_features = d1;
  data.rows.reserve(static_cast<std::size_t>(d2));
  data.labels.reserve(static_cast<std::size_t>(d2));
  const double scale = 1.0 / std::sqrt(static_cast<double>(nnz_per_row));
  for (std::int64_t j = 0; j < d2; ++j) {
    const auto step = static_cast<std::uint64_t>(j) + 1;
    SparseRow row;
    row.idx = stream.sample_without_replacement(rng::Tag::kBatchX, step, d1, nnz_per_row);
    row.val.assign(row.idx.size(), 1.0);
    double margin = 0.0;
    for (auto i : row.idx) margin += w[static_cast<std::size_t>(i)];
    margin *= scale;
    const double pb = 1.0 / (1.0 + std::exp(-margin));
    const double u = stream.uniform(rng::Tag::kTrial, step, 0);
    data.labels.push_back(static_cast<std::int8_t>(u < pb ? 1 : -1));
    data.rows.push_back(std::move(row));
  }
  return data;
}

}  // namespace smagda
