#ifndef SMAGDA_CORE_CSV_HPP
#define SMAGDA_CORE_CSV_HPP

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace smagda {

// Shortest round-trip decimal form of a double (to_chars), so identical
// values always print identically and re-runs are byte-stable.
std::string format_double(double v);

// Minimal CSV writer: fixed header, rows appended cell by cell.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  ~CsvWriter();

  CsvWriter& cell(double v);
  CsvWriter& cell(std::int64_t v);
  CsvWriter& cell(const std::string& v);
  void end_row();
  void close();

  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::string buffer_;
  std::size_t columns_;
  std::size_t in_row_ = 0;
  bool closed_ = false;
};

// Records every output of one command and its SHA-256 so re-runs can be
// verified file by file.
class Manifest {
 public:
  Manifest(std::string command, nlohmann::json config_echo);

  void add_output(const std::string& path);  // hashes the file now
  void set(const std::string& key, const nlohmann::json& value);
  void write(const std::string& path) const;  // the manifest itself is not listed

 private:
  nlohmann::json doc_;
};

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace smagda

#endif  // SMAGDA_CORE_CSV_HPP
