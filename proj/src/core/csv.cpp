#include "core/csv.hpp"

#include "core/common.hpp"
#include "core/sha256.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>

namespace smagda {

std::string format_double(double v) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, p);
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : path_(path), columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i > 0) buffer_ += ',';
    buffer_ += header[i];
  }
  buffer_ += '\n';
}

CsvWriter::~CsvWriter() {
  if (!closed_) close();
}

CsvWriter& CsvWriter::cell(double v) { return cell(format_double(v)); }

CsvWriter& CsvWriter::cell(std::int64_t v) { return cell(std::to_string(v)); }

CsvWriter& CsvWriter::cell(const std::string& v) {
  if (in_row_ > 0) buffer_ += ',';
  buffer_ += v;
  ++in_row_;
  return *this;
}

void CsvWriter::end_row() {
  if (in_row_ != columns_) throw std::logic_error("csv: row width does not match header");
  buffer_ += '\n';
  in_row_ = 0;
}

void CsvWriter::close() {
  if (closed_) return;
  write_text_file(path_, buffer_);
  buffer_.clear();
  closed_ = true;
}

Manifest::Manifest(std::string command, nlohmann::json config_echo) {
  doc_["command"] = std::move(command);
  doc_["config"] = std::move(config_echo);
  doc_["outputs"] = nlohmann::json::array();
}

void Manifest::add_output(const std::string& path) {
  doc_["outputs"].push_back({{"file", std::filesystem::path(path).filename().string()},
                             {"sha256", sha256_file_hex(path)},
                             {"bytes", std::filesystem::file_size(path)}});
}

void Manifest::set(const std::string& key, const nlohmann::json& value) { doc_[key] = value; }

void Manifest::write(const std::string& path) const {
  write_text_file(path, doc_.dump(2) + "\n");
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("short write to " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path);
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return content;
}

}  // namespace smagda
