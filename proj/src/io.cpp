#include "ribp/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ribp/errors.hpp"

namespace ribp::io {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw DataError("write failed for " + path.string());
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    std::size_t start = 0;
    while (start < cell.size() && cell[start] == ' ') ++start;
    out.push_back(cell.substr(start));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_cell(const std::string& s, const fs::path& path, std::size_t line) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end || !std::isfinite(v))
    throw DataError(path.string() + ":" + std::to_string(line) + ": not a finite number '" + s + "'");
  return v;
}

// Reads the version line (if any) and the header; returns data rows.
struct CsvBody {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;
};

CsvBody read_csv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  CsvBody body;
  std::string line;
  std::size_t number = 0;
  bool have_header = false, versioned = false;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      // a versioned file with zero columns has an empty header and empty rows
      if (versioned && !have_header) {
        have_header = true;
      } else if (versioned && body.header.empty()) {
        body.rows.emplace_back();
        body.line_numbers.push_back(number);
      }
      continue;
    }
    if (line.rfind(kCsvVersionTag, 0) == 0) {
      if (number != 1) throw DataError(path.string() + ": version line must come first");
      const std::string rest = line.substr(kCsvVersionTag.size());
      int version = 0;
      std::size_t start = rest.find_first_not_of(' ');
      const char* b = rest.data() + (start == std::string::npos ? rest.size() : start);
      const char* e = rest.data() + rest.size();
      const auto res = std::from_chars(b, e, version);
      if (res.ec != std::errc() || res.ptr != e || version != kCsvVersion)
        throw DataError(path.string() + ": unsupported csv version '" + rest + "'");
      versioned = true;
      continue;
    }
    if (line[0] == '#') continue;
    if (!have_header) {
      body.header = split_line(line);
      have_header = true;
      continue;
    }
    body.rows.push_back(split_line(line));
    body.line_numbers.push_back(number);
  }
  if (!have_header) throw DataError(path.string() + ": missing header row");
  for (std::size_t r = 0; r < body.rows.size(); ++r)
    if (body.rows[r].size() != body.header.size())
      throw DataError(path.string() + ":" + std::to_string(body.line_numbers[r]) + ": expected " +
                      std::to_string(body.header.size()) + " fields, found " +
                      std::to_string(body.rows[r].size()));
  return body;
}

void write_header(std::ofstream& out, const std::vector<std::string>& names) {
  out << kCsvVersionTag << ' ' << kCsvVersion << '\n';
  for (std::size_t i = 0; i < names.size(); ++i) out << (i ? "," : "") << names[i];
  out << '\n';
}

std::vector<std::string> numbered(std::string_view prefix, Eigen::Index count) {
  std::vector<std::string> names;
  for (Eigen::Index i = 0; i < count; ++i) names.push_back(std::string(prefix) + std::to_string(i));
  return names;
}

}  // namespace

void write_matrix(const fs::path& path, const Eigen::MatrixXd& m, std::string_view column_prefix) {
  auto out = open_out(path);
  write_header(out, numbered(column_prefix, m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out << (c ? "," : "") << format_double(m(r, c));
    out << '\n';
  }
  finish(out, path);
}

Eigen::MatrixXd read_matrix(const fs::path& path) {
  const auto body = read_csv(path);
  Eigen::MatrixXd m(body.rows.size(), body.header.size());
  for (std::size_t r = 0; r < body.rows.size(); ++r)
    for (std::size_t c = 0; c < body.header.size(); ++c)
      m(r, c) = parse_cell(body.rows[r][c], path, body.line_numbers[r]);
  return m;
}

void write_binary(const fs::path& path, const FeatureMatrix& z) {
  auto out = open_out(path);
  write_header(out, numbered("z", static_cast<Eigen::Index>(z.cols())));
  for (std::size_t r = 0; r < z.rows(); ++r) {
    for (std::size_t c = 0; c < z.cols(); ++c) out << (c ? "," : "") << int(z(r, c));
    out << '\n';
  }
  finish(out, path);
}

FeatureMatrix read_binary(const fs::path& path) {
  const Eigen::MatrixXd m = read_matrix(path);
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      if (m(r, c) != 0.0 && m(r, c) != 1.0) throw DataError(path.string() + ": entries must be 0 or 1");
  return FeatureMatrix::from_eigen(m);
}

void write_mask(const fs::path& path, const HoldoutMask& mask) {
  auto out = open_out(path);
  write_header(out, {"row", "col"});
  for (Eigen::Index r = 0; r < mask.rows(); ++r)
    for (Eigen::Index c = 0; c < mask.cols(); ++c)
      if (mask(r, c)) out << r << ',' << c << '\n';
  finish(out, path);
}

HoldoutMask read_mask(const fs::path& path, Eigen::Index rows, Eigen::Index cols) {
  const Eigen::MatrixXd m = read_matrix(path);
  if (m.cols() != 2) throw DataError(path.string() + ": mask needs row,col columns");
  HoldoutMask mask = HoldoutMask::Constant(rows, cols, false);
  for (Eigen::Index k = 0; k < m.rows(); ++k) {
    const double r = m(k, 0), c = m(k, 1);
    if (r != std::floor(r) || c != std::floor(c) || r < 0 || c < 0 || r >= rows || c >= cols)
      throw DataError(path.string() + ": mask entry out of range");
    mask(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = true;
  }
  return mask;
}

void write_labels(const fs::path& path, const std::vector<int>& labels) {
  auto out = open_out(path);
  write_header(out, {"row", "label"});
  for (std::size_t r = 0; r < labels.size(); ++r) out << r << ',' << labels[r] << '\n';
  finish(out, path);
}

std::vector<int> read_labels(const fs::path& path) {
  const Eigen::MatrixXd m = read_matrix(path);
  if (m.cols() != 2) throw DataError(path.string() + ": labels need row,label columns");
  std::vector<int> labels(m.rows());
  for (Eigen::Index k = 0; k < m.rows(); ++k) labels[k] = static_cast<int>(m(k, 1));
  return labels;
}

void write_table(const fs::path& path, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows) {
  auto out = open_out(path);
  write_header(out, header);
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << row[c];
    out << '\n';
  }
  finish(out, path);
}

void write_text(const fs::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
  finish(out, path);
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_json(const fs::path& path, const nlohmann::ordered_json& j) { write_text(path, j.dump(2) + "\n"); }

std::vector<RestrictingDistribution> read_per_row_f(const fs::path& path) {
  const std::string text = read_text(path);
  std::vector<RestrictingDistribution> out;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && (text[first] == '{' || text[first] == '[')) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path.string() + ": " + e.what());
    }
    const auto& list = j.is_object() ? j.at("per_row") : j;
    if (!list.is_array()) throw DataError(path.string() + ": expected an array of f specs");
    for (const auto& item : list) {
      if (!item.is_string()) throw DataError(path.string() + ": f specs must be strings");
      out.push_back(RestrictingDistribution::parse(item.get<std::string>()));
    }
    return out;
  }
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    out.push_back(RestrictingDistribution::parse(line));
  }
  return out;
}

nlohmann::ordered_json per_row_f_json(const std::vector<RestrictingDistribution>& f) {
  nlohmann::ordered_json j;
  j["per_row"] = nlohmann::ordered_json::array();
  for (const auto& fn : f) j["per_row"].push_back(fn.to_spec());
  return j;
}

nlohmann::ordered_json report_json(const SimReport& r) {
  nlohmann::ordered_json j;
  j["method"] = r.method;
  j["accepted"] = r.accepted;
  j["proposals"] = r.proposals;
  j["rejections"] = r.rejections;
  j["truncation"] = r.truncation;
  if (r.method == to_string(SimMethod::ExactRetrospective)) {
    j["excess_proposals"] = r.excess_proposals;
    j["equal_proposals"] = r.equal_proposals;
    j["equal_accepted"] = r.equal_accepted;
    j["deficit_proposals"] = r.deficit_proposals;
    j["deficit_accepted"] = r.deficit_accepted;
    j["atoms_added"] = r.atoms_added;
  }
  return j;
}

nlohmann::ordered_json timing_json(const SimReport& r) {
  nlohmann::ordered_json j;
  j["seconds"] = r.seconds;
  j["cpu_seconds"] = r.cpu_seconds;
  return j;
}

}  // namespace ribp::io
