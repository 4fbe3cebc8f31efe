#include "xclust/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace xclust {

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string unquote(std::string s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
  return s;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

DataMatrix parse_csv(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::Io, source + ": missing header row");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  DataMatrix data;
  for (auto& name : split(trim(line))) data.column_names.push_back(unquote(name));
  const std::size_t d = data.column_names.size();
  if (d == 0) fail(ErrorKind::Io, source + ": empty header row");
  data.values = Matrix(0, d);
  std::vector<double> row(d);
  std::size_t r = 0;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    ++r;
    const auto cells = split(line);
    if (cells.size() != d)
      fail(ErrorKind::Io, source + ": row " + std::to_string(r) + " has " + std::to_string(cells.size()) +
                              " cells, expected " + std::to_string(d));
    for (std::size_t j = 0; j < d; ++j) {
      const std::string& c = cells[j];
      const char* begin = c.data();
      if (!c.empty() && c.front() == '+') ++begin;
      const auto [p, ec] = std::from_chars(begin, c.data() + c.size(), row[j]);
      if (c.empty() || ec != std::errc() || p != c.data() + c.size() || !std::isfinite(row[j]))
        fail(ErrorKind::Io, source + ": non-numeric cell '" + c + "' at row " + std::to_string(r) +
                                ", column " + std::to_string(j + 1) + " (" + data.column_names[j] + ")");
    }
    data.values.append_row(row);
  }
  return data;
}

DataMatrix read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open " + path.string());
  return parse_csv(in, path.string());
}

void write_csv(std::ostream& out, const Matrix& values, const std::vector<std::string>& header) {
  if (header.size() != values.cols()) fail(ErrorKind::InvalidInput, "header does not match the column count");
  for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
  out << '\n';
  for (std::size_t i = 0; i < values.rows(); ++i) {
    for (std::size_t j = 0; j < values.cols(); ++j) out << (j ? "," : "") << format_double(values(i, j));
    out << '\n';
  }
}

void write_csv(const std::filesystem::path& path, const Matrix& values,
               const std::vector<std::string>& header) {
  std::ostringstream s;
  write_csv(s, values, header);
  write_text(path, s.str());
}

void write_coefficients(const std::filesystem::path& path, const Matrix& b) {
  std::vector<std::string> header;
  for (std::size_t j = 0; j < b.cols(); ++j) header.push_back("b" + std::to_string(j + 1));
  write_csv(path, b, header);
}

Matrix read_coefficients(const std::filesystem::path& path) { return read_csv(path).values; }

FactorCoefficients read_model(const std::filesystem::path& coefficients_csv,
                              const std::filesystem::path& config_json) {
  FactorCoefficients model;
  model.b = read_coefficients(coefficients_csv);
  if (!config_json.empty()) {
    std::ifstream in(config_json);
    if (!in) fail(ErrorKind::Io, "cannot open " + config_json.string());
    nlohmann::json cfg;
    try {
      in >> cfg;
      model.alpha = cfg.value("alpha", 1.0);
      model.type = parse_model_type(cfg.value("type", std::string("max-linear")));
      if (cfg.contains("noise") && !cfg["noise"].is_null()) {
        model.noise.enabled = true;
        model.noise.alpha = cfg["noise"].value("alpha", 2.0);
        model.noise.scale = cfg["noise"].value("scale", 1.0);
      }
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::Io, config_json.string() + ": " + e.what());
    }
  }
  model.validate();
  return model;
}

void write_model_config(const std::filesystem::path& path, const FactorCoefficients& model) {
  nlohmann::json cfg{{"alpha", model.alpha}, {"type", to_string(model.type)}};
  if (model.noise.enabled) cfg["noise"] = {{"alpha", model.noise.alpha}, {"scale", model.noise.scale}};
  else cfg["noise"] = nullptr;
  write_text(path, cfg.dump(2) + "\n");
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorKind::Io, "write failed for " + path.string());
}

}  // namespace xclust
