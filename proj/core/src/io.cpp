#include "wqes/io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace wqes {

namespace {

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

std::string strip_bom(std::string line) {
  if (line.size() >= 3 && line[0] == '\xEF' && line[1] == '\xBB' && line[2] == '\xBF')
    return line.substr(3);
  return line;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t");
  return s.substr(begin, end - begin + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write file: " + path.string());
  return out;
}

}  // namespace

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", x);
  return buf;
}

double round_sig(double x) {
  return std::strtod(format_number(x).c_str(), nullptr);
}

ReturnSeries load_returns(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  std::string line;
  std::size_t line_no = 0;

  if (!std::getline(in, line))
    throw ParseError(path.string() + ": empty file, expected `date,return` header");
  ++line_no;
  line = strip_cr(strip_bom(line));
  if (lower(trim(line)) != "date,return")
    throw ParseError(path.string() + ": line 1: expected header `date,return`, got `" +
                     line + "`");

  ReturnSeries series;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split_csv(line);
    if (fields.size() != 2)
      throw ParseError(path.string() + ": line " + std::to_string(line_no) +
                       ": expected 2 columns, got " + std::to_string(fields.size()));
    const std::string& date = fields[0];
    if (date.empty())
      throw ParseError(path.string() + ": line " + std::to_string(line_no) +
                       ": empty date");
    double value = 0.0;
    if (!parse_double(fields[1], value))
      throw ParseError(path.string() + ": line " + std::to_string(line_no) +
                       ": non-numeric return `" + fields[1] + "`");
    if (!series.dates.empty() && !(date > series.dates.back()))
      throw ParseError(path.string() + ": line " + std::to_string(line_no) +
                       ": dates out of order (`" + date + "` after `" +
                       series.dates.back() + "`)");
    series.dates.push_back(date);
    series.values.push_back(value);
  }
  if (series.empty()) throw ParseError(path.string() + ": no data rows");
  return series;
}

void write_forecast_csv(const std::filesystem::path& path, const ForecastSeries& fc) {
  std::ofstream out = open_output(path);
  out << "date,var,es\n";
  for (std::size_t t = 0; t < fc.var.size(); ++t) {
    const std::string date =
        t < fc.dates.size() ? fc.dates[t] : std::to_string(t + 1);
    out << date << ',' << format_number(fc.var[t]) << ','
        << format_number(fc.es[t]) << '\n';
  }
}

ForecastSeries load_forecast_csv(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  std::string line;
  if (!std::getline(in, line))
    throw ParseError(path.string() + ": empty forecast file");
  if (lower(trim(strip_cr(strip_bom(line)))) != "date,var,es")
    throw ParseError(path.string() + ": expected header `date,var,es`");
  ForecastSeries fc;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split_csv(line);
    if (fields.size() != 3)
      throw ParseError(path.string() + ": line " + std::to_string(line_no) +
                       ": expected 3 columns");
    double v = 0.0, e = 0.0;
    if (!parse_double(fields[1], v) || !parse_double(fields[2], e))
      throw ParseError(path.string() + ": line " + std::to_string(line_no) +
                       ": non-numeric forecast");
    fc.dates.push_back(fields[0]);
    fc.var.push_back(v);
    fc.es.push_back(e);
  }
  return fc;
}

void write_loss_csv(const std::filesystem::path& path, const LossMatrix& losses) {
  std::ofstream out = open_output(path);
  out << "date";
  for (const auto& model : losses.models) out << ',' << model;
  out << '\n';
  for (std::size_t t = 0; t < losses.n_steps; ++t) {
    const std::string date =
        t < losses.dates.size() ? losses.dates[t] : std::to_string(t + 1);
    out << date;
    for (std::size_t k = 0; k < losses.models.size(); ++k)
      out << ',' << format_number(losses.at(t, k));
    out << '\n';
  }
}

LossMatrix load_loss_csv(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path.string() + ": empty loss file");
  line = strip_cr(strip_bom(line));
  std::vector<std::string> header = split_csv(line);
  if (header.size() < 2 || lower(header[0]) != "date")
    throw ParseError(path.string() + ": expected header `date,<model...>`");

  LossMatrix lm;
  lm.models.assign(header.begin() + 1, header.end());
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split_csv(line);
    if (fields.size() != header.size())
      throw ParseError(path.string() + ": line " + std::to_string(line_no) +
                       ": column count mismatch");
    lm.dates.push_back(fields[0]);
    for (std::size_t k = 1; k < fields.size(); ++k) {
      double v = 0.0;
      if (!parse_double(fields[k], v))
        throw ParseError(path.string() + ": line " + std::to_string(line_no) +
                         ": non-numeric loss");
      lm.values.push_back(v);
    }
    ++lm.n_steps;
  }
  if (lm.n_steps == 0) throw ParseError(path.string() + ": no data rows");
  return lm;
}

void write_table_csv(const std::filesystem::path& path,
                     const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out = open_output(path);
  for (std::size_t i = 0; i < header.size(); ++i)
    out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
}

}  // namespace wqes
