#include "trajectory.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "errors.hpp"

namespace socsim {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_cell(const std::string& cell, int line_no) {
  const char* s = cell.c_str();
  char* end = nullptr;
  const double v = std::strtod(s, &end);
  if (end == s || *end != '\0')
    throw IoError("trajectory CSV line " + std::to_string(line_no) +
                  ": malformed number '" + cell + "'");
  return v;
}

}  // namespace

std::string trajectory_header(int n_compacts) {
  std::string h = "t,Z,l2,l2Y,m_noncrit";
  for (int i = 0; i < n_compacts; ++i) h += ",mass_K" + std::to_string(i);
  for (int i = 0; i < n_compacts; ++i) h += ",bound_rhs" + std::to_string(i);
  h += ",beta_sumsq";
  return h;
}

std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string trajectory_to_csv(std::span<const ObservableRecord> records) {
  const int nc = records.empty() ? 0 : static_cast<int>(records[0].mass_K.size());
  std::string out = trajectory_header(nc);
  out += '\n';
  for (const auto& r : records) {
    out += format_full(r.t);
    out += ',';
    out += format_full(r.Z);
    out += ',';
    out += format_full(r.l2);
    out += ',';
    out += format_full(r.l2Y);
    out += ',';
    out += format_full(r.m_noncrit);
    for (double m : r.mass_K) {
      out += ',';
      out += format_full(m);
    }
    for (double b : r.bound_rhs) {
      out += ',';
      out += format_full(b);
    }
    out += ',';
    out += format_full(r.beta_sumsq);
    out += '\n';
  }
  return out;
}

void write_trajectory_csv(const std::string& path,
                          std::span<const ObservableRecord> records) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  const std::string body = trajectory_to_csv(records);
  f.write(body.data(), static_cast<std::streamsize>(body.size()));
  f.flush();
  if (!f) throw IoError("write failed for '" + path + "'");
}

std::vector<ObservableRecord> parse_trajectory_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line))
    throw IoError("trajectory CSV: empty input");
  // Infer the compact count from the header and demand an exact match.
  auto cols = split_csv_line(line);
  int nc = 0;
  while (5 + nc < static_cast<int>(cols.size()) &&
         cols[5 + nc] == "mass_K" + std::to_string(nc))
    ++nc;
  if (cols != split_csv_line(trajectory_header(nc)))
    throw IoError("trajectory CSV line 1: unrecognized header");
  const int want = 6 + 2 * nc;

  std::vector<ObservableRecord> records;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (static_cast<int>(cells.size()) != want)
      throw IoError("trajectory CSV line " + std::to_string(line_no) + ": " +
                    std::to_string(cells.size()) + " columns, expected " +
                    std::to_string(want));
    ObservableRecord r;
    r.t = parse_cell(cells[0], line_no);
    r.Z = parse_cell(cells[1], line_no);
    r.l2 = parse_cell(cells[2], line_no);
    r.l2Y = parse_cell(cells[3], line_no);
    r.m_noncrit = parse_cell(cells[4], line_no);
    r.mass_K.resize(nc);
    r.bound_rhs.resize(nc);
    for (int i = 0; i < nc; ++i) r.mass_K[i] = parse_cell(cells[5 + i], line_no);
    for (int i = 0; i < nc; ++i)
      r.bound_rhs[i] = parse_cell(cells[5 + nc + i], line_no);
    r.beta_sumsq = parse_cell(cells[5 + 2 * nc], line_no);
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<ObservableRecord> read_trajectory_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_trajectory_csv(ss.str());
}

}  // namespace socsim
