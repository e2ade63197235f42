#include "harmlab/report.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "harmlab/errors.hpp"

namespace harmlab {

namespace {

Check make(std::string name, double value, double target, double tol, std::string cmp, std::string oracle,
           bool pass) {
  Check c;
  c.name = std::move(name);
  c.value = value;
  c.target = target;
  c.tolerance = tol;
  c.comparison = std::move(cmp);
  c.oracle = std::move(oracle);
  c.pass = pass;
  return c;
}

}  // namespace

Check check_relative(std::string name, double value, double target, double tol, std::string oracle) {
  const bool ok = std::abs(value - target) <= tol * std::abs(target);
  return make(std::move(name), value, target, tol, "relative", std::move(oracle), ok);
}

Check check_absolute(std::string name, double value, double target, double tol, std::string oracle) {
  const bool ok = std::abs(value - target) <= tol;
  return make(std::move(name), value, target, tol, "absolute", std::move(oracle), ok);
}

Check check_at_least(std::string name, double value, double bound, std::string oracle) {
  return make(std::move(name), value, bound, 0.0, "at_least", std::move(oracle), value >= bound);
}

Check check_at_most(std::string name, double value, double bound, std::string oracle) {
  return make(std::move(name), value, bound, 0.0, "at_most", std::move(oracle), value <= bound);
}

Check check_flag(std::string name, bool ok, std::string oracle) {
  return make(std::move(name), ok ? 1.0 : 0.0, 1.0, 0.0, "flag", std::move(oracle), ok);
}

bool Report::all_pass() const {
  for (const Check& c : checks)
    if (!c.pass) return false;
  return true;
}

Json to_json(const Check& c) {
  Json j;
  j["name"] = c.name;
  j["value"] = c.value;
  j["target"] = c.target;
  j["tolerance"] = c.tolerance;
  j["comparison"] = c.comparison;
  j["oracle"] = c.oracle;
  j["pass"] = c.pass;
  return j;
}

Json to_json(const Table& t) {
  Json j;
  j["name"] = t.name;
  j["columns"] = t.columns;
  j["rows"] = t.rows;
  return j;
}

Json Report::to_json() const {
  Json j;
  j["format"] = "harmlab-report";
  j["format_version"] = 1;
  j["config"] = config;
  j["results"] = results;
  Json cs = Json::array();
  for (const Check& c : checks) cs.push_back(harmlab::to_json(c));
  j["checks"] = cs;
  Json ts = Json::array();
  for (const Table& t : tables) ts.push_back(harmlab::to_json(t));
  j["tables"] = ts;
  j["all_pass"] = all_pass();
  return j;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string to_csv(const Table& t) {
  std::string s;
  for (size_t i = 0; i < t.columns.size(); ++i) s += (i ? "," : "") + t.columns[i];
  s += "\n";
  for (const auto& row : t.rows) {
    for (size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + format_double(row[i]);
    s += "\n";
  }
  return s;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorKind::io, "write failed for " + path);
}

void emit_report(const Report& r, const std::string& path, ReportFormat format) {
  if (format == ReportFormat::json) {
    write_text(path, r.to_json().dump(2) + "\n");
  } else {
    const std::filesystem::path p(path);
    for (size_t i = 0; i < r.tables.size(); ++i) {
      std::string target = path;
      if (i > 0) target = (p.parent_path() / (p.stem().string() + "." + r.tables[i].name + ".csv")).string();
      write_text(target, to_csv(r.tables[i]));
    }
    if (r.tables.empty()) write_text(path, "");
  }
  if (!r.timings.empty()) write_text(path + ".timing.json", r.timings.dump(2) + "\n");
}

}  // namespace harmlab
