#pragma once

#include <json.hpp>
#include <string>
#include <vector>

namespace harmlab {

using Json = nlohmann::ordered_json;

// Oracle categories attached to every numeric claim:
//   closed-form  value from an analytic formula evaluated independently
//   published    value read off the source formula by arithmetic
//   structural   identity or topology fact (exact up to round-off)
struct Check {
  std::string name;
  double value = 0.0;
  double target = 0.0;
  double tolerance = 0.0;
  std::string comparison;  // "relative", "absolute", "at_least", "at_most", "equal", "flag"
  std::string oracle;
  bool pass = false;
};

Check check_relative(std::string name, double value, double target, double tol, std::string oracle);
Check check_absolute(std::string name, double value, double target, double tol, std::string oracle);
Check check_at_least(std::string name, double value, double bound, std::string oracle);
Check check_at_most(std::string name, double value, double bound, std::string oracle);
Check check_flag(std::string name, bool ok, std::string oracle);

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct Report {
  Json config;
  Json results = Json::object();
  std::vector<Check> checks;
  std::vector<Table> tables;
  Json timings = Json::object();  // kept out of the report body
  bool all_pass() const;
  Json to_json() const;
};

Json to_json(const Check& c);
Json to_json(const Table& t);
std::string to_csv(const Table& t);
std::string format_double(double x);  // shortest round-trip form

enum class ReportFormat { json, csv };

// JSON writes the report; CSV writes every table, one file per table after
// the first as <stem>.<table>.csv. Wall times go to <path>.timing.json.
// Unwritable path: io error.
void emit_report(const Report& r, const std::string& path, ReportFormat format);

void write_text(const std::string& path, const std::string& text);

}  // namespace harmlab
