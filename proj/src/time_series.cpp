#include "slipgrip/time_series.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace slipgrip {

std::string to_string(SignalUnit unit) {
  switch (unit) {
    case SignalUnit::kVolts:
      return "volts";
    case SignalUnit::kVoltsSquared:
      return "volts^2";
    case SignalUnit::kNewtons:
      return "newtons";
    case SignalUnit::kDegrees:
      return "degrees";
    case SignalUnit::kDimensionless:
      return "dimensionless";
  }
  return "dimensionless";
}

SignalUnit unit_from_string(const std::string& name) {
  if (name == "volts") return SignalUnit::kVolts;
  if (name == "volts^2") return SignalUnit::kVoltsSquared;
  if (name == "newtons") return SignalUnit::kNewtons;
  if (name == "degrees") return SignalUnit::kDegrees;
  if (name == "dimensionless") return SignalUnit::kDimensionless;
  throw std::invalid_argument("unknown signal unit: '" + name + "'");
}

TimeSeries::TimeSeries(double t0_s, double dt_s, Eigen::ArrayXd samples, SignalUnit u)
    : t0(t0_s), dt(dt_s), values(std::move(samples)), unit(u) {
  validate();
}

void TimeSeries::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("TimeSeries: sample period must be positive and finite");
  }
  if (!std::isfinite(t0)) {
    throw std::invalid_argument("TimeSeries: start time must be finite");
  }
  if (values.size() > 0 && !values.allFinite()) {
    throw std::invalid_argument("TimeSeries: samples must be finite (no NaN/Inf)");
  }
}

void write_csv(const TimeSeries& series, const std::filesystem::path& path) {
  series.validate();
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  }
  out << "t,value,unit\n";
  const std::string unit = to_string(series.unit);
  char line[96];
  for (Eigen::Index i = 0; i < series.size(); ++i) {
    std::snprintf(line, sizeof(line), "%.6f,%.12g,", series.time_at(i), series.values[i]);
    out << line << unit << '\n';
  }
}

namespace {

[[noreturn]] void parse_fail(const std::filesystem::path& path, int line_no,
                             const std::string& what) {
  throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + what);
}

double parse_number(const std::filesystem::path& path, int line_no, const std::string& field) {
  std::size_t consumed = 0;
  double value = 0.0;
  try {
    value = std::stod(field, &consumed);
  } catch (const std::exception&) {
    parse_fail(path, line_no, "expected a number, got '" + field + "'");
  }
  if (consumed != field.size()) {
    parse_fail(path, line_no, "trailing characters after number in '" + field + "'");
  }
  return value;
}

}  // namespace

TimeSeries read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open '" + path.string() + "' for reading");
  }

  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) {
    parse_fail(path, 1, "empty file, expected header 't,value,unit'");
  }
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t,value,unit") {
    parse_fail(path, line_no, "expected header 't,value,unit', got '" + line + "'");
  }

  std::vector<double> times;
  std::vector<double> samples;
  std::string unit_name;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string t_field, v_field, u_field;
    if (!std::getline(row, t_field, ',') || !std::getline(row, v_field, ',') ||
        !std::getline(row, u_field)) {
      parse_fail(path, line_no, "expected three comma-separated fields");
    }
    times.push_back(parse_number(path, line_no, t_field));
    samples.push_back(parse_number(path, line_no, v_field));
    if (unit_name.empty()) {
      unit_name = u_field;
    } else if (u_field != unit_name) {
      parse_fail(path, line_no, "unit changed mid-file ('" + unit_name + "' -> '" + u_field + "')");
    }
  }

  if (times.size() < 2) {
    parse_fail(path, line_no, "need at least 2 samples to establish the sample period");
  }

  const double t0 = times.front();
  const double dt = (times.back() - t0) / static_cast<double>(times.size() - 1);
  if (!(dt > 0.0)) {
    parse_fail(path, line_no, "timestamps must be strictly increasing");
  }
  // The writer rounds t to 1e-6 s; allow that plus a little slack.
  const double tol = std::max(2e-6, 1e-9 * std::abs(times.back()));
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double expected = t0 + static_cast<double>(i) * dt;
    if (std::abs(times[i] - expected) > tol) {
      parse_fail(path, static_cast<int>(i) + 2, "non-uniform sample time");
    }
  }

  SignalUnit unit = SignalUnit::kDimensionless;
  try {
    unit = unit_from_string(unit_name);
  } catch (const std::exception& e) {
    parse_fail(path, 2, e.what());
  }

  Eigen::ArrayXd values =
      Eigen::Map<const Eigen::ArrayXd>(samples.data(), static_cast<Eigen::Index>(samples.size()));
  return TimeSeries(t0, dt, std::move(values), unit);
}

}  // namespace slipgrip
