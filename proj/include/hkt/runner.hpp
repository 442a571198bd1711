#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "hkt/config.hpp"
#include "hkt/hk.hpp"
#include "hkt/intsys.hpp"

namespace hkt {

// Materialized inputs of a run: the prepotential, the charge data, and the
// deterministic point sample drawn from the grid box and seed.
struct RunContext {
  Prepotential F;
  JoyceProvider provider;
  std::vector<ChartPoint> points;
};
RunContext build_context(const RunConfig& config);

std::string format_point(const ChartPoint& pt);

struct ResidualStat {
  std::string name;
  double budget = 0.0;
  double worst = 0.0;
  std::string worst_point;
  bool pass = true;
};

struct SuiteResult {
  std::string name;
  std::vector<ResidualStat> residuals;
  int evaluated = 0;
  int skipped = 0;
  std::vector<std::string> skipped_points;
  double max_residual = 0.0;
  bool pass = true;
};

struct RunReport {
  std::vector<SuiteResult> suites;
  std::map<std::string, int> signature_census;  // "(p,q)" -> point count
  double max_tail = 0.0;
  bool pass = true;
  double wall_time_seconds = 0.0;
};

RunReport run_verify(const RunConfig& config);
// Canonical report document; identical for identical config + seed except
// for the wall-time field.
std::string report_to_json(const RunReport& report, const RunConfig& config);

struct ScanTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};
// observable: "om3[v-block]" (fiber pairing magnitude vs its semiflat value)
// or a tensor entry "NAME[a,b]" with NAME in I1, I2, I3, om1, om2, om3, g.
ScanTable run_scan(const RunConfig& config, const std::string& observable);
std::string scan_to_csv(const ScanTable& table);

struct CrosscheckRow {
  std::string charge;
  std::string point;
  double series_im = 0.0;    // both sides are purely imaginary
  double integral_im = 0.0;
  double abs_error = 0.0;
};
struct CrosscheckReport {
  std::vector<CrosscheckRow> rows;
  std::vector<std::string> skipped_points;
  double max_error = 0.0;
  bool pass = true;
  double wall_time_seconds = 0.0;
};
// Per support charge and point: truncated series piece of the generating
// function vs the dilogarithm ray integral representation.
CrosscheckReport run_crosscheck(const RunConfig& config);
std::string crosscheck_to_json(const CrosscheckReport& report, const RunConfig& config);

// Built-in prepotential names, their parameters, and a config skeleton.
std::string catalog_listing();

// Runs fn(0..count-1), distributing over the worker count selected by the
// HKT_THREADS environment variable (default 1). Callers write results into
// per-index slots; the first exception is rethrown after completion.
void parallel_for(int count, const std::function<void(int)>& fn);

}  // namespace hkt
