// output.hpp — CSV/JSON/SVG artifacts and reading them back for detection
#pragma once

#include "corrnoise/experiment.hpp"

#include <string>

namespace corrnoise {

std::string intensity_csv(const IntensityTrace& trace, int n);
std::string antidiagonals_csv(const Trajectory& tr, int n);
std::string parity_csv(const ParityTrace& trace);
std::string rho_k_csv(const std::vector<ProtocolPoint>& points);
std::string report_json(const DetectionReport& report);
std::string coefficients_csv(const CoefficientSet& set);
std::string sweep_csv(const SweepResult& sweep);

// Writes every artifact of a run into `dir`. Each file goes through a
// temporary name and a rename; if anything fails, the files written so far
// are removed before the error propagates.
void write_run(const RunResult& run, const std::string& dir);
void write_sweep(const ExperimentConfig& base, const SweepResult& sweep, const std::string& dir);

IntensityColumns read_intensity_csv(const std::string& path);
ClusterSeries read_rho_k_csv(const std::string& path);
// Recomputes the report from the artifacts of an earlier run.
DetectionReport detect_directory(const std::string& dir);

std::string version_string();

} // namespace corrnoise
