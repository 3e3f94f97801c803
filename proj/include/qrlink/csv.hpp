#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "qrlink/mc.hpp"
#include "qrlink/sweep.hpp"

namespace qrlink {

inline constexpr std::string_view kToolVersion = "0.1.0";

/// Provenance header written as `#` comment lines before the CSV header.
/// The timestamp is caller-supplied ("-" keeps outputs byte-reproducible).
struct RunManifest {
    std::string command;
    std::vector<std::string> parameters;  // already formatted key=value items
    std::string seed = "-";
    std::string timestamp = "-";
};

std::string format_number(double value);  // decimal, 9 significant digits
std::string format_cutoff(Cutoff cutoff);

void write_manifest(std::ostream& out, const RunManifest& manifest);

/// One sweep as CSV: manifest comments, the fixed column header, one row per
/// distance. Absent RR rows carry the literal NA in the rate fields.
void write_sweep_csv(std::ostream& out, const SweepResult& sweep, const RunManifest& manifest);

/// Several sweeps concatenated into one file, separated by `# platform=` markers.
void write_combined_csv(std::ostream& out, std::span<const SweepResult> sweeps,
                        const RunManifest& manifest);

/// Oracle comparison as a fixed-width table of z-scores; byte-identical for
/// identical inputs and seed.
void write_validation_report(std::ostream& out, const McComparisonReport& report,
                             const RunManifest& manifest);

}  // namespace qrlink
