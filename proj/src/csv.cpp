#include "qrlink/csv.hpp"

#include <cmath>
#include <cstdio>

namespace qrlink {

std::string format_number(double value) {
    if (std::isnan(value)) return "NA";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.9g", value);
    return buffer;
}

std::string format_cutoff(Cutoff cutoff) {
    return cutoff.is_unbounded() ? "inf" : std::to_string(cutoff.value());
}

void write_manifest(std::ostream& out, const RunManifest& manifest) {
    out << "# qrlink v" << kToolVersion << "\n";
    out << "# command: " << manifest.command << "\n";
    for (const std::string& parameter : manifest.parameters) out << "# " << parameter << "\n";
    out << "# seed=" << manifest.seed << " timestamp=" << manifest.timestamp << "\n";
}

namespace {

constexpr std::string_view kHeader =
    "distance_km,cutoff_m,rate_linear,rate_db,fidelity,e_x,ideal_bound_db,realistic_ppl_db,"
    "sqrt_eta_db";

void write_rows(std::ostream& out, const SweepResult& sweep) {
    for (const SweepRow& row : sweep.rows) {
        out << format_number(row.distance_km) << ',';
        if (row.cutoff)
            out << format_cutoff(*row.cutoff);
        else
            out << "NA";
        auto optional_field = [&](const std::optional<double>& value) {
            out << ',' << (value ? format_number(*value) : "NA");
        };
        optional_field(row.rate);
        optional_field(row.rate_db);
        optional_field(row.fidelity);
        optional_field(row.e_x);
        out << ',' << format_number(row.ideal_bound_db);
        out << ',' << format_number(row.realistic_ppl_db);
        out << ',' << format_number(row.sqrt_eta_db);
        out << '\n';
    }
}

void write_sweep_summary(std::ostream& out, const SweepResult& sweep) {
    out << "# platform=" << sweep.platform << " protocol=" << protocol_name(sweep.protocol)
        << " era=" << era_name(sweep.era)
        << " mode=" << (sweep.mode == SweepMode::skr ? "skr" : "rr");
    if (sweep.f_min) out << " fmin=" << format_number(*sweep.f_min);
    if (sweep.fixed_cutoff) out << " fixed_cutoff=" << format_cutoff(*sweep.fixed_cutoff);
    if (sweep.regime.ideal_crossing_km)
        out << " ideal_crossing_km=" << format_number(*sweep.regime.ideal_crossing_km);
    if (sweep.regime.realistic_crossing_km)
        out << " realistic_crossing_km=" << format_number(*sweep.regime.realistic_crossing_km);
    out << "\n";
}

}  // namespace

void write_sweep_csv(std::ostream& out, const SweepResult& sweep, const RunManifest& manifest) {
    write_manifest(out, manifest);
    write_sweep_summary(out, sweep);
    out << kHeader << "\n";
    write_rows(out, sweep);
}

void write_combined_csv(std::ostream& out, std::span<const SweepResult> sweeps,
                        const RunManifest& manifest) {
    write_manifest(out, manifest);
    out << kHeader << "\n";
    for (const SweepResult& sweep : sweeps) {
        write_sweep_summary(out, sweep);
        write_rows(out, sweep);
    }
}

void write_validation_report(std::ostream& out, const McComparisonReport& report,
                             const RunManifest& manifest) {
    write_manifest(out, manifest);
    out << "p,cutoff_m,t0_over_tcoh,raw_rate_analytic,raw_rate_hat,raw_rate_se,z_raw,"
           "expectation_analytic,expectation_hat,expectation_se,z_expectation,"
           "fidelity_analytic,fidelity_hat,fidelity_se,z_fidelity,pass\n";
    for (const McComparisonRow& row : report.rows) {
        out << format_number(row.point.p) << ',' << format_cutoff(row.point.cutoff) << ','
            << format_number(row.point.dephasing_ratio) << ','
            << format_number(row.analytic_raw_rate) << ','
            << format_number(row.estimate.raw_rate_hat) << ','
            << format_number(row.estimate.raw_rate_se) << ',' << format_number(row.z_raw_rate)
            << ',' << format_number(row.analytic_expectation) << ','
            << format_number(row.estimate.expectation_hat) << ','
            << format_number(row.estimate.expectation_se) << ','
            << format_number(row.z_expectation) << ',' << format_number(row.analytic_fidelity)
            << ',' << format_number(row.estimate.fidelity_hat) << ','
            << format_number(row.estimate.fidelity_se) << ',' << format_number(row.z_fidelity)
            << ',' << (row.pass ? "yes" : "no") << '\n';
    }
    out << "# all_pass=" << (report.all_pass ? "yes" : "no")
        << " z_threshold=" << format_number(report.z_threshold) << "\n";
}

}  // namespace qrlink
