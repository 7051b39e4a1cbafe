#pragma once

#include <string>
#include <utility>
#include <vector>

namespace erglab {

// Result tables hold preformatted cells so emission is byte-deterministic.
struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

struct Report {
    std::string tag;       // which asymptotic property this run probes
    std::string config_echo;  // canonical config (execution fields stripped)
    std::string backend;
    std::vector<std::pair<std::string, std::string>> scalars;
    std::vector<std::pair<std::string, bool>> checks;
    std::vector<Table> tables;
    double wall_seconds = 0.0;  // stderr only; never written to files

    bool ok() const {
        for (const auto& [_, pass] : checks)
            if (!pass) return false;
        return true;
    }
};

// %.17g, the fixed float format used in every emitted cell
std::string fmt17(double x);

std::string report_json(const Report& r);  // schema_version field included
std::string report_csv(const Report& r);   // long format: table,key,column,value

// Writes report.json or report.csv under out_dir (creating it), returns the
// path written.
std::string write_report(const Report& r, const std::string& out_dir,
                         const std::string& format);

// Parse the CSV back into rows of cells (round-trip check helper).
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

// Load a JSON report (for the re-emission subcommand).
Report load_report_json(const std::string& text);

constexpr int kReportSchemaVersion = 1;

}  // namespace erglab
