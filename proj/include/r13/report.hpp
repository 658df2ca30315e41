#pragma once

// Run configuration, suite orchestration and the JSON / CSV report surface.

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "r13/galerkin.hpp"

namespace r13 {

// Canonical (dependency) order: spaces -> assembly -> analysis.
enum class Suite { ellipticity, korn, constants, solve, limit, bc };

inline constexpr Suite kAllSuites[] = {Suite::ellipticity, Suite::korn,  Suite::constants,
                                       Suite::solve,       Suite::limit, Suite::bc};

std::string suite_name(Suite s);
Suite parse_suite(const std::string& name);  // throws ConfigError("suites")

// Invalid configuration; field() names the offending key.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(const std::string& field, const std::string& what);
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

// Default output directory: $R13_OUTPUT_DIR if set and nonempty, else "r13_output".
std::string default_output_dir();

struct RunConfig {
    double kn = 1.0;
    double chi_tilde = 1.0;
    double epsilon_w = 0.0;
    int degree = 2;
    int subdivisions = 1;
    std::vector<Suite> suites{std::begin(kAllSuites), std::end(kAllSuites)};
    std::uint64_t seed = 20240617;
    std::string output_dir = default_output_dir();

    // Throws ConfigError naming the field.
    void validate() const;
    ModelParams params() const { return {kn, chi_tilde, epsilon_w}; }
};

// Exactly the RunConfig keys; unknown keys and wrong types throw ConfigError.
// Missing keys keep their defaults.
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& c);
RunConfig load_config(const std::string& path);

// Kinds of checks a row can carry. The tolerance column holds the threshold.
enum class Check { le, ge, gt, eq, info };

struct ResultRow {
    std::string quantity;
    double value = 0.0;
    double tolerance = 0.0;
    Check check = Check::info;
    bool pass = true;
};

struct SuiteResult {
    Suite suite = Suite::ellipticity;
    std::vector<ResultRow> rows;
    nlohmann::json details = nlohmann::json::object();
    double seconds = 0.0;

    bool passed() const;
    std::vector<std::string> failures() const;  // "suite.quantity"

    void info(const std::string& q, double v);
    void le(const std::string& q, double v, double tol);
    void ge(const std::string& q, double v, double tol);
    void gt(const std::string& q, double v, double threshold);
    void eq(const std::string& q, double v, double expected);
    void flag(const std::string& q, bool ok) { eq(q, ok ? 1.0 : 0.0, 1.0); }
};

struct VerificationReport {
    RunConfig config;
    std::vector<SuiteResult> suites;

    bool passed() const;
    std::vector<std::string> failures() const;
    std::size_t scalar_count() const;

    // Full record including timings and the tolerance table.
    nlohmann::json to_json() const;
    // Header "suite,quantity,value,tolerance,pass", numbers as %.17g. No
    // timings, so identical configurations give byte-identical output.
    void write_csv(std::ostream& out) const;
};

// Executes one suite with no state shared with other suites.
SuiteResult run_suite(Suite suite, const RunConfig& config);

// Validates the configuration and runs the requested suites in canonical order.
VerificationReport run(const RunConfig& config);

enum class ExportFormat { json, csv };

// Writes report.json or report.csv into dir (created if missing) and returns
// the path. Throws std::runtime_error("cannot write <path>") on I/O failure.
std::string export_report(const VerificationReport& report, ExportFormat format, const std::string& dir);

// Reads the rows back from an exported JSON document.
std::vector<std::pair<std::string, ResultRow>> rows_from_json(const nlohmann::json& j);

// Check name in the report ("<=", ">=", ">", "==", "info").
const char* check_name(Check c);

}  // namespace r13
