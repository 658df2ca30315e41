#include "r13/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "r13/tolerances.hpp"

namespace r13 {

std::string suite_name(Suite s)
{
    switch (s) {
    case Suite::ellipticity:
        return "ellipticity";
    case Suite::korn:
        return "korn";
    case Suite::constants:
        return "constants";
    case Suite::solve:
        return "solve";
    case Suite::limit:
        return "limit";
    case Suite::bc:
        return "bc";
    }
    throw std::logic_error("unknown suite");
}

Suite parse_suite(const std::string& name)
{
    for (Suite s : kAllSuites)
        if (suite_name(s) == name)
            return s;
    throw ConfigError("suites", "unknown suite '" + name + "'");
}

ConfigError::ConfigError(const std::string& field, const std::string& what)
    : std::invalid_argument("invalid config field '" + field + "': " + what), field_(field)
{
}

std::string default_output_dir()
{
    const char* env = std::getenv("R13_OUTPUT_DIR");
    return (env != nullptr && *env != '\0') ? std::string(env) : std::string("r13_output");
}

void RunConfig::validate() const
{
    if (!(kn > 0.0) || !std::isfinite(kn))
        throw ConfigError("kn", "must be a finite number > 0");
    if (!(chi_tilde > 0.0) || !std::isfinite(chi_tilde))
        throw ConfigError("chi_tilde", "must be a finite number > 0");
    if (!(epsilon_w >= 0.0) || !std::isfinite(epsilon_w))
        throw ConfigError("epsilon_w", "must be a finite number >= 0");
    if (degree < 1)
        throw ConfigError("degree", "must be >= 1");
    if (subdivisions < 1)
        throw ConfigError("subdivisions", "must be >= 1");
    if (suites.empty())
        throw ConfigError("suites", "must be nonempty");
    std::set<Suite> seen;
    for (Suite s : suites)
        if (!seen.insert(s).second)
            throw ConfigError("suites", "duplicate suite '" + suite_name(s) + "'");
    if (output_dir.empty())
        throw ConfigError("output_dir", "must be nonempty");
}

namespace {

double number_field(const nlohmann::json& j, const char* key)
{
    if (!j.is_number())
        throw ConfigError(key, "must be a number");
    return j.get<double>();
}

long long integer_field(const nlohmann::json& j, const char* key)
{
    if (!j.is_number_integer())
        throw ConfigError(key, "must be an integer");
    return j.get<long long>();
}

}  // namespace

RunConfig config_from_json(const nlohmann::json& j)
{
    if (!j.is_object())
        throw ConfigError("config", "must be a JSON object");
    static const std::set<std::string> known{"kn",           "chi_tilde", "epsilon_w", "degree",
                                             "subdivisions", "suites",    "seed",      "output_dir"};
    for (const auto& item : j.items())
        if (known.count(item.key()) == 0)
            throw ConfigError(item.key(), "unknown key");

    RunConfig c;
    if (j.contains("kn"))
        c.kn = number_field(j["kn"], "kn");
    if (j.contains("chi_tilde"))
        c.chi_tilde = number_field(j["chi_tilde"], "chi_tilde");
    if (j.contains("epsilon_w"))
        c.epsilon_w = number_field(j["epsilon_w"], "epsilon_w");
    if (j.contains("degree"))
        c.degree = static_cast<int>(integer_field(j["degree"], "degree"));
    if (j.contains("subdivisions"))
        c.subdivisions = static_cast<int>(integer_field(j["subdivisions"], "subdivisions"));
    if (j.contains("seed")) {
        const long long s = integer_field(j["seed"], "seed");
        if (s < 0)
            throw ConfigError("seed", "must be >= 0");
        c.seed = static_cast<std::uint64_t>(s);
    }
    if (j.contains("output_dir")) {
        if (!j["output_dir"].is_string())
            throw ConfigError("output_dir", "must be a string");
        c.output_dir = j["output_dir"].get<std::string>();
    }
    if (j.contains("suites")) {
        if (!j["suites"].is_array())
            throw ConfigError("suites", "must be an array of suite names");
        c.suites.clear();
        for (const auto& s : j["suites"]) {
            if (!s.is_string())
                throw ConfigError("suites", "must be an array of suite names");
            c.suites.push_back(parse_suite(s.get<std::string>()));
        }
    }
    c.validate();
    return c;
}

nlohmann::json config_to_json(const RunConfig& c)
{
    nlohmann::json suites = nlohmann::json::array();
    for (Suite s : c.suites)
        suites.push_back(suite_name(s));
    return {{"kn", c.kn},       {"chi_tilde", c.chi_tilde},       {"epsilon_w", c.epsilon_w},
            {"degree", c.degree}, {"subdivisions", c.subdivisions}, {"suites", suites},
            {"seed", c.seed},   {"output_dir", c.output_dir}};
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("config", "cannot read '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config", std::string("malformed JSON: ") + e.what());
    }
    return config_from_json(j);
}

const char* check_name(Check c)
{
    switch (c) {
    case Check::le:
        return "<=";
    case Check::ge:
        return ">=";
    case Check::gt:
        return ">";
    case Check::eq:
        return "==";
    case Check::info:
        return "info";
    }
    return "info";
}

namespace {

Check parse_check(const std::string& s)
{
    for (Check c : {Check::le, Check::ge, Check::gt, Check::eq, Check::info})
        if (s == check_name(c))
            return c;
    throw std::invalid_argument("unknown check '" + s + "'");
}

void add_row(std::vector<ResultRow>& rows, const std::string& q, double v, double t, Check c, bool pass)
{
    rows.push_back({q, v, t, c, pass});
}

}  // namespace

void SuiteResult::info(const std::string& q, double v) { add_row(rows, q, v, 0.0, Check::info, true); }
void SuiteResult::le(const std::string& q, double v, double t) { add_row(rows, q, v, t, Check::le, v <= t); }
void SuiteResult::ge(const std::string& q, double v, double t) { add_row(rows, q, v, t, Check::ge, v >= t); }
void SuiteResult::gt(const std::string& q, double v, double t) { add_row(rows, q, v, t, Check::gt, v > t); }
void SuiteResult::eq(const std::string& q, double v, double e) { add_row(rows, q, v, e, Check::eq, v == e); }

bool SuiteResult::passed() const
{
    for (const auto& r : rows)
        if (!r.pass)
            return false;
    return true;
}

std::vector<std::string> SuiteResult::failures() const
{
    std::vector<std::string> out;
    for (const auto& r : rows)
        if (!r.pass)
            out.push_back(suite_name(suite) + "." + r.quantity);
    return out;
}

bool VerificationReport::passed() const
{
    for (const auto& s : suites)
        if (!s.passed())
            return false;
    return true;
}

std::vector<std::string> VerificationReport::failures() const
{
    std::vector<std::string> out;
    for (const auto& s : suites)
        for (auto& f : s.failures())
            out.push_back(std::move(f));
    return out;
}

std::size_t VerificationReport::scalar_count() const
{
    std::size_t n = 0;
    for (const auto& s : suites)
        n += s.rows.size();
    return n;
}

nlohmann::json VerificationReport::to_json() const
{
    nlohmann::json j;
    j["config"] = config_to_json(config);
    j["seed"] = config.seed;
    nlohmann::json table = nlohmann::json::array();
    for (const auto& e : tol::kTable)
        table.push_back({{"name", e.name}, {"value", e.value}, {"meaning", e.meaning}});
    j["tolerances"] = table;
    nlohmann::json suites_json = nlohmann::json::array();
    nlohmann::json timings = nlohmann::json::object();
    for (const auto& s : suites) {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& r : s.rows)
            rows.push_back({{"quantity", r.quantity},
                            {"value", r.value},
                            {"tolerance", r.tolerance},
                            {"check", check_name(r.check)},
                            {"pass", r.pass}});
        suites_json.push_back(
            {{"suite", suite_name(s.suite)}, {"pass", s.passed()}, {"results", rows}, {"details", s.details}});
        timings[suite_name(s.suite)] = s.seconds;
    }
    j["suites"] = suites_json;
    j["timings_seconds"] = timings;
    j["summary"] = {{"pass", passed()}, {"failures", failures()}, {"scalars", scalar_count()}};
    return j;
}

void VerificationReport::write_csv(std::ostream& out) const
{
    out << "suite,quantity,value,tolerance,pass\n";
    char buf[64];
    for (const auto& s : suites) {
        const std::string name = suite_name(s.suite);
        for (const auto& r : s.rows) {
            out << name << ',' << r.quantity << ',';
            std::snprintf(buf, sizeof buf, "%.17g", r.value);
            out << buf << ',';
            std::snprintf(buf, sizeof buf, "%.17g", r.tolerance);
            out << buf << ',' << (r.pass ? "true" : "false") << '\n';
        }
    }
}

VerificationReport run(const RunConfig& config)
{
    config.validate();
    VerificationReport report;
    report.config = config;
    for (Suite s : kAllSuites) {
        bool requested = false;
        for (Suite r : config.suites)
            requested = requested || r == s;
        if (!requested)
            continue;
        const auto t0 = std::chrono::steady_clock::now();
        SuiteResult res = run_suite(s, config);
        res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        report.suites.push_back(std::move(res));
    }
    return report;
}

std::string export_report(const VerificationReport& report, ExportFormat format, const std::string& dir)
{
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    const fs::path path = fs::path(dir) / (format == ExportFormat::json ? "report.json" : "report.csv");
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    if (format == ExportFormat::json)
        out << report.to_json().dump(2) << '\n';
    else
        report.write_csv(out);
    out.flush();
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    return path.string();
}

std::vector<std::pair<std::string, ResultRow>> rows_from_json(const nlohmann::json& j)
{
    std::vector<std::pair<std::string, ResultRow>> out;
    for (const auto& s : j.at("suites"))
        for (const auto& r : s.at("results"))
            out.emplace_back(s.at("suite").get<std::string>(),
                             ResultRow{r.at("quantity").get<std::string>(), r.at("value").get<double>(),
                                       r.at("tolerance").get<double>(), parse_check(r.at("check").get<std::string>()),
                                       r.at("pass").get<bool>()});
    return out;
}

}  // namespace r13
