#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "r13/report.hpp"

namespace r13 {
namespace {

using nlohmann::json;

const ResultRow* find_row(const SuiteResult& s, const std::string& q)
{
    for (const auto& r : s.rows)
        if (r.quantity == q)
            return &r;
    return nullptr;
}

std::string field_of(const json& j)
{
    try {
        config_from_json(j);
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "";
}

std::filesystem::path scratch_dir(const std::string& name)
{
    const auto dir = std::filesystem::temp_directory_path() / ("r13_test_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

RunConfig cheap_config(const std::filesystem::path& dir)
{
    RunConfig c;
    c.degree = 1;
    c.suites = {Suite::constants};
    c.output_dir = dir.string();
    return c;
}

TEST(Config, ErrorsNameTheField)
{
    EXPECT_EQ(field_of({{"kn", 1.0}, {"knudsen", 1.0}}), "knudsen");
    EXPECT_EQ(field_of({{"suites", json::array()}}), "suites");
    EXPECT_EQ(field_of({{"suites", {"korn", "korn"}}}), "suites");
    EXPECT_EQ(field_of({{"suites", {"plots"}}}), "suites");
    EXPECT_EQ(field_of({{"kn", -1.0}}), "kn");
    EXPECT_EQ(field_of({{"kn", "one"}}), "kn");
    EXPECT_EQ(field_of({{"degree", 1.5}}), "degree");
    EXPECT_EQ(field_of({{"degree", 0}}), "degree");
    EXPECT_EQ(field_of({{"seed", "x"}}), "seed");
    EXPECT_EQ(field_of({{"epsilon_w", -0.1}}), "epsilon_w");
    EXPECT_EQ(field_of(json::array()), "config");
    EXPECT_EQ(field_of({{"kn", 0.5}, {"suites", {"bc", "ellipticity"}}}), "");
}

TEST(Config, JsonRoundTripAndDefaults)
{
    RunConfig c;
    c.kn = 0.3;
    c.epsilon_w = 0.1;
    c.degree = 3;
    c.seed = 42;
    c.suites = {Suite::limit, Suite::korn};
    c.output_dir = "out";
    const RunConfig back = config_from_json(config_to_json(c));
    EXPECT_EQ(config_to_json(back), config_to_json(c));
    const RunConfig d = config_from_json(json::object());
    EXPECT_EQ(d.degree, 2);
    EXPECT_EQ(d.seed, 20240617u);
    EXPECT_EQ(d.suites.size(), 6u);
}

TEST(Config, MalformedFileIsAConfigError)
{
    const auto dir = scratch_dir("malformed");
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "c.json") << "{ not json";
    EXPECT_THROW(load_config((dir / "c.json").string()), ConfigError);
    EXPECT_THROW(load_config((dir / "missing.json").string()), ConfigError);
}

TEST(Config, OutputDirectoryFollowsEnvironment)
{
    ::setenv("R13_OUTPUT_DIR", "/tmp/r13_env_dir", 1);
    EXPECT_EQ(default_output_dir(), "/tmp/r13_env_dir");
    EXPECT_EQ(RunConfig{}.output_dir, "/tmp/r13_env_dir");
    ::unsetenv("R13_OUTPUT_DIR");
    EXPECT_EQ(default_output_dir(), "r13_output");
}

TEST(Run, EmptySuitesIsAUsageError)
{
    RunConfig c;
    c.suites.clear();
    try {
        run(c);
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.field(), "suites");
    }
}

TEST(Run, EllipticitySuiteReportsTheDichotomy)
{
    RunConfig c;
    c.suites = {Suite::ellipticity};
    const VerificationReport rep = run(c);
    ASSERT_EQ(rep.suites.size(), 1u);
    const SuiteResult& s = rep.suites[0];
    for (int d = 2; d <= 5; ++d) {
        const ResultRow* row = find_row(s, "stf_grad.d" + std::to_string(d) + ".c_elliptic");
        ASSERT_NE(row, nullptr);
        EXPECT_EQ(row->value, d >= 3 ? 1.0 : 0.0);
        EXPECT_TRUE(row->pass);
    }
    EXPECT_TRUE(s.passed());
}

TEST(Run, ConstantsAtFirstDegreeWithoutPrescription)
{
    RunConfig c = cheap_config(scratch_dir("constants"));
    c.epsilon_w = 0.0;
    const SuiteResult s = run(c).suites.at(0);
    ASSERT_NE(find_row(s, "alpha0"), nullptr);
    EXPECT_GT(find_row(s, "alpha0")->value, 0.0);
    EXPECT_GT(find_row(s, "k0")->value, 0.0);
    EXPECT_TRUE(s.passed());
}

TEST(Run, SuitesRunInCanonicalOrder)
{
    RunConfig c = cheap_config(scratch_dir("order"));
    c.suites = {Suite::limit, Suite::constants};
    const VerificationReport rep = run(c);
    ASSERT_EQ(rep.suites.size(), 2u);
    EXPECT_EQ(rep.suites[0].suite, Suite::constants);
    EXPECT_EQ(rep.suites[1].suite, Suite::limit);
}

TEST(Export, CsvHasOneLinePerScalarAndJsonRoundTrips)
{
    const auto dir = scratch_dir("export");
    const VerificationReport rep = run(cheap_config(dir));
    const std::string csv = export_report(rep, ExportFormat::csv, dir.string());
    const std::string js = export_report(rep, ExportFormat::json, dir.string());

    std::ifstream in(csv);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "suite,quantity,value,tolerance,pass");
    std::size_t n = 0;
    while (std::getline(in, line))
        ++n;
    EXPECT_EQ(n, rep.scalar_count());

    const auto rows = rows_from_json(json::parse(std::ifstream(js)));
    ASSERT_EQ(rows.size(), rep.scalar_count());
    std::size_t i = 0;
    for (const auto& s : rep.suites)
        for (const auto& r : s.rows) {
            EXPECT_EQ(rows[i].first, suite_name(s.suite));
            EXPECT_EQ(rows[i].second.quantity, r.quantity);
            EXPECT_EQ(rows[i].second.value, r.value);  // exact
            EXPECT_EQ(rows[i].second.tolerance, r.tolerance);
            EXPECT_EQ(rows[i].second.pass, r.pass);
            ++i;
        }
    const json doc = json::parse(std::ifstream(js));
    EXPECT_EQ(doc.at("seed"), rep.config.seed);
    EXPECT_TRUE(doc.contains("tolerances"));
}

TEST(Export, RepeatedRunsGiveIdenticalCsv)
{
    const auto dir = scratch_dir("determinism");
    RunConfig c = cheap_config(dir);
    c.suites = {Suite::constants, Suite::solve};
    std::ostringstream a, b;
    run(c).write_csv(a);
    run(c).write_csv(b);
    EXPECT_EQ(a.str(), b.str());
    EXPECT_GT(a.str().size(), 100u);
}

TEST(Export, UnwritablePathThrows)
{
    const auto dir = scratch_dir("unwritable");
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "file") << "x";
    VerificationReport rep;
    rep.config = cheap_config(dir);
    EXPECT_THROW(export_report(rep, ExportFormat::csv, (dir / "file" / "sub").string()), std::runtime_error);
}

}  // namespace
}  // namespace r13
