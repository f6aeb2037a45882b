#include "voidwave/config.hpp"
#include "voidwave/io.hpp"

#include "doctest.h"
#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace voidwave;
namespace fs = std::filesystem;

namespace {

const char* kSample = R"(# top comment
[grid]
dimension = 2
extent_mm = 100, 50
element_size_mm = 0.5   # trailing comment

[time]
delta_t_s = 5e-8
enabled = true

[material]
rho0 = 2700.0
depth_m = 0.25
)";

Config sample_config() { return Config::parse_string(kSample, "sample"); }

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

WaveRecording sample_recording() {
    WaveRecording rec;
    rec.dt = 5e-8;
    rec.source_index = 3;
    rec.receivers = {{0.0125, 0.05}, {0.0375, 0.05}};
    rec.samples = Eigen::MatrixXd::Zero(6, 2);
    for (int n = 0; n < 6; ++n) {
        rec.samples(n, 0) = std::sin(0.37 * n) * 1e-11;
        rec.samples(n, 1) = std::cos(1.1 * n) * 3e-12;
    }
    return rec;
}

} // namespace

TEST_CASE("config parses sections, comments and typed values") {
    const Config config = sample_config();
    CHECK(config.has_section("grid"));
    CHECK(!config.has_section("array"));
    CHECK(config.has("time", "delta_t_s"));
    CHECK(!config.has("time", "duration_s"));

    CHECK(config.get_int("grid", "dimension") == 2);
    CHECK(config.get_real("time", "delta_t_s") == 5e-8);
    CHECK(config.get_bool("time", "enabled"));
    CHECK(config.get_bool("time", "missing", false) == false);
    CHECK(config.get_string("material", "rho0") == "2700.0");
    CHECK(config.get_real("material", "absent", 1.5) == 1.5);

    const std::vector<Real> extent = config.get_reals("grid", "extent_mm");
    REQUIRE(extent.size() == 2);
    CHECK(extent[0] == 100.0);
    CHECK(extent[1] == 50.0);
}

TEST_CASE("config rejects malformed values and missing keys") {
    const Config config = sample_config();
    CHECK_THROWS_AS(config.get_real("material", "missing"), ConfigError);
    CHECK_THROWS_AS(config.get_int("material", "rho0"), ConfigError); // not integral
    CHECK_THROWS_AS(config.get_bool("grid", "dimension"), ConfigError);
    CHECK_THROWS_AS(Config::parse_string("[broken\nkey = 1\n", "x"), ConfigError);
    CHECK_THROWS_AS(Config::parse_string("orphan = 1\n", "x"), ConfigError);
}

TEST_CASE("lengths accept exactly one unit spelling") {
    const Config config = sample_config();
    CHECK(config.get_length("grid", "element_size") == doctest::Approx(0.5e-3));
    CHECK(config.get_length("material", "depth") == 0.25);
    CHECK(config.has_length("material", "depth"));
    CHECK(!config.has_length("material", "width"));
    CHECK(config.get_length("material", "width", 0.75) == 0.75);
    CHECK_THROWS_AS(config.get_length("material", "width"), ConfigError);

    const Config both = Config::parse_string("[a]\nsize_m = 1\nsize_mm = 1000\n", "x");
    CHECK_THROWS_AS(both.get_length("a", "size"), ConfigError);
}

TEST_CASE("command-line overrides replace parsed entries") {
    Config config = sample_config();
    config.set_override("grid.dimension=1");
    config.set_override("array.count=65");
    CHECK(config.get_int("grid", "dimension") == 1);
    CHECK(config.get_int("array", "count") == 65);
    CHECK_THROWS_AS(config.set_override("no-dot-or-equals"), ConfigError);
}

TEST_CASE("unread keys are reported with their location") {
    const Config config = sample_config();
    config.get_int("grid", "dimension");
    try {
        config.reject_unused();
        FAIL("expected a ConfigError for the unread keys");
    } catch (const ConfigError& error) {
        const std::string message = error.what();
        CHECK(message.find("delta_t_s") != std::string::npos);
        CHECK(message.find("line") != std::string::npos);
    }
}

TEST_CASE("fully consumed configs pass the unused check") {
    const Config config = Config::parse_string("[a]\nx = 1\n", "x");
    config.get_real("a", "x");
    config.reject_unused();
}

TEST_CASE("prefix queries preserve file order") {
    const Config config = Config::parse_string(
        "[geom]\ncircle_1 = a\nbox_2 = b\ncircle_0 = c\nother = d\n", "x");
    CHECK(config.keys_with_prefix("geom", "circle_") ==
          std::vector<std::string>{"circle_1", "circle_0"});
    config.get_string("geom", "circle_1");
    config.get_string("geom", "circle_0");
    config.get_string("geom", "box_2");
    config.get_string("geom", "other");
}

TEST_CASE("field files round-trip bit-exactly") {
    const fs::path dir = fresh_dir("voidwave_io_field");
    const Grid grid = build_grid(2, {0.01, 0.005}, {0.0025, 0.0025}, 2);
    Eigen::VectorXd values(grid.node_count());
    for (Index i = 0; i < values.size(); ++i) {
        values[i] = std::sin(0.123 * static_cast<Real>(i)) * 1e-11 + 1.0 / 3.0;
    }

    write_field(dir / "field.field", grid, values);
    const LoadedField loaded = read_field(dir / "field.field");

    CHECK(loaded.grid.dimension == 2);
    CHECK(loaded.grid.degree == 2);
    CHECK(loaded.grid.elems_x == grid.elems_x);
    CHECK(loaded.grid.elems_y == grid.elems_y);
    CHECK(loaded.grid.extent.x == grid.extent.x);
    REQUIRE(loaded.values.size() == values.size());
    for (Index i = 0; i < values.size(); ++i) {
        CHECK(loaded.values[i] == values[i]); // 17 significant digits
    }

    CHECK_THROWS_AS(read_field(dir / "nope.field"), ConfigError);
}

TEST_CASE("recording CSV and binary files round-trip") {
    const fs::path dir = fresh_dir("voidwave_io_rec");
    const WaveRecording rec = sample_recording();

    write_recording_csv(dir / "rec.csv", rec);
    const WaveRecording csv = read_recording_csv(dir / "rec.csv");
    CHECK(csv.dt == rec.dt);
    CHECK(csv.source_index == rec.source_index);
    REQUIRE(csv.receivers.size() == 2);
    CHECK(csv.receivers[1].x == rec.receivers[1].x);
    CHECK((csv.samples - rec.samples).cwiseAbs().maxCoeff() == 0.0);

    write_recording_binary(dir / "rec.bin", rec);
    const WaveRecording bin = read_recording_binary(dir / "rec.bin");
    CHECK(bin.dt == rec.dt);
    CHECK(bin.source_index == rec.source_index);
    CHECK((bin.samples - rec.samples).cwiseAbs().maxCoeff() == 0.0);

    CHECK_THROWS_AS(read_recording_binary(dir / "rec.csv"), ConfigError);
}

TEST_CASE("convergence traces are written as one CSV row per iteration") {
    const fs::path dir = fresh_dir("voidwave_io_conv");
    std::vector<IterationRecord> trace(3);
    for (int k = 0; k < 3; ++k) {
        trace[k].iteration = k;
        trace[k].objective = 1.0 / (k + 1);
        trace[k].normalized_objective = trace[k].objective;
        trace[k].projected_gradient_norm = 0.1 * (3 - k);
        trace[k].step_length = k == 0 ? 0.0 : 1.0;
    }
    write_convergence_csv(dir / "convergence.csv", trace);

    std::ifstream in(dir / "convergence.csv");
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line.find("iteration") != std::string::npos);
    int rows = 0;
    while (std::getline(in, line)) {
        if (!line.empty()) ++rows;
    }
    CHECK(rows == 3);
}

TEST_CASE("sha256 matches the published test vectors") {
    CHECK(sha256_hex(std::string("abc")) ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex(std::string()) ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");

    const fs::path dir = fresh_dir("voidwave_io_sha");
    std::ofstream(dir / "blob.txt") << "abc";
    CHECK(sha256_file(dir / "blob.txt") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("csv_grid export carries coordinates and exact values") {
    const fs::path dir = fresh_dir("voidwave_io_export");
    const Grid grid = build_grid(2, {0.05, 0.025}, {0.005, 0.005}, 1);
    const Eigen::VectorXd values = Eigen::VectorXd::Constant(grid.node_count(), 1.0);
    export_field(grid, values, dir / "field.csv", ExportFormat::csv_grid);

    std::ifstream in(dir / "field.csv");
    std::string header;
    REQUIRE(std::getline(in, header));
    // Header: empty corner cell, then one x coordinate per node column.
    std::stringstream hs(header);
    std::string cell;
    std::getline(hs, cell, ',');
    int columns = 0;
    Real last_x = -1.0;
    while (std::getline(hs, cell, ',')) {
        last_x = std::stod(cell);
        ++columns;
    }
    CHECK(columns == 11);
    CHECK(last_x == doctest::Approx(0.05).epsilon(1e-15));

    int rows = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ls(line);
        std::getline(ls, cell, ',');
        const Real y = std::stod(cell);
        CHECK(y >= 0.0);
        CHECK(y <= 0.025 + 1e-12);
        while (std::getline(ls, cell, ',')) {
            CHECK(std::stod(cell) == 1.0);
        }
        ++rows;
    }
    CHECK(rows == 6);
}

TEST_CASE("vtk export writes a structured-points dataset") {
    const fs::path dir = fresh_dir("voidwave_io_vtk");
    const Grid grid = build_grid(2, {0.05, 0.025}, {0.005, 0.005}, 1);
    Eigen::VectorXd values(grid.node_count());
    values.setLinSpaced(static_cast<Real>(0.0), static_cast<Real>(1.0));

    write_field(dir / "f.field", grid, values);
    export_field_file(dir / "f.field", dir / "f.vtk", ExportFormat::vtk_legacy_ascii);

    std::ifstream in(dir / "f.vtk");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(text.find("DATASET STRUCTURED_POINTS") != std::string::npos);
    CHECK(text.find("DIMENSIONS 11 6 1") != std::string::npos);
    CHECK(text.find("POINT_DATA 66") != std::string::npos);
    CHECK(text.find("LOOKUP_TABLE") != std::string::npos);
}

TEST_CASE("export format names parse and reject unknowns") {
    CHECK(parse_export_format("csv_grid") == ExportFormat::csv_grid);
    CHECK(parse_export_format("vtk_legacy_ascii") == ExportFormat::vtk_legacy_ascii);
    CHECK_THROWS_AS(parse_export_format("png"), ConfigError);
}

TEST_CASE("the manifest lists every artifact with its content hash") {
    const fs::path dir = fresh_dir("voidwave_io_manifest");
    ArtifactManifest manifest(dir);
    std::ofstream(manifest.resolve("a.txt")) << "abc";
    std::ofstream(manifest.resolve("b.txt")) << "other";
    manifest.add("a.txt");
    manifest.add("b.txt");
    manifest.write("unit-test run");

    std::ifstream in(dir / "manifest.json");
    REQUIRE(in.good());
    const nlohmann::json doc = nlohmann::json::parse(in);
    CHECK(doc.at("command") == "unit-test run");
    REQUIRE(doc.at("artifacts").size() == 2);
    bool found = false;
    for (const auto& entry : doc.at("artifacts")) {
        if (entry.at("path") == "a.txt") {
            found = true;
            CHECK(entry.at("sha256") ==
                  "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
        }
    }
    CHECK(found);
}
