#include "voidwave/presets.hpp"

#include "voidwave/config.hpp"
#include "voidwave/experiments.hpp"

#include "doctest.h"

#include <algorithm>
#include <fstream>
#include <sstream>

using namespace voidwave;

namespace {

std::string file_text(const std::string& name) {
    const std::string path = std::string(VOIDWAVE_PRESET_DIR) + "/" + name + ".cfg";
    std::ifstream in(path, std::ios::binary);
    REQUIRE_MESSAGE(in.good(), "missing preset file ", path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

} // namespace

TEST_CASE("the built-in presets are known by name") {
    const std::vector<std::string> names = preset_names();
    CHECK(names.size() == 14);
    for (const char* expected :
         {"desk_circle_rho", "desk_fd_check", "desk_gradient_signs", "interface1d_p1",
          "plate2d_p1", "lab_circle_separate", "lab_ellipse_fcm_rho"}) {
        CHECK(std::count(names.begin(), names.end(), expected) == 1);
    }
}

TEST_CASE("embedded preset text matches the files on disk") {
    // The sources embed a copy of presets/*.cfg; this guards against the
    // two drifting apart when one side is edited.
    for (const std::string& name : preset_names()) {
        CAPTURE(name);
        CHECK(preset_text(name) == file_text(name));
    }
}

TEST_CASE("unknown preset names fail with the available choices") {
    try {
        preset_text("does_not_exist");
        FAIL("expected a ConfigError");
    } catch (const ConfigError& error) {
        const std::string message = error.what();
        CHECK(message.find("does_not_exist") != std::string::npos);
        CHECK(message.find("desk_circle_rho") != std::string::npos);
    }
}

TEST_CASE("every preset parses as a config file") {
    for (const std::string& name : preset_names()) {
        CAPTURE(name);
        CHECK_NOTHROW(Config::parse_string(preset_text(name), name));
    }
}

TEST_CASE("inversion presets are consumed completely by the setup loader") {
    for (const char* name :
         {"desk_circle_rho", "desk_circle_c", "desk_circle_rhoc", "desk_fd_check",
          "lab_circle_rho", "lab_circle_c", "lab_circle_rhoc",
          "lab_circle_separate", "lab_ellipse_fcm_rho"}) {
        CAPTURE(name);
        const Config config = Config::parse_string(preset_text(name), name);
        const ExperimentSetup setup = load_setup(config);
        CHECK_NOTHROW(config.reject_unused());
        CHECK(setup.array.count > 0);
        CHECK(setup.time.dt > 0.0);
        CHECK(setup.grid.dimension == 2);
    }
}

TEST_CASE("the derivative-check preset fires only its middle transducer") {
    const Config config =
        Config::parse_string(preset_text("desk_fd_check"), "desk_fd_check");
    const ExperimentSetup setup = load_setup(config);
    CHECK(setup.array.sources == std::vector<int>{1});
    CHECK(setup.array.firing() == std::vector<int>{1});
    CHECK(setup.reference_match_inversion);
    CHECK(setup.time.stride == 1);
}
