#include "voidwave/presets.hpp"
#include "voidwave/core.hpp"

#include <map>
#include <sstream>

namespace voidwave {

namespace {

// Embedded copies of the presets/ directory; a unit test diffs the two
// against each other so they cannot drift apart.
const std::map<std::string, std::string>& preset_map() {
    static const std::map<std::string, std::string> presets = {
        {"desk_circle_c",
         R"cfg(# Desk-scale circular-void inversion: quarter-size plate, 16-transducer
# array, wave-speed scaling. Completes in minutes on one core; the
# full-scale counterparts are the lab_circle_* presets.

[grid]
dimension = 2
extent_x_mm = 50
extent_y_mm = 25
element_size_mm = 0.5
degree = 1
tree_depth = 5

[material]
parametrization = c
rho0_kg_m3 = 2700
c0_m_s = 6000
gamma_lower = 0.0
gamma_upper = 1.2

[true_geometry]
circle_mm = 25, 12.5, 2.5
encode = alpha
alpha_fict = 1e-3

[array]
count = 16
pitch_mm = 1
f_c_hz = 500e3
cycles = 2
amplitude = 1

[time]
delta_t_s = 2e-8
duration_s = 2e-5
stride = 2

[reference]
element_size_mm = 0.25
delta_t_s = 5e-9
tree_depth = 6

[inversion]
max_iterations = 10
snapshot_iterations = 5, 10
observations = auto
mask = auto
)cfg"},
        {"desk_circle_rho",
         R"cfg(# Desk-scale circular-void inversion: quarter-size plate, 16-transducer
# array, density scaling. Completes in minutes on one core; the
# full-scale counterparts are the lab_circle_* presets.

[grid]
dimension = 2
extent_x_mm = 50
extent_y_mm = 25
element_size_mm = 0.5
degree = 1
tree_depth = 5

[material]
parametrization = rho
rho0_kg_m3 = 2700
c0_m_s = 6000
gamma_lower = 0.0
gamma_upper = 1.2

[true_geometry]
circle_mm = 25, 12.5, 2.5
encode = alpha
alpha_fict = 1e-3

[array]
count = 16
pitch_mm = 1
f_c_hz = 500e3
cycles = 2
amplitude = 1

[time]
delta_t_s = 2e-8
duration_s = 2e-5
stride = 2

[reference]
element_size_mm = 0.25
delta_t_s = 5e-9
tree_depth = 6

[inversion]
max_iterations = 10
snapshot_iterations = 5, 10
observations = auto
mask = auto
)cfg"},
        {"desk_circle_rhoc",
         R"cfg(# Desk-scale circular-void inversion: quarter-size plate, 16-transducer
# array, density-and-wave-speed scaling. Completes in minutes on one core; the
# full-scale counterparts are the lab_circle_* presets.

[grid]
dimension = 2
extent_x_mm = 50
extent_y_mm = 25
element_size_mm = 0.5
degree = 1
tree_depth = 5

[material]
parametrization = rhoc
rho0_kg_m3 = 2700
c0_m_s = 6000
gamma_lower = 0.0
gamma_upper = 1.2

[true_geometry]
circle_mm = 25, 12.5, 2.5
encode = alpha
alpha_fict = 1e-3

[array]
count = 16
pitch_mm = 1
f_c_hz = 500e3
cycles = 2
amplitude = 1

[time]
delta_t_s = 2e-8
duration_s = 2e-5
stride = 2

[reference]
element_size_mm = 0.25
delta_t_s = 5e-9
tree_depth = 6

[inversion]
max_iterations = 10
snapshot_iterations = 5, 10
observations = auto
mask = auto
)cfg"},
        {"desk_fd_check",
         R"cfg(# Tiny model for validating the adjoint gradient against central finite
# differences: 10x5 elements, three transducers of which only the middle
# one fires, matched reference discretization (pure derivative check), and
# every time step stored so the kernel integral matches the discrete
# objective as closely as possible.

[grid]
dimension = 2
extent_x_mm = 10
extent_y_mm = 5
element_size_mm = 1
degree = 1
tree_depth = 5

[material]
parametrization = rho
rho0_kg_m3 = 2700
c0_m_s = 6000

[alpha_geometry]
box_mm = 0, 0, 2.3, 1.2
alpha_fict = 1e-3

[true_geometry]
circle_mm = 5, 2.5, 1
encode = gamma
gamma_void = 0.5

[array]
count = 3
pitch_mm = 2
sources = 1
f_c_hz = 500e3
cycles = 2

[time]
delta_t_s = 3e-8
duration_s = 9e-6
stride = 1

[reference]
match_inversion = true

[inversion]
max_iterations = 5
observations = auto
mask = auto
)cfg"},
        {"desk_gradient_signs",
         R"cfg(# Idealized gradient study at desk scale: observations come from the true
# circular void on a refined reference model, and the misfit gradient is
# evaluated at an idealized intermediate model with gamma = 0.2 inside the
# defect. Shows which parametrizations keep pushing gamma the right way.
#
# Unlike the desk_circle_* inversions this void is 10 mm across - about 0.8
# carrier wavelengths, the same ratio as the lab-scale scenarios. The sign
# split between parametrizations rides on the phase of waves transmitted
# through the defect; a defect much smaller than the wavelength is simply
# diffracted around and its in-void lobe degenerates into an oscillatory
# bullseye with no usable mean.

[grid]
dimension = 2
extent_x_mm = 50
extent_y_mm = 25
element_size_mm = 0.5
degree = 1
tree_depth = 5

[material]
parametrization = rho
rho0_kg_m3 = 2700
c0_m_s = 6000

[true_geometry]
circle_mm = 25, 12.5, 5
encode = alpha
alpha_fict = 1e-3

[array]
count = 16
pitch_mm = 1
f_c_hz = 500e3
cycles = 2

[time]
delta_t_s = 2e-8
duration_s = 2e-5
stride = 2

[reference]
element_size_mm = 0.25
delta_t_s = 5e-9
tree_depth = 6

[gradient_study]
scalings = rho, c
gamma_state = 0.2
)cfg"},
        {"interface1d_p1",
         R"cfg(# 1D interface study: a right-travelling pulse hits a void whose boundary
# sits inside a cut element, comparing the scaling parametrizations
# against the analytic free-boundary reflection. Linear elements.

[grid]
dimension = 1
extent_x_m = 3.0
element_size_m = 0.05
tree_depth = 5

[material]
rho0_kg_m3 = 1.0
c0_m_s = 1.0

[true_geometry]
interval_m = 2.0167, 3.0
gamma_void = 1e-5

[time]
delta_t_s = 1e-3
duration_s = 4.0
stride = 50

[study]
kind = interface_1d
degrees = 1
scalings = rho, c, rhoc
interface_position_m = 2.0167
pulse_center_m = 1.0
pulse_width_m = 0.25
snapshot_times_s = 0.5, 2.1, 3.5
rest_after_s = 2.5
)cfg"},
        {"interface1d_p2",
         R"cfg(# 1D interface study: a right-travelling pulse hits a void whose boundary
# sits inside a cut element, comparing the scaling parametrizations
# against the analytic free-boundary reflection. Quadratic elements.

[grid]
dimension = 1
extent_x_m = 3.0
element_size_m = 0.05
tree_depth = 5

[material]
rho0_kg_m3 = 1.0
c0_m_s = 1.0

[true_geometry]
interval_m = 2.0167, 3.0
gamma_void = 1e-5

[time]
delta_t_s = 1e-3
duration_s = 4.0
stride = 50

[study]
kind = interface_1d
degrees = 2
scalings = rho, c, rhoc
interface_position_m = 2.0167
pulse_center_m = 1.0
pulse_width_m = 0.25
snapshot_times_s = 0.5, 2.1, 3.5
rest_after_s = 2.5
)cfg"},
        {"interface1d_p4",
         R"cfg(# 1D interface study: a right-travelling pulse hits a void whose boundary
# sits inside a cut element, comparing the scaling parametrizations
# against the analytic free-boundary reflection. Quartic elements.

[grid]
dimension = 1
extent_x_m = 3.0
element_size_m = 0.05
tree_depth = 5

[material]
rho0_kg_m3 = 1.0
c0_m_s = 1.0

[true_geometry]
interval_m = 2.0167, 3.0
gamma_void = 1e-5

[time]
delta_t_s = 1e-3
duration_s = 4.0
stride = 50

[study]
kind = interface_1d
degrees = 4
scalings = rho, c, rhoc
interface_position_m = 2.0167
pulse_center_m = 1.0
pulse_width_m = 0.25
snapshot_times_s = 0.5, 2.1, 3.5
rest_after_s = 2.5
)cfg"},
        {"lab_circle_c",
         R"cfg(# Paper-scale circular-void inversion with wave-speed scaling: 100 mm x 50 mm
# plate, 5 mm circular void in the center, 65-transducer array, 25
# quasi-Newton iterations with snapshots at 5, 10 and 25. Reference data
# come from a refined immersed model. Runs for hours on one core.

[grid]
dimension = 2
extent_x_mm = 100
extent_y_mm = 50
element_size_mm = 0.5
degree = 1
tree_depth = 5

[material]
parametrization = c
rho0_kg_m3 = 2700
c0_m_s = 6000
gamma_lower = 0.0
gamma_upper = 1.2

[true_geometry]
circle_mm = 50, 25, 2.5
encode = alpha
alpha_fict = 1e-3

[array]
count = 65
pitch_mm = 1
f_c_hz = 500e3
cycles = 2
amplitude = 1

[time]
delta_t_s = 1e-8
duration_s = 6e-5
stride = 10

[reference]
element_size_mm = 0.25
delta_t_s = 5e-9
tree_depth = 6

[inversion]
max_iterations = 25
snapshot_iterations = 5, 10, 25
observations = auto
mask = auto
)cfg"},
        {"lab_circle_rho",
         R"cfg(# Paper-scale circular-void inversion with density scaling: 100 mm x 50 mm
# plate, 5 mm circular void in the center, 65-transducer array, 25
# quasi-Newton iterations with snapshots at 5, 10 and 25. Reference data
# come from a refined immersed model. Runs for hours on one core.

[grid]
dimension = 2
extent_x_mm = 100
extent_y_mm = 50
element_size_mm = 0.5
degree = 1
tree_depth = 5

[material]
parametrization = rho
rho0_kg_m3 = 2700
c0_m_s = 6000
gamma_lower = 0.0
gamma_upper = 1.2

[true_geometry]
circle_mm = 50, 25, 2.5
encode = alpha
alpha_fict = 1e-3

[array]
count = 65
pitch_mm = 1
f_c_hz = 500e3
cycles = 2
amplitude = 1

[time]
delta_t_s = 1e-8
duration_s = 6e-5
stride = 10

[reference]
element_size_mm = 0.25
delta_t_s = 5e-9
tree_depth = 6

[inversion]
max_iterations = 25
snapshot_iterations = 5, 10, 25
observations = auto
mask = auto
)cfg"},
        {"lab_circle_rhoc",
         R"cfg(# Paper-scale circular-void inversion with density-and-wave-speed scaling: 100 mm x 50 mm
# plate, 5 mm circular void in the center, 65-transducer array, 25
# quasi-Newton iterations with snapshots at 5, 10 and 25. Reference data
# come from a refined immersed model. Runs for hours on one core.

[grid]
dimension = 2
extent_x_mm = 100
extent_y_mm = 50
element_size_mm = 0.5
degree = 1
tree_depth = 5

[material]
parametrization = rhoc
rho0_kg_m3 = 2700
c0_m_s = 6000
gamma_lower = 0.0
gamma_upper = 1.2

[true_geometry]
circle_mm = 50, 25, 2.5
encode = alpha
alpha_fict = 1e-3

[array]
count = 65
pitch_mm = 1
f_c_hz = 500e3
cycles = 2
amplitude = 1

[time]
delta_t_s = 1e-8
duration_s = 6e-5
stride = 10

[reference]
element_size_mm = 0.25
delta_t_s = 5e-9
tree_depth = 6

[inversion]
max_iterations = 25
snapshot_iterations = 5, 10, 25
observations = auto
mask = auto
)cfg"},
        {"lab_circle_separate",
         R"cfg(# Paper-scale circular-void inversion with independent density and wave-speed fields: 100 mm x 50 mm
# plate, 5 mm circular void in the center, 65-transducer array, 25
# quasi-Newton iterations with snapshots at 5, 10 and 25. Reference data
# come from a refined immersed model. Runs for hours on one core.

[grid]
dimension = 2
extent_x_mm = 100
extent_y_mm = 50
element_size_mm = 0.5
degree = 1
tree_depth = 5

[material]
parametrization = separate
rho0_kg_m3 = 2700
c0_m_s = 6000
gamma_lower = 0.0
gamma_upper = 1.2

[true_geometry]
circle_mm = 50, 25, 2.5
encode = alpha
alpha_fict = 1e-3

[array]
count = 65
pitch_mm = 1
f_c_hz = 500e3
cycles = 2
amplitude = 1

[time]
delta_t_s = 1e-8
duration_s = 6e-5
stride = 10

[reference]
element_size_mm = 0.25
delta_t_s = 5e-9
tree_depth = 6

[inversion]
max_iterations = 25
snapshot_iterations = 5, 10, 25
observations = auto
mask = auto
)cfg"},
        {"lab_ellipse_fcm_rho",
         R"cfg(# Paper-scale immersed-geometry inversion: a plate whose lower boundary is
# a spline curve and which contains an a-priori known circular hole (both
# carried by the indicator field alpha), plus an unknown thin rotated
# ellipse recovered with density scaling. Runs for hours on one core.

[grid]
dimension = 2
extent_x_mm = 100
extent_y_mm = 50
element_size_mm = 0.5
degree = 1
tree_depth = 5

[material]
parametrization = rho
rho0_kg_m3 = 2700
c0_m_s = 6000
gamma_lower = 0.0
gamma_upper = 1.2

[alpha_geometry]
spline_below_mm = 0, 10, 10, 1, 25, 7.5, 35, 2, 50, 15, 60, 3, 75, 12, 90, 1, 100, 10
circle_mm = 35, 20, 7.5
alpha_fict = 1e-3

[true_geometry]
ellipse_mm_deg = 63, 18, 6, 1, 67.5
encode = alpha
alpha_fict = 1e-3

[array]
count = 65
pitch_mm = 1
f_c_hz = 500e3
cycles = 2
amplitude = 1

[time]
delta_t_s = 5e-9
duration_s = 6e-5
stride = 20

[reference]
element_size_mm = 0.25
delta_t_s = 5e-9
tree_depth = 6

[inversion]
max_iterations = 25
snapshot_iterations = 5, 10, 25
observations = auto
mask = auto
)cfg"},
        {"plate2d_p1",
         R"cfg(# 2D plate with a circular void in the center, excited by a sine burst at
# the top-center of the plate; snapshot fields after the wave has hit the
# void, for each scaling parametrization.

[grid]
dimension = 2
extent_x_mm = 50
extent_y_mm = 50
element_size_mm = 0.5
tree_depth = 5

[material]
rho0_kg_m3 = 2700
c0_m_s = 6000

[true_geometry]
circle_mm = 25, 25, 5
gamma_void = 1e-5

[time]
delta_t_s = 5e-10
duration_s = 1e-5
stride = 100

[study]
kind = plate_2d
degrees = 1
scalings = rho, c, rhoc
snapshot_times_s = 0.8e-5
f_c_hz = 500e3
cycles = 2
amplitude = 1
)cfg"},
    };
    return presets;
}

} // namespace

std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    for (const auto& [name, text] : preset_map()) names.push_back(name);
    return names;
}

const std::string& preset_text(const std::string& name) {
    const auto& presets = preset_map();
    const auto it = presets.find(name);
    if (it == presets.end()) {
        std::ostringstream msg;
        msg << "unknown preset '" << name << "'; available:";
        for (const auto& [known, text] : presets) msg << " " << known;
        throw ConfigError(msg.str());
    }
    return it->second;
}

} // namespace voidwave
