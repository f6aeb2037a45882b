#pragma once

#include "voidwave/adjoint.hpp"
#include "voidwave/config.hpp"
#include "voidwave/io.hpp"
#include "voidwave/optimize.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace voidwave {

// Transducer line on the top edge of the domain. Full matrix capture by
// default: each transducer fires in turn while all positions record;
// `sources` restricts the firing transducers to a subset.
struct PhasedArraySpec {
    int count = 0;
    Real pitch = 1e-3;
    Real center_x = 0.0; // defaults to the domain center
    BurstSpec burst;
    std::vector<int> sources; // firing transducer indices; empty: all

    // Transducer coordinates on the grid's top edge; throws when the
    // array does not fit inside it.
    std::vector<Vec2> positions(const Grid& grid) const;

    // Indices of the firing transducers, validated against `count`.
    std::vector<int> firing() const;
};

// Synthetic measured data: one recording per firing transducer.
struct ObservationSet {
    std::vector<WaveRecording> recordings;
    std::string provenance; // mesh / time step / geometry description
};

// Everything the scenario drivers need, read from one config file.
struct ExperimentSetup {
    Grid grid;
    MaterialModel material;   // nodal start model, gamma = 1 everywhere
    IndicatorField indicator; // a-priori known voids (alpha)
    PhasedArraySpec array;
    TimeSettings time;
    AssemblyOptions assembly;

    // Defect used when generating synthetic observations.
    ImplicitGeometry true_geometry;
    std::string true_encoding = "alpha"; // "alpha" or "gamma"
    Real true_gamma_void = 1e-5;
    Real true_alpha_fict = 1e-3;

    // Reference discretization: finer than the inversion model so the
    // synthetic data do not commit an inverse crime.
    Real reference_element_size = 0.0; // 0: half the inversion element size
    Real reference_dt = 0.0;           // 0: half the inversion time step
    int reference_tree_depth = 6;
    bool reference_match_inversion = false; // consistency-test override

    // Inversion controls.
    int max_iterations = 25;
    std::vector<int> snapshot_iterations;
    std::string observations_source = "auto"; // "auto" or a directory
    std::string mask_mode = "auto";           // "auto" or "none"
    int threads = 1;
};

// Reads the [grid], [material], [alpha_geometry], [true_geometry],
// [array], [time], [reference] and [inversion] sections (the last four
// are optional, for drivers that do not use them).
ExperimentSetup load_setup(const Config& config);

// Union of the void primitives listed in a config section (circle*,
// ellipse*, box*, interval*, spline_below* keys with _m/_mm unit
// suffixes); empty geometry when the section is absent.
ImplicitGeometry parse_geometry_section(const Config& config, const std::string& section);

// ---------------------------------------------------------------------------
// Synthetic observations
// ---------------------------------------------------------------------------

// One forward solve per transducer on the refined reference model with
// the true defect in place.
ObservationSet generate_observations(const ExperimentSetup& setup);

void write_observations(const ObservationSet& set, ArtifactManifest& manifest);
ObservationSet read_observations(const std::filesystem::path& directory);

// ---------------------------------------------------------------------------
// Misfit / gradient engine over the transducer array
// ---------------------------------------------------------------------------

class InverseProblem {
public:
    // Observations may be sampled at a different rate; they are resampled
    // onto the setup's time grid here.
    InverseProblem(ExperimentSetup setup, const std::vector<WaveRecording>& observations);

    Index model_size() const;
    Eigen::VectorXd initial_model() const;

    // 1 where a nodal coefficient is inverted for, 0 where it is pinned
    // (inside a-priori alpha voids under mask_mode = "auto").
    const std::vector<char>& mask() const { return mask_; }
    const ExperimentSetup& setup() const { return setup_; }

    // Stacked-residual misfit over all source experiments; fills the
    // gradient (nodal layout; gamma_rho then gamma_c for the separate
    // tag) when requested. Safe to call concurrently from one thread at
    // a time; source experiments run in setup().threads workers.
    Real evaluate(const Eigen::VectorXd& model, Eigen::VectorXd* gradient) const;

    // The setup's material with nodal fields taken from `model`.
    MaterialModel materialize(const Eigen::VectorXd& model) const;

private:
    ExperimentSetup setup_;
    std::vector<WaveRecording> observations_;
    std::vector<Vec2> positions_;
    std::vector<int> firing_;
    CutQuadratureMap cuts_;
    std::vector<char> mask_;
};

// Adjoint gradient vs central finite differences along one direction.
struct DirectionalCheck {
    Real adjoint = 0.0;
    Real finite_difference = 0.0;
    Real relative_error = 0.0;
};

DirectionalCheck directional_derivative_check(const InverseProblem& problem,
                                              const Eigen::VectorXd& model,
                                              const Eigen::VectorXd& direction, Real h);

// ---------------------------------------------------------------------------
// Scenario drivers
// ---------------------------------------------------------------------------

struct InversionRun {
    ExperimentSetup setup;
    InversionState state;
    std::vector<char> mask;
};

// Full inversion: observations (generated, preloaded, or read from disk),
// box-constrained quasi-Newton loop, snapshots of the scaling fields at
// the configured iterations, convergence trace. Artifacts are written
// only when a manifest is given; on_iteration (if any) runs after every
// accepted step, e.g. for progress reporting.
InversionRun run_inversion_experiment(
    const ExperimentSetup& setup, ArtifactManifest* manifest,
    const ObservationSet* observations = nullptr,
    const std::function<void(const InversionState&)>& on_iteration = {});

struct StudySnapshotError {
    Real time = 0.0;
    Real relative_l2 = 0.0; // vs the analytic solution, physical domain only
};

struct ForwardStudyCase {
    std::string scaling;
    int degree = 1;
    std::vector<StudySnapshotError> errors; // 1D interface study only
    Real void_rest_max = 0.0; // max |u| in the void after the reflection
};

struct ForwardStudyReport {
    std::string kind;
    std::vector<ForwardStudyCase> cases;
};

// Forward modeling studies on known defects:
//  - interface_1d: wave against a void interface; snapshots plus relative
//    L2 errors against the image-series free-boundary solution;
//  - plate_2d: plate with a circular void; snapshot fields only.
ForwardStudyReport run_forward_study(const Config& config, ArtifactManifest* manifest);

struct GradientStudyCase {
    std::string scaling;
    GradientFields fields;
    Real void_mean = 0.0; // mean nodal gradient strictly inside the defect
};

struct GradientStudyReport {
    Grid grid;
    Real gamma_state = 1.0;
    std::vector<GradientStudyCase> cases;
};

// Misfit gradients at an idealized intermediate model — gamma_state
// inside the true defect (1.0: the plain initial gradient), 1 in intact
// material, L2-projected onto the basis — against observations from the
// true defect, per requested scaling tag. Shows which parametrizations
// keep pushing gamma the right way inside the defect.
GradientStudyReport idealized_gradient_study(const Config& config, ArtifactManifest* manifest,
                                             int threads = 1,
                                             const ObservationSet* observations = nullptr);

} // namespace voidwave
