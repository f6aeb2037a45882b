#include "voidwave/experiments.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

namespace voidwave {

namespace {

std::string trimmed(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> items;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trimmed(item);
        if (!item.empty()) {
            items.push_back(item);
        }
    }
    return items;
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string zero_padded(int value) {
    char buffer[16];
    std::snprintf(buffer, sizeof(buffer), "%03d", value);
    return buffer;
}

// Resets the nodal start fields (gamma = 1) to match the material's tag.
void apply_start_model(MaterialModel& material, const Grid& grid, Real lower, Real upper) {
    material.gamma.reset();
    material.gamma_rho.reset();
    material.gamma_c.reset();
    if (material.tag == Scaling::separate) {
        material.gamma_rho = uniform_field(grid, 1.0, lower, upper);
        material.gamma_c = uniform_field(grid, 1.0, lower, upper);
    } else {
        material.gamma = uniform_field(grid, 1.0, lower, upper);
    }
}

BoxBounds model_bounds(const MaterialModel& material) {
    const ScalingField& field = material.gamma ? *material.gamma : *material.gamma_rho;
    return BoxBounds{field.lower, field.upper};
}

// Runs fn(k) for k in [0, count) on `threads` workers (round-robin).
// Results must be written to per-k or per-worker slots so the outcome is
// independent of scheduling.
void parallel_sources(int threads, int count, const std::function<void(int)>& fn) {
    const int workers = std::max(1, std::min(threads, count));
    if (workers == 1) {
        for (int k = 0; k < count; ++k) {
            fn(k);
        }
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (int k = w; k < count; k += workers) {
                    fn(k);
                }
            } catch (...) {
                errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
    }
    for (std::thread& t : pool) {
        t.join();
    }
    for (const std::exception_ptr& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

} // namespace

// ---------------------------------------------------------------------------
// Config parsing
// ---------------------------------------------------------------------------

ImplicitGeometry parse_geometry_section(const Config& config, const std::string& section) {
    struct Unit {
        const char* suffix;
        Real scale;
        bool degrees; // trailing rotation entry stays in degrees
    };
    // Longer suffixes first so _mm_deg is not consumed as _m + junk.
    static const Unit units[] = {
        {"_mm_deg", 1e-3, true}, {"_m_deg", 1.0, true}, {"_mm", 1e-3, false}, {"_m", 1.0, false}};

    ImplicitGeometry geometry;
    if (!config.has_section(section)) {
        return geometry;
    }
    static const char* prefixes[] = {"circle", "ellipse", "box", "interval", "spline_below"};
    for (const char* prefix : prefixes) {
        for (const std::string& key : config.keys_with_prefix(section, prefix)) {
            const Unit* unit = nullptr;
            for (const Unit& candidate : units) {
                if (ends_with(key, candidate.suffix)) {
                    unit = &candidate;
                    break;
                }
            }
            if (!unit) {
                throw ConfigError("[" + section + "] " + key +
                                  ": geometry keys need a unit suffix (_m or _mm)");
            }
            std::vector<Real> v = config.get_reals(section, key);
            const std::string where = "[" + section + "] " + key;
            ImplicitGeometry primitive;
            if (std::string(prefix) == "circle") {
                if (v.size() != 3) throw ConfigError(where + ": expected x, y, radius");
                primitive = ImplicitGeometry::circle(Vec2{v[0], v[1]} * unit->scale,
                                                     v[2] * unit->scale);
            } else if (std::string(prefix) == "ellipse") {
                if (v.size() != 5 || !unit->degrees)
                    throw ConfigError(where + ": expected x, y, semi_x, semi_y, rotation "
                                              "with a _deg unit suffix");
                primitive = ImplicitGeometry::ellipse(Vec2{v[0], v[1]} * unit->scale,
                                                      v[2] * unit->scale, v[3] * unit->scale,
                                                      v[4]);
            } else if (std::string(prefix) == "box") {
                if (v.size() != 4) throw ConfigError(where + ": expected x0, y0, x1, y1");
                primitive = ImplicitGeometry::box(Vec2{v[0], v[1]} * unit->scale,
                                                  Vec2{v[2], v[3]} * unit->scale);
            } else if (std::string(prefix) == "interval") {
                if (v.size() != 2) throw ConfigError(where + ": expected x0, x1");
                primitive = ImplicitGeometry::interval(v[0] * unit->scale, v[1] * unit->scale);
            } else {
                if (v.size() < 6 || v.size() % 2 != 0)
                    throw ConfigError(where + ": expected x1, y1, x2, y2, ... (>= 3 points)");
                std::vector<Vec2> points;
                for (std::size_t i = 0; i < v.size(); i += 2) {
                    points.push_back(Vec2{v[i], v[i + 1]} * unit->scale);
                }
                primitive = ImplicitGeometry::below_spline(build_spline(points));
            }
            geometry = ImplicitGeometry::join(std::move(geometry), std::move(primitive));
        }
    }
    return geometry;
}

ExperimentSetup load_setup(const Config& config) {
    ExperimentSetup setup;

    const int dimension = static_cast<int>(config.get_int("grid", "dimension", 2));
    Vec2 extent{config.get_length("grid", "extent_x"), 0.0};
    const Real element_size = config.get_length("grid", "element_size");
    Vec2 sizes{element_size, element_size};
    if (dimension == 2) {
        extent.y = config.get_length("grid", "extent_y");
    } else {
        sizes.y = 0.0;
    }
    const int degree = static_cast<int>(config.get_int("grid", "degree", 1));
    setup.grid = build_grid(dimension, extent, sizes, degree);
    setup.assembly.tree_depth = static_cast<int>(config.get_int("grid", "tree_depth", 5));

    setup.material.rho0 = config.get_real("material", "rho0_kg_m3");
    setup.material.c0 = config.get_real("material", "c0_m_s");
    setup.material.tag = parse_scaling(config.get_string("material", "parametrization"));
    const Real lower = config.get_real("material", "gamma_lower", 0.0);
    const Real upper = config.get_real("material", "gamma_upper", 1.2);
    apply_start_model(setup.material, setup.grid, lower, upper);

    setup.indicator.geometry = parse_geometry_section(config, "alpha_geometry");
    setup.indicator.alpha_fict = config.get_real("alpha_geometry", "alpha_fict", 1e-3);

    setup.true_geometry = parse_geometry_section(config, "true_geometry");
    setup.true_encoding = config.get_string("true_geometry", "encode", "alpha");
    if (setup.true_encoding != "alpha" && setup.true_encoding != "gamma") {
        throw ConfigError("[true_geometry] encode must be 'alpha' or 'gamma'");
    }
    setup.true_gamma_void = config.get_real("true_geometry", "gamma_void", 1e-5);
    setup.true_alpha_fict =
        config.get_real("true_geometry", "alpha_fict", setup.indicator.alpha_fict);

    if (config.has_section("array")) {
        setup.array.count = static_cast<int>(config.get_int("array", "count"));
        setup.array.pitch = config.get_length("array", "pitch");
        setup.array.center_x =
            config.get_length("array", "center_x", setup.grid.origin.x + 0.5 * extent.x);
        setup.array.burst.f_c = config.get_real("array", "f_c_hz", 500e3);
        setup.array.burst.cycles = config.get_real("array", "cycles", 2.0);
        setup.array.burst.amplitude = config.get_real("array", "amplitude", 1.0);
        if (config.has("array", "sources")) {
            for (Real v : config.get_reals("array", "sources")) {
                setup.array.sources.push_back(static_cast<int>(v));
            }
        }
    }

    setup.time.dt = config.get_real("time", "delta_t_s");
    setup.time.duration = config.get_real("time", "duration_s");
    setup.time.stride = static_cast<int>(config.get_int("time", "stride", 10));

    if (config.has_section("reference")) {
        setup.reference_element_size = config.get_length("reference", "element_size", 0.0);
        setup.reference_dt = config.get_real("reference", "delta_t_s", 0.0);
        setup.reference_tree_depth =
            static_cast<int>(config.get_int("reference", "tree_depth", 6));
        setup.reference_match_inversion =
            config.get_bool("reference", "match_inversion", false);
    }

    if (config.has_section("inversion")) {
        setup.max_iterations = static_cast<int>(config.get_int("inversion", "max_iterations", 25));
        if (config.has("inversion", "snapshot_iterations")) {
            for (Real v : config.get_reals("inversion", "snapshot_iterations")) {
                setup.snapshot_iterations.push_back(static_cast<int>(v));
            }
        }
        setup.observations_source = config.get_string("inversion", "observations", "auto");
        setup.mask_mode = config.get_string("inversion", "mask", "auto");
        if (setup.mask_mode != "auto" && setup.mask_mode != "none") {
            throw ConfigError("[inversion] mask must be 'auto' or 'none'");
        }
    }
    return setup;
}

std::vector<Vec2> PhasedArraySpec::positions(const Grid& grid) const {
    if (count < 1) {
        throw ConfigError("transducer array not configured ([array] count >= 1 required)");
    }
    if (grid.dimension != 2) {
        throw ConfigError("transducer arrays require a 2D grid");
    }
    const Real y = grid.origin.y + grid.extent.y;
    const Real first = center_x - 0.5 * static_cast<Real>(count - 1) * pitch;
    const Real last = first + static_cast<Real>(count - 1) * pitch;
    const Real tol = 1e-9 * grid.extent.x;
    if (first < grid.origin.x - tol || last > grid.origin.x + grid.extent.x + tol) {
        throw ConfigError("transducer array does not fit on the top edge");
    }
    std::vector<Vec2> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        out.push_back(Vec2{first + static_cast<Real>(i) * pitch, y});
    }
    return out;
}

std::vector<int> PhasedArraySpec::firing() const {
    if (sources.empty()) {
        std::vector<int> all(static_cast<std::size_t>(count));
        for (int i = 0; i < count; ++i) {
            all[static_cast<std::size_t>(i)] = i;
        }
        return all;
    }
    for (const int s : sources) {
        if (s < 0 || s >= count) {
            throw ConfigError("[array] sources: index " + std::to_string(s) +
                              " outside the transducer range");
        }
    }
    return sources;
}

// ---------------------------------------------------------------------------
// Synthetic observations
// ---------------------------------------------------------------------------

ObservationSet generate_observations(const ExperimentSetup& setup) {
    const bool match = setup.reference_match_inversion;

    Grid grid = setup.grid;
    Real dt = setup.time.dt;
    int tree_depth = setup.assembly.tree_depth;
    if (!match) {
        const Real h = setup.reference_element_size > 0.0 ? setup.reference_element_size
                                                          : 0.5 * setup.grid.hx;
        const Vec2 sizes{h, setup.grid.dimension == 2 ? h : 0.0};
        grid = build_grid(setup.grid.dimension, setup.grid.extent, sizes, setup.grid.degree,
                          setup.grid.origin);
        dt = setup.reference_dt > 0.0 ? setup.reference_dt : 0.5 * setup.time.dt;
        tree_depth = setup.reference_tree_depth;
    }

    // True model: defect either as fictitious domain (alpha) or as a
    // piecewise-constant scaling field (gamma); gamma = 1 otherwise.
    MaterialModel material;
    material.rho0 = setup.material.rho0;
    material.c0 = setup.material.c0;
    material.tag = setup.material.tag;
    IndicatorField indicator = setup.indicator;
    std::string encoding_note;
    if (setup.true_encoding == "gamma") {
        material.gamma_geometry = setup.true_geometry;
        material.gamma_void = setup.true_gamma_void;
        encoding_note = "gamma(void=" + format_real(setup.true_gamma_void) + ")";
    } else {
        indicator.geometry =
            ImplicitGeometry::join(indicator.geometry, setup.true_geometry);
        indicator.alpha_fict = setup.true_alpha_fict;
        encoding_note = "alpha(fict=" + format_real(setup.true_alpha_fict) + ")";
    }

    AssemblyOptions assembly;
    assembly.tree_depth = tree_depth;
    if (match) {
        // The inversion side evaluates nodal fields, for which `automatic`
        // resolves to consistent mass. A matched reference must integrate
        // the same way, or an intact model could never reproduce its own
        // data exactly.
        assembly.mass = MassScheme::consistent;
    }
    const SystemOperators ops = assemble(grid, material, indicator, assembly);

    const std::vector<Vec2> positions = setup.array.positions(grid);
    const std::vector<int> firing = setup.array.firing();
    TimeSettings time;
    time.dt = dt;
    time.duration = setup.time.duration;
    time.stride = 1;

    ObservationSet set;
    set.recordings.resize(firing.size());
    parallel_sources(setup.threads, static_cast<int>(firing.size()), [&](int k) {
        const int s = firing[static_cast<std::size_t>(k)];
        ForwardOptions options;
        options.store_history = false;
        ForwardResult result = run_forward(
            ops, grid,
            {SourceSpec::point_burst(positions[static_cast<std::size_t>(s)], setup.array.burst)},
            positions, time, options);
        result.recording.source_index = s;
        set.recordings[static_cast<std::size_t>(k)] = std::move(result.recording);
    });

    std::ostringstream provenance;
    provenance << "reference model: element_size=" << format_real(grid.hx)
               << " m, dt=" << format_real(dt) << " s, tree_depth=" << tree_depth
               << ", defect encoding=" << encoding_note
               << ", sources=" << firing.size() << "/" << positions.size();
    set.provenance = provenance.str();
    return set;
}

void write_observations(const ObservationSet& set, ArtifactManifest& manifest) {
    for (std::size_t s = 0; s < set.recordings.size(); ++s) {
        const std::string name = "observations/obs_" + zero_padded(static_cast<int>(s)) + ".rec";
        write_recording_binary(manifest.resolve(name), set.recordings[s]);
        manifest.add(name);
    }
    const std::string meta = "observations/provenance.txt";
    std::ofstream out(manifest.resolve(meta));
    out << set.provenance << "\n";
    manifest.add(meta);
}

ObservationSet read_observations(const std::filesystem::path& directory) {
    ObservationSet set;
    std::vector<std::filesystem::path> files;
    if (!std::filesystem::is_directory(directory)) {
        throw ConfigError("observation directory '" + directory.string() + "' does not exist");
    }
    for (const auto& entry : std::filesystem::directory_iterator(directory)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("obs_", 0) == 0 && ends_with(name, ".rec")) {
            files.push_back(entry.path());
        }
    }
    if (files.empty()) {
        throw ConfigError("no obs_*.rec files in '" + directory.string() + "'");
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
        set.recordings.push_back(read_recording_binary(file));
    }
    std::sort(set.recordings.begin(), set.recordings.end(),
              [](const WaveRecording& a, const WaveRecording& b) {
                  return a.source_index < b.source_index;
              });
    const std::filesystem::path meta = directory / "provenance.txt";
    if (std::filesystem::exists(meta)) {
        std::ifstream in(meta);
        std::getline(in, set.provenance);
    }
    return set;
}

// ---------------------------------------------------------------------------
// InverseProblem
// ---------------------------------------------------------------------------

InverseProblem::InverseProblem(ExperimentSetup setup,
                               const std::vector<WaveRecording>& observations)
    : setup_(std::move(setup)) {
    if (!setup_.material.nodal_mode()) {
        throw ConfigError("InverseProblem requires a nodal start model");
    }
    setup_.material.validate(setup_.grid);
    positions_ = setup_.array.positions(setup_.grid);
    firing_ = setup_.array.firing();
    if (observations.size() != firing_.size()) {
        throw ConfigError("observation count does not match the firing transducers");
    }

    const Index steps = setup_.time.step_count();
    observations_.reserve(observations.size());
    for (const WaveRecording& rec : observations) {
        if (rec.receivers.size() != positions_.size()) {
            throw ConfigError("observation receiver layout does not match the array");
        }
        if (rec.dt == setup_.time.dt && rec.samples.rows() == steps + 1) {
            observations_.push_back(rec);
        } else {
            observations_.push_back(resample_recording(rec, setup_.time.dt, steps));
        }
    }

    cuts_ = compute_cut_quadratures(setup_.grid, setup_.material, setup_.indicator,
                                    setup_.assembly.tree_depth);

    const Index n = setup_.grid.node_count();
    mask_.assign(static_cast<std::size_t>(n), 1);
    if (setup_.mask_mode == "auto" && !setup_.indicator.geometry.empty()) {
        for (Index i = 0; i < n; ++i) {
            if (setup_.indicator.geometry.is_void(setup_.grid.node_position(i))) {
                mask_[static_cast<std::size_t>(i)] = 0;
            }
        }
    }
}

Index InverseProblem::model_size() const {
    const Index n = setup_.grid.node_count();
    return setup_.material.tag == Scaling::separate ? 2 * n : n;
}

Eigen::VectorXd InverseProblem::initial_model() const {
    return Eigen::VectorXd::Ones(model_size());
}

MaterialModel InverseProblem::materialize(const Eigen::VectorXd& model) const {
    if (model.size() != model_size()) {
        throw ConfigError("model vector has the wrong size");
    }
    MaterialModel material = setup_.material;
    const Index n = setup_.grid.node_count();
    if (material.tag == Scaling::separate) {
        std::copy_n(model.data(), n, material.gamma_rho->coeffs.begin());
        std::copy_n(model.data() + n, n, material.gamma_c->coeffs.begin());
    } else {
        std::copy_n(model.data(), n, material.gamma->coeffs.begin());
    }
    return material;
}

Real InverseProblem::evaluate(const Eigen::VectorXd& model, Eigen::VectorXd* gradient) const {
    const MaterialModel material = materialize(model);
    const SystemOperators ops =
        assemble(setup_.grid, material, setup_.indicator, cuts_, setup_.assembly);

    // Per-experiment slots, reduced in a fixed order afterwards, so the
    // result does not depend on the number of workers.
    const int experiments = static_cast<int>(firing_.size());
    std::vector<Real> chi(static_cast<std::size_t>(experiments), 0.0);
    std::vector<GradientFields> fields(static_cast<std::size_t>(experiments));

    parallel_sources(setup_.threads, experiments, [&](int k) {
        const std::size_t ki = static_cast<std::size_t>(k);
        const std::size_t si = static_cast<std::size_t>(firing_[ki]);
        ForwardOptions options;
        options.store_history = gradient != nullptr;
        ForwardResult forward = run_forward(
            ops, setup_.grid, {SourceSpec::point_burst(positions_[si], setup_.array.burst)},
            positions_, setup_.time, options);
        chi[ki] = misfit(forward.recording, observations_[ki]);
        if (!gradient) {
            return;
        }
        const AdjointSource adjoint_source =
            make_adjoint_source(forward.recording, observations_[ki]);
        const WavefieldHistory adjoint =
            run_adjoint(ops, setup_.grid, adjoint_source, setup_.time);
        fields[ki] = accumulate_gradient(forward.history, adjoint, setup_.grid, material,
                                         setup_.indicator, cuts_, setup_.assembly, &mask_);
    });

    Real total = 0.0;
    for (int k = 0; k < experiments; ++k) {
        total += chi[static_cast<std::size_t>(k)];
    }
    if (gradient) {
        const Index n = setup_.grid.node_count();
        gradient->setZero(model_size());
        for (int k = 0; k < experiments; ++k) {
            const GradientFields& g = fields[static_cast<std::size_t>(k)];
            for (Index i = 0; i < n; ++i) {
                (*gradient)[i] += g.primary[static_cast<std::size_t>(i)];
            }
            if (!g.secondary.empty()) {
                for (Index i = 0; i < n; ++i) {
                    (*gradient)[n + i] += g.secondary[static_cast<std::size_t>(i)];
                }
            }
        }
    }
    return total;
}

DirectionalCheck directional_derivative_check(const InverseProblem& problem,
                                              const Eigen::VectorXd& model,
                                              const Eigen::VectorXd& direction, Real h) {
    DirectionalCheck check;
    Eigen::VectorXd gradient(model.size());
    problem.evaluate(model, &gradient);
    check.adjoint = gradient.dot(direction);
    const Real plus = problem.evaluate(model + h * direction, nullptr);
    const Real minus = problem.evaluate(model - h * direction, nullptr);
    check.finite_difference = (plus - minus) / (2.0 * h);
    check.relative_error = std::abs(check.adjoint - check.finite_difference) /
                           std::max(std::abs(check.finite_difference), 1e-300);
    return check;
}

// ---------------------------------------------------------------------------
// Inversion driver
// ---------------------------------------------------------------------------

namespace {

void write_model_fields(ArtifactManifest& manifest, const Grid& grid, Scaling tag,
                        const Eigen::VectorXd& model, const std::string& label) {
    const Index n = grid.node_count();
    if (tag == Scaling::separate) {
        write_field(manifest.resolve("gamma_rho_" + label + ".field"), grid, model.head(n));
        manifest.add("gamma_rho_" + label + ".field");
        write_field(manifest.resolve("gamma_c_" + label + ".field"), grid, model.tail(n));
        manifest.add("gamma_c_" + label + ".field");
    } else {
        write_field(manifest.resolve("gamma_" + label + ".field"), grid, model);
        manifest.add("gamma_" + label + ".field");
    }
}

} // namespace

InversionRun run_inversion_experiment(
    const ExperimentSetup& setup, ArtifactManifest* manifest, const ObservationSet* observations,
    const std::function<void(const InversionState&)>& on_iteration) {
    ObservationSet local;
    if (!observations) {
        if (setup.observations_source == "auto") {
            local = generate_observations(setup);
            if (manifest) {
                write_observations(local, *manifest);
            }
        } else {
            local = read_observations(setup.observations_source);
        }
        observations = &local;
    }

    InverseProblem problem(setup, observations->recordings);
    const BoxBounds bounds = model_bounds(setup.material);
    OptimizeOptions options;
    options.max_iterations = setup.max_iterations;

    const auto snapshot = [&](const InversionState& state) {
        if (manifest) {
            const bool wanted = std::find(setup.snapshot_iterations.begin(),
                                          setup.snapshot_iterations.end(),
                                          state.iterations) != setup.snapshot_iterations.end();
            if (wanted) {
                write_model_fields(*manifest, setup.grid, setup.material.tag, state.model,
                                   "iter_" + zero_padded(state.iterations));
            }
        }
        if (on_iteration) {
            on_iteration(state);
        }
    };

    InversionRun run;
    run.setup = problem.setup();
    run.state = minimize(
        [&problem](const Eigen::VectorXd& x, Eigen::VectorXd* g) {
            return problem.evaluate(x, g);
        },
        problem.initial_model(), bounds, options, snapshot);
    run.mask = problem.mask();

    if (manifest) {
        write_convergence_csv(manifest->resolve("convergence.csv"), run.state.trace);
        manifest->add("convergence.csv");
        write_model_fields(*manifest, setup.grid, setup.material.tag, run.state.model, "final");
    }
    return run;
}

// ---------------------------------------------------------------------------
// Forward studies
// ---------------------------------------------------------------------------

namespace {

std::vector<int> study_degrees(const Config& config) {
    std::vector<int> degrees;
    if (config.has("study", "degrees")) {
        for (Real v : config.get_reals("study", "degrees")) {
            degrees.push_back(static_cast<int>(v));
        }
    } else {
        degrees.push_back(static_cast<int>(config.get_int("grid", "degree", 1)));
    }
    return degrees;
}

// Relative L2 distance between the nodal solution and a reference
// function on [origin, x_max] (1D), integrated element by element so the
// cut element contributes exactly its physical part.
Real relative_l2_error(const Grid& grid, const Eigen::VectorXd& u,
                       const std::function<Real(Real)>& exact, Real x_max) {
    const QuadratureRule rule = gauss_legendre(grid.degree + 2);
    std::vector<Index> nodes;
    Real num = 0.0;
    Real den = 0.0;
    for (Index e = 0; e < grid.element_count(); ++e) {
        const Real lo = grid.element_origin(e).x;
        if (lo >= x_max) {
            break;
        }
        const Real hi = std::min(lo + grid.hx, x_max);
        const Real half = 0.5 * (hi - lo);
        const Real mid = 0.5 * (hi + lo);
        grid.element_nodes(e, nodes);
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const Real x = mid + half * rule.points[q];
            const Real w = half * rule.weights[q];
            const Vec2 ref{2.0 * (x - lo) / grid.hx - 1.0, 0.0};
            const BasisEval basis = evaluate_basis(grid, e, ref);
            Real uh = 0.0;
            for (std::size_t i = 0; i < nodes.size(); ++i) {
                uh += basis.values[i] * u[nodes[i]];
            }
            const Real ue = exact(x);
            num += w * (uh - ue) * (uh - ue);
            den += w * ue * ue;
        }
    }
    if (den <= 0.0) {
        throw NumericalError("relative_l2_error: reference is zero on the window");
    }
    return std::sqrt(num / den);
}

const Eigen::VectorXd& stored_state(const WavefieldHistory& history, Real time, Real dt) {
    const Index step = static_cast<Index>(std::llround(time / dt));
    for (std::size_t k = 0; k < history.steps.size(); ++k) {
        if (history.steps[k] == step) {
            return history.states[k];
        }
    }
    throw ConfigError("snapshot time " + format_real(time) +
                      " s is not on the stored-step grid (adjust [time] stride)");
}

ForwardStudyReport interface_study_1d(const Config& config, ArtifactManifest* manifest) {
    if (config.get_int("grid", "dimension", 1) != 1) {
        throw ConfigError("[study] kind interface_1d needs a 1D grid");
    }
    const Real length = config.get_length("grid", "extent_x");
    const Real element_size = config.get_length("grid", "element_size");
    const int tree_depth = static_cast<int>(config.get_int("grid", "tree_depth", 5));
    const Real rho0 = config.get_real("material", "rho0_kg_m3");
    const Real c0 = config.get_real("material", "c0_m_s");

    TimeSettings time;
    time.dt = config.get_real("time", "delta_t_s");
    time.duration = config.get_real("time", "duration_s");
    time.stride = static_cast<int>(config.get_int("time", "stride", 10));

    const ImplicitGeometry geometry = parse_geometry_section(config, "true_geometry");
    const Real gamma_void = config.get_real("true_geometry", "gamma_void", 1e-5);

    const Real x_f = config.get_real("study", "interface_position_m");
    const Real pulse_center = config.get_real("study", "pulse_center_m");
    const Real pulse_width = config.get_real("study", "pulse_width_m");
    const std::vector<Real> snapshot_times = config.get_reals("study", "snapshot_times_s");
    const Real rest_after = config.get_real("study", "rest_after_s");
    const std::vector<std::string> scalings =
        split_list(config.get_string("study", "scalings", "rho, c, rhoc"));
    const std::vector<int> degrees = study_degrees(config);
    config.reject_unused();

    // Free-free cavity [0, x_f]: the right-travelling pulse plus all of
    // its boundary images; both reflections preserve sign.
    const auto exact = [&](Real x, Real t) {
        Real sum = 0.0;
        for (int k = -6; k <= 6; ++k) {
            const Real shift = 2.0 * static_cast<Real>(k) * x_f - c0 * t;
            sum += gaussian_bell(x + shift, pulse_center, pulse_width) +
                   gaussian_bell(-x + shift, pulse_center, pulse_width);
        }
        return sum;
    };

    ForwardStudyReport report;
    report.kind = "interface_1d";
    std::vector<Index> void_nodes;
    for (const int degree : degrees) {
        const Grid grid = build_grid_1d(length, element_size, degree);
        // "At rest" is a statement about the void domain proper: nodes of
        // the cut element follow the physical side through their basis
        // support, so only nodes beyond that element are measured.
        const Real cut_right = grid.hx * std::ceil(x_f / grid.hx - 1e-12);
        void_nodes.clear();
        for (Index i = 0; i < grid.node_count(); ++i) {
            if (grid.node_position(i).x > cut_right + 0.05 * grid.hx) {
                void_nodes.push_back(i);
            }
        }
        for (const std::string& scaling : scalings) {
            MaterialModel material;
            material.rho0 = rho0;
            material.c0 = c0;
            material.tag = parse_scaling(scaling);
            material.gamma_geometry = geometry;
            material.gamma_void = gamma_void;

            AssemblyOptions assembly;
            assembly.tree_depth = tree_depth;
            const IndicatorField indicator;
            const SystemOperators ops = assemble(grid, material, indicator, assembly);

            const InitialState initial = gaussian_initial_state(
                grid, pulse_center, pulse_width, 1.0, c0,
                [x_f](const Vec2& p) { return p.x <= x_f; });
            ForwardOptions options;
            options.initial = &initial;
            options.store_history = true;
            const ForwardResult result = run_forward(ops, grid, {}, {}, time, options);

            ForwardStudyCase item;
            item.scaling = scaling;
            item.degree = degree;
            for (std::size_t t = 0; t < snapshot_times.size(); ++t) {
                const Eigen::VectorXd& state =
                    stored_state(result.history, snapshot_times[t], time.dt);
                const Real time_t = snapshot_times[t];
                item.errors.push_back(
                    {time_t, relative_l2_error(
                                 grid, state, [&](Real x) { return exact(x, time_t); }, x_f)});
                if (manifest) {
                    const std::string name = "u_" + scaling + "_p" + std::to_string(degree) +
                                             "_s" + std::to_string(t) + ".field";
                    write_field(manifest->resolve(name), grid, state);
                    manifest->add(name);
                }
            }
            for (std::size_t k = 0; k < result.history.steps.size(); ++k) {
                if (static_cast<Real>(result.history.steps[k]) * time.dt < rest_after) {
                    continue;
                }
                for (const Index i : void_nodes) {
                    item.void_rest_max =
                        std::max(item.void_rest_max, std::abs(result.history.states[k][i]));
                }
            }
            report.cases.push_back(std::move(item));
        }
    }
    return report;
}

ForwardStudyReport plate_study_2d(const Config& config, ArtifactManifest* manifest) {
    if (config.get_int("grid", "dimension", 2) != 2) {
        throw ConfigError("[study] kind plate_2d needs a 2D grid");
    }
    const Vec2 extent{config.get_length("grid", "extent_x"),
                      config.get_length("grid", "extent_y")};
    const Real element_size = config.get_length("grid", "element_size");
    const int tree_depth = static_cast<int>(config.get_int("grid", "tree_depth", 5));
    const Real rho0 = config.get_real("material", "rho0_kg_m3");
    const Real c0 = config.get_real("material", "c0_m_s");

    TimeSettings time;
    time.dt = config.get_real("time", "delta_t_s");
    time.duration = config.get_real("time", "duration_s");
    time.stride = static_cast<int>(config.get_int("time", "stride", 10));

    const ImplicitGeometry geometry = parse_geometry_section(config, "true_geometry");
    const Real gamma_void = config.get_real("true_geometry", "gamma_void", 1e-5);
    const std::vector<Real> snapshot_times = config.get_reals("study", "snapshot_times_s");
    const std::vector<std::string> scalings =
        split_list(config.get_string("study", "scalings", "rho, c, rhoc"));

    BurstSpec burst;
    burst.f_c = config.get_real("study", "f_c_hz", 500e3);
    burst.cycles = config.get_real("study", "cycles", 2.0);
    burst.amplitude = config.get_real("study", "amplitude", 1.0);
    const std::vector<int> degrees = study_degrees(config);
    config.reject_unused();

    ForwardStudyReport report;
    report.kind = "plate_2d";
    for (const int degree : degrees) {
        const Grid grid = build_grid(2, extent, Vec2{element_size, element_size}, degree);
        const Vec2 excitation{grid.origin.x + 0.5 * extent.x, grid.origin.y + extent.y};
        for (const std::string& scaling : scalings) {
            MaterialModel material;
            material.rho0 = rho0;
            material.c0 = c0;
            material.tag = parse_scaling(scaling);
            material.gamma_geometry = geometry;
            material.gamma_void = gamma_void;

            AssemblyOptions assembly;
            assembly.tree_depth = tree_depth;
            const IndicatorField indicator;
            const SystemOperators ops = assemble(grid, material, indicator, assembly);

            ForwardOptions options;
            options.store_history = true;
            const ForwardResult result = run_forward(
                ops, grid, {SourceSpec::point_burst(excitation, burst)}, {}, time, options);

            ForwardStudyCase item;
            item.scaling = scaling;
            item.degree = degree;
            for (std::size_t t = 0; t < snapshot_times.size(); ++t) {
                const Eigen::VectorXd& state =
                    stored_state(result.history, snapshot_times[t], time.dt);
                item.errors.push_back({snapshot_times[t], 0.0});
                if (manifest) {
                    const std::string name = "u_" + scaling + "_p" + std::to_string(degree) +
                                             "_s" + std::to_string(t) + ".field";
                    write_field(manifest->resolve(name), grid, state);
                    manifest->add(name);
                }
            }
            report.cases.push_back(std::move(item));
        }
    }
    return report;
}

void write_study_csv(const ForwardStudyReport& report, ArtifactManifest& manifest) {
    std::ofstream out(manifest.resolve("study_errors.csv"));
    out << "scaling,degree,time_s,relative_l2,void_rest_max\n";
    for (const ForwardStudyCase& item : report.cases) {
        for (const StudySnapshotError& err : item.errors) {
            out << item.scaling << "," << item.degree << "," << format_real(err.time) << ","
                << format_real(err.relative_l2) << "," << format_real(item.void_rest_max)
                << "\n";
        }
    }
    manifest.add("study_errors.csv");
}

} // namespace

ForwardStudyReport run_forward_study(const Config& config, ArtifactManifest* manifest) {
    const std::string kind = config.get_string("study", "kind");
    ForwardStudyReport report;
    if (kind == "interface_1d") {
        report = interface_study_1d(config, manifest);
    } else if (kind == "plate_2d") {
        report = plate_study_2d(config, manifest);
    } else {
        throw ConfigError("[study] kind must be 'interface_1d' or 'plate_2d'");
    }
    if (manifest) {
        write_study_csv(report, *manifest);
    }
    return report;
}

// ---------------------------------------------------------------------------
// Idealized gradient study
// ---------------------------------------------------------------------------

GradientStudyReport idealized_gradient_study(const Config& config, ArtifactManifest* manifest,
                                             int threads, const ObservationSet* observations) {
    ExperimentSetup setup = load_setup(config);
    setup.threads = threads;
    const std::vector<std::string> scalings =
        split_list(config.get_string("gradient_study", "scalings", "rho, c"));
    // Scaling value of the idealized state inside the true defect; 1.0
    // evaluates the plain initial gradient.
    const Real gamma_state = config.get_real("gradient_study", "gamma_state", 1.0);
    config.reject_unused();
    if (!(gamma_state > 0.0 && gamma_state <= 1.0)) {
        throw ConfigError("[gradient_study] gamma_state must be in (0, 1]");
    }

    ObservationSet local;
    if (!observations) {
        local = generate_observations(setup);
        observations = &local;
    }

    GradientStudyReport report;
    report.grid = setup.grid;
    report.gamma_state = gamma_state;
    const BoxBounds bounds = model_bounds(setup.material);

    // The idealized state, projected onto the basis like the inversion's
    // own iterates and clipped to the same box.
    const ScalingField state = clip_field(l2_project(
        setup.grid,
        [&](const Vec2& x) { return setup.true_geometry.is_void(x) ? gamma_state : 1.0; },
        setup.true_geometry, setup.assembly.tree_depth, bounds.lower, bounds.upper));

    for (const std::string& scaling : scalings) {
        ExperimentSetup current = setup;
        current.material.tag = parse_scaling(scaling);
        apply_start_model(current.material, current.grid, bounds.lower, bounds.upper);

        InverseProblem problem(current, observations->recordings);
        const Index n = setup.grid.node_count();
        Eigen::VectorXd model = problem.initial_model();
        for (Index i = 0; i < n; ++i) {
            model[i] = state.coeffs[static_cast<std::size_t>(i)];
        }
        if (problem.model_size() == 2 * n) {
            for (Index i = 0; i < n; ++i) {
                model[n + i] = state.coeffs[static_cast<std::size_t>(i)];
            }
        }
        Eigen::VectorXd gradient(problem.model_size());
        problem.evaluate(model, &gradient);

        GradientStudyCase item;
        item.scaling = scaling;
        item.fields.primary.assign(gradient.data(), gradient.data() + n);
        if (problem.model_size() == 2 * n) {
            item.fields.secondary.assign(gradient.data() + n, gradient.data() + 2 * n);
        }

        Index inside = 0;
        for (Index i = 0; i < n; ++i) {
            if (setup.true_geometry.is_void(setup.grid.node_position(i))) {
                item.void_mean += gradient[i];
                ++inside;
            }
        }
        if (inside == 0) {
            throw ConfigError("gradient study: no grid nodes inside the true defect");
        }
        item.void_mean /= static_cast<Real>(inside);

        if (manifest) {
            const Eigen::VectorXd primary = gradient.head(n);
            write_field(manifest->resolve("gradient_" + scaling + ".field"), setup.grid,
                        primary);
            manifest->add("gradient_" + scaling + ".field");
            const Real scale = primary.cwiseAbs().maxCoeff();
            if (scale > 0.0) {
                write_field(manifest->resolve("gradient_" + scaling + "_normalized.field"),
                            setup.grid, (primary / scale).eval());
                manifest->add("gradient_" + scaling + "_normalized.field");
            }
        }
        report.cases.push_back(std::move(item));
    }
    return report;
}

} // namespace voidwave
